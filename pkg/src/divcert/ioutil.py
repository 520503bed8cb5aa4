"""Small filesystem helpers shared by the library and the CLI."""

import os
import tempfile


def atomic_write_text(path, text):
    """Write text to path via a temp file and rename, so readers never see
    a partial file. The temp file lives in the target directory to keep
    the rename atomic on the same filesystem."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".divcert-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
