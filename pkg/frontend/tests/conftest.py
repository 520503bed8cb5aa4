import json
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """Real artifacts from the divcert CLI, produced the same way a user
    would: this package may only consume the documented file formats."""
    root = tmp_path_factory.mktemp("artifacts")
    config = root / "config.json"
    config.write_text(json.dumps({"K": 2}))

    def run(*argv):
        proc = subprocess.run([sys.executable, "-m", "divcert", *argv],
                              capture_output=True, text=True, timeout=300)
        assert proc.returncode == 0, proc.stderr
        return proc

    blowup_csv = root / "blowup.csv"
    run("certify", "--config", str(config), "--out", str(blowup_csv))
    sobolev_json = root / "sobolev.json"
    run("sobolev", "--config", str(config), "--out", str(sobolev_json))

    return {
        "blowup_csv": blowup_csv,
        "certs_json": root / "blowup.json",
        "sobolev_json": sobolev_json,
    }
