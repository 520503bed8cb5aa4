"""Exception taxonomy shared across the package.

Callers are expected to catch these by family. Everything derives from
DivcertError so the CLI can map failures to exit codes without enumerating
modules.
"""


class DivcertError(Exception):
    pass


class DomainError(DivcertError, ValueError):
    """A mathematical precondition on the inputs fails (radius at or below
    the validity radius, nonpositive time, negative Sobolev exponent)."""


class InputError(DivcertError, ValueError):
    """Malformed arguments: non-unit direction vectors, wrong dimensions,
    out-of-range indices, unserializable symbols."""


class ConfigError(DivcertError, ValueError):
    """Experiment config rejected (unknown keys, wrong types, bad values)."""


class SizeError(DivcertError, ValueError):
    """A lattice block would overflow a 64-bit point count."""


class ValidationError(DivcertError, ValueError):
    """A schedule failed the independent invariant sweep."""


class ConstructionError(DivcertError, RuntimeError):
    """A builder could not satisfy its contract for the given inputs."""


class RegimeError(DivcertError, RuntimeError):
    """Operation requested outside its numeric regime, e.g. direct
    evaluation on an annulus whose radii exist only as logarithms."""


class StationaryPhaseError(DivcertError, RuntimeError):
    """The radial phase derivative vanishes inside an annulus where the
    integration-by-parts split needs it bounded away from zero."""


class BudgetError(DivcertError, RuntimeError):
    """Node or refinement budget exhausted before reaching tolerance.

    Carries the best value and the achieved error bound so callers can
    decide whether the partial result is still useful.
    """

    def __init__(self, message, value=None, abs_error=None):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error


class InternalError(DivcertError, RuntimeError):
    """An invariant the construction is supposed to guarantee failed at
    runtime. Indicates a bug, not a user error."""
