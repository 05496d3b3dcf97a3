"""Exception hierarchy for the scattering solver.

Every error carries the pipeline stage it came from so the CLI can report
``<stage>: <message>`` without guessing.
"""


class SolverError(Exception):
    """Base class for numerical failures of the pipeline."""

    stage = "solver"


class ResonanceError(SolverError):
    stage = "params"


class CutOnContourError(SolverError):
    stage = "surface"


class PathError(SolverError):
    stage = "surface"


class DegenerateError(SolverError):
    stage = "params"


class BranchError(SolverError):
    stage = "jacobi"


class GenericityError(SolverError):
    stage = "jacobi"


class NonIntegerError(SolverError):
    stage = "jacobi"


class NearPoleError(SolverError):
    stage = "solver"


class SingularSystemError(SolverError):
    stage = "solver"


class PoleError(SolverError):
    stage = "factor"


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad value)."""
