"""Wiener-Hopf solution for a plane wave hitting a rigid screen joined to a perforated membrane panel."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import ConfigError, SolverError
from .params import ModelParams, PhysicalInputs, derive_params
from .pipeline import Solution, residual_battery, solve
from .presets import figure_preset
from .estimator import PanelScatteringModel

__all__ = [
    "ConfigError",
    "ModelParams",
    "PanelScatteringModel",
    "PhysicalInputs",
    "Solution",
    "SolverError",
    "derive_params",
    "figure_preset",
    "residual_battery",
    "solve",
    "__version__",
]
