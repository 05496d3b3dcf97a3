"""scikit-learn style front end.

``fit`` solves the boundary-value problem for the configured panel and wave;
``predict`` maps polar points ``(r, theta)`` to ``P = |psi|``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .jacobi import ZETA0
from .params import PhysicalInputs
from .pipeline import residual_battery, solve


class PanelScatteringModel(BaseEstimator):
    """Plane wave scattered by a rigid screen joined to a perforated membrane panel.

    Parameters
    ----------
    abs_k, arg_k : float
        Modulus and argument of the complex wave number (``0 < arg_k < pi/2``).
    theta0 : float
        Incidence angle in ``(0, pi/2)``.
    abs_alpha : float
        Modulus of the panel parameter; its phase is ``2 arg_k``.
    rho_f_over_m0 : float
        Fluid density over membrane surface density.
    d, d1, d2, a : float
        Cell dimensions and aperture radius.
    tau : complex or None
        Overrides the perforation parameter computed from the cell geometry.
    nodes, field_nodes : int or None
        Quadrature sizes; ``None`` picks them from the parameters.
    zeta0 : complex
        Base point of the inversion problem (any point off the axis and cuts).

    Attributes
    ----------
    solution_ : pipeline.Solution
    params_ : ModelParams
    """

    def __init__(
        self,
        abs_k=1.0,
        arg_k=math.atan(0.1),
        theta0=math.pi / 4,
        abs_alpha=10.0,
        rho_f_over_m0=100.0,
        d=0.01,
        d1=0.01,
        d2=0.01,
        a=0.001,
        tau=None,
        nodes=None,
        field_nodes=None,
        zeta0=ZETA0,
    ):
        self.abs_k = abs_k
        self.arg_k = arg_k
        self.theta0 = theta0
        self.abs_alpha = abs_alpha
        self.rho_f_over_m0 = rho_f_over_m0
        self.d = d
        self.d1 = d1
        self.d2 = d2
        self.a = a
        self.tau = tau
        self.nodes = nodes
        self.field_nodes = field_nodes
        self.zeta0 = zeta0

    def _inputs(self) -> PhysicalInputs:
        return PhysicalInputs(
            abs_k=float(self.abs_k),
            arg_k=float(self.arg_k),
            theta0=float(self.theta0),
            abs_alpha=float(self.abs_alpha),
            rho_f_over_m0=float(self.rho_f_over_m0),
            d=float(self.d),
            d1=float(self.d1),
            d2=float(self.d2),
            a=float(self.a),
        )

    def fit(self, X=None, y=None):
        """Solve the problem.  ``X`` and ``y`` are ignored; the model has no data."""
        for name in ("nodes", "field_nodes"):
            val = getattr(self, name)
            if val is not None and (int(val) != val or val < 10):
                raise ValueError(f"{name} must be an integer >= 10 or None, got {val!r}")
        tau = None if self.tau is None else complex(self.tau)
        self.solution_ = solve(
            self._inputs(),
            tau=tau,
            nodes=None if self.nodes is None else int(self.nodes),
            field_nodes=None if self.field_nodes is None else int(self.field_nodes),
            zeta0=complex(self.zeta0),
        )
        self.params_ = self.solution_.params
        self.n_features_in_ = 2
        return self

    def _points(self, X):
        X = check_array(X, dtype=float, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValueError(f"X must have two columns (r, theta), got {X.shape[1]}")
        if np.any(X[:, 0] <= 0):
            raise ValueError("r must be positive")
        if np.any(np.abs(np.sin(X[:, 1])) < 1e-12):
            raise ValueError("theta on a boundary ray (0 or pi) is not allowed")
        return X[:, 0], X[:, 1]

    def predict(self, X) -> np.ndarray:
        """``P(r, theta)`` for rows ``(r, theta)`` of ``X``."""
        check_is_fitted(self, "solution_")
        r, th = self._points(X)
        return self.solution_.field.P(r, th)

    def scattered(self, X) -> np.ndarray:
        """Complex scattered potential at rows ``(r, theta)``."""
        check_is_fitted(self, "solution_")
        r, th = self._points(X)
        return self.solution_.field.scattered(r, th)

    def residuals(self):
        check_is_fitted(self, "solution_")
        return residual_battery(self.solution_)
