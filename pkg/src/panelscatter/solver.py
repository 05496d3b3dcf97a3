"""Solution of the vector boundary-value problem ``G Phi+ + Phi- = g`` on ``L``.

``Phi^{+-}(s) = +-[X^{+-}(s)]^{-1} [C (1, eta0)/(s - zeta0) + N Psi1(s) + Psi2(s)]``
where ``Psi1, Psi2`` are Cauchy integrals of ``X^- J`` weighted by the
right-hand side.  ``C`` removes the pole of ``X^{-1}`` at ``zeta1`` and ``N``
enforces zero net displacement at the junction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NearPoleError, SingularSystemError
from .factor import BoundaryFactors, FactorEvaluator
from .params import coefficient_matrix, f_sqrt, gamma
from .quadrature import cauchy_off_axis, staggered_pv

J = np.array([-1.0, 1.0])
NEAR_POLE = 1e-3
SINGULAR_TOL = 1e-14


@dataclass(frozen=True)
class SolutionConstants:
    C: complex
    N: complex
    Pi0: complex
    Pi1: complex
    Pi2: complex
    Omega0: complex
    Omega1: complex
    Omega2: complex
    eta0: complex

    @property
    def det(self) -> complex:
        return self.Pi0 * self.Omega1 - self.Pi1 * self.Omega0


@dataclass(frozen=True)
class BoundaryState:
    """Everything known on ``L`` at a set of real points ``t``."""

    t: np.ndarray
    plus: BoundaryFactors
    minus: BoundaryFactors
    D1: np.ndarray  # jump of Psi1, shape (n, 2)
    D2: np.ndarray  # jump of Psi2
    pv1: np.ndarray
    pv2: np.ndarray

    def psi(self, which: int, side: int) -> np.ndarray:
        D, pv = (self.D1, self.pv1) if which == 1 else (self.D2, self.pv2)
        return pv + 0.5 * side * D


def _apply(f: BoundaryFactors, v: np.ndarray) -> np.ndarray:
    # [[L1, -L2], [-L2, L0]] @ v
    return np.stack([f.Lambda1 * v[:, 0] - f.Lambda2 * v[:, 1], -f.Lambda2 * v[:, 0] + f.Lambda0 * v[:, 1]], axis=1)


def _X_times_J(f: BoundaryFactors) -> np.ndarray:
    # X = exp(2 chi1) [[L0, L2], [L2, L1]]
    e = np.exp(2.0 * f.chi1)
    return np.stack([e * (-f.Lambda0 + f.Lambda2), e * (-f.Lambda2 + f.Lambda1)], axis=1)


class BoundaryValueSolver:
    """Cauchy integrals ``Psi``, the constants ``C, N`` and ``Phi^{+-}`` on ``L``."""

    def __init__(self, factors: FactorEvaluator):
        self.factors = factors
        self.params = factors.params
        self.grid = factors.grid
        dist = np.min(np.abs(self.grid.t + self.params.k_sin))
        if dist < NEAR_POLE * abs(self.params.k):
            raise NearPoleError(
                f"incident-wave pole within {dist:.2e} of a quadrature node; change the node count"
            )

    # --- densities ---------------------------------------------------------
    def _weights(self, t):
        p = self.params
        t = np.asarray(t, dtype=float)
        base = 1.0 / (gamma(t, p) * (t * t - p.mu ** 2))
        return base, -2j * p.alpha * base / (t + p.k_sin)

    def densities(self, t, minus: BoundaryFactors):
        XJ = _X_times_J(minus)
        b1, b2 = self._weights(t)
        return XJ * b1[:, None], XJ * b2[:, None]

    @cached_property
    def _node_densities(self):
        t = self.grid.t
        return self.densities(t, self.factors.node_factors[1])

    @cached_property
    def _mid_densities(self):
        t = self.grid.midpoints.t
        return self.densities(t, self.factors.boundary_factors(t)[1])

    def _state(self, t, plus, minus, D1, D2) -> BoundaryState:
        (n1, n2), (m1, m2) = self._node_densities, self._mid_densities
        pv1 = staggered_pv(n1, m1, t, self.grid, D1)
        pv2 = staggered_pv(n2, m2, t, self.grid, D2)
        return BoundaryState(t, plus, minus, D1, D2, pv1, pv2)

    @cached_property
    def node_state(self) -> BoundaryState:
        plus, minus = self.factors.node_factors
        return self._state(self.grid.t, plus, minus, *self._node_densities)

    def boundary_state(self, t) -> BoundaryState:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        plus, minus = self.factors.boundary_factors(t)
        D1, D2 = self.densities(t, minus)
        return self._state(t, plus, minus, D1, D2)

    def psi(self, s):
        """``(Psi1(s), Psi2(s))`` off the axis, each of shape ``(len(s), 2)``."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        ns = self.node_state
        return cauchy_off_axis(ns.D1, s, self.grid), cauchy_off_axis(ns.D2, s, self.grid)

    # --- constants ---------------------------------------------------------
    @cached_property
    def constants(self) -> SolutionConstants:
        p = self.params
        jac = self.factors.jac
        z0, z1 = jac.zeta0, jac.zeta1
        w0 = complex(f_sqrt(z0, p))
        l0 = z0 * z0 - p.mu ** 2
        eta0 = p.m / (l0 + w0)
        l1 = z1 * z1 - p.mu ** 2
        ratio = (jac.w1 + l1) / p.m
        psi1, psi2 = self.psi(z1)
        Pi0 = (ratio + eta0) / (z1 - z0)
        Pi1 = ratio * psi1[0, 0] + psi1[0, 1]
        Pi2 = ratio * psi2[0, 0] + psi2[0, 1]

        ns = self.node_state
        t = ns.t
        P, M = ns.plus, ns.minus
        g = gamma(t, p)
        W = self.grid.weights
        w0_dens = (P.Lambda1 - M.Lambda1 - eta0 * P.Lambda2 + eta0 * M.Lambda2) * g / (t - z0)
        Om0 = complex(np.sum(W * w0_dens))
        Om = []
        for which in (1, 2):
            pp, pm = ns.psi(which, 1), ns.psi(which, -1)
            dens = (P.Lambda1 * pp[:, 0] - M.Lambda1 * pm[:, 0] - P.Lambda2 * pp[:, 1] + M.Lambda2 * pm[:, 1]) * g
            Om.append(complex(np.sum(W * dens)))
        Om1, Om2 = Om
        det = Pi0 * Om1 - Pi1 * Om0
        scale = max(abs(Pi0 * Om1), abs(Pi1 * Om0), 1e-300)
        if abs(det) < SINGULAR_TOL * scale:
            raise SingularSystemError(f"the 2x2 system for C and N is singular (|det| = {abs(det):.3e})")
        C = (Pi1 * Om2 - Pi2 * Om1) / det
        N = (Pi2 * Om0 - Pi0 * Om2) / det
        return SolutionConstants(C, N, Pi0, Pi1, Pi2, Om0, Om1, Om2, eta0)

    # --- solution on L -------------------------------------------------------
    def _bracket(self, state: BoundaryState, side: int) -> np.ndarray:
        c = self.constants
        pole = c.C / (state.t - self.factors.jac.zeta0)
        return (np.stack([pole, c.eta0 * pole], axis=1)
                + c.N * state.psi(1, side) + state.psi(2, side))

    def phi_pm(self, t=None, state: BoundaryState | None = None):
        """``(Phi+, Phi-)`` at real points, each of shape ``(len(t), 2)``."""
        if state is None:
            state = self.node_state if t is None else self.boundary_state(t)
        plus = _apply(state.plus, self._bracket(state, 1))
        minus = -_apply(state.minus, self._bracket(state, -1))
        return plus, minus

    def rhs(self, t) -> np.ndarray:
        """Right-hand side ``g(t)``, shape ``(len(t), 2)``."""
        p = self.params
        t = np.atleast_1d(np.asarray(t, dtype=float))
        scal = (self.constants.N - 2j * p.alpha / (t + p.k_sin)) / (gamma(t, p) * (t * t - p.mu ** 2))
        return scal[:, None] * J[None, :]

    def boundary_residual(self, t) -> float:
        """``max_t |G Phi+ + Phi- - g|`` (max-norm over components)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        plus, minus = self.phi_pm(t)
        G = coefficient_matrix(t, self.params)
        res = np.einsum("nij,nj->ni", G, plus) + minus - self.rhs(t)
        return float(np.max(np.abs(res)))

    def displacement_integral(self) -> complex:
        """``int_L gamma (Phi0+ + Phi0-) dt``, which the solution makes vanish."""
        plus, minus = self.phi_pm()
        t = self.grid.t
        return complex(np.sum(self.grid.weights * gamma(t, self.params) * (plus[:, 0] + minus[:, 0])))

    def pole_residue(self, radius: float = 1e-4, samples: int = 16):
        """Contour average of ``(s - zeta1) X^{-1}(s) [bracket](s)`` around ``zeta1``."""
        z1 = self.factors.jac.zeta1
        s = z1 + radius * np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
        c = self.constants
        psi1, psi2 = self.psi(s)
        br = c.C / (s - self.factors.jac.zeta0)
        vec = np.stack([br, c.eta0 * br], axis=1) + c.N * psi1 + psi2
        X = self.factors.X(s)
        sol = np.linalg.solve(X, vec[..., None])[..., 0]
        res = ((s - z1)[:, None] * sol).mean(axis=0)
        return res, np.abs(sol).mean(axis=0)
