"""Matrix factors ``X(s)`` of the Chebotarev-Khrapkov coefficient.

``X(s) = exp(chi1) [cosh(w chi2) I + sinh(w chi2) A(s)/w]`` with ``w = f_sqrt(s)``
and ``A(s) = [[l, m], [m, -l]]``.  The two scalar functions are

* ``chi1 = (1/4 pi i) int_L log Delta dt/(t - s) + 1/2 int_Gamma dt/(t - s)``
* ``chi2 = (1/4 pi i) int_L log eps dt/((t - s) f_sqrt) + 1/2 (int_Gamma + m_a int_a + m_b int_b) dt/((t - s) xi)``

and ``chi2`` switches to the equivalent ``(1/s) int ... t dt/(t - s)`` form
when ``|s| > 1``.  The contour ``Gamma`` runs from ``q0`` back to the base
branch point ``-s2`` and out again to ``q1``; where it crosses ``L`` the jumps
of ``chi1`` and ``w chi2`` are ``+-i pi`` and cancel in ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BranchError, PoleError
from .jacobi import JacobiSolution, continuous_log
from .params import ModelParams, coefficient_matrix, eigen_data, f_sqrt
from .quadrature import CircleGrid, cauchy_off_axis, staggered_pv
from .surface import EllipticSurface, SurfacePath

SWITCH_RADIUS = 1.0


@dataclass(frozen=True)
class BoundaryFactors:
    """``Lambda``-functions on ``L`` for one side (``+`` or ``-``).

    ``inverse`` is ``[[Lambda1, -Lambda2], [-Lambda2, Lambda0]]``.
    """

    chi1: np.ndarray
    wchi2: np.ndarray
    Lambda0: np.ndarray
    Lambda1: np.ndarray
    Lambda2: np.ndarray

    @property
    def inverse(self) -> np.ndarray:
        out = np.empty(self.chi1.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = self.Lambda1
        out[..., 0, 1] = -self.Lambda2
        out[..., 1, 0] = -self.Lambda2
        out[..., 1, 1] = self.Lambda0
        return out


def _matrix_exp_parts(t, chi1, wchi2, params):
    w = f_sqrt(t, params)
    l = np.asarray(t, dtype=complex) ** 2 - params.mu ** 2
    ch, sh = np.cosh(wchi2), np.sinh(wchi2) / w
    return w, l, ch, sh


class FactorEvaluator:
    """Evaluates ``chi1``, ``chi2``, ``X^{+-}`` and their inverses.

    Parameters
    ----------
    params, surf, jac
        Model constants, the surface, and the solved inversion problem.
    grid
        Circle grid used for the Cauchy integrals over ``L``.
    """

    def __init__(self, params: ModelParams, surf: EllipticSurface, jac: JacobiSolution, grid: CircleGrid):
        self.params = params
        self.surf = surf
        self.jac = jac
        self.grid = grid
        t = grid.t
        ed = eigen_data(t, params)
        self._log_delta = continuous_log(ed.Delta)
        self._log_eps = continuous_log(ed.epsilon)
        for name, lg in (("Delta", self._log_delta), ("epsilon", self._log_eps)):
            if abs(lg[0].imag) > 0.5 or abs(lg[-1].imag) > 0.5:
                raise BranchError(f"log {name} does not return to 0 along the contour")
        self._w_nodes = f_sqrt(t, params)
        self._tail_delta = -params.k * params.tau
        self.path0 = surf.path(jac.zeta0, 1)
        self.path1 = surf.path(jac.zeta1, jac.sheet1)

    # --- logarithms with the contour branch ---------------------------------
    def _branch(self, principal, nodes, t):
        t = np.asarray(t, dtype=float)
        ref = np.interp(t, self.grid.t, nodes.imag)
        return principal + 2j * np.pi * np.round((ref - principal.imag) / (2 * np.pi))

    def log_delta(self, t):
        return self._branch(np.log(eigen_data(t, self.params).Delta), self._log_delta, t)

    def log_eps(self, t):
        return self._branch(np.log(eigen_data(t, self.params).epsilon), self._log_eps, t)

    # --- contour terms ---------------------------------------------------------
    @property
    def gamma_paths(self) -> tuple[tuple[int, SurfacePath], ...]:
        """``Gamma`` as signed paths: minus the path to ``q0``, plus the path to ``q1``."""
        return (-1, self.path0), (1, self.path1)

    def _gamma_log(self, s):
        return sum(sign * p.log_integral(s) for sign, p in self.gamma_paths)

    def _contour_cauchy(self, s, weighted: bool):
        phi = (lambda t: t) if weighted else None
        out = sum(sign * p.cauchy(s, phi) for sign, p in self.gamma_paths)
        if self.jac.m_a:
            out = out + self.jac.m_a * self.surf.cycle_cauchy("a", s, phi)
        if self.jac.m_b:
            out = out + self.jac.m_b * self.surf.cycle_cauchy("b", s, phi)
        return out

    @cached_property
    def h0(self) -> complex:
        """Limit of ``f_sqrt(s) chi2(s)`` at infinity."""
        ident = lambda t: t  # noqa: E731
        total = sum(sign * p.integral(ident) for sign, p in self.gamma_paths)
        if self.jac.m_a:
            total += self.jac.m_a * self.surf.cycle_integral("a", ident)
        if self.jac.m_b:
            total += self.jac.m_b * self.surf.cycle_integral("b", ident)
        return -0.5 * complex(total)

    # --- chi1, chi2 off the axis ---------------------------------------------
    def _check_pole(self, s):
        if np.any(np.abs(np.asarray(s) - self.jac.zeta0) < 1e-12):
            raise PoleError("chi1 has a logarithmic singularity at zeta0")

    def chi1(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        self._check_pole(s)
        lin = 0.5 * cauchy_off_axis(self._log_delta, s, self.grid, tail=self._tail_delta)
        return lin + 0.5 * self._gamma_log(s)

    def chi2(self, s, form: str | None = None):
        """``chi2`` at points off ``L``; ``form`` is ``'inner'``, ``'outer'`` or automatic."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        inner = self._chi2_inner(s)
        if form == "inner":
            return inner
        outer = self._chi2_outer(s)
        if form == "outer":
            return outer
        return np.where(np.abs(s) > SWITCH_RADIUS, outer, inner)

    def _chi2_inner(self, s):
        dens = self._log_eps / self._w_nodes
        return 0.5 * cauchy_off_axis(dens, s, self.grid) + 0.5 * self._contour_cauchy(s, False)

    def _chi2_outer(self, s):
        dens = self._log_eps * self.grid.t / self._w_nodes
        return (0.5 * cauchy_off_axis(dens, s, self.grid) + 0.5 * self._contour_cauchy(s, True)) / s

    def X(self, s):
        """``X(s)`` off the axis, shape ``s.shape + (2, 2)``."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        c1 = self.chi1(s)
        wc2 = f_sqrt(s, self.params) * self.chi2(s)
        w, l, ch, sh = _matrix_exp_parts(s, c1, wc2, self.params)
        e = np.exp(c1)
        out = np.empty(s.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = e * (ch + l * sh)
        out[..., 0, 1] = e * self.params.m * sh
        out[..., 1, 0] = out[..., 0, 1]
        out[..., 1, 1] = e * (ch - l * sh)
        return out

    # --- boundary values on L ------------------------------------------------
    @cached_property
    def _mid_densities(self):
        # the same densities on the midpoint grid, for points close to a knot
        tm = self.grid.midpoints.t
        return self.log_delta(tm), self.log_eps(tm), f_sqrt(tm, self.params)

    def chi_pm(self, t):
        """``(chi1+, chi1-, w chi2+, w chi2-)`` at real points ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        at_nodes = t.shape == self.grid.t.shape and np.array_equal(t, self.grid.t)
        ld = self._log_delta if at_nodes else self.log_delta(t)
        le = self._log_eps if at_nodes else self.log_eps(t)
        w = self._w_nodes if at_nodes else f_sqrt(t, self.params)
        ld_m, le_m, w_m = self._mid_densities
        tm = self.grid.midpoints.t
        g1 = 0.5 * self._gamma_log(t.astype(complex))
        c1 = 0.5 * staggered_pv(self._log_delta, ld_m, t, self.grid, ld, tail=self._tail_delta) + g1
        small = np.abs(t) <= SWITCH_RADIUS
        wc2 = np.empty(t.shape, dtype=complex)
        if np.any(small):
            ts = t[small]
            pv = staggered_pv(self._log_eps / self._w_nodes, le_m / w_m, ts, self.grid, le[small] / w[small])
            val = 0.5 * pv + 0.5 * self._contour_cauchy(ts.astype(complex), False)
            wc2[small] = w[small] * val
        if np.any(~small):
            tb = t[~small]
            pv = staggered_pv(self._log_eps * self.grid.t / self._w_nodes, le_m * tm / w_m, tb, self.grid,
                              le[~small] * tb / w[~small])
            val = 0.5 * pv + 0.5 * self._contour_cauchy(tb.astype(complex), True)
            wc2[~small] = w[~small] * val / tb
        return c1 + 0.25 * ld, c1 - 0.25 * ld, wc2 + 0.25 * le, wc2 - 0.25 * le

    def boundary_factors(self, t) -> tuple[BoundaryFactors, BoundaryFactors]:
        """``Lambda``-functions on both sides of ``L`` at real ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c1p, c1m, wc2p, wc2m = self.chi_pm(t)
        out = []
        for c1, wc2 in ((c1p, wc2p), (c1m, wc2m)):
            w, l, ch, sh = _matrix_exp_parts(t, c1, wc2, self.params)
            e = np.exp(-c1)
            out.append(BoundaryFactors(c1, wc2, e * (ch + l * sh), e * (ch - l * sh), self.params.m * e * sh))
        return out[0], out[1]

    @cached_property
    def node_factors(self) -> tuple[BoundaryFactors, BoundaryFactors]:
        """Boundary factors at the grid knots (shared by the solver and the field)."""
        return self.boundary_factors(self.grid.t)

    def X_pm(self, t):
        """``(X+, X-)`` at real ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c1p, c1m, wc2p, wc2m = self.chi_pm(t)
        out = []
        for c1, wc2 in ((c1p, wc2p), (c1m, wc2m)):
            w, l, ch, sh = _matrix_exp_parts(t, c1, wc2, self.params)
            e = np.exp(c1)
            X = np.empty(t.shape + (2, 2), dtype=complex)
            X[..., 0, 0] = e * (ch + l * sh)
            X[..., 0, 1] = e * self.params.m * sh
            X[..., 1, 0] = X[..., 0, 1]
            X[..., 1, 1] = e * (ch - l * sh)
            out.append(X)
        return out[0], out[1]

    def X_pm_inv(self, t):
        p, m = self.boundary_factors(t)
        return p.inverse, m.inverse

    def factorization_residual(self, t) -> float:
        """``max_t || G(t) - X+(t) [X-(t)]^{-1} ||_inf`` (max row sum)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        Xp, _ = self.X_pm(t)
        _, Xm_inv = self.X_pm_inv(t)
        diff = coefficient_matrix(t, self.params) - Xp @ Xm_inv
        return float(np.max(np.abs(diff).sum(axis=-1)))
