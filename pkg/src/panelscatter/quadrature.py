"""Quadrature engines for the real axis and for finite segments.

The real axis is mapped onto the unit circle by ``t = -2i (u + i)/(u - i)``,
``u = exp(i theta)``, with ``2n + 1`` equispaced knots
``theta_j = 2 pi j/(2n + 1)``.  Integrals over the axis use the periodic
composite rule on those knots and Cauchy integrals use the matching
trigonometric-interpolation formula, so the discrete Plemelj relation
``Psi_+ - Psi_- = S`` holds to rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# node counts for the two uses of the circle grid
N_FACTOR = 1000
N_FIELD = 400


def to_circle(s):
    """``sigma = i (s - 2i)/(s + 2i)``: maps the real axis onto ``|sigma| = 1``."""
    s = np.asarray(s, dtype=complex)
    return 1j * (s - 2j) / (s + 2j)


def from_circle(u):
    u = np.asarray(u, dtype=complex)
    return -2j * (u + 1j) / (u - 1j)


@dataclass(frozen=True)
class CircleGrid:
    """Knots on the unit circle, ordered so that ``t`` increases from -inf to +inf.

    ``shift`` rotates the knots by that fraction of a step; ``shift=0.5``
    gives the midpoints of the unshifted grid.
    """

    n: int
    shift: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("circle grid needs n >= 2")

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    @cached_property
    def theta(self) -> np.ndarray:
        j = np.arange(-self.n, self.n + 1)
        th = 2 * np.pi * (j + self.shift) / self.size
        th = np.where(th < np.pi / 2, th + 2 * np.pi, th)
        th = np.sort(th)
        # the pole of the map must never be a knot
        assert np.min(np.abs(np.exp(1j * th) - 1j)) > 0.25 * np.pi / self.size
        return th

    @cached_property
    def midpoints(self) -> "CircleGrid":
        return CircleGrid(self.n, (self.shift + 0.5) % 1.0)

    def knot_offset(self, s) -> np.ndarray:
        """Distance from real points ``s`` to the nearest knot, in steps (0 to 1/2)."""
        ang = np.angle(to_circle(np.asarray(s, dtype=float)))
        x = np.mod(ang * self.size / (2 * np.pi) - self.shift, 1.0)
        return np.minimum(x, 1.0 - x)

    @cached_property
    def u(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @cached_property
    def t(self) -> np.ndarray:
        return from_circle(self.u).real

    @cached_property
    def weights(self) -> np.ndarray:
        """Weights ``w_j`` with ``int_L S dt ~ sum_j w_j S(t_j)``."""
        u = self.u
        return -4j * u / (u - 1j) ** 2 * (2 * np.pi / self.size)

    def integrate(self, values, axis=-1):
        """Integral over the real axis from samples at the knots."""
        values = np.asarray(values)
        return np.tensordot(values, self.weights, axes=([axis], [0]))

    def pv_matrix(self, s) -> np.ndarray:
        """Matrix ``K`` with ``PV (1/2 pi i) int S(t) dt/(t - s) = K @ S(t_j)``.

        Rows follow the points ``s`` (real), columns the knots.  A point that
        coincides with a knot uses the limit of the Dirichlet bracket, which is 1.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        sigma = to_circle(s)
        th = np.angle(sigma)[:, None]
        x = th - self.theta[None, :]
        half = np.sin(0.5 * x)
        n = self.n
        with np.errstate(divide="ignore", invalid="ignore"):
            bracket = 1.0 + 2j * np.sin(0.5 * n * x) * np.sin(0.5 * (n + 1) * x) / half
        bracket = np.where(np.abs(half) < 1e-14, 1.0, bracket)
        pref = (sigma - 1j)[:, None] / (2 * self.size)
        return pref * bracket / (self.u - 1j)[None, :]

    def cauchy_matrix(self, s) -> np.ndarray:
        """Matrix for ``(1/2 pi i) int S(t) dt/(t - s)`` at points off the axis.

        Uses the trigonometric interpolant of ``S(t)/(u - i)``, which keeps the
        result accurate arbitrarily close to the axis and makes its one-sided
        limits equal ``+-S/2 + PV`` exactly.
        """
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        if np.any(s.imag == 0):
            raise ValueError("cauchy_matrix needs points off the real axis; use pv_matrix")
        sigma = to_circle(s)[:, None]
        u = self.u[None, :]
        n = self.n
        inside = (np.abs(sigma) < 1.0)
        rho = np.where(inside, sigma / u, u / sigma)
        with np.errstate(divide="ignore", invalid="ignore"):
            geo_in = (1.0 - rho ** (n + 1)) / (1.0 - rho)
            geo_out = rho * (1.0 - rho ** n) / (1.0 - rho)
        kern = np.where(inside, geo_in, -geo_out)
        return (sigma - 1j) / self.size * kern / (u - 1j)


def integrate_L(S, grid: CircleGrid):
    """``int_L S(t) dt`` for a callable ``S`` decaying at least like ``t**-2``."""
    return grid.integrate(S(grid.t))


def tail_profile(t):
    """``1/sqrt(t**2 + 1)``: the reference ``1/|t|`` tail split off Cauchy densities."""
    t = np.asarray(t, dtype=complex)
    return 1.0 / np.sqrt(t * t + 1.0)


def tail_cauchy(s):
    """Exact ``(1/2 pi i) int_L tail_profile(t) dt/(t - s)`` for ``s`` off the axis."""
    s = np.asarray(s, dtype=complex)
    upper = s.imag > 0
    z = np.where(upper, s, np.conj(s))
    val = (1.0 - np.arccos(1j * z) / np.pi) / np.sqrt(z * z + 1.0)
    return np.where(upper, val, -np.conj(val))


def tail_pv(s):
    """Principal value of :func:`tail_cauchy` on the real axis."""
    s = np.asarray(s, dtype=float)
    plus = (1.0 - np.arccos(1j * s) / np.pi) / np.sqrt(s * s + 1.0)
    return plus - 0.5 * tail_profile(s)


def _split(S, grid, tail, limit_at_infinity):
    values = S(grid.t) if callable(S) else np.asarray(S, dtype=complex)
    values = values - limit_at_infinity
    if tail:
        prof = tail_profile(grid.t)
        values = values - (prof[:, None] * np.asarray(tail)[None, :] if values.ndim == 2
                           else tail * prof)
    return values


_BLOCK_ENTRIES = 2_000_000


def _blocked(matrix, s, values, size):
    # apply a dense kernel in row blocks so memory stays bounded for large grids
    rows = max(1, _BLOCK_ENTRIES // size)
    if s.size <= rows:
        return matrix(s) @ values
    return np.concatenate([matrix(s[i:i + rows]) @ values for i in range(0, s.size, rows)], axis=0)


def _subtracted_kernel(grid: CircleGrid, s):
    # rows: w_j / (2 pi i (t_j - s)) and the same times r_j = (1 + s^2)/(1 + t_j^2)
    diff = grid.t[None, :] - s[:, None]
    K = grid.weights[None, :] / (2j * np.pi * diff)
    r = (1.0 + s[:, None] ** 2) / (1.0 + grid.t[None, :] ** 2)
    return K, (K * r).sum(axis=1)


def cauchy_pv(S, s, grid: CircleGrid, tail=0.0, limit_at_infinity=0.0, at_s=None):
    """Principal value ``(1/2 pi i) PV int_L S(t) dt/(t - s)`` at real ``s``.

    ``S`` is a callable or its samples at the knots (a trailing axis of
    components is allowed).  ``tail`` is the coefficient ``c`` of a
    ``c/|t|`` decay shared by both ends; it is split off and handled in closed
    form, leaving the discrete formula an ``O(t**-2)`` remainder.
    ``limit_at_infinity`` is a constant value of ``S`` at both ends, whose
    symmetric principal value vanishes.

    Without ``at_s`` the value between knots is that of the trigonometric
    interpolant, which loses accuracy next to poles of ``S`` close to the axis.
    Passing the exact ``S(s)`` switches to singularity subtraction with
    ``r(t) = (1 + s**2)/(1 + t**2)``, whose principal value is ``i s / 2``.
    The subtracted sum is a plain trapezoid rule, but it cancels badly within
    a small fraction of a step from a knot (see :func:`staggered_pv`).
    """
    values = _split(S, grid, tail, limit_at_infinity)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if at_s is None:
        out = _blocked(grid.pv_matrix, s_arr, values, grid.size)
    else:
        a = np.asarray(at_s, dtype=complex).reshape((s_arr.size,) + values.shape[1:]) - limit_at_infinity
        if np.any(tail):
            prof = tail_profile(s_arr).real
            a = a - (np.multiply.outer(prof, tail) if values.ndim == 2 else tail * prof)
        out = np.empty((s_arr.size,) + values.shape[1:], dtype=complex)
        rows = max(1, _BLOCK_ENTRIES // grid.size)
        for i in range(0, s_arr.size, rows):
            ss = s_arr[i:i + rows]
            with np.errstate(divide="ignore", invalid="ignore"):
                K, Kr = _subtracted_kernel(grid, ss)
            aa = a[i:i + rows]
            corr = Kr - 0.5j * ss
            out[i:i + rows] = K @ values - (aa * corr[:, None] if values.ndim == 2 else aa * corr)
        # next to a knot the subtraction cancels badly; the interpolant is exact there
        close = np.concatenate([
            np.min(np.abs(to_circle(s_arr[i:i + rows])[:, None] - grid.u[None, :]), axis=1)
            for i in range(0, s_arr.size, rows)]) < 1e-6 * 2 * np.pi / grid.size
        if np.any(close):
            out[close] = grid.pv_matrix(s_arr[close]) @ values
    if np.any(tail):
        out = out + np.multiply.outer(tail_pv(s_arr), tail) if values.ndim == 2 \
            else out + tail * tail_pv(s_arr)
    return out[0] if np.ndim(s) == 0 else out


def staggered_pv(values, mid_values, s, grid: CircleGrid, at_s, tail=0.0):
    """:func:`cauchy_pv` with subtraction, switching to the midpoint grid near knots.

    ``values`` and ``mid_values`` sample the same density on ``grid`` and on
    ``grid.midpoints``.  Points within a quarter step of a knot use the
    midpoint samples, so the subtracted sum never sits next to a knot.  Knots
    themselves are evaluated this way too, which avoids the slower
    convergence of the interpolant formula there.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    values = np.asarray(values, dtype=complex)
    a = np.asarray(at_s, dtype=complex).reshape((s_arr.size,) + values.shape[1:])
    near = grid.knot_offset(s_arr) < 0.25
    out = np.empty((s_arr.size,) + values.shape[1:], dtype=complex)
    for mask, vals, g in ((~near, values, grid), (near, mid_values, grid.midpoints)):
        if np.any(mask):
            out[mask] = cauchy_pv(vals, s_arr[mask], g, tail=tail, at_s=a[mask])
    return out


def cauchy_off_axis(S, s, grid: CircleGrid, tail=0.0, limit_at_infinity=0.0):
    """``(1/2 pi i) int_L S(t) dt/(t - s)`` at points off the real axis."""
    values = _split(S, grid, tail, limit_at_infinity)
    s1 = np.atleast_1d(np.asarray(s, dtype=complex))
    out = _blocked(grid.cauchy_matrix, s1, values, grid.size)
    if np.any(tail):
        out = out + np.multiply.outer(tail_cauchy(s1), tail) if values.ndim == 2 \
            else out + tail * tail_cauchy(s1)
    if limit_at_infinity:
        # a constant density contributes +-1/2 in the upper/lower half-plane
        out = out + limit_at_infinity * np.where(s1.imag > 0, 0.5, -0.5)
    return out[0] if np.ndim(s) == 0 else out


# --- finite segments -------------------------------------------------------


def chebyshev_nodes(N: int) -> np.ndarray:
    j = np.arange(1, N + 1)
    return np.cos((2 * j - 1) * np.pi / (2 * N))


def gauss_chebyshev_cut(g, p: complex, q: complex, N: int = 64) -> complex:
    """``int_[p,q] g(s) ds / sqrt((s - p)(q - s))`` along the straight segment.

    The square root is taken as ``r sqrt(1 - x**2)`` with ``s = c + r x``,
    ``c = (p + q)/2``, ``r = (q - p)/2`` and ``x`` in ``[-1, 1]``.
    """
    c, r = 0.5 * (p + q), 0.5 * (q - p)
    x = chebyshev_nodes(N)
    return complex(np.pi / N * np.sum(g(c + r * x)))


def chebyshev_cauchy(h, p: complex, q: complex, s, h_at_s=None, N: int = 64):
    """``int_[p,q] h(t) dt / (r sqrt(1 - x**2) (t - s))`` for points ``s`` off the segment.

    ``h`` must be smooth on the closed segment.  When ``h_at_s`` (the analytic
    continuation of ``h`` to ``s``) is supplied it is subtracted and the
    singular part is added back in closed form, which keeps the result accurate
    for ``s`` close to the segment.  Any finite ``h_at_s`` gives the same exact
    value; only the accuracy depends on it.
    """
    c, r = 0.5 * (p + q), 0.5 * (q - p)
    s = np.asarray(s, dtype=complex)
    z = (s - c) / r
    x = chebyshev_nodes(N)
    hx = np.asarray(h(c + r * x), dtype=complex)
    sub = np.zeros_like(z) if h_at_s is None else np.asarray(h_at_s, dtype=complex)
    diff = (hx[None, :] - sub.reshape(-1, 1)) / (x[None, :] - z.reshape(-1, 1))
    regular = np.pi / N * diff.sum(axis=1)
    singular = -np.pi / (np.sqrt(z - 1.0) * np.sqrt(z + 1.0))
    out = (regular.reshape(z.shape) + sub * singular) / r
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Leg:
    """Straight piece of a path on the surface.

    ``sheet`` is +1 or -1 (the sign in front of ``f_sqrt``).  ``root_start``
    marks a leg that starts at a branch point, where the abelian differential
    has an inverse square-root singularity.
    """

    start: complex
    end: complex
    sheet: int = 1
    root_start: bool = False

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def reversed(self) -> "Leg":
        if self.root_start:
            raise ValueError("a leg starting at a branch point cannot be reversed in place")
        return Leg(self.end, self.start, self.sheet, False)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre01(N: int) -> tuple[np.ndarray, np.ndarray]:
    if N not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(N)
        _GL_CACHE[N] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[N]


def leg_nodes(leg: Leg, N: int = 48):
    """Nodes ``t_i`` and weights ``dt_i`` for ``int_leg phi(t) dt``.

    On a ``root_start`` leg the substitution ``t = p + (q - p) v**2`` removes
    the square-root singularity at the start.
    """
    v, w = gauss_legendre01(N)
    p, q = leg.start, leg.end
    if leg.root_start:
        return p + (q - p) * v * v, 2.0 * (q - p) * v * w
    return p + (q - p) * v, (q - p) * w


def leg_cauchy(phi, leg: Leg, s, phi_at_s=None, N: int = 48):
    """``int_leg phi(t) dt/(t - s)`` with optional singularity subtraction.

    ``phi`` may have an inverse square-root singularity at the start of a
    ``root_start`` leg; ``phi_at_s`` is then the continuation of
    ``phi(t) sqrt(t - p)`` rather than of ``phi`` (see :func:`root_factor`).
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    t, dt = leg_nodes(leg, N)
    ph = np.asarray(phi(t), dtype=complex)
    p, q = leg.start, leg.end
    if phi_at_s is None:
        return (ph[None, :] * dt[None, :] / (t[None, :] - s[:, None])).sum(axis=1)
    c = np.asarray(phi_at_s, dtype=complex).reshape(-1)
    if leg.root_start:
        rt = root_factor(t, p, q)
        g = ph * rt
        integrand = (g[None, :] - c[:, None]) / (rt[None, :] * (t[None, :] - s[:, None]))
        return (integrand * dt[None, :]).sum(axis=1) + c * root_cauchy(p, q, s)
    integrand = (ph[None, :] - c[:, None]) / (t[None, :] - s[:, None])
    return (integrand * dt[None, :]).sum(axis=1) + c * np.log((q - s) / (p - s))


def root_factor(t, p, q):
    """``sqrt(t - p)`` continued from the positive multiple of ``sqrt(q - p)``."""
    t = np.asarray(t, dtype=complex)
    return np.sqrt(q - p) * np.sqrt((t - p) / (q - p))


def root_cauchy(p, q, s):
    """Closed form of ``int_p^q dt / (sqrt(t - p) (t - s))`` along the segment."""
    s = np.asarray(s, dtype=complex)
    a = np.sqrt((s - p) / (q - p))
    # int_0^1 dv/(v^2 - a^2), each log taken along the straight path in v
    inner = (np.log((1.0 - a) / (-a)) - np.log((1.0 + a) / a)) / (2.0 * a)
    return 2.0 * inner / np.sqrt(q - p)


def resolving_nodes(points, minimum: int = N_FACTOR, per_distance: float = 4.0) -> int:
    """Smallest ``n >= minimum`` whose knot spacing resolves nearby singularities.

    For each complex ``p`` near the axis the spacing of the mapped knots at
    ``Re p``, ``(2 pi/(2n + 1)) (t**2 + 4)/4``, must not exceed
    ``|Im p| / per_distance``; the trapezoid error then falls like
    ``exp(-2 pi per_distance)``.
    """
    n = minimum
    for p in np.atleast_1d(np.asarray(points, dtype=complex)):
        d = abs(p.imag)
        if d == 0.0:
            raise ValueError(f"singularity {p} lies on the real axis")
        stretch = (p.real ** 2 + 4.0) / 4.0
        need = math.ceil((2 * np.pi * stretch * per_distance / d - 1.0) / 2.0)
        n = max(n, need)
    return int(n)
