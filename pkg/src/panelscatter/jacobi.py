"""Genus-1 Jacobi inversion: locate the zero ``q1`` of the theta function.

The boundedness condition at infinity fixes the endpoint ``q1`` of the
contour ``Gamma`` and two integers ``m_a, m_b``.  ``q1`` is the single zero of
``F(q) = theta(omega_hat(q) - e1)``; its projection follows from a residue
count of ``d log F / (s - p)`` on the dissected surface (``p = i`` by default),
the sheet and the integers from the lattice equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, GenericityError, NonIntegerError
from .params import ModelParams, eigen_data, f_sqrt
from .quadrature import CircleGrid
from .surface import EllipticSurface, SheetPoint

ZETA0 = 2.0 + 2.0j
INTEGER_TOL = 1e-4
GENERICITY_TOL = 1e-10
THETA_TOL = 1e-17


def theta(z, Bhat: complex, derivative: int = 0):
    """Riemann theta series ``sum exp(i pi Bhat nu^2 + 2 i pi nu z)`` (or a z-derivative).

    The window of summation is centred on the dominant term, so the truncation
    is uniform in ``z``.
    """
    z = np.asarray(z, dtype=complex)
    half = _theta_halfwidth(Bhat)
    centre = np.round(-z.imag / Bhat.imag)
    nu = centre[..., None] + np.arange(-half, half + 1)
    terms = np.exp(1j * np.pi * Bhat * nu * nu + 2j * np.pi * nu * z[..., None])
    if derivative:
        terms = terms * (2j * np.pi * nu) ** derivative
    out = terms.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def _theta_halfwidth(Bhat: complex, tol: float = THETA_TOL) -> int:
    # |term(centre + j)| / |term(centre)| <= exp(-pi Im(Bhat) (|j| - 1/2)^2)
    return int(math.ceil(math.sqrt(-math.log(tol) / (math.pi * Bhat.imag)) + 0.5)) + 1


def theta_log_derivative(z, Bhat: complex):
    return theta(z, Bhat, 1) / theta(z, Bhat)


def continuous_log(values) -> np.ndarray:
    """Logarithm along an ordered sequence, with the phase unwrapped.

    The branch is anchored at the first sample (principal value), so a
    function tending to 1 at both ends of the contour yields a log tending to
    0 at both ends whenever its winding number is zero.
    """
    v = np.asarray(values, dtype=complex)
    lg = np.log(v)
    return lg.real + 1j * np.unwrap(lg.imag)


def log_epsilon(grid: CircleGrid, params: ModelParams) -> np.ndarray:
    eps = eigen_data(grid.t, params).epsilon
    lg = continuous_log(eps)
    if abs(lg[-1].imag) > 0.5 or abs(lg[0].imag) > 0.5:
        raise BranchError(
            f"log of the eigenvalue ratio does not return to 0 along the contour "
            f"(end phases {lg[0].imag:.3g}, {lg[-1].imag:.3g})"
        )
    return lg


def compute_d0(surf: EllipticSurface, grid: CircleGrid, zeta0: complex = ZETA0) -> complex:
    """Right-hand side of the inversion problem for base point ``(zeta0, sheet 1)``."""
    t = grid.t
    lg = log_epsilon(grid, surf.params)
    integral = complex(grid.integrate(lg / f_sqrt(t, surf.params)))
    return surf.omega(SheetPoint(zeta0, 1)) - integral / (2j * np.pi)


@dataclass(frozen=True)
class JacobiSolution:
    d0: complex
    e1: complex
    zeta0: complex
    zeta1: complex
    sheet1: int
    w1: complex
    m_a: int
    m_b: int
    integer_residual: float
    theta_residual: float
    pole_point: complex
    theta_halfwidth: int

    @property
    def q0(self) -> SheetPoint:
        return SheetPoint(self.zeta0, 1)

    @property
    def q1(self) -> SheetPoint:
        return SheetPoint(self.zeta1, self.sheet1)


def _lattice_coords(d: complex, Bhat: complex) -> tuple[float, float]:
    mb = d.imag / Bhat.imag
    ma = d.real - Bhat.real / Bhat.imag * d.imag
    return ma, mb


def _zeta1(surf: EllipticSurface, e1: complex, pole: complex) -> complex:
    params = surf.params
    M = complex(surf.cycle_cauchy("a", np.array([pole]))[0]) / surf.A
    J = M
    for sheet in (1, 2):
        q = SheetPoint(pole, sheet)
        z = surf.omega_hat(q) - e1
        th = theta(z, surf.Bhat)
        if abs(th) < GENERICITY_TOL:
            raise GenericityError(f"theta vanishes at the auxiliary point {pole} on sheet {sheet}")
        J -= theta(z, surf.Bhat, 1) / th / (surf.A * q.w(params))
    return pole + 1.0 / J


def solve_inversion(
    surf: EllipticSurface,
    d0: complex,
    zeta0: complex = ZETA0,
    integer_tol: float = INTEGER_TOL,
) -> JacobiSolution:
    """Find ``q1`` and ``(m_a, m_b)`` with ``omega(q1) + m_a A + m_b B = d0``."""
    e1 = d0 / surf.A + surf.k1
    pole = 1j
    zeta1 = _zeta1(surf, e1, pole)
    if abs(zeta1 - pole) < 1e-6:
        # the residue count degenerates when q1 sits on the auxiliary pole
        pole = 2j
        zeta1 = _zeta1(surf, e1, pole)
    candidates = []
    for sheet in (1, 2):
        q1 = SheetPoint(zeta1, sheet)
        wh = surf.omega_hat(q1)
        ma, mb = _lattice_coords(d0 / surf.A - wh, surf.Bhat)
        res = max(abs(ma - round(ma)), abs(mb - round(mb)))
        candidates.append((res, sheet, ma, mb, wh))
    good = [c for c in candidates if c[0] < integer_tol]
    if len(good) != 1:
        raise NonIntegerError(
            "expected exactly one sheet with integral lattice coordinates, got "
            + ", ".join(f"sheet {c[1]}: ({c[2]:.6g}, {c[3]:.6g})" for c in candidates)
        )
    res, sheet, ma, mb, wh = good[0]
    return JacobiSolution(
        d0=d0,
        e1=e1,
        zeta0=zeta0,
        zeta1=zeta1,
        sheet1=sheet,
        w1=SheetPoint(zeta1, sheet).w(surf.params),
        m_a=int(round(ma)),
        m_b=int(round(mb)),
        integer_residual=float(res),
        theta_residual=float(abs(theta(wh - e1, surf.Bhat))),
        pole_point=pole,
        theta_halfwidth=_theta_halfwidth(surf.Bhat),
    )


def boundedness_residual(surf: EllipticSurface, grid: CircleGrid, jac: JacobiSolution) -> complex:
    """Sum of the four integrals that must cancel for ``F`` to stay bounded."""
    lg = log_epsilon(grid, surf.params)
    first = complex(grid.integrate(lg / f_sqrt(grid.t, surf.params))) / (2j * np.pi)
    gamma_term = surf.omega(jac.q1) - surf.omega(jac.q0)
    return first + gamma_term + jac.m_a * surf.A + jac.m_b * surf.B
