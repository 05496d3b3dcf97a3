"""Scattered and total potentials, and the observable ``P(r, theta)``.

The scattered potentials are Fourier integrals over ``L`` of the boundary sums
``Sigma_j = Phi_j^+ + Phi_j^-``:

``phi_0 = (1/2 pi) int Sigma_0(t) exp[( gamma sin(theta) - i t cos(theta)) r] dt``  (lower half-plane)
``phi_1 = (1/2 pi) int Sigma_1(t) exp[(-gamma sin(theta) - i t cos(theta)) r] dt``  (upper half-plane)

Near the boundary rays the kernel barely decays and oscillates with period
``2 pi/(r |cos theta|)``, which the circle rule cannot follow at large ``|t|``.
The field therefore uses its own rule: Gauss-Legendre panels of fixed width on
``[-T, T]``, refined geometrically towards the complex singularities that sit
close to the axis (see ``params.near_axis_singularities``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .params import gamma, near_axis_singularities
from .quadrature import N_FIELD
from .solver import BoundaryValueSolver

CUTOFF = 200.0
PANEL_ORDER = 8
RAY_GAP = 1e-3


@dataclass(frozen=True)
class FieldRule:
    """Composite Gauss-Legendre rule on ``[-cutoff, cutoff]``.

    ``n`` sets the panel width ``cutoff / n``, so the default 400 gives panels
    of width 0.5.
    """

    n: int = N_FIELD
    cutoff: float = CUTOFF
    order: int = PANEL_ORDER
    singularities: tuple = ()

    @cached_property
    def breakpoints(self) -> np.ndarray:
        width = self.cutoff / self.n
        pts = [np.linspace(-self.cutoff, self.cutoff, 2 * self.n + 1)]
        for p in self.singularities:
            x0, d = p.real, abs(p.imag)
            if abs(x0) >= self.cutoff:
                continue
            steps = [d * 0.25 * 2.0 ** j for j in range(60) if d * 0.25 * 2.0 ** j < width]
            pts.append(np.array([x0] + [x0 + h for h in steps] + [x0 - h for h in steps]))
        b = np.unique(np.clip(np.concatenate(pts), -self.cutoff, self.cutoff))
        keep = np.concatenate([[True], np.diff(b) > 1e-12])
        return b[keep]

    @cached_property
    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.order)
        a, b = self.breakpoints[:-1], self.breakpoints[1:]
        half, mid = 0.5 * (b - a), 0.5 * (b + a)
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wt = (half[:, None] * w[None, :]).ravel()
        return t, wt


@dataclass(frozen=True)
class FieldSample:
    r: float
    theta: float
    P: float
    phi_scattered: complex


class FieldEvaluator:
    """Evaluates potentials at polar points from a solved boundary problem."""

    def __init__(self, solver: BoundaryValueSolver, rule: FieldRule | None = None):
        self.solver = solver
        self.params = solver.params
        self.rule = rule or FieldRule(singularities=tuple(near_axis_singularities(self.params)))

    @cached_property
    def _cache(self):
        t, w = self.rule.nodes
        plus, minus = self.solver.phi_pm(t)
        sums = plus + minus
        scale = w / (2.0 * math.pi)
        return t, gamma(t, self.params), sums[:, 0] * scale, sums[:, 1] * scale

    def scattered(self, r, theta) -> np.ndarray:
        """``phi_0`` (lower half-plane) or ``phi_1`` (upper) at polar points."""
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        if np.any(r <= 0):
            raise ValueError("r must be positive")
        sn, cs = np.sin(theta).ravel(), np.cos(theta).ravel()
        if np.any(np.abs(sn) < 1e-12):
            raise ValueError("points on the boundary rays are excluded; use one-sided limits")
        t, g, s0, s1 = self._cache
        rr = r.ravel()
        out = np.empty(rr.shape, dtype=complex)
        for i in range(rr.size):
            upper = sn[i] > 0
            expo = (-g * sn[i] if upper else g * sn[i]) - 1j * t * cs[i]
            out[i] = np.sum((s1 if upper else s0) * np.exp(expo * rr[i]))
        return out.reshape(r.shape)

    def scattered_xy(self, x, y) -> np.ndarray:
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.scattered(np.hypot(x, y), np.mod(np.arctan2(y, x), 2 * np.pi))

    def geometric(self, x, y) -> np.ndarray:
        """Incident plus specularly reflected wave (lower half-plane only)."""
        p = self.params
        s, c = math.sin(p.theta0), math.cos(p.theta0)
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return np.exp(1j * p.k * (x * s + y * c)) + np.exp(1j * p.k * (x * s - y * c))

    def total(self, r, theta) -> np.ndarray:
        """``psi_1 = phi_1`` above the screen, ``psi_0 = inc + ref + phi_0`` below."""
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        phi = self.scattered(r, theta)
        x, y = r * np.cos(theta), r * np.sin(theta)
        return np.where(y < 0, phi + self.geometric(x, y), phi)

    def P(self, r, theta) -> np.ndarray:
        return np.abs(self.total(r, theta))

    def sample(self, r, theta) -> list[FieldSample]:
        r, theta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))
        phi = self.scattered(r, theta).ravel()
        tot = self.total(r, theta).ravel()
        return [FieldSample(float(a), float(b), float(abs(c)), complex(d))
                for a, b, c, d in zip(r.ravel(), theta.ravel(), tot, phi)]


def theta_nodes(count: int = 720, gap: float = RAY_GAP) -> np.ndarray:
    """``count`` angles in ``(0, 2 pi)`` avoiding the rays ``0, pi, 2 pi`` by ``gap``.

    Half of the nodes go to each half-plane, equispaced on
    ``[gap, pi - gap]`` and ``[pi + gap, 2 pi - gap]``.
    """
    if count < 2 or count % 2:
        raise ValueError("count must be an even number >= 2")
    half = np.linspace(gap, math.pi - gap, count // 2)
    return np.concatenate([half, half + math.pi])


def radius_nodes(count: int = 500, r_min: float = 1.0, r_max: float = 10.0) -> np.ndarray:
    return np.linspace(r_min, r_max, count)


def theta_sweep(field: FieldEvaluator, r: float, count: int = 720) -> list[FieldSample]:
    th = theta_nodes(count)
    return field.sample(np.full(th.shape, r), th)


def radius_sweep(field: FieldEvaluator, thetas, count: int = 500, r_min: float = 1.0, r_max: float = 10.0):
    """One list of samples per angle."""
    rs = radius_nodes(count, r_min, r_max)
    return {float(th): field.sample(rs, np.full(rs.shape, th)) for th in thetas}
