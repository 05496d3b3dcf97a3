"""The genus-1 surface ``w**2 = (s**2 - mu**2)**2 + m**2`` and its abelian integrals.

Sheet 1 carries ``w = f_sqrt(s)`` and sheet 2 ``w = -f_sqrt(s)``; they are
glued along ``[s1, s2]`` (upper half-plane) and ``[-s2, -s1]`` (lower).

The a-cycle encircles ``[s1, s2]``.  It is collapsed onto the segment, where
the integrand changes sign from one bank to the other, so
``int_a phi dt/w = 2 sign_a int_{s1}^{s2} phi dt / f_left`` with ``f_left``
the boundary value from the left of ``s1 -> s2``.  The b-cycle is the segment
``s2 -> -s1`` on sheet 1 and back on sheet 2, giving
``int_b phi dt/w = 2 int_{s2}^{-s1} phi dt / f_sqrt``.  ``sign_a`` is chosen
so that the normalised B-period has a positive imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CutOnContourError, PathError
from .params import ModelParams, _segment_factor, f_sqrt
from .quadrature import (
    Leg,
    chebyshev_cauchy,
    chebyshev_nodes,
    leg_cauchy,
    leg_nodes,
    root_factor,
)

CHEB_NODES = 96
LEG_NODES = 40


@dataclass(frozen=True)
class SheetPoint:
    s: complex
    sheet: int = 1

    def __post_init__(self):
        if self.sheet not in (1, 2):
            raise ValueError("sheet must be 1 or 2")

    @property
    def sign(self) -> int:
        return 1 if self.sheet == 1 else -1

    def w(self, params: ModelParams) -> complex:
        return self.sign * complex(f_sqrt(self.s, params))


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def segments_intersect(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    """Closed-segment intersection test in the plane."""
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on(a, b, c):
        return abs(_cross(b - a, c - a)) <= 1e-14 * max(abs(b - a), 1.0) * max(abs(c - a), 1.0) and (
            min(a.real, b.real) - 1e-14 <= c.real <= max(a.real, b.real) + 1e-14
            and min(a.imag, b.imag) - 1e-14 <= c.imag <= max(a.imag, b.imag) + 1e-14
        )

    return on(q1, q2, p1) or on(q1, q2, p2) or on(p1, p2, q1) or on(p1, p2, q2)


def _segment_distance(p, a: complex, b: complex):
    """Distance from point(s) ``p`` to the closed segment ``[a, b]``."""
    d = b - a
    x = np.clip(((np.asarray(p) - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    out = np.abs(p - (a + x * d))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EllipticSurface:
    params: ModelParams
    s1: complex
    s2: complex
    A: complex
    B: complex
    Bhat: complex
    k1: complex
    a_sign: int = 1
    cheb_nodes: int = CHEB_NODES
    leg_nodes: int = LEG_NODES
    notes: tuple = field(default=(), compare=False)

    # --- geometry --------------------------------------------------------
    @property
    def cuts(self) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
        return (self.s1, self.s2), (-self.s2, -self.s1)

    @property
    def scale(self) -> float:
        return abs(self.s2)

    def w(self, s, sheet: int = 1):
        sign = 1 if sheet == 1 else -1
        return sign * f_sqrt(s, self.params)

    def _other_factor(self, t):
        # factor of f_sqrt belonging to the cut [-s2, -s1]
        c, r = 0.5 * (self.s1 + self.s2), 0.5 * (self.s2 - self.s1)
        return _segment_factor(np.asarray(t, dtype=complex), -c, r)

    def _a_weight(self, t):
        # dt/f_left on [s1, s2] equals dx / (sqrt(1 - x^2) * i * P2(t))
        return 1.0 / (1j * self._other_factor(t))

    def _b_weight(self, t):
        p, q = self.s2, -self.s1
        c, r = 0.5 * (p + q), 0.5 * (q - p)
        x = (np.asarray(t, dtype=complex) - c) / r
        return r * np.sqrt(1.0 - x * x) / f_sqrt(t, self.params)

    # --- cycle integrals -------------------------------------------------
    def cycle_integral(self, cycle: str, phi=None, N: int | None = None) -> complex:
        """``int_cycle phi(t) dt / w`` for ``cycle`` in ``{'a', 'b'}``."""
        N = N or self.cheb_nodes
        x = chebyshev_nodes(N)
        if cycle == "a":
            p, q, weight, sign = self.s1, self.s2, self._a_weight, self.a_sign
        elif cycle == "b":
            p, q, weight, sign = self.s2, -self.s1, self._b_weight, 1
        else:
            raise ValueError(cycle)
        t = 0.5 * (p + q) + 0.5 * (q - p) * x
        vals = weight(t) if phi is None else weight(t) * phi(t)
        return complex(2.0 * sign * np.pi / N * np.sum(vals))

    def cycle_cauchy(self, cycle: str, s, phi=None, N: int | None = None):
        """``int_cycle phi(t) dt / ((t - s) w)`` for points ``s`` off the cycle."""
        N = N or self.cheb_nodes
        s = np.asarray(s, dtype=complex)
        if cycle == "a":
            p, q, weight, sign = self.s1, self.s2, self._a_weight, self.a_sign
            h_at_s = None
        elif cycle == "b":
            p, q, weight, sign = self.s2, -self.s1, self._b_weight, 1
            near = _segment_distance(s, p, q)
            h_at_s = np.where(near < 0.5 * abs(q - p), weight(s) * (1.0 if phi is None else phi(s)), 0.0)
        else:
            raise ValueError(cycle)
        h = weight if phi is None else (lambda t: weight(t) * phi(t))
        return 2.0 * sign * chebyshev_cauchy(h, p, q, s, h_at_s=h_at_s, N=N)

    # --- paths -------------------------------------------------------------
    @property
    def obstacles(self) -> tuple:
        """Segments a path may not cross: both cuts and the b-cycle segment."""
        return (self.s1, self.s2), (self.s2, -self.s1), (-self.s2, -self.s1)

    @property
    def clearance_unit(self) -> float:
        return min(abs(q - p) for p, q in self.obstacles)

    def crosses_cut(self, a: complex, b: complex, skip_start: bool = False) -> bool:
        if skip_start:
            a = a + 1e-9 * (b - a)
        return any(segments_intersect(a, b, p, q) for p, q in self.cuts)

    def crosses_obstacle(self, a: complex, b: complex) -> bool:
        return any(segments_intersect(a, b, p, q) for p, q in self.obstacles)

    def _clearance(self, a: complex, b: complex) -> float:
        d = []
        for p, q in self.obstacles:
            if segments_intersect(a, b, p, q):
                return 0.0
            d.extend([_segment_distance(p, a, b), _segment_distance(q, a, b),
                      _segment_distance(a, p, q), _segment_distance(b, p, q)])
        return min(d)

    def _edge_ok(self, a: complex, b: complex, stub_start: bool, stub_end: bool) -> bool:
        # a short stub is exempt from the clearance rule where an end point sits
        # on or near an obstacle by construction (the base point, or a target)
        unit_len = self.clearance_unit
        length = abs(b - a)
        if length == 0.0:
            return False
        stub = min(0.3 * unit_len, 0.3 * length)
        unit = (b - a) / length
        a2 = a + stub * unit if stub_start else a
        b2 = b - stub * unit if stub_end else b
        if stub_start and self.crosses_obstacle(a + 1e-9 * (a2 - a), a2):
            return False
        if stub_end and self.crosses_obstacle(b2, b):
            return False
        return self._clearance(a2, b2) >= 0.15 * unit_len

    def _waypoints(self) -> list[complex]:
        cached = self.__dict__.get("_wp_cache")
        if cached is not None:
            return cached
        h = self.clearance_unit
        pts = []
        for v in (self.s1, self.s2, -self.s1, -self.s2):
            for rho in (0.35, 0.8):
                pts.extend(v + rho * h * np.exp(2j * np.pi * j / 8 + 0.1j) for j in range(8))
        for p, q in self.obstacles:
            mid, nrm = 0.5 * (p + q), 1j * (q - p) / abs(q - p)
            for rho in (0.4, 0.8):
                pts.extend([mid + rho * h * nrm, mid - rho * h * nrm])
        pts = [complex(z) for z in pts
               if min(_segment_distance(z, p, q) for p, q in self.obstacles) >= 0.2 * h]
        n = len(pts)
        adj = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(i + 1, n):
                if self._edge_ok(pts[i], pts[j], False, False):
                    adj[i, j] = adj[j, i] = abs(pts[j] - pts[i])
        object.__setattr__(self, "_wp_cache", pts)
        object.__setattr__(self, "_wp_adj", adj)
        return pts

    def path(self, target: complex, sheet: int = 1) -> "SurfacePath":
        """Polyline from the base point ``-s2`` to ``target`` on ``sheet``.

        The polyline crosses neither cut nor the b-cycle, so it stays inside the
        canonically dissected surface.  It is the shortest route through a
        fixed set of waypoints among those keeping clear of the obstacles.
        """
        target = complex(target)
        base = -self.s2
        if target == base:
            return SurfacePath((), sheet, self)
        h = self.clearance_unit
        near = min(_segment_distance(target, p, q) for p, q in self.obstacles) < 0.3 * h
        if self._edge_ok(base, target, True, near):
            return self._build_path([base, target], sheet)
        pts = self._waypoints()
        adj = self.__dict__["_wp_adj"]
        n = len(pts)
        from_base = np.array([abs(z - base) if self._edge_ok(base, z, True, False) else np.inf for z in pts])
        to_target = np.array([abs(target - z) if self._edge_ok(z, target, False, near) else np.inf for z in pts])
        # Dijkstra over waypoints
        dist = from_base.copy()
        prev = np.full(n, -1)
        done = np.zeros(n, dtype=bool)
        for _ in range(n):
            i = int(np.argmin(np.where(done, np.inf, dist)))
            if done[i] or not np.isfinite(dist[i]):
                break
            done[i] = True
            cand = dist[i] + adj[i]
            better = (~done) & (cand < dist)
            dist[better] = cand[better]
            prev[better] = i
        total = dist + to_target
        j = int(np.argmin(total))
        if not np.isfinite(total[j]):
            raise PathError(f"no obstacle-avoiding path from {base:.6g} to {target:.6g}")
        chain = []
        while j >= 0:
            chain.append(pts[j])
            j = prev[j]
        return self._build_path([base, *reversed(chain), target], sheet)

    def _build_path(self, pts, sheet):
        legs = []
        for i in range(len(pts) - 1):
            legs.extend(self._panels(pts[i], pts[i + 1], sheet, root_start=(i == 0)))
        return SurfacePath(tuple(legs), sheet, self)

    def _panels(self, p: complex, q: complex, sheet: int, root_start: bool) -> list[Leg]:
        # dyadic grading towards the start of a leg that leaves the branch-point region
        sign = 1 if sheet == 1 else -1
        length = abs(q - p)
        levels = max(0, int(math.ceil(math.log2(1.0 + length / (0.5 * self.scale)))))
        if not root_start:
            levels = max(0, int(math.ceil(math.log2(1.0 + length / (0.5 * max(abs(p), self.scale))))))
        cuts = [0.0] + [2.0 ** (j - levels) for j in range(levels + 1)]
        legs = []
        for i in range(len(cuts) - 1):
            a, b = p + (q - p) * cuts[i], p + (q - p) * cuts[i + 1]
            legs.append(Leg(a, b, sign, root_start=(root_start and i == 0)))
        return legs

    # --- abelian integral --------------------------------------------------
    def omega(self, q: SheetPoint) -> complex:
        return self.path(q.s, q.sheet).integral()

    def omega_hat(self, q: SheetPoint) -> complex:
        return self.omega(q) / self.A


@dataclass(frozen=True)
class SurfacePath:
    """Polyline on one sheet starting at the branch point ``-s2``."""

    legs: tuple
    sheet: int
    surface: EllipticSurface

    @property
    def end(self) -> complex:
        return self.legs[-1].end if self.legs else -self.surface.s2

    def vertices(self) -> list[complex]:
        if not self.legs:
            return [-self.surface.s2]
        return [self.legs[0].start] + [leg.end for leg in self.legs]

    def _xi(self, t, sign):
        return sign * f_sqrt(t, self.surface.params)

    def integral(self, phi=None) -> complex:
        """``int phi(t) dt / w`` along the path (``phi = 1`` by default)."""
        total = 0.0j
        for leg in self.legs:
            t, dt = leg_nodes(leg, self.surface.leg_nodes)
            vals = 1.0 / self._xi(t, leg.sheet)
            if phi is not None:
                vals = vals * phi(t)
            total += np.sum(vals * dt)
        return complex(total)

    def log_integral(self, s):
        """Exact ``int dt/(t - s)`` along the polyline, panel by panel."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for leg in self.legs:
            out = out + np.log((leg.end - s) / (leg.start - s))
        return out

    def cauchy(self, s, phi=None):
        """``int phi(t) dt / ((t - s) w)`` along the path for points ``s`` off it."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.zeros(s.shape, dtype=complex)
        surf = self.surface
        for leg in self.legs:
            sign = leg.sheet

            def dens(t, sign=sign):
                v = 1.0 / self._xi(t, sign)
                return v if phi is None else v * phi(t)

            dist = _segment_distance(s, leg.start, leg.end)
            near = dist < 0.75 * leg.length
            c = np.zeros(s.shape, dtype=complex)
            if np.any(near):
                sn = s[near]
                val = dens(sn)
                if leg.root_start:
                    val = val * root_factor(sn, leg.start, leg.end)
                c[near] = val
            out = out + leg_cauchy(dens, leg, s, phi_at_s=c, N=surf.leg_nodes)
        return out


def build_surface(params: ModelParams, cheb_nodes: int = CHEB_NODES, leg_nodes: int = LEG_NODES) -> EllipticSurface:
    """Branch points, periods and normalised period of the surface."""
    s1, s2 = params.branch_points
    if s1.imag <= 0 or s2.imag <= 0:
        raise CutOnContourError("a cut touches the real axis")
    notes = []
    probe = EllipticSurface(params, s1, s2, 1.0, 1.0, 1.0j, 0.0, 1, cheb_nodes, leg_nodes)
    if probe.crosses_cut(s2, -s1, skip_start=True) and segments_intersect(
        s2 + 1e-9 * (-s1 - s2), -s1 - 1e-9 * (-s1 - s2), -s2, -s1
    ):
        raise CutOnContourError("the b-cycle segment s2 -> -s1 runs into a cut")
    A = probe.cycle_integral("a")
    B = probe.cycle_integral("b")
    a_sign = 1
    if (B / A).imag < 0:
        a_sign = -1
        A = -A
        notes.append("a-cycle orientation reversed so that Im(B/A) > 0")
    Bhat = B / A
    if not Bhat.imag > 0:
        raise CutOnContourError(f"degenerate period ratio {Bhat}")
    return EllipticSurface(
        params, s1, s2, A, B, Bhat, -0.5 + 0.5 * Bhat, a_sign, cheb_nodes, leg_nodes, tuple(notes)
    )
