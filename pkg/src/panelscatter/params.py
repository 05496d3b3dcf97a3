"""Physical inputs, derived model constants and the two multivalued radicals.

Everything downstream is built on two square roots:

* ``gamma(s) = (s**2 - k**2)**(1/2)`` with ``Re gamma > 0`` on the real axis
  and ``gamma(0) = -i k``; cut along the rays from ``k`` and ``-k`` out to
  infinity in the directions of ``k`` and ``-k``.
* ``f_sqrt(s) = ((s**2 - mu**2)**2 + m**2)**(1/2)`` with ``f_sqrt ~ s**2`` at
  infinity; cut along the two finite segments ``[s1, s2]`` and ``[-s2, -s1]``.

Points lying exactly on a cut take the value continued from the left of the
oriented cut (rays oriented away from ``+-k``, segments oriented
``s1 -> s2`` and ``-s2 -> -s1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, ResonanceError

RESONANCE_GUARD = 1e-6


@dataclass(frozen=True)
class PhysicalInputs:
    """Dimensional inputs of one run.

    ``abs_alpha`` only fixes the magnitude of the panel parameter; its phase is
    tied to the wave number (``alpha`` scales like ``k**2``).
    """

    abs_k: float
    arg_k: float
    theta0: float
    abs_alpha: float
    rho_f_over_m0: float
    d: float
    d1: float
    d2: float
    a: float

    def __post_init__(self):
        if not 0.0 < self.arg_k < math.pi / 2:
            raise ValueError(f"arg_k must lie in (0, pi/2), got {self.arg_k}")
        if not 0.0 < self.theta0 < math.pi / 2:
            raise ValueError(f"theta0 must lie in (0, pi/2), got {self.theta0}")
        for name in ("abs_k", "abs_alpha", "rho_f_over_m0", "d", "d1", "d2", "a"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")

    @property
    def cell_volume(self) -> float:
        return self.d * self.d1 * self.d2


@dataclass(frozen=True)
class ModelParams:
    """Complex model constants.

    ``branch_points`` returns ``(s1, s2)``, the zeros of ``f`` in the second and
    first quadrant; ``-s1`` and ``-s2`` are the other two.
    """

    k: complex
    theta0: float
    mu: complex
    alpha: complex
    tau: complex
    m: complex
    k_res: float
    inputs: PhysicalInputs | None = field(default=None, compare=False)

    @property
    def k_sin(self) -> complex:
        """``k sin(theta0)``; the incident-wave pole sits at ``-k_sin``."""
        return self.k * math.sin(self.theta0)

    @property
    def branch_points(self) -> tuple[complex, complex]:
        return _branch_points(self.mu, self.m)


def _branch_points(mu: complex, m: complex) -> tuple[complex, complex]:
    r1 = complex(np.sqrt(mu * mu + 1j * m))
    r2 = complex(np.sqrt(mu * mu - 1j * m))
    roots = (r1, -r1, r2, -r2)
    q2 = [z for z in roots if z.real < 0 and z.imag > 0]
    q1 = [z for z in roots if z.real > 0 and z.imag > 0]
    if len(q2) != 1 or len(q1) != 1:
        raise DegenerateError(
            f"cannot place branch points in the required quadrants: "
            f"roots +-{r1:.6g}, +-{r2:.6g}"
        )
    return q2[0], q1[0]


def derive_params(
    inputs: PhysicalInputs,
    tau_override: complex | None = None,
    resonance_guard: float = RESONANCE_GUARD,
) -> ModelParams:
    """Build :class:`ModelParams` from dimensional inputs.

    The perforation parameter is ``tau = k d / (1 - k**2 V / (2 a))`` unless
    ``tau_override`` is given.  ``alpha`` gets phase ``2 arg k`` and
    ``mu**2 = alpha / (rho_f / m0)`` with ``Re mu >= 0``.
    """
    k = inputs.abs_k * complex(math.cos(inputs.arg_k), math.sin(inputs.arg_k))
    alpha = inputs.abs_alpha * complex(math.cos(2 * inputs.arg_k), math.sin(2 * inputs.arg_k))
    mu = complex(np.sqrt(alpha / inputs.rho_f_over_m0))
    V = inputs.cell_volume
    denom = 1.0 - k * k * V / (2.0 * inputs.a)
    if abs(denom) <= resonance_guard:
        raise ResonanceError(
            f"|1 - k^2 V/(2a)| = {abs(denom):.3e} is within the resonance guard "
            f"{resonance_guard:.1e}; tau is unbounded here"
        )
    tau = complex(tau_override) if tau_override is not None else k * inputs.d / denom
    if tau == 0:
        raise DegenerateError("tau must be nonzero")
    m = 2.0 * alpha / (k * tau)
    return ModelParams(
        k=k,
        theta0=inputs.theta0,
        mu=mu,
        alpha=alpha,
        tau=tau,
        m=m,
        k_res=math.sqrt(2.0 * inputs.a / V),
        inputs=inputs,
    )


def _left_sqrt(z):
    # principal sqrt, but a point exactly on the negative real axis gets -0j so
    # that it takes the value seen from the left of the cut
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (z.real < 0)
    return np.sqrt(np.where(on_cut, np.conj(z), z))


def gamma(s, params: ModelParams):
    """Branch of ``(s**2 - k**2)**(1/2)`` with positive real part on the real axis."""
    k = params.k
    s = np.asarray(s, dtype=complex)
    q = s / k
    out = -1j * k * _left_sqrt(1.0 - q * q)
    return out[()] if out.ndim == 0 else out


def _segment_factor(s, c, r):
    # (s - c) * sqrt(1 - r^2/(s - c)^2): ~ (s - c) at infinity, cut exactly on
    # the segment [c - r, c + r]; on the cut, the left-side value i r sqrt(1-x^2)
    z = s - c
    with np.errstate(divide="ignore", invalid="ignore"):
        x = z / r
        out = z * np.sqrt(1.0 - 1.0 / (x * x))
    on_cut = (np.abs(x.imag) <= 1e-15 * np.maximum(1.0, np.abs(x))) & (np.abs(x.real) < 1.0)
    if np.any(on_cut):
        xr = x.real
        out = np.where(on_cut, 1j * r * np.sqrt(np.clip(1.0 - xr * xr, 0.0, None)), out)
    return out


def f_sqrt(s, params: ModelParams):
    """Branch of ``((s**2 - mu**2)**2 + m**2)**(1/2)`` that behaves like ``s**2``.

    Written as the product of two segment factors, each ``~ s`` at infinity and
    discontinuous only across its own segment, so the product is analytic off
    ``[s1, s2]`` and ``[-s2, -s1]``.
    """
    s1, s2 = params.branch_points
    s = np.asarray(s, dtype=complex)
    c, r = 0.5 * (s1 + s2), 0.5 * (s2 - s1)
    out = _segment_factor(s, c, r) * _segment_factor(s, -c, r)
    return out[()] if out.ndim == 0 else out


def f_poly(s, params: ModelParams):
    s = np.asarray(s, dtype=complex)
    l = s * s - params.mu ** 2
    return l * l + params.m ** 2


@dataclass(frozen=True)
class EigenData:
    b: np.ndarray
    c: np.ndarray
    l: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    Delta: np.ndarray
    epsilon: np.ndarray


def eigen_data(t, params: ModelParams) -> EigenData:
    """Entries of the coefficient matrix and its two eigenvalues at ``t``."""
    t = np.asarray(t, dtype=complex)
    g = gamma(t, params)
    l = t * t - params.mu ** 2
    kt = params.k * params.tau
    b = 1.0 - (0.5 * kt + params.alpha / l) / g
    c = kt / (2.0 * g * l)
    w = f_sqrt(t, params)
    lam1 = b + c * w
    lam2 = b - c * w
    if np.any(lam2 == 0):
        raise DegenerateError("eigenvalue lambda2 vanishes on the contour")
    return EigenData(b, c, l, lam1, lam2, lam1 * lam2, lam1 / lam2)


def coefficient_matrix(t, params: ModelParams) -> np.ndarray:
    """``G(t)`` with shape ``t.shape + (2, 2)``."""
    t = np.asarray(t, dtype=complex)
    g = gamma(t, params)
    l = t * t - params.mu ** 2
    kt = params.k * params.tau
    b = 1.0 - (0.5 * kt + params.alpha / l) / g
    c = kt / (2.0 * g * l)
    G = np.empty(t.shape + (2, 2), dtype=complex)
    G[..., 0, 0] = b + c * l
    G[..., 0, 1] = c * params.m
    G[..., 1, 0] = c * params.m
    G[..., 1, 1] = b - c * l
    return G


def winding_number(values) -> int:
    """Net number of turns of ``values`` around the origin, by phase unwrapping."""
    phase = np.unwrap(np.angle(np.asarray(values)))
    return int(round((phase[-1] - phase[0]) / (2 * math.pi)))


# --- singularities close to the real axis ---------------------------------------

def _axis_sqrt(z):
    # sqrt with its cut on the negative imaginary axis; equals the principal
    # root for arg z in (-pi/2, pi] and continues it across the negative reals
    return np.exp(0.25j * np.pi) * np.sqrt(np.asarray(z, dtype=complex) * np.exp(-0.5j * np.pi))


def _delta_continued(s, params: ModelParams):
    # lambda1 * lambda2 with gamma continued from the real axis across its cut
    s = np.asarray(s, dtype=complex)
    q = s / params.k
    g = -1j * params.k * _axis_sqrt(1.0 - q * q)
    l = s * s - params.mu ** 2
    kt = params.k * params.tau
    b = 1.0 - (0.5 * kt + params.alpha / l) / g
    c = kt / (2.0 * g * l)
    return b * b - c * c * f_poly(s, params)


def dispersion_zeros(params: ModelParams, strip: float = 1.0, spacing: float = 1e-3) -> np.ndarray:
    """Zeros of ``lambda1 lambda2`` within ``strip`` of the real axis.

    They are the poles of the boundary data nearest to ``L`` (surface waves on
    the membrane).  Candidates are the local minima of ``|lambda1 lambda2|`` on
    the axis; each is refined by damped Newton steps on the continuation of the
    eigenvalue product off the axis.
    """
    scale = max(1.0, abs(params.k), abs(params.mu), abs(params.alpha) ** (1.0 / 3.0))
    R = 10.0 * scale
    t = np.arange(-R, R + spacing / 2, spacing)
    mag = np.abs(_delta_continued(t, params))
    idx = np.where((mag[1:-1] < mag[:-2]) & (mag[1:-1] < mag[2:]))[0] + 1
    found = []
    for j in idx:
        z = complex(t[j])
        for _ in range(200):
            h = 1e-7 * max(1.0, abs(z))
            f = complex(_delta_continued(z, params))
            df = complex(_delta_continued(z + h, params) - _delta_continued(z - h, params)) / (2 * h)
            if df == 0:
                break
            step = f / df
            cap = 0.02 * max(1.0, abs(z))
            if abs(step) > cap:
                step *= cap / abs(step)
            z -= step
            if abs(step) < 1e-14 * max(1.0, abs(z)):
                break
        small = abs(complex(_delta_continued(z, params))) < 1e-10
        if small and abs(z.imag) < strip and abs(z - t[j]) < strip and z.imag != 0:
            if all(abs(z - w) > 1e-8 * max(1.0, abs(z)) for w in found):
                found.append(z)
    return np.array(sorted(found, key=lambda z: (z.real, z.imag)), dtype=complex)


def near_axis_singularities(params: ModelParams) -> np.ndarray:
    """Poles and branch points of the boundary data close to the real axis.

    ``+-mu`` and ``+-k`` (branch points), the incident-wave pole ``-k sin(theta0)``
    and the zeros of the eigenvalue product.
    """
    base = [params.mu, -params.mu, params.k, -params.k, -params.k_sin]
    return np.concatenate([np.array(base, dtype=complex), dispersion_zeros(params)])
