import cmath
import math

import numpy as np
import pytest

from panelscatter.errors import ResonanceError
from panelscatter.params import (
    PhysicalInputs,
    _delta_continued,
    coefficient_matrix,
    derive_params,
    dispersion_zeros,
    eigen_data,
    f_poly,
    f_sqrt,
    gamma,
    near_axis_singularities,
    winding_number,
)
from panelscatter.presets import QUOTED_TAU_FIG3, figure_preset
from panelscatter.quadrature import CircleGrid

# [PAPER] quoted for the Fig. 9 cell
TAU_FIG9 = complex(0.96881, 0.17439)


def test_tau_fig9_anchor(params9):
    assert abs(params9.tau.real - TAU_FIG9.real) < 1e-4
    assert abs(params9.tau.imag - TAU_FIG9.imag) < 1e-4


def test_tau_fig3_direct_formula(params3):
    # [DERIVED] plain complex arithmetic on the preset values
    k = cmath.exp(1j * math.atan(0.1))
    V = 0.01 ** 3
    expected = k * 0.01 / (1 - k * k * V / (2 * 0.001))
    assert abs(params3.tau - expected) < 1e-14
    assert abs(params3.tau - complex(0.00995, 0.00100)) < 1e-4
    # the quoted value is five times larger; kept only as an override
    assert abs(params3.tau - QUOTED_TAU_FIG3) > 1e-2


def test_derived_constants(params3):
    p = params3
    inp = p.inputs
    assert abs(p.k - inp.abs_k * cmath.exp(1j * inp.arg_k)) < 1e-15
    assert abs(p.alpha - inp.abs_alpha * cmath.exp(2j * inp.arg_k)) < 1e-12
    assert abs(p.mu ** 2 * inp.rho_f_over_m0 - p.alpha) < 1e-12
    assert -math.pi / 2 < cmath.phase(p.mu) <= math.pi / 2
    assert abs(p.m - 2 * p.alpha / (p.k * p.tau)) < 1e-9 * abs(p.m)
    assert p.k_res == pytest.approx(math.sqrt(2 * inp.a / inp.cell_volume))


def test_tau_override():
    p = derive_params(figure_preset(3).inputs, tau_override=QUOTED_TAU_FIG3)
    assert p.tau == QUOTED_TAU_FIG3
    assert abs(p.m - 2 * p.alpha / (p.k * QUOTED_TAU_FIG3)) < 1e-9 * abs(p.m)


def test_resonance_error():
    base = figure_preset(3).inputs
    k_res = math.sqrt(2 * base.a / base.cell_volume)
    inp = PhysicalInputs(**{**base.__dict__, "abs_k": k_res, "arg_k": 1e-9})
    with pytest.raises(ResonanceError):
        derive_params(inp)


@pytest.mark.parametrize("field,value", [("arg_k", 0.0), ("arg_k", 2.0), ("theta0", 0.0), ("d", -1.0), ("a", 0.0)])
def test_inputs_validated(field, value):
    base = figure_preset(3).inputs.__dict__
    with pytest.raises(ValueError, match=field):
        PhysicalInputs(**{**base, field: value})


# --- gamma ---------------------------------------------------------------------

def test_gamma_anchors(params3):
    p = params3
    assert abs(gamma(0.0, p) - (-1j * p.k)) < 1e-15
    assert abs(gamma(p.k, p)) < 1e-15
    assert abs(gamma(-p.k, p)) < 1e-15


def test_gamma_real_axis(params3):
    t = CircleGrid(200).t
    g = gamma(t, params3)
    assert np.all(g.real > 0)
    assert np.max(np.abs(g * g - (t * t - params3.k ** 2)) / np.abs(t * t - params3.k ** 2)) < 1e-12
    big = np.array([-1e6, 1e6])
    assert np.allclose(gamma(big, params3) / np.abs(big), 1.0, atol=1e-9)


def test_gamma_path_continuation(params3):
    # [DERIVED] follow the root of s^2 - k^2 from gamma(0) = -ik along [0, 10]
    k = params3.k
    prev = -1j * k
    for s in np.linspace(0.0, 10.0, 20001)[1:]:
        r = cmath.sqrt(s * s - k * k)
        prev = r if abs(r - prev) < abs(r + prev) else -r
    assert abs(gamma(10.0, params3) - prev) < 1e-12


# --- f_sqrt --------------------------------------------------------------------

def test_f_sqrt_zeros_and_square(params3):
    p = params3
    s1, s2 = p.branch_points
    assert s1.real < 0 < s1.imag and s2.real > 0 and s2.imag > 0
    # a square root of a rounded zero: relative size ~ sqrt(machine epsilon)
    assert abs(f_sqrt(s1, p)) < 1e-6 * abs(s1) ** 2
    assert abs(f_sqrt(-s2, p)) < 1e-6 * abs(s2) ** 2
    rng = np.random.default_rng(1)
    z = rng.normal(size=50) * 3 + 1j * rng.normal(size=50) * 3
    assert np.max(np.abs(f_sqrt(z, p) ** 2 - f_poly(z, p)) / np.abs(f_poly(z, p))) < 1e-12


def test_f_sqrt_infinity(params3):
    r = np.logspace(2, 8, 7)
    s = r * np.exp(0.25j * np.pi)
    ratio = f_sqrt(s, params3) / s ** 2
    # f/s^4 = 1 - 2 mu^2/s^2 + (mu^4 + m^2)/s^4
    p = params3
    bound = 2 * (abs(p.mu) ** 2 / r ** 2 + abs(p.m) ** 2 / r ** 4) + 1e-15
    assert np.all(np.abs(ratio - 1) < bound)


def test_f_sqrt_jump_only_on_cuts(params3):
    p = params3
    s1, s2 = p.branch_points
    eps = 1e-9
    for a, b in ((s1, s2), (-s2, -s1)):
        mid = 0.5 * (a + b)
        normal = 1j * (b - a) / abs(b - a)
        left, right = f_sqrt(mid + eps * normal, p), f_sqrt(mid - eps * normal, p)
        assert abs(left + right) < 1e-6 * abs(left)
    # continuous across the real axis and across the segment joining the cuts
    for z in (0.3, -2.0, 0.5 * (s2 - s1) + 0.0):
        normal = 1j if abs(complex(z).imag) < 1e-12 else 1.0
        assert abs(f_sqrt(z + eps * normal, p) - f_sqrt(z - eps * normal, p)) < 1e-6


# --- eigenvalues ---------------------------------------------------------------

def test_delta_is_det_G(params9):
    rng = np.random.default_rng(0)
    t = rng.normal(size=100) * 5
    ed = eigen_data(t, params9)
    det = np.linalg.det(coefficient_matrix(t, params9))
    assert np.max(np.abs(ed.Delta - det) / np.abs(det)) < 1e-12


@pytest.mark.parametrize("which", [3, 9])
def test_eigen_asymptotics(which, params3, params9):
    # [PAPER] Delta ~ 1 - k tau/|t|, epsilon ~ 1 + k tau/|t|
    p = params3 if which == 3 else params9
    kt = p.k * p.tau
    for t in (1e5, -1e5):
        ed = eigen_data(np.array([t]), p)
        assert abs((ed.Delta[0] - 1) * abs(t) + kt) < 1e-3 * abs(kt) + 1e-8
        assert abs((ed.epsilon[0] - 1) * abs(t) - kt) < 1e-3 * abs(kt) + 1e-8


@pytest.mark.parametrize("which", [3, 9])
def test_eigen_winding_zero(which, params3, params9):
    p = params3 if which == 3 else params9
    ed = eigen_data(CircleGrid(2000).t, p)
    assert winding_number(ed.lambda1) == 0
    assert winding_number(ed.lambda2) == 0


def test_winding_number_counts_turns():
    phi = np.linspace(0, 2 * np.pi, 400)
    assert winding_number(np.exp(2j * phi)) == 2
    assert winding_number(np.exp(-1j * phi)) == -1


# --- singularities near the axis -------------------------------------------------

# [DERIVED] frozen from the Newton iteration in dispersion_zeros (n-independent)
ZEROS = {3: complex(2.78437, 0.19058), 9: complex(2.99762, 0.09120)}


@pytest.mark.parametrize("which", [3, 9])
def test_dispersion_zeros(which, params3, params9):
    p = params3 if which == 3 else params9
    z = dispersion_zeros(p)
    assert np.all(np.abs(_delta_continued(z, p)) < 1e-10)
    ref = ZEROS[which]
    assert np.min(np.abs(z - ref)) < 1e-5
    assert np.min(np.abs(z + ref)) < 1e-5


def test_near_axis_singularities_contents(params3):
    p = params3
    pts = near_axis_singularities(p)
    for q in (p.mu, -p.mu, p.k, -p.k, -p.k_sin):
        assert np.min(np.abs(pts - q)) < 1e-12
    assert np.all(pts.imag != 0)
