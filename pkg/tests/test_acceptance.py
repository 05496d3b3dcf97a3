"""Acceptance criteria, one printed PASS/FAIL line each (also repeated in the summary).

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they are
produced.  Three checks are known to fail; see the notes next to them.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from panelscatter.field import theta_nodes
from panelscatter.jacobi import boundedness_residual
from panelscatter.params import derive_params
from panelscatter.pipeline import (
    decay_slopes,
    far_field_drift,
    helmholtz_residual,
    identity_residuals,
    sample_points,
    solve,
)
from panelscatter.presets import figure_preset

TAU_FIG9 = complex(0.96881, 0.17439)


def report(criterion, label, value, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion:<3} {label:<44} {value}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def preset_id(sol):
    return "fig9" if sol.params.inputs == figure_preset(9).inputs else "fig3"


# --- 1 ----------------------------------------------------------------------------

def test_c1_tau_anchor():
    t0 = time.perf_counter()
    tau = derive_params(figure_preset(9).inputs).tau
    dt = time.perf_counter() - t0
    err = max(abs(tau.real - TAU_FIG9.real), abs(tau.imag - TAU_FIG9.imag))
    assert report("1", "tau fig9", f"{tau.real:.5f}{tau.imag:+.5f}i", err < 1e-4 and dt < 1.0,
                  f"err {err:.1e}, {dt * 1e3:.1f} ms")


# --- 2 ----------------------------------------------------------------------------

@pytest.mark.parametrize("fig", [3, 9])
def test_c2_factorization(fig):
    t0 = time.perf_counter()
    sol = solve(figure_preset(fig).inputs, nodes=1000)
    res = sol.factors.factorization_residual(sample_points())
    dt = time.perf_counter() - t0
    assert report("2", f"factorization fig{fig} (n=1000)", f"{res:.2e}", res < 1e-6 and dt < 60,
                  f"{dt:.1f} s")


def test_c2_factorization_defaults(solved):
    res = solved.factors.factorization_residual(sample_points())
    assert report("2", f"factorization {preset_id(solved)} (n={solved.nodes})", f"{res:.2e}", res < 1e-6)


# --- 3 ----------------------------------------------------------------------------

def test_c3a_one_integral_sheet(solved):
    jac = solved.jacobi
    ok = jac.integer_residual < 1e-4
    assert report("3a", f"integral lattice coords {preset_id(solved)}", f"{jac.integer_residual:.2e}", ok,
                  f"sheet {jac.sheet1}, (m_a, m_b) = ({jac.m_a}, {jac.m_b})")


def test_c3b_theta_zero(solved):
    v = solved.jacobi.theta_residual
    assert report("3b", f"|theta(omega_hat(q1) - e1)| {preset_id(solved)}", f"{v:.2e}", v < 1e-8)


def test_c3c_boundedness_sum(solved):
    v = abs(boundedness_residual(solved.surface, solved.grid, solved.jacobi))
    assert report("3c", f"four-integral sum {preset_id(solved)}", f"{v:.2e}", v < 1e-8)


def test_c3d_far_field(solved):
    # Known failure for fig9: w chi2 approaches its limit like k tau log|s|/|s|,
    # and |k tau| is about 1 there, so the drift between 1e3 and 1e4 is ~3e-4.
    v = far_field_drift(solved)
    assert report("3d", f"| |w chi2|(1e4) - |w chi2|(1e3) | {preset_id(solved)}", f"{v:.2e}", v < 1e-5)


# --- 4 ----------------------------------------------------------------------------

def test_c4_boundary_condition(solved):
    v = solved.solver.boundary_residual(sample_points())
    assert report("4", f"boundary condition {preset_id(solved)}", f"{v:.2e}", v < 1e-6)


def test_c4_displacement(solved):
    v = abs(solved.solver.displacement_integral())
    assert report("4", f"displacement integral {preset_id(solved)}", f"{v:.2e}", v < 1e-6)


# --- 5 ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def slopes(fig3, fig9):
    return {3: decay_slopes(fig3), 9: decay_slopes(fig9)}


@pytest.mark.parametrize("fig", [3, 9])
def test_c5_slope_phi0(slopes, fig):
    v = slopes[fig][0]
    assert report("5", f"slope |Phi0+ + Phi0-| fig{fig}", f"{v:.3f}", abs(v + 3) < 0.1, "target -3")


@pytest.mark.parametrize("fig", [3, 9])
def test_c5_slope_phi1(slopes, fig):
    # Known failure for fig3: the t^-2 coefficient is proportional to k tau
    # (about 0.01 here), so the t^-3 term still dominates on [1e2, 1e4].
    v = slopes[fig][1]
    assert report("5", f"slope |Phi1+ + Phi1-| fig{fig}", f"{v:.3f}", abs(v + 2) < 0.1, "target -2")


# --- 6 ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["lambda_det", "det_G", "theta_period", "theta_quasi_period"])
def test_c6_identities(solved, name):
    v = identity_residuals(solved)[name]
    assert report("6", f"{name} {preset_id(solved)}", f"{v:.2e}", v < 1e-10)


# --- 7 ----------------------------------------------------------------------------

def test_c7_helmholtz(solved):
    v = helmholtz_residual(solved)
    assert report("7", f"Helmholtz residual {preset_id(solved)}", f"{v:.2e}", v < 1e-3)


# --- 8 ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def sweeps(fig3, fig9):
    th = theta_nodes()
    r = np.full(th.shape, 5.0)
    fig5 = solve(figure_preset(5).inputs)
    return th, {3: fig3.field.P(r, th), 5: fig5.field.P(r, th), 9: fig9.field.P(r, th)}


def test_c8a_resonance_raises_max(sweeps):
    # Known failure as worded: over the full circle the maximum sits in the lower
    # half-plane, where the incident and reflected waves dominate and are the
    # same for both presets up to attenuation.  The scattered part is larger
    # for fig9 (see the informational line).
    th, P = sweeps
    upper = th < np.pi
    report("8a", "max_upper P(r=5) fig9 vs fig3 (info)", f"{P[9][upper].max():.4f} vs {P[3][upper].max():.4f}",
           P[9][upper].max() > P[3][upper].max())
    ok = P[9].max() > P[3].max()
    assert report("8a", "max_theta P(r=5) fig9 > fig3", f"{P[9].max():.4f} vs {P[3].max():.4f}", ok)


def test_c8b_membrane_density(sweeps):
    # the reported direction: a heavier membrane (ratio 100) lowers the upper field
    th, P = sweeps
    upper = th < np.pi
    a, b = P[3][upper].max(), P[5][upper].max()
    assert report("8b", "max_upper P fig3 (ratio 100) < fig5 (500)", f"{a:.4f} vs {b:.4f}", a < b)


# --- 9 ----------------------------------------------------------------------------

def reported(sol):
    th = theta_nodes()
    c = sol.solver.constants
    return {
        "P": sol.field.P(np.full(th.shape, 5.0), th),
        "C": c.C,
        "N": c.N,
        "zeta1": sol.jacobi.zeta1,
        "h0": sol.factors.h0,
    }


@pytest.mark.parametrize("fig", [3, 9])
def test_c9_convergence(fig, fig3, fig9):
    base = fig3 if fig == 3 else fig9
    t0 = time.perf_counter()
    full = solve(figure_preset(fig).inputs)
    a = reported(full)
    runtime = time.perf_counter() - t0
    b = reported(solve(figure_preset(fig).inputs, nodes=2 * base.nodes))
    change = max(float(np.max(np.abs(np.asarray(a[k]) - b[k]) / np.abs(b[k]))) for k in a)
    ok = change < 1e-4 and runtime < 300
    assert report("9", f"n -> 2n fig{fig} (n={base.nodes})", f"{change:.2e}", ok,
                  f"pipeline + 720-point sweep {runtime:.1f} s")
