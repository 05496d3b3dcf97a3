import math

import numpy as np
import pytest

from panelscatter.field import FieldEvaluator, FieldRule, radius_nodes, radius_sweep, theta_nodes, theta_sweep
from panelscatter.pipeline import hard_screen_residual, helmholtz_residual
from panelscatter.presets import figure_preset


def test_helmholtz_single_point(fig3):
    pt = 3.0 * np.array([[math.cos(math.pi / 3), math.sin(math.pi / 3)]])
    assert helmholtz_residual(fig3, points=pt) < 1e-3


def test_helmholtz_lower_half(fig9):
    pt = np.array([[1.5, -2.0], [-3.0, -0.5]])
    assert helmholtz_residual(fig9, points=pt) < 1e-3


@pytest.mark.parametrize("x", [-0.5, -2.0, -6.0])
def test_hard_screen(solved, x):
    assert hard_screen_residual(solved, x=x) < 1e-4


def test_geometric_wave_is_hard_on_the_axis(fig3):
    h = 1e-6
    x = np.array([-3.0, 0.5, 4.0])
    g = fig3.field.geometric
    dy = (g(x, np.full(3, h)) - g(x, np.full(3, -h))) / (2 * h)
    assert np.max(np.abs(dy)) < 1e-8


def test_edge_limit_is_one_sided_continuous(fig3):
    # the potential stays bounded at the edge, with one limit per half-plane
    upper = np.array([0.5, 1.5, 3.0])
    lower = upper + math.pi
    spread = []
    for r in (1e-2, 1e-3, 1e-4):
        for th in (upper, lower):
            p = fig3.field.P(r, th)
            spread.append(np.ptp(p) / np.mean(p))
    up, low = spread[0::2], spread[1::2]
    assert all(b < a for a, b in zip(up, up[1:]))
    assert all(b < a for a, b in zip(low, low[1:]))
    assert up[-1] < 1e-3 and low[-1] < 1e-3


def test_rule_refinement(fig3):
    fe = fig3.field
    fine = FieldEvaluator(fig3.solver, FieldRule(2 * fe.rule.n, singularities=fe.rule.singularities))
    th = np.array([0.7, 2.0, 4.0, 5.5])
    for r in (5.0, 20.0):
        a, b = fe.scattered(r, th), fine.scattered(r, th)
        assert np.max(np.abs(a - b) / np.abs(b)) < 1e-6


def test_rule_breakpoints_refined_at_singularities(fig3):
    rule = fig3.field.rule
    b = rule.breakpoints
    assert b[0] == -rule.cutoff and b[-1] == rule.cutoff
    assert np.all(np.diff(b) > 0)
    p = fig3.params.mu
    near = b[np.abs(b - p.real) < rule.cutoff / rule.n]
    assert np.min(np.diff(near)) < abs(p.imag)


def test_scattered_field_decays(fig3):
    th = np.array([0.7, 2.0, 4.0, 5.5])
    assert np.all(np.abs(fig3.field.scattered(40.0, th)) < 0.2 * np.abs(fig3.field.scattered(10.0, th)))


def test_rejects_bad_points(fig3):
    with pytest.raises(ValueError):
        fig3.field.scattered(0.0, 1.0)
    with pytest.raises(ValueError):
        fig3.field.scattered(2.0, math.pi)


def test_total_field_composition(fig3):
    fe = fig3.field
    r, th = 3.0, np.array([1.0, 4.0])
    phi = fe.scattered(r, th)
    tot = fe.total(r, th)
    assert tot[0] == phi[0]
    x, y = r * np.cos(th[1]), r * np.sin(th[1])
    assert abs(tot[1] - phi[1] - fe.geometric(x, y)) < 1e-14


def test_theta_nodes():
    th = theta_nodes()
    assert th.size == 720
    assert np.all(np.diff(th) > 0)
    for ray in (0.0, math.pi, 2 * math.pi):
        assert np.min(np.abs(th - ray)) >= 1e-3 - 1e-15
    with pytest.raises(ValueError):
        theta_nodes(11)


def test_theta_sweep_samples(fig3):
    samples = theta_sweep(fig3.field, 5.0, count=8)
    assert len(samples) == 8
    assert all(s.r == 5.0 and s.P > 0 for s in samples)
    assert samples[0].P == pytest.approx(float(fig3.field.P(5.0, samples[0].theta)))


def test_radius_sweep_continuity(fig3):
    # the sampling resolves the field: neighbouring samples differ by < 10 %
    angles = figure_preset(7).thetas
    sweeps = radius_sweep(fig3.field, angles)
    assert len(sweeps) == len(angles)
    for samples in sweeps.values():
        P = np.array([s.P for s in samples])
        assert P.size == 500
        assert np.max(np.abs(np.diff(P)) / P[:-1]) < 0.1
    assert radius_nodes()[0] == 1.0 and radius_nodes()[-1] == 10.0
