import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conley_infinity.compactify import HemispherePoint, lift, project
from conley_infinity.flowsim import (
    FlowIntegrator,
    IntegratorOptions,
    TargetBall,
    Termination,
    connection_probe,
    integrate,
    portrait_svg,
    sample_portrait,
    seed_grid,
    write_csv,
)
from conley_infinity.infinity import StabilityClass, find_equilibria_at_infinity
from conley_infinity.polyfield import parse_field

FAST = IntegratorOptions(max_step=0.1)


@settings(max_examples=15)
@given(st.floats(0, 2 * math.pi))
def test_equator_seeds_stay_on_equator(theta):
    f = parse_field("dx1 = x1^2 + x2^2 - 1; dx2 = 5*(x1*x2 - 1)")
    tr = integrate(f, HemispherePoint.from_angle(theta), 5.0, FAST)
    assert all(p.z == 0.0 for _, p in tr.samples)
    assert tr.max_norm_drift <= 1e-6


@settings(max_examples=15)
@given(st.floats(-2, 2), st.floats(-2, 2), st.sampled_from([1, -1]))
def test_norm_is_preserved(a, b, sign):
    f = parse_field("dx1 = x1^2 + x2^2 - 1; dx2 = 5*(x1*x2 - 1)")
    tr = integrate(f, project([a, b]), sign * 5.0, FAST)
    assert tr.max_norm_drift <= 1e-6
    assert all(p.norm_error() <= 1e-6 for _, p in tr.samples)


def test_linear_flow_matches_exponential():
    """Degree one needs no time rescaling, so the lift follows exp(t A) exactly."""
    f = parse_field("dx1 = x1; dx2 = -2 x2")
    x0 = np.array([0.3, 1.5])
    tr = integrate(f, project(x0), 1.0)
    assert tr.termination is Termination.HORIZON_REACHED
    assert np.allclose(lift(tr.end), x0 * np.exp([1.0, -2.0]), rtol=1e-6)


def test_backward_run_reverses_forward_run():
    f = parse_field("dx1 = x1^2 + x2^2 - 1; dx2 = 5*(x1*x2 - 1)")
    start = project([0.2, -0.1])
    fwd = integrate(f, start, 0.5)
    back = integrate(f, fwd.end, -0.5)
    assert back.direction == -1
    assert np.allclose(back.end.vector, start.vector, atol=1e-6)


def test_chart_and_hemisphere_agree_near_switch():
    f = parse_field("dx1 = x1^2 - x2; dx2 = x1 x2 + 1")
    start = HemispherePoint.from_angle(0.7, 0.2)
    a = integrate(f, start, 1.0, IntegratorOptions(chart_switch=0.05))
    b = integrate(f, start, 1.0, IntegratorOptions(chart_switch=0.5))
    assert np.allclose(a.end.vector, b.end.vector, atol=1e-5)


def test_target_ball_stops_integration():
    f = parse_field("dx1 = -x1; dx2 = -x2")
    tr = integrate(f, project([1.0, 1.0]), 50.0, target=TargetBall(project([0.0, 0.0]), 1e-2))
    assert tr.termination is Termination.ENTERED_TARGET_BALL
    assert tr.end_time < 50.0


def test_domain_exit_reported():
    f = parse_field("dx1 = 1; dx2 = 0")
    tr = integrate(f, project([0.0, 0.0]), 50.0, domain=lambda p: p.chi[0] < 0.5)
    assert tr.termination is Termination.LEFT_DOMAIN


def test_step_bounds_checked():
    with pytest.raises(ValueError):
        IntegratorOptions(step=1.0)


def test_probe_from_repelling_point_reaches_attracting_point(quad6):
    eqs = find_equilibria_at_infinity(quad6)
    r = next(e for e in eqs if e.stability_class is StabilityClass.REPELLER_LIKE)
    targets = [e for e in eqs if e.stability_class is StabilityClass.ATTRACTOR_LIKE]
    hits = [connection_probe(quad6, r, TargetBall(HemispherePoint.from_angle(a.theta), 1e-2), horizon=100.0)
            for a in targets]
    assert any(rep.reached and rep.first_entry < 100.0 for rep in hits)


def test_probe_needs_unstable_direction(quad6):
    a = next(e for e in find_equilibria_at_infinity(quad6) if e.stability_class is StabilityClass.ATTRACTOR_LIKE)
    with pytest.raises(ValueError):
        connection_probe(quad6, a, TargetBall(HemispherePoint.from_angle(0.0), 1e-2))


def test_seed_grid_inside_disk():
    seeds = seed_grid(5)
    assert seeds and all(np.hypot(*s.chi) < 1 for s in seeds)
    assert seed_grid(0) == []


def test_portrait_svg_is_deterministic(tmp_path, quad6):
    trs = sample_portrait(quad6, seed_grid(3), t_span=2.0)
    eqs = find_equilibria_at_infinity(quad6)
    svg = portrait_svg(trs, eqs)
    assert svg == portrait_svg(sample_portrait(quad6, seed_grid(3), t_span=2.0), eqs)
    assert svg.count('class="equilibrium"') == 6
    assert 'class="equator"' in svg
    write_csv(trs, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().startswith("trajectory,direction,t")


def test_fixed_step_matches_adaptive_for_short_step():
    f = parse_field("dx1 = x2; dx2 = -x1")
    start = project([1.0, 0.0])
    one = FlowIntegrator(f).fixed_step(start, 1e-3)
    tr = integrate(f, start, 1e-3)
    assert np.allclose(one.vector, tr.end.vector, atol=1e-10)
