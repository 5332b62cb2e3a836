import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conley_infinity.blocks import (
    ENTRANCE,
    ERSATZ_MINUS,
    ERSATZ_PLUS,
    EXIT,
    BlockError,
    GrazingBoundaryError,
    InternalTangencyError,
    PlanarBlock,
    auto_half_disk,
    block_index,
    build_ersatz,
    check_separation,
    classify_boundary,
    complement_disk_family,
    detect,
    detect_witnesses,
    entrance_exit_times,
    label_boundary,
    triangulate,
    verify_isolating_family,
)
from conley_infinity.compactify import HemispherePoint, project
from conley_infinity.indexalg import ConleyIndexTriple, HomotopyClass
from conley_infinity.infinity import StabilityClass, find_equilibria_at_infinity, index_triple_hyperbolic
from conley_infinity.polyfield import Poly, PolyMap, parse_field

SADDLE = parse_field("dx1 = x1; dx2 = -x2")
SINK = parse_field("dx1 = -x1; dx2 = -x2")
SOURCE = parse_field("dx1 = x1; dx2 = x2")
ROTATION = parse_field("dx1 = -x2; dx2 = x1")


def square(h=0.1, cx=0.0, cy=0.0):
    return PlanarBlock.from_vertices([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)])


def half_strip(w=0.3, left=-0.3):
    x, a = math.sqrt(1 - w * w), math.asin(w)
    return PlanarBlock.from_json({"polygons": [{"outer": [
        {"segment": [[left, -w], [x, -w]]},
        {"equator_arc": [-a, a]},
        {"segment": [[x, w], [left, w]]},
        {"segment": [[left, w], [left, -w]]},
    ]}]})


def index_of(f, b, **kw):
    return block_index(b, classify_boundary(f, b), **kw)


# --- geometry ---------------------------------------------------------------

def test_clockwise_outer_ring_rejected():
    with pytest.raises(BlockError):
        PlanarBlock.from_vertices([(0, 0), (0, 0.1), (0.1, 0.1), (0.1, 0)])


def test_vertex_outside_disk_rejected():
    with pytest.raises(BlockError):
        PlanarBlock.from_vertices([(0, 0), (1.2, 0), (0, 0.5)])


def test_json_round_trip():
    b = half_strip()
    again = PlanarBlock.from_json(b.to_json())
    assert again.to_json() == b.to_json()
    assert again.meets_equator() and not square().meets_equator()


def test_contains_and_boundary_points():
    b = square()
    assert b.contains((0, 0)) and not b.contains((0.2, 0))
    assert b.contains((0.1, 0.0), tol=1e-9)
    pts = b.boundary_points(8)
    assert len(pts) == 8 and all(b.contains(p, tol=1e-12) for p in pts)


def test_block_with_hole():
    outer = [(-0.3, -0.3), (0.3, -0.3), (0.3, 0.3), (-0.3, 0.3)]
    hole = [(-0.1, -0.1), (-0.1, 0.1), (0.1, 0.1), (0.1, -0.1)]
    b = PlanarBlock.from_vertices(outer, holes=[hole])
    assert not b.contains((0, 0)) and b.contains((0.2, 0.2))
    # around a source every orbit crosses the annulus, so the invariant set is empty
    assert index_of(SOURCE, b) == ConleyIndexTriple.trivial()


# --- labeling ---------------------------------------------------------------

def test_saddle_square_labels():
    lab = classify_boundary(SADDLE, square())
    assert len(lab.exit_components) == 2 and len(lab.entrance_components) == 2


def test_repelling_point_half_disk_is_all_exit(quad6):
    r = next(e for e in find_equilibria_at_infinity(quad6) if e.stability_class is StabilityClass.REPELLER_LIKE)
    lab = classify_boundary(quad6, PlanarBlock.half_disk(r.theta, 0.1))
    assert lab.subsegments(ENTRANCE) == [] and lab.subsegments(EXIT)


def test_internal_tangency_detected():
    # the orbit circle through (0.4, 0) runs inside the square, touching its right edge
    b = PlanarBlock.from_vertices([(0.2, -0.1), (0.4, -0.1), (0.4, 0.1), (0.2, 0.1)])
    with pytest.raises(InternalTangencyError, match="internal tangency"):
        classify_boundary(ROTATION, b)
    lab = label_boundary(ROTATION, b, strict=False)
    kinds = {(round(t.point[0], 6), t.exterior) for t in lab.tangencies if t.kind == "tangency"}
    assert (0.2, True) in kinds and (0.4, False) in kinds


def test_grazing_edge_detected():
    b = PlanarBlock.from_vertices([(0, 0), (0.1, 0), (0.1, 0.1), (0, 0.1)])
    with pytest.raises(GrazingBoundaryError):
        classify_boundary(SADDLE, b)


# --- index computation -----------------------------------------------------

@pytest.mark.parametrize("f, want", [
    (SADDLE, ConleyIndexTriple.parse("Sigma^1", "Sigma^1", "0")),
    (SINK, ConleyIndexTriple.parse("Sigma^0", "Sigma^0", "0")),
    (SOURCE, ConleyIndexTriple.parse("Sigma^2", "Sigma^2", "0")),
])
def test_finite_block_indices(f, want):
    assert index_of(f, square()) == want


def test_half_strip_indices():
    assert index_of(SADDLE, half_strip()) == ConleyIndexTriple.parse("0", "Sigma^1", "Sigma^0")
    assert index_of(-SADDLE, half_strip()) == ConleyIndexTriple.parse("Sigma^1", "0", "Sigma^1")


def test_triangulation_euler_characteristic():
    cx = triangulate(classify_boundary(SADDLE, half_strip()))
    assert cx.N.euler_characteristic() == 1


def test_half_disks_match_lookup(quad6):
    eqs = find_equilibria_at_infinity(quad6)
    angles = [e.theta for e in eqs]
    for eq in eqs:
        auto = auto_half_disk(quad6, eq.theta, angles)
        assert auto.triple == index_triple_hyperbolic(eq), eq.stability_class


@st.composite
def hyperbolic_fields(draw):
    c = draw(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
    exps = [(2, 0), (1, 1), (0, 2)]
    lin = draw(st.lists(st.integers(-2, 2), min_size=2, max_size=2))
    f = PolyMap([Poly.from_terms(2, list(zip(exps, c[:3])) + [((1, 0), lin[0])]),
                 Poly.from_terms(2, list(zip(exps, c[3:])) + [((0, 1), lin[1])])])
    assume(f.degree == 2)
    try:
        eqs = find_equilibria_at_infinity(f)
    except ValueError:
        assume(False)
    assume(eqs and all(e.hyperbolic and abs(e.lambda_tan) > 0.1 and abs(e.lambda_rad) > 0.1 for e in eqs))
    return f, eqs


@settings(max_examples=10)
@given(hyperbolic_fields())
def test_time_reversal_swaps_exit_and_entrance(data):
    f, eqs = data
    angles = [e.theta for e in eqs]
    for eq in eqs:
        auto = auto_half_disk(f, eq.theta, angles)
        b = auto.block
        assert block_index(b, classify_boundary(f, b), exit_as_N1=False) == index_of(-f, b)


# --- ersatz and detection ---------------------------------------------------

def test_ersatz_counts_components():
    lab = classify_boundary(SADDLE, half_strip())
    model = build_ersatz(half_strip(), lab)
    assert len(model.b_plus) == 2 and len(model.b_minus) == 1
    assert model.triple_minus == ERSATZ_MINUS
    assert model.triple_plus == ERSATZ_PLUS.wedge(ERSATZ_PLUS)


def test_detection_message():
    hI = ConleyIndexTriple.parse("0", "Sigma^1", "Sigma^0")
    rep = ConleyIndexTriple.parse("Sigma^1", "Sigma^1", "0")
    w = detect_witnesses(hI, rep, ERSATZ_MINUS)
    assert w[0].component == "relH"
    assert str(w[0]) == "relH: 0̄ ≠ Σ¹∨Σ⁰"


def test_equal_wedge_detects_nothing():
    a = ConleyIndexTriple.parse("Sigma^0", "0", "Sigma^0")
    r = ConleyIndexTriple.parse("0", "Sigma^2", "Sigma^1")
    assert not detect(a.wedge(r), r, a)


@given(st.lists(st.integers(0, 2), min_size=9, max_size=9))
def test_detect_is_componentwise_betti_comparison(b):
    t = [ConleyIndexTriple.from_betti(b[i:i + 1], b[i + 1:i + 2], b[i + 2:i + 3]) for i in (0, 3, 6)]
    hI, rep, att = t
    assert detect(hI, rep, att) == (hI != rep.wedge(att))


# --- times and separation ----------------------------------------------------

def _exit_time_oracle(x0, h):
    """Exit time of exp(t diag(1, -1)) x0 through chi1 = h, by bisection on the closed form."""
    def chi1(t):
        x = np.array([x0[0] * math.exp(t), x0[1] * math.exp(-t)])
        return x[0] / math.sqrt(1 + x @ x)
    lo, hi = 0.0, 20.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if chi1(mid) < h else (lo, mid)
    return hi


def test_entrance_exit_times_against_closed_form():
    b = square(0.1)
    x0 = np.array([0.01, 0.05])
    times = entrance_exit_times(SADDLE, b, project(x0), tol=1e-10)
    assert times.t_plus == pytest.approx(_exit_time_oracle(x0, 0.1), abs=1e-6)
    assert times.t_minus < 0
    assert abs(abs(times.exit_point.chi[0]) - 0.1) < 1e-6


def test_orbit_that_never_leaves():
    times = entrance_exit_times(SADDLE, square(0.1), project([0.0, 0.0]), horizon=5.0)
    assert times.t_plus == math.inf and times.t_minus == -math.inf


def test_point_outside_block_rejected():
    with pytest.raises(BlockError):
        entrance_exit_times(SADDLE, square(0.1), project([0.5, 0.5]))


def _chord(c):
    a = math.asin(c)
    p, q = [math.cos(a), -c], [-math.cos(a), -c]
    return PlanarBlock.from_json({"polygons": [{"outer": [
        {"equator_arc": [-a, math.pi + a]}, {"segment": [q, p]}]}]})


def test_separation():
    bottom = PlanarBlock.half_disk(1.5 * math.pi, 1.0)  # below chi2 = -cos(1)
    assert check_separation([_chord(0.8), bottom])
    assert not check_separation([_chord(0.3), bottom])
    assert not check_separation([PlanarBlock.half_disk(0.0, 0.5), PlanarBlock.half_disk(math.pi, 0.5)])
    with pytest.raises(ValueError):
        check_separation([bottom])


def test_complement_disk_family_is_nested():
    fam = complement_disk_family(1.5 * math.pi, 0.6, 0.0)
    small, big = fam(0.0), fam(0.9)
    with pytest.raises(BlockError):
        fam(1.0)
    assert big.geometry.area > small.geometry.area
    assert big.geometry.buffer(1e-3).contains(small.geometry)


def test_family_check_smoke():
    f = parse_field("dx1 = x1; dx2 = -x2 - x1^2")
    rep = verify_isolating_family(f, complement_disk_family(1.5 * math.pi, 0.6, 0.3), samples=4,
                                  lambdas=[0.0, 0.5], horizon=20)
    assert rep.heuristic and not rep.failures


SHEARED = parse_field("dx1 = -x1*x2 - x2^2 + 2*x1 - x2 + 3; dx2 = -x1^2 - 3*x1*x2 + x2^2 - 3*x1 + x2 - 2")


def test_chart_linearization_matches_equilibrium_eigenvalues():
    from conley_infinity.blocks import chart_linearization

    for eq in find_equilibria_at_infinity(SHEARED):
        lam_tan, g, lam_rad = chart_linearization(SHEARED, eq.theta)
        assert lam_tan == pytest.approx(eq.lambda_tan, abs=1e-9)
        assert lam_rad == pytest.approx(eq.lambda_rad, abs=1e-9)


def test_strong_shear_needs_chart_box():
    from conley_infinity.blocks import chart_linearization

    eqs = find_equilibria_at_infinity(SHEARED)
    r = next(e for e in eqs if e.stability_class is StabilityClass.REPELLER_LIKE
             and chart_linearization(SHEARED, e.theta)[1] ** 2 > 4 * e.lambda_tan * e.lambda_rad)
    # the flux through every round half-disk changes sign, at every scale
    for delta in (0.05, 0.01, 0.002):
        with pytest.raises(InternalTangencyError):
            classify_boundary(SHEARED, PlanarBlock.half_disk(r.theta, delta))
    auto = auto_half_disk(SHEARED, r.theta, [e.theta for e in eqs])
    assert auto.triple == index_triple_hyperbolic(r)
    assert auto.labeling.subsegments(ENTRANCE) == []


def test_chart_box_geometry():
    b = PlanarBlock.chart_box(0.3, 0.1, 0.05, segments=20)
    assert b.meets_equator()
    assert b.contains((math.cos(0.3) * 0.9999, math.sin(0.3) * 0.9999))
    assert not b.contains((0.0, 0.0))
