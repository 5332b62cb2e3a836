"""End-to-end acceptance checks; each prints one PASS/FAIL line.

Run alone with ``pytest -s tests/test_acceptance.py`` or through
``python3 scripts/run_acceptance.py``.  The lines are also repeated in the
pytest terminal summary.
"""
import math
import time

import numpy as np
import pytest

from conley_infinity import fixtures as fx
from conley_infinity.blocks import auto_half_disk, verify_isolating_family
from conley_infinity.compactify import HemispherePoint, project
from conley_infinity.flowsim import IntegratorOptions, TargetBall, connection_probe, integrate
from conley_infinity.homology import SimplicialComplex, betti_reduced, betti_relative
from conley_infinity.indexalg import (
    ClassifyMode,
    ConleyIndexTriple,
    ConnectionVerdict,
    TripleType,
    classify_triple,
    duality_check,
    existence_verdict,
    hat_index,
    parse_class,
)
from conley_infinity.infinity import StabilityClass, find_equilibria_at_infinity, index_triple_hyperbolic
from conley_infinity.polyfield import Poly, PolyMap, parse_field

from conftest import QUADRATIC_SIX, six_angles
from test_homology import annulus, cycle, smith_relative_betti

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


# --- 1 ---------------------------------------------------------------------------

TABLE = {
    StabilityClass.ATTRACTOR_LIKE: ("Sigma^0", "0", "Sigma^0"),
    StabilityClass.REPELLER_LIKE: ("0", "Sigma^2", "Sigma^1"),
    StabilityClass.SADDLE_RAD_UNSTABLE: ("0", "Sigma^1", "Sigma^0"),
    StabilityClass.SADDLE_RAD_STABLE: ("Sigma^1", "0", "Sigma^1"),
}


def test_quadratic_six_equilibria_pipeline():
    t0 = time.perf_counter()
    f = parse_field(QUADRATIC_SIX)
    eqs = find_equilibria_at_infinity(f)
    triples = [index_triple_hyperbolic(e) for e in eqs]
    elapsed = time.perf_counter() - t0
    angles_ok = len(eqs) == 6 and np.allclose([e.theta for e in eqs], six_angles(), atol=1e-8)
    classes = [e.stability_class for e in eqs]
    counts_ok = (classes.count(StabilityClass.ATTRACTOR_LIKE) == 2 and classes.count(StabilityClass.REPELLER_LIKE) == 2
                 and classes.count(StabilityClass.SADDLE_RAD_STABLE) == 1
                 and classes.count(StabilityClass.SADDLE_RAD_UNSTABLE) == 1)
    symbolic = all(t.relH.to_form_string() == TABLE[c][0] and t.relHE.to_form_string() == TABLE[c][1]
                   and t.relE.to_form_string() == TABLE[c][2] for t, c in zip(triples, classes))
    betti = all(t == ConleyIndexTriple.parse(*TABLE[c]) for t, c in zip(triples, classes))
    ok = angles_ok and counts_ok and symbolic and betti and elapsed < 1.0
    report(1, "six equilibria at infinity with the tabulated index triples", ok, f"{elapsed * 1e3:.1f} ms")


# --- 2 ---------------------------------------------------------------------------

def _random_hyperbolic_quadratic(rng):
    exps2 = [(2, 0), (1, 1), (0, 2)]
    lower = [(1, 0), (0, 1), (0, 0)]
    while True:
        c = rng.integers(-3, 4, size=12)
        f = PolyMap([Poly.from_terms(2, list(zip(exps2 + lower, c[:6]))),
                     Poly.from_terms(2, list(zip(exps2 + lower, c[6:])))])
        if f.degree != 2:
            continue
        try:
            eqs = find_equilibria_at_infinity(f)
        except ValueError:
            continue
        if eqs and all(e.hyperbolic and min(abs(e.lambda_tan), abs(e.lambda_rad)) > 0.05 for e in eqs):
            return f, eqs


def test_lookup_matches_half_disk_blocks():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240607)
    mismatches, checked = [], 0
    for k in range(25):
        f, eqs = _random_hyperbolic_quadratic(rng)
        angles = [e.theta for e in eqs]
        for e in eqs:
            checked += 1
            got = auto_half_disk(f, e.theta, angles).triple
            if got != index_triple_hyperbolic(e):
                mismatches.append((k, e.theta))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60
    report(2, "hyperbolic lookup equals half-disk block index on 25 random quadratic fields", ok,
           f"{checked} equilibria, {len(mismatches)} mismatches, {elapsed:.1f} s")


# --- 3 ---------------------------------------------------------------------------

def test_duality():
    f = parse_field(QUADRATIC_SIX)
    seen = {}
    for e in find_equilibria_at_infinity(f):
        seen[e.stability_class] = duality_check(index_triple_hyperbolic(e), hat_index(f, e), 2)
    p18 = fx.load("portrait18")
    comp = fx.analyze_complement(p18.field, p18.s_comp_block)
    ex18 = duality_check(comp.forward, comp.hat, 2)
    pech = fx.load("pech").indices()
    pech_ok = duality_check(pech["S_comp"], pech["hat_S"], 3)
    ok = len(seen) == 4 and all(seen.values()) and ex18 and pech_ok
    report(3, "duality between forward index and index at infinity", ok,
           f"classes {sum(seen.values())}/4, portrait18 {ex18}, pech {pech_ok}")


# --- 4 ---------------------------------------------------------------------------

def test_fixture_detections_and_verdicts():
    checks = {}
    triv = fx.load("trivial2")
    comp_t, res_t = fx.run_fixture(triv)
    by = {(r.attractor, r.repeller): r for r in res_t}
    b1, b2 = by[("b-", "r")], by[("a", "b+")]
    checks["trivial2 (b-,r)"] = (b1.detected and b1.witnesses[0].component == "relH"
                                 and b1.message() == "CONNECTION r → S, witness relH: 0̄ ≠ Σ¹∨Σ⁰")
    w2 = b2.witnesses[0] if b2.detected else None
    checks["trivial2 (a,b+)"] = (w2 is not None and w2.component == "relHE" and w2.index.is_trivial
                                 and w2.wedge == parse_class("Σ²∨Σ¹") and b2.connection == "S → a")
    blk = fx.load("blocks18")
    comp_b, res_b = fx.run_fixture(blk)
    by = {(r.attractor, r.repeller): r for r in res_b}
    c1, c2 = by[("c", "b+")], by[("b-", "c")]
    checks["blocks18 (c,b+)"] = c1.detected and c1.connection == "S → c"
    w = c2.witnesses[0] if c2.detected else None
    checks["blocks18 (b-,c)"] = (w is not None and w.component == "relH" and w.index == parse_class("Σ⁰")
                                 and w.wedge == parse_class("Σ⁰∨Σ⁰∨Σ¹") and c2.connection == "c → S")
    checks["trivial1 verdict"] = (existence_verdict(comp_t.hat) is ConnectionVerdict.BOTH_DIRECTIONS
                                  and comp_t.hat == ConleyIndexTriple.trivial())
    p18 = fx.load("portrait18")
    hat = fx.analyze_complement(p18.field, p18.s_comp_block).hat
    checks["portrait18 hat index"] = (
        hat == ConleyIndexTriple.parse("0", "Sigma^1", "Sigma^0")
        and str(hat) == "(0̄, Σ¹, Σ⁰)"
        and classify_triple(hat, ClassifyMode.PLANAR_CATALOG) is TripleType.NEITHER
        and existence_verdict(hat) is ConnectionVerdict.BOTH_DIRECTIONS)
    failed = [k for k, v in checks.items() if not v]
    report(4, "fixture detections, witnesses and verdicts", not failed,
           "all match" if not failed else "failed: " + ", ".join(failed))


# --- 5 ---------------------------------------------------------------------------

def test_homology_engine():
    disk = SimplicialComplex([(6, i, (i + 1) % 6) for i in range(6)])
    cases = {
        "disk rel boundary": (list(betti_relative(disk, SimplicialComplex(cycle(6)))), [0, 0, 1]),
        "arc rel endpoints": (list(betti_relative(SimplicialComplex([(0, 1), (1, 2)]),
                                                  SimplicialComplex([(0,), (2,)]))), [0, 1]),
        "circle": (list(betti_reduced(SimplicialComplex(cycle(4)))), [0, 1]),
        "sphere": (list(betti_reduced(SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))), [0, 0, 1]),
    }
    A, inner = annulus(8), SimplicialComplex(cycle(8, offset=8))
    cases["annulus rel one boundary circle"] = (list(betti_relative(A, inner)), smith_relative_betti(A, inner))
    failed = [k for k, (got, want) in cases.items() if got != want]
    report(5, "homology engine on disk, arc, circle, sphere and annulus", not failed,
           "exact" if not failed else "failed: " + ", ".join(failed))


# --- 6 ---------------------------------------------------------------------------

def test_integrator_properties():
    f = parse_field(QUADRATIC_SIX)
    opts = IntegratorOptions()
    equator_ok, drift = True, 0.0
    for theta in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        tr = integrate(f, HemispherePoint.from_angle(theta), 10.0, opts)
        equator_ok &= all(p.z == 0.0 for _, p in tr.samples)
        drift = max(drift, tr.max_norm_drift)
    for x in ([0.3, -0.2], [2.0, 1.0], [-1.0, 4.0]):
        for span in (10.0, -10.0):
            tr = integrate(f, project(x), span, opts)
            drift = max(drift, tr.max_norm_drift, max(p.norm_error() for _, p in tr.samples))
    eqs = find_equilibria_at_infinity(f)
    reached = False
    for r in (e for e in eqs if e.stability_class is StabilityClass.REPELLER_LIKE):
        for a in (e for e in eqs if e.stability_class is StabilityClass.ATTRACTOR_LIKE):
            rep = connection_probe(f, r, TargetBall(HemispherePoint.from_angle(a.theta), 1e-2), horizon=100.0)
            reached |= rep.reached and rep.first_entry < 100.0
    ok = equator_ok and drift <= 1e-6 and reached
    report(6, "equator invariance, norm drift and repeller-to-attractor probe", ok,
           f"max drift {drift:.1e}, probe reached {reached}")


# --- 7 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_isolating_family_checks():
    lams = [k / 16 for k in range(16)]
    out = {}
    for name in ("portrait39", "portrait18"):
        f = fx.load(name)
        out[name] = verify_isolating_family(f.field, f.family(), lambdas=lams, horizon=50.0)
    bottom = 1.5 * math.pi
    near = [s for s in out["portrait39"].failures
            if math.hypot(s.point[0] - math.cos(bottom), s.point[1] - math.sin(bottom)) < 0.61]
    ok = bool(near) and out["portrait18"].passed
    report(7, "portrait39 family fails near S while portrait18 family passes", ok,
           f"portrait39 failures {len(out['portrait39'].failures)}, "
           f"portrait18 failures {len(out['portrait18'].failures)}")
