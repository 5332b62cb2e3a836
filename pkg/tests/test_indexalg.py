import pytest
from hypothesis import given, strategies as st

from conley_infinity.indexalg import (
    ClassifyMode,
    ConleyIndexTriple,
    ConnectionVerdict,
    HomotopyClass,
    TripleType,
    classify_triple,
    duality_check,
    duality_mismatches,
    existence_verdict,
    parse_class,
    wedge,
)

betti = st.lists(st.integers(0, 3), max_size=4)
classes = betti.map(HomotopyClass.from_betti)
triples = st.tuples(classes, classes, classes).map(lambda t: ConleyIndexTriple(*t))

SIGMA = {k: HomotopyClass.sphere(k) for k in range(4)}
ZERO = HomotopyClass.trivial()


def test_display_forms():
    assert str(ZERO) == "0̄"
    assert str(wedge(SIGMA[1], SIGMA[0])) == "Σ⁰∨Σ¹"
    assert str(HomotopyClass.circle_plus_point()) == "⃝*"


@pytest.mark.parametrize("text, b", [
    ("0", ()), ("Sigma^2", (0, 0, 1)), ("Σ¹∨Σ⁰∨Σ⁰", (2, 1)), ("Sigma^0 v Sigma^0", (2,)), ("O*", (1, 1)),
])
def test_parse(text, b):
    assert parse_class(text).betti == b


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_class("S^1")


def test_negative_betti_rejected():
    with pytest.raises(ValueError):
        HomotopyClass((1, -1))


def test_form_disagreeing_with_betti_rejected():
    with pytest.raises(ValueError):
        HomotopyClass.from_json({"form": "Sigma^1", "betti": [1]})


@given(classes, classes, classes)
def test_wedge_is_commutative_monoid(a, b, c):
    assert wedge(a, b) == wedge(b, a)
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    assert wedge(a, ZERO) == a


@given(classes)
def test_class_json_round_trip(a):
    assert HomotopyClass.from_json(a.to_json()) == a
    assert parse_class(a.to_form_string()) == a


@given(triples)
def test_triple_json_round_trip(t):
    assert ConleyIndexTriple.from_json(t.to_json()) == t


def lookup(u, rad_stable):
    if rad_stable:
        return ConleyIndexTriple(SIGMA[u], ZERO, SIGMA[u])
    return ConleyIndexTriple(ZERO, SIGMA[u + 1], SIGMA[u])


@pytest.mark.parametrize("u, rad_stable", [(0, True), (1, False), (0, False), (1, True)])
def test_hyperbolic_duality(u, rad_stable):
    """The complement of a hyperbolic point reversed in time has the reversed lookup index."""
    forward = lookup(u, rad_stable)
    hat = lookup(1 - u, not rad_stable)
    assert duality_check(forward, hat, 2)


def test_duality_mismatch_is_reported():
    forward = lookup(0, True)
    assert duality_mismatches(forward, forward, 2)


@pytest.mark.parametrize("t, kind", [
    (ConleyIndexTriple(SIGMA[0], ZERO, SIGMA[0]), TripleType.ATTRACTOR),
    (ConleyIndexTriple(ZERO, SIGMA[2], SIGMA[1]), TripleType.REPELLER),
    (ConleyIndexTriple(SIGMA[1], ZERO, SIGMA[1]), TripleType.ATTRACTOR),
    (ConleyIndexTriple(ZERO, SIGMA[1], SIGMA[0]), TripleType.REPELLER),
    (ConleyIndexTriple(SIGMA[1], SIGMA[1], ZERO), TripleType.NEITHER),
])
def test_pattern_classification(t, kind):
    assert classify_triple(t, ClassifyMode.PATTERN) is kind


def test_catalog_rejects_saddle_like_triples():
    # the catalog only admits attractor and repeller forms of actual blocks
    assert classify_triple(ConleyIndexTriple(ZERO, SIGMA[1], SIGMA[0]), "PlanarCatalog") is TripleType.NEITHER
    assert classify_triple(ConleyIndexTriple(SIGMA[0], ZERO, SIGMA[0]), "PlanarCatalog") is TripleType.ATTRACTOR
    assert classify_triple(ConleyIndexTriple(ZERO, SIGMA[2], SIGMA[1]), "PlanarCatalog") is TripleType.REPELLER


def test_catalog_needs_planar_support():
    with pytest.raises(ValueError):
        classify_triple(ConleyIndexTriple(SIGMA[3], ZERO, ZERO), "PlanarCatalog")


def test_existence_verdicts():
    assert existence_verdict(ConleyIndexTriple.trivial()) is ConnectionVerdict.BOTH_DIRECTIONS
    assert existence_verdict(ConleyIndexTriple(ZERO, SIGMA[2], SIGMA[1])) is ConnectionVerdict.FROM_S_NONE_TO_S
    assert existence_verdict(ConleyIndexTriple(SIGMA[0], ZERO, SIGMA[0])) is ConnectionVerdict.TO_S_NONE_FROM_S
    assert existence_verdict(ConleyIndexTriple(ZERO, SIGMA[1], SIGMA[0])) is ConnectionVerdict.BOTH_DIRECTIONS


@given(triples)
def test_duality_is_an_involution(t):
    """If hat is dual to forward, forward is dual to hat."""
    if not t.truncated_ok(2):
        return
    L = 3
    fH, fHE, fE = (c.betti_padded(L) for c in t.components())
    hat = ConleyIndexTriple.from_betti(
        [fHE[2 - k] for k in range(L)], [fH[2 - k] for k in range(L)], [fE[1 - k] for k in range(2)])
    assert duality_check(t, hat, 2)
    assert duality_check(hat, t, 2)
