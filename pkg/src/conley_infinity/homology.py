"""Rational simplicial homology: reduced and relative Betti numbers.

Ranks of boundary maps are computed by exact elimination over the
rationals.  For a pair ``(K, L)`` with ``L`` empty the relative groups are
the homology of ``K`` with a disjoint basepoint added, so
``b0 = #components(K)``; this is the convention under which the index of an
attractor block ``(B, empty)`` comes out as ``[B u {*}]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Simplex = tuple[int, ...]


class HomologyInputError(ValueError):
    pass


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under faces."""

    __slots__ = ("_by_dim", "_all")

    def __init__(self, simplices: Iterable[Sequence[int]] = ()):
        found: set[Simplex] = set()
        for s in simplices:
            s = tuple(sorted(set(int(v) for v in s)))
            if not s:
                continue
            for k in range(1, len(s) + 1):
                found.update(itertools.combinations(s, k))
        by_dim: dict[int, list[Simplex]] = {}
        for s in found:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self._by_dim = {k: sorted(v) for k, v in by_dim.items()}
        self._all = frozenset(found)

    @property
    def dim(self) -> int:
        return max(self._by_dim, default=-1)

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices(0)]

    def simplices(self, k: int) -> list[Simplex]:
        return self._by_dim.get(k, [])

    def __contains__(self, s) -> bool:
        return tuple(sorted(s)) in self._all

    def __len__(self) -> int:
        return len(self._all)

    def is_empty(self) -> bool:
        return not self._all

    def issubcomplex(self, other: "SimplicialComplex") -> bool:
        return self._all <= other._all

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(itertools.chain(self._all, other._all))

    def intersection(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex(self._all & other._all)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self._by_dim.items())

    def components(self) -> int:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.simplices(1):
            parent[find(a)] = find(b)
        return len({find(v) for v in parent})

    def __repr__(self) -> str:
        counts = [len(self.simplices(k)) for k in range(self.dim + 1)]
        return f"SimplicialComplex(f-vector={counts})"


@dataclass(frozen=True)
class ComplexPair:
    total: SimplicialComplex
    sub: SimplicialComplex

    def __post_init__(self):
        if not self.sub.issubcomplex(self.total):
            raise HomologyInputError("sub is not a subcomplex of total")


class Betti(list):
    """List of Betti numbers; ``empty`` flags the empty complex."""

    empty: bool = False


def rank_exact(columns: Sequence[dict[int, int]]) -> int:
    """Rank over Q of a sparse matrix given as a list of ``{row: value}`` columns."""
    pivots: dict[int, dict[int, Fraction]] = {}
    rank = 0
    for col in columns:
        v = {r: Fraction(x) for r, x in col.items() if x}
        while v:
            p = max(v)
            if p not in pivots:
                pivots[p] = v
                rank += 1
                break
            w = pivots[p]
            c = v[p] / w[p]
            for r, x in w.items():
                y = v.get(r, 0) - c * x
                if y:
                    v[r] = y
                else:
                    v.pop(r, None)
    return rank


def _boundary_rank(total: SimplicialComplex, sub: SimplicialComplex | None, k: int) -> int:
    """Rank of the relative boundary map ``C_k(K, L) -> C_(k-1)(K, L)``."""
    if k <= 0:
        return 0
    rows = [s for s in total.simplices(k - 1) if sub is None or s not in sub]
    index = {s: i for i, s in enumerate(rows)}
    cols = []
    for s in total.simplices(k):
        if sub is not None and s in sub:
            continue
        col = {}
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            j = index.get(face)
            if j is not None:
                col[j] = (-1) ** i
        cols.append(col)
    return rank_exact(cols)


def _betti(total: SimplicialComplex, sub: SimplicialComplex | None) -> list[int]:
    top = total.dim
    ranks = [_boundary_rank(total, sub, k) for k in range(top + 2)]
    out = []
    for k in range(top + 1):
        ck = sum(1 for s in total.simplices(k) if sub is None or s not in sub)
        out.append(ck - ranks[k] - ranks[k + 1])
    return out


def _trim(b: list[int]) -> list[int]:
    while b and b[-1] == 0:
        b.pop()
    return b


def betti_reduced(c: SimplicialComplex) -> Betti:
    """Reduced rational Betti numbers, trailing zeros removed."""
    if c.is_empty():
        out = Betti()
        out.empty = True
        return out
    b = _betti(c, None)
    b[0] -= 1
    return Betti(_trim(b))


def betti_relative(p: ComplexPair | SimplicialComplex, sub: SimplicialComplex | None = None) -> Betti:
    """Ranks of ``H_*(K, L; Q)``; for empty ``L`` this is ``H_*(K u *, *)``."""
    if isinstance(p, ComplexPair):
        total, sub = p.total, p.sub
    else:
        total = p
        if sub is not None and not sub.issubcomplex(total):
            raise HomologyInputError("sub is not a subcomplex of total")
    if sub is not None and sub.is_empty():
        sub = None
    if total.is_empty():
        return Betti()
    return Betti(_trim(_betti(total, sub)))


# --- small models for the planar catalog -----------------------------------

_RING = 24  # boundary vertices per circle


@dataclass(frozen=True)
class ComponentModel:
    """Triangulated block component with its equator part and relative boundary."""

    N: SimplicialComplex
    E: SimplicialComplex
    dH: SimplicialComplex

    @property
    def dH_nonempty(self) -> bool:
        return not self.dH.is_empty()

    @property
    def dH_union_E(self) -> SimplicialComplex:
        return self.dH.union(self.E)

    @property
    def dH_cap_E(self) -> SimplicialComplex:
        return self.dH.intersection(self.E)

    @staticmethod
    def relative(total: SimplicialComplex, sub: SimplicialComplex | None) -> list[int]:
        return list(betti_relative(total, sub))


def _cycle_edges(ring: Sequence[int]) -> list[Simplex]:
    return [(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]


def _split_outer(ring: Sequence[int], equator) -> tuple[list[Simplex], list[Simplex]]:
    edges = _cycle_edges(ring)
    if equator == "circle":
        return edges, []
    k = int(equator)
    if not 0 <= k <= 3:
        raise HomologyInputError("equator contact must be 0..3 arcs or 'circle'")
    arc = set()
    step = len(edges) // max(k, 1)
    for a in range(k):
        arc.update(range(a * step, a * step + step // 2))
    return [e for i, e in enumerate(edges) if i in arc], [e for i, e in enumerate(edges) if i not in arc]


def model_component(shape: str, equator) -> ComponentModel:
    """Triangulated disk or annulus whose outer circle meets the equator as requested."""
    outer = list(range(_RING))
    if shape == "disk":
        c = _RING
        tris = [(c, a, b) for a, b in _cycle_edges(outer)]
        inner_edges: list[Simplex] = []
    elif shape == "annulus":
        inner = list(range(_RING, 2 * _RING))
        tris = []
        for i in range(_RING):
            j = (i + 1) % _RING
            tris += [(outer[i], outer[j], inner[i]), (outer[j], inner[j], inner[i])]
        inner_edges = _cycle_edges(inner)
    else:
        raise HomologyInputError(f"unknown component shape {shape!r}")
    e_edges, rest = _split_outer(outer, equator)
    return ComponentModel(
        N=SimplicialComplex(tris),
        E=SimplicialComplex(e_edges),
        dH=SimplicialComplex(rest + inner_edges),
    )
