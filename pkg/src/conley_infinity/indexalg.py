"""Index values at the level of reduced rational Betti numbers.

A :class:`HomotopyClass` stands for the pointed homotopy class of an index
quotient.  Two classes are compared through their reduced Betti vectors
only; the symbolic ``form`` is kept for display and serialization.  A
:class:`ConleyIndexTriple` collects the three classes attached to an
invariant set meeting the boundary: relative to ``H``, to ``(H, E)`` and to
``E``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")

TRIVIAL = "trivial"
WEDGE = "wedge"
CIRCLE_PLUS_POINT = "circle_plus_point"
CUSTOM = "custom"


def _trim(b: Sequence[int]) -> tuple[int, ...]:
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    return tuple(b)


@dataclass(frozen=True, eq=False)
class HomotopyClass:
    """Pointed space class, known through its reduced Betti numbers.

    ``form`` is one of ``"trivial"``, ``"wedge"``, ``"circle_plus_point"``
    and ``"custom"``.  Any Betti vector is realized by a wedge of spheres, so
    :meth:`from_betti` produces wedge forms.
    """

    betti: tuple[int, ...]
    form: str = WEDGE

    def __post_init__(self):
        b = _trim(self.betti)
        if any((not isinstance(x, int)) or x < 0 for x in b):
            raise ValueError(f"Betti numbers must be non-negative integers, got {self.betti}")
        object.__setattr__(self, "betti", b)
        form = self.form
        if not b:
            form = TRIVIAL
        elif form == TRIVIAL:
            raise ValueError("trivial form with nonzero Betti numbers")
        elif form == CIRCLE_PLUS_POINT and b != (1, 1):
            raise ValueError("circle plus point has Betti numbers (1, 1)")
        elif form not in (WEDGE, CIRCLE_PLUS_POINT, CUSTOM):
            raise ValueError(f"unknown form {form!r}")
        object.__setattr__(self, "form", form)

    @classmethod
    def trivial(cls) -> "HomotopyClass":
        return cls(())

    @classmethod
    def sphere(cls, k: int) -> "HomotopyClass":
        return cls((0,) * k + (1,))

    @classmethod
    def circle_plus_point(cls) -> "HomotopyClass":
        return cls((1, 1), CIRCLE_PLUS_POINT)

    @classmethod
    def from_betti(cls, betti: Sequence[int]) -> "HomotopyClass":
        return cls(tuple(int(x) for x in betti))

    @classmethod
    def wedge_of_spheres(cls, dims: Sequence[int]) -> "HomotopyClass":
        b = [0] * (max(dims, default=-1) + 1)
        for k in dims:
            b[k] += 1
        return cls(tuple(b))

    @property
    def is_trivial(self) -> bool:
        return not self.betti

    def betti_padded(self, length: int) -> tuple[int, ...]:
        if len(self.betti) > length:
            raise ValueError(f"Betti vector {self.betti} longer than {length}")
        return self.betti + (0,) * (length - len(self.betti))

    def sphere_dims(self) -> list[int]:
        return [k for k, m in enumerate(self.betti) for _ in range(m)]

    def __eq__(self, other) -> bool:
        return isinstance(other, HomotopyClass) and self.betti == other.betti

    def __hash__(self) -> int:
        return hash(self.betti)

    def __str__(self) -> str:
        if self.form == TRIVIAL:
            return "0̄"
        if self.form == CIRCLE_PLUS_POINT:
            return "⃝*"
        if self.form == CUSTOM:
            return "H~" + str(list(self.betti))
        return "∨".join("Σ" + str(k).translate(_SUP) for k in self.sphere_dims())

    def __repr__(self) -> str:
        return f"HomotopyClass({self})"

    def to_form_string(self) -> str:
        """ASCII form used in JSON: ``0``, ``Sigma^1``, ``Sigma^0 v Sigma^1``, ``O*``."""
        if self.form == TRIVIAL:
            return "0"
        if self.form == CIRCLE_PLUS_POINT:
            return "O*"
        if self.form == CUSTOM:
            return "custom"
        return " v ".join(f"Sigma^{k}" for k in self.sphere_dims())

    def to_json(self) -> dict:
        return {"betti": list(self.betti), "form": self.to_form_string()}

    @classmethod
    def from_json(cls, d) -> "HomotopyClass":
        if isinstance(d, str):
            return parse_class(d)
        form = d.get("form", "")
        cls_ = parse_class(form) if form not in ("", "custom") else None
        betti = tuple(d.get("betti", cls_.betti if cls_ else ()))
        if cls_ is not None and cls_.betti != _trim(betti):
            raise ValueError(f"form {form!r} disagrees with Betti numbers {list(betti)}")
        if cls_ is not None:
            return cls_
        return cls(betti, CUSTOM if betti else TRIVIAL)


def parse_class(text: str) -> HomotopyClass:
    """Parse ``0``, ``O*``, ``Sigma^k`` wedges (``v`` separated), or unicode forms."""
    t = text.strip()
    if t in ("0", "0̄", "", "trivial"):
        return HomotopyClass.trivial()
    if t in ("O*", "⃝*", "circle_plus_point"):
        return HomotopyClass.circle_plus_point()
    dims = []
    for part in t.replace("∨", " v ").split(" v "):
        part = part.strip()
        sup = part.translate(str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789"))
        if sup.startswith("Sigma^"):
            dims.append(int(sup[6:]))
        elif sup.startswith("Σ^"):
            dims.append(int(sup[2:]))
        elif sup.startswith("Σ"):
            dims.append(int(sup[1:]))
        else:
            raise ValueError(f"cannot parse homotopy class {text!r}")
    return HomotopyClass.wedge_of_spheres(dims)


def wedge(a: HomotopyClass, b: HomotopyClass) -> HomotopyClass:
    n = max(len(a.betti), len(b.betti))
    return HomotopyClass(tuple(x + y for x, y in zip(a.betti_padded(n), b.betti_padded(n))))


def wedge_all(classes) -> HomotopyClass:
    out = HomotopyClass.trivial()
    for c in classes:
        out = wedge(out, c)
    return out


def equal(a: HomotopyClass, b: HomotopyClass) -> bool:
    return a.betti == b.betti


COMPONENTS = ("relH", "relHE", "relE")


@dataclass(frozen=True)
class ConleyIndexTriple:
    relH: HomotopyClass
    relHE: HomotopyClass
    relE: HomotopyClass

    def components(self) -> tuple[HomotopyClass, HomotopyClass, HomotopyClass]:
        return (self.relH, self.relHE, self.relE)

    def __getitem__(self, name: str) -> HomotopyClass:
        if name not in COMPONENTS:
            raise KeyError(name)
        return getattr(self, name)

    @classmethod
    def trivial(cls) -> "ConleyIndexTriple":
        t = HomotopyClass.trivial()
        return cls(t, t, t)

    @classmethod
    def from_betti(cls, relH, relHE, relE) -> "ConleyIndexTriple":
        return cls(HomotopyClass.from_betti(relH), HomotopyClass.from_betti(relHE),
                   HomotopyClass.from_betti(relE))

    @classmethod
    def parse(cls, relH: str, relHE: str, relE: str) -> "ConleyIndexTriple":
        return cls(parse_class(relH), parse_class(relHE), parse_class(relE))

    def truncated_ok(self, n: int) -> bool:
        """Betti support within the ambient dimension (``n-1`` for the E part)."""
        return (len(self.relH.betti) <= n + 1 and len(self.relHE.betti) <= n + 1
                and len(self.relE.betti) <= n)

    def wedge(self, other: "ConleyIndexTriple") -> "ConleyIndexTriple":
        return ConleyIndexTriple(*(wedge(a, b) for a, b in zip(self.components(), other.components())))

    def __str__(self) -> str:
        return f"({self.relH}, {self.relHE}, {self.relE})"

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in COMPONENTS}

    @classmethod
    def from_json(cls, d) -> "ConleyIndexTriple":
        return cls(*(HomotopyClass.from_json(d[k]) for k in COMPONENTS))


class TripleType(str, Enum):
    ATTRACTOR = "AttractorType"
    REPELLER = "RepellerType"
    NEITHER = "Neither"


class ClassifyMode(str, Enum):
    PATTERN = "Pattern"
    PLANAR_CATALOG = "PlanarCatalog"


class ConnectionVerdict(str, Enum):
    FROM_S_NONE_TO_S = "FromS_NoneToS"
    TO_S_NONE_FROM_S = "ToS_NoneFromS"
    BOTH_DIRECTIONS = "BothDirections"


# --- planar catalog -------------------------------------------------------

@dataclass(frozen=True)
class CatalogConfig:
    """One connected block component in the closed Poincare disk.

    ``shape`` is ``"disk"`` or ``"annulus"``; ``equator`` is ``0`` (no
    contact), ``1..3`` (that many arcs on one boundary circle) or
    ``"circle"`` (a whole boundary circle lies on the equator, annulus only).
    """

    shape: str
    equator: int | str


def catalog_configs() -> list[CatalogConfig]:
    out = []
    for shape in ("disk", "annulus"):
        for eq in (0, 1, 2, 3):
            out.append(CatalogConfig(shape, eq))
    out.append(CatalogConfig("disk", "circle"))
    out.append(CatalogConfig("annulus", "circle"))
    return out


def _component_triples(cfg: CatalogConfig) -> dict[str, ConleyIndexTriple | None]:
    """Attractor form ``(B, empty)`` and repeller form ``(B, d_H B)`` via homology."""
    from .homology import model_component

    m = model_component(cfg.shape, cfg.equator)
    att = ConleyIndexTriple(
        HomotopyClass.from_betti(m.relative(m.N, None)),
        HomotopyClass.from_betti(m.relative(m.N, m.E)),
        HomotopyClass.from_betti(m.relative(m.E, None)),
    )
    rep = None
    if m.dH_nonempty:
        rep = ConleyIndexTriple(
            HomotopyClass.from_betti(m.relative(m.N, m.dH)),
            HomotopyClass.from_betti(m.relative(m.N, m.dH_union_E)),
            HomotopyClass.from_betti(m.relative(m.E, m.dH_cap_E)),
        )
    return {"attractor": att, "repeller": rep}


MAX_CATALOG_COMPONENTS = 3


@lru_cache(maxsize=1)
def planar_catalog() -> dict[str, frozenset[tuple[tuple[int, ...], ...]]]:
    """All Betti-level triples of attractor-form and repeller-form planar blocks.

    Multi-component blocks contribute the componentwise wedge of their
    components' triples.  Built once and shared read-only.
    """
    singles = {"attractor": [], "repeller": []}
    for cfg in catalog_configs():
        t = _component_triples(cfg)
        for kind in singles:
            if t[kind] is not None:
                singles[kind].append(t[kind])
    out = {}
    for kind, items in singles.items():
        keys = set()
        for k in range(1, MAX_CATALOG_COMPONENTS + 1):
            for combo in itertools.combinations_with_replacement(items, k):
                keys.add(_triple_key(wedge_triples(combo)))
        out[kind] = frozenset(keys)
    return out


def wedge_triples(triples) -> ConleyIndexTriple:
    out = ConleyIndexTriple.trivial()
    for t in triples:
        out = out.wedge(t)
    return out


def _triple_key(t: ConleyIndexTriple) -> tuple[tuple[int, ...], ...]:
    return tuple(c.betti for c in t.components())


def classify_triple(t: ConleyIndexTriple, mode: ClassifyMode | str = ClassifyMode.PATTERN) -> TripleType:
    mode = ClassifyMode(mode)
    if mode is ClassifyMode.PATTERN:
        if t.relHE.is_trivial and not t.relH.is_trivial:
            return TripleType.ATTRACTOR
        if t.relH.is_trivial and not t.relHE.is_trivial:
            return TripleType.REPELLER
        return TripleType.NEITHER
    if not t.truncated_ok(2):
        raise ValueError("PlanarCatalog classification needs Betti support within dimension 2")
    cat = planar_catalog()
    key = _triple_key(t)
    if key in cat["attractor"]:
        return TripleType.ATTRACTOR
    if key in cat["repeller"]:
        return TripleType.REPELLER
    return TripleType.NEITHER


def existence_verdict(hat: ConleyIndexTriple, n: int = 2) -> ConnectionVerdict:
    """Connections between ``S`` and its complement implied by the index at infinity."""
    mode = ClassifyMode.PLANAR_CATALOG if n == 2 else ClassifyMode.PATTERN
    kind = classify_triple(hat, mode)
    if kind is TripleType.REPELLER:
        return ConnectionVerdict.FROM_S_NONE_TO_S
    if kind is TripleType.ATTRACTOR:
        return ConnectionVerdict.TO_S_NONE_FROM_S
    return ConnectionVerdict.BOTH_DIRECTIONS


def duality_mismatches(forward: ConleyIndexTriple, hat: ConleyIndexTriple, n: int) -> list[str]:
    """Failed rank identities between the index of the complement and the index at infinity."""
    L = n + 1
    fH, fHE, fE = (c.betti_padded(L) for c in forward.components())
    hH, hHE, hE = (c.betti_padded(L) for c in hat.components())
    bad = []
    for k in range(L):
        if hHE[k] != fH[n - k]:
            bad.append(f"relHE[{k}]={hHE[k]} vs forward relH[{n - k}]={fH[n - k]}")
        if hH[k] != fHE[n - k]:
            bad.append(f"relH[{k}]={hH[k]} vs forward relHE[{n - k}]={fHE[n - k]}")
        if k <= n - 1 and hE[k] != fE[n - 1 - k]:
            bad.append(f"relE[{k}]={hE[k]} vs forward relE[{n - 1 - k}]={fE[n - 1 - k]}")
    if any(hE[n:]) or any(fE[n:]):
        bad.append("E part has homology above dimension n-1")
    return bad


def duality_check(forward: ConleyIndexTriple, hat: ConleyIndexTriple, n: int) -> bool:
    return not duality_mismatches(forward, hat, n)


def hat_index(f, scomp, **kwargs) -> ConleyIndexTriple:
    """Index at infinity: the index of the complement under reversed time.

    ``scomp`` is either a :class:`~conley_infinity.blocks.PlanarBlock`
    isolating the complement (its entrance set becomes the exit set) or a
    hyperbolic :class:`~conley_infinity.infinity.InfinityEquilibrium`.
    """
    from .blocks import PlanarBlock, block_index, classify_boundary
    from .infinity import InfinityEquilibrium, index_triple_hyperbolic, reversed_equilibrium

    if isinstance(scomp, InfinityEquilibrium):
        return index_triple_hyperbolic(reversed_equilibrium(scomp))
    if isinstance(scomp, PlanarBlock):
        lab = classify_boundary(f, scomp, **kwargs)
        return block_index(scomp, lab, exit_as_N1=False)
    raise TypeError(f"cannot compute an index for {type(scomp).__name__}")
