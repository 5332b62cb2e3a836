"""Worked examples shipped as JSON, and the detection pipeline that runs them.

Each fixture holds a polynomial model field, the degenerate equilibrium
``S`` (given by its angle on the equator), a block isolating the dynamical
complement of ``S``, and optionally attractor repeller pairs of the
extended flow.  A pair member named ``b+`` or ``b-`` is an ersatz infinity
built from the complement block; any other member is given by its own
block under the pair's model field.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from importlib import resources
from pathlib import Path
from typing import Any

from ..blocks import (
    BoundaryLabeling,
    ErsatzModel,
    PlanarBlock,
    Witness,
    block_index,
    build_ersatz,
    classify_boundary,
    complement_disk_family,
    detect_witnesses,
)
from ..indexalg import ConleyIndexTriple, hat_index
from ..polyfield import PolyMap, parse_field

NAMES = ("portrait18", "portrait25", "portrait39", "trivial2", "blocks18", "pech")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath(f"{name}.json")))


def load_json(name_or_path: str | Path) -> dict:
    p = Path(name_or_path)
    if not p.suffix:
        p = fixture_path(str(name_or_path))
    with open(p) as fh:
        return json.load(fh)


def triple_from_forms(forms) -> ConleyIndexTriple:
    return ConleyIndexTriple.parse(*forms)


@dataclass
class PairSpec:
    name: str
    attractor: str
    repeller: str
    field: PolyMap
    block: PlanarBlock
    members: dict[str, PlanarBlock]
    expect: dict[str, Any] = dc_field(default_factory=dict)


@dataclass
class Fixture:
    name: str
    raw: dict
    field: PolyMap | None = None
    s_theta: float | None = None
    s_comp_block: PlanarBlock | None = None
    pairs: list[PairSpec] = dc_field(default_factory=list)

    @property
    def expect(self) -> dict:
        return self.raw.get("expect", {})

    @property
    def n(self) -> int:
        return int(self.raw.get("n", 2))

    def family(self):
        spec = self.raw.get("family")
        if spec is None:
            return None
        if spec.get("kind") != "complement_disk":
            raise ValueError(f"unknown family kind {spec.get('kind')!r}")
        return complement_disk_family(spec["center_angle"], spec["r_max"], spec.get("r_min", 0.0))

    def indices(self) -> dict[str, ConleyIndexTriple]:
        return {k: triple_from_forms(v) for k, v in self.raw.get("indices", {}).items()}


def load(name_or_path: str | Path) -> Fixture:
    d = load_json(name_or_path)
    fx = Fixture(d.get("name", str(name_or_path)), d)
    if "field" in d:
        fx.field = parse_field(d["field"])
    fx.s_theta = d.get("S_theta")
    if "s_comp_block" in d:
        fx.s_comp_block = PlanarBlock.from_json(d["s_comp_block"])
    for p in d.get("pairs", []):
        fx.pairs.append(PairSpec(
            name=p["name"],
            attractor=p["attractor"],
            repeller=p["repeller"],
            field=parse_field(p["field"]),
            block=PlanarBlock.from_json(p["block"]),
            members={k: PlanarBlock.from_json(v["block"]) for k, v in p.get("members", {}).items()},
            expect=p.get("expect", {}),
        ))
    return fx


# --- pipeline ---------------------------------------------------------------------

@dataclass
class ComplementAnalysis:
    labeling: BoundaryLabeling
    forward: ConleyIndexTriple
    hat: ConleyIndexTriple
    ersatz: ErsatzModel


def analyze_complement(f: PolyMap, block: PlanarBlock) -> ComplementAnalysis:
    lab = classify_boundary(f, block)
    return ComplementAnalysis(
        labeling=lab,
        forward=block_index(block, lab),
        hat=hat_index(f, block),
        ersatz=build_ersatz(block, lab),
    )


@dataclass
class PairResult:
    name: str
    attractor: str
    repeller: str
    inv: ConleyIndexTriple
    h_attractor: ConleyIndexTriple
    h_repeller: ConleyIndexTriple
    witnesses: list[Witness]

    @property
    def detected(self) -> bool:
        return bool(self.witnesses)

    @property
    def connection(self) -> str | None:
        """Connection in the original flow implied by a detection."""
        if not self.detected:
            return None
        if self.attractor == "b-":
            return f"{self.repeller} → S"
        if self.repeller == "b+":
            return f"S → {self.attractor}"
        return f"{self.repeller} → {self.attractor}"

    def message(self) -> str:
        if not self.detected:
            return "NO DETECTION"
        w = self.witnesses[0]
        return f"CONNECTION {self.connection}, witness {w}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pair": [self.attractor, self.repeller],
            "inv": self.inv.to_json(),
            "attractor": self.h_attractor.to_json(),
            "repeller": self.h_repeller.to_json(),
            "detected": self.detected,
            "witnesses": [w.component for w in self.witnesses],
            "message": self.message(),
        }


def member_triple(member: str, pair: PairSpec, comp: ComplementAnalysis | None) -> ConleyIndexTriple:
    if member in ("b+", "b-"):
        if comp is None:
            raise ValueError("ersatz member needs the complement block of the fixture")
        return comp.ersatz.triple_plus if member == "b+" else comp.ersatz.triple_minus
    blk = pair.members[member]
    return block_index(blk, classify_boundary(pair.field, blk))


def run_pair(pair: PairSpec, comp: ComplementAnalysis | None) -> PairResult:
    inv = block_index(pair.block, classify_boundary(pair.field, pair.block))
    h_att = member_triple(pair.attractor, pair, comp)
    h_rep = member_triple(pair.repeller, pair, comp)
    return PairResult(pair.name, pair.attractor, pair.repeller, inv, h_att, h_rep,
                      detect_witnesses(inv, h_rep, h_att))


def run_fixture(fx: Fixture) -> tuple[ComplementAnalysis | None, list[PairResult]]:
    comp = analyze_complement(fx.field, fx.s_comp_block) if fx.s_comp_block is not None else None
    return comp, [run_pair(p, comp) for p in fx.pairs]


def angle_close(a: float, b: float, tol: float) -> bool:
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi) <= tol
