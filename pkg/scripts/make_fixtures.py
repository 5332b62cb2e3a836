"""Regenerate the JSON fixtures shipped in ``conley_infinity/fixtures``.

The portraits are small polynomial models showing a degenerate equilibrium
at the bottom of the disk together with the orbits that make it interesting,
such as homoclinic loops or a saddle connection.  Pair blocks are local
models of the extended flow near the invariant set of each attractor
repeller pair; the ersatz members of a pair are taken from the block of
the dynamical complement.

Run from the repository root:  python3 scripts/make_fixtures.py
"""
from __future__ import annotations

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "conley_infinity" / "fixtures"
BOTTOM = 1.5 * math.pi

SADDLE_OUT = "dx1 = x1; dx2 = -x2"  # unstable along x1: the saddle feeds the equator point at angle 0
SADDLE_IN = "dx1 = -x1; dx2 = x2"   # stable along x1: the equator point at angle 0 feeds the saddle


def chord_block(c: float, name: str) -> dict:
    """Part of the disk above the horizontal chord ``chi2 = -c``."""
    a = math.asin(c)
    p, q = [math.cos(a), -c], [-math.cos(a), -c]
    return {"name": name, "polygons": [{"outer": [
        {"equator_arc": [-a, math.pi + a]},
        {"segment": [q, p]},
    ]}]}


def half_strip(w: float, left: float, name: str) -> dict:
    """``{|chi2| <= w, chi1 >= left}`` inside the disk; meets the equator around angle 0."""
    x = math.sqrt(1 - w * w)
    a = math.asin(w)
    return {"name": name, "polygons": [{"outer": [
        {"segment": [[left, -w], [x, -w]]},
        {"equator_arc": [-a, a]},
        {"segment": [[x, w], [left, w]]},
        {"segment": [[left, w], [left, -w]]},
    ]}]}


def strip(w: float, name: str) -> dict:
    """``{|chi2| <= w}`` inside the disk; meets the equator in two arcs."""
    x = math.sqrt(1 - w * w)
    a = math.asin(w)
    return {"name": name, "polygons": [{"outer": [
        {"segment": [[-x, -w], [x, -w]]},
        {"equator_arc": [-a, a]},
        {"segment": [[x, w], [-x, w]]},
        {"equator_arc": [math.pi - a, math.pi + a]},
    ]}]}


def square(h: float, name: str) -> dict:
    return {"name": name, "polygons": [{"outer": {"vertices": [[-h, -h], [h, -h], [h, h], [-h, h]]}}]}


def family(center: float) -> dict:
    return {"kind": "complement_disk", "center_angle": center, "r_max": 0.6, "r_min": 0.0}


def pair(name, attractor, repeller, field, block, members, expect):
    return {"name": name, "attractor": attractor, "repeller": repeller, "field": field,
            "block": block, "members": members, "expect": expect}


def fixtures() -> dict[str, dict]:
    p18 = "dx1 = x1; dx2 = -x2 - x1^2"
    trivial = "dx1 = 1 - x1^2; dx2 = 2 x1 x2"
    out = {}
    out["portrait18"] = {
        "name": "portrait18",
        "description": "Degenerate equilibrium S at the bottom of isolated invariant complement; "
                       "homoclinic loops at S and a saddle at the origin.",
        "field": p18,
        "S_theta": BOTTOM,
        "s_comp_block": chord_block(0.7, "B(S_comp)"),
        "family": family(BOTTOM),
        "expect": {"family_passes": True, "hat_index": ["0", "Sigma^1", "Sigma^0"]},
    }
    out["portrait39"] = {
        "name": "portrait39",
        "description": "Degenerate equilibrium S at the bottom that is not of isolated invariant complement: "
                       "orbits from the source skirt S and end at the top equilibrium.",
        "field": "dx1 = x1; dx2 = x2 + x1^2",
        "S_theta": BOTTOM,
        "family": family(BOTTOM),
        "expect": {"family_passes": False},
    }
    out["portrait25"] = {
        "name": "portrait25",
        "description": "Only hyperbolic, hence isolated invariant, equilibria at infinity.",
        "field": "dx1 = x2 + x1 x2; dx2 = x1 + x1^2 - x2^2",
        "expect": {"equilibria": 6},
    }
    out["trivial2"] = {
        "name": "trivial2",
        "description": "Degenerate equilibrium S at the bottom whose dynamical complement has trivial index; "
                       "pairs (b-, r) and (a, b+) in the extended flow.",
        "field": trivial,
        "S_theta": BOTTOM,
        "s_comp_block": chord_block(0.7, "B(S_comp)"),
        "expect": {"hat_index": ["0", "0", "0"], "verdict": "BothDirections"},
        "pairs": [
            pair("B1", "b-", "r", SADDLE_OUT, half_strip(0.3, -0.3, "B1"),
                 {"r": {"block": square(0.1, "r")}},
                 {"detect": True, "witness": "relH", "connection": "r -> S",
                  "inv": ["0", "Sigma^1", "Sigma^0"]}),
            pair("B2", "a", "b+", SADDLE_IN, half_strip(0.3, -0.3, "B2"),
                 {"a": {"block": square(0.1, "a")}},
                 {"detect": True, "witness": "relHE", "connection": "S -> a",
                  "inv": ["Sigma^1", "0", "Sigma^1"]}),
        ],
    }
    out["blocks18"] = {
        "name": "blocks18",
        "description": "Portrait 18 with ersatz infinities; pairs (c, b+) and (b-, c) with the saddle c.",
        "field": p18,
        "S_theta": BOTTOM,
        "s_comp_block": chord_block(0.7, "B(S_comp)"),
        "expect": {"hat_index": ["0", "Sigma^1", "Sigma^0"], "verdict": "BothDirections", "b_minus": 2},
        "pairs": [
            pair("B1", "c", "b+", SADDLE_IN, half_strip(0.3, -0.3, "B1"),
                 {"c": {"block": square(0.1, "c")}},
                 {"detect": True, "witness": "relHE", "connection": "S -> c",
                  "inv": ["Sigma^1", "0", "Sigma^1"]}),
            pair("B2", "b-", "c", SADDLE_OUT, strip(0.3, "B2"),
                 {"c": {"block": square(0.1, "c")}},
                 {"detect": True, "witness": "relH", "connection": "c -> S",
                  "inv": ["Sigma^0", "Sigma^1", "Sigma^0 v Sigma^0"]}),
        ],
    }
    out["pech"] = {
        "name": "pech",
        "description": "Three-dimensional example with a stable periodic orbit S at infinity; indices only.",
        "n": 3,
        "indices": {
            "S_comp": ["0", "Sigma^3", "Sigma^2 v Sigma^2"],
            "hat_S": ["Sigma^0", "0", "Sigma^0 v Sigma^0"],
            "S": ["O*", "0", "O*"],
        },
    }
    return out


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in fixtures().items():
        data = {"schema": 1, **data}
        (OUT / f"{name}.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        print("wrote", OUT / f"{name}.json")


if __name__ == "__main__":
    main()
