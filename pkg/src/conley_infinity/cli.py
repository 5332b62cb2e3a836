"""Command line interface: ``conley-inf <subcommand> ...``.

Exit codes: 0 success, 1 malformed input (field, config, arguments),
2 degenerate equator, 3 invalid block, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field as dc_field
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import fixtures as fxmod
from .blocks import (
    BlockError,
    PlanarBlock,
    block_index,
    build_ersatz,
    classify_boundary,
    complement_disk_family,
    detect_witnesses,
    verify_isolating_family,
)
from .config import Config, ConfigError, load_config, parse_override
from .flowsim import TargetBall, connection_probe, portrait_svg, sample_portrait, seed_grid, write_csv
from .indexalg import ClassifyMode, ConleyIndexTriple, classify_triple, existence_verdict, hat_index
from .infinity import InfinityEquilibrium, find_equilibria_at_infinity, index_triple_hyperbolic
from .polyfield import DegenerateFieldError, FieldError, ParseError, PolyMap, format_field, parse_field

SCHEMA = 1

EXIT_OK, EXIT_PARSE, EXIT_DEGENERATE, EXIT_BLOCK, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --- deterministic JSON ----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats written with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(obj[k], indent, _level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --- report ---------------------------------------------------------------------

def equilibrium_json(eq: InfinityEquilibrium) -> dict:
    d = {
        "direction": [float(c) for c in eq.direction],
        "theta": float(eq.theta),
        "lambda_tan": float(eq.lambda_tan),
        "lambda_rad": float(eq.lambda_rad),
        "hyperbolic": bool(eq.hyperbolic),
        "class": eq.stability_class.value if eq.stability_class else None,
        "triple": index_triple_hyperbolic(eq).to_json() if eq.hyperbolic else None,
    }
    return d


def versions() -> dict:
    out = {"conley_infinity": __version__}
    for dist in ("numpy", "shapely", "mapbox_earcut"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


@dataclass
class AnalysisReport:
    field: str
    degree: int
    equilibria: list[dict] = dc_field(default_factory=list)
    verdicts: list[dict] = dc_field(default_factory=list)
    detections: list[dict] = dc_field(default_factory=list)
    versions: dict = dc_field(default_factory=dict)
    tolerances: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "field": self.field,
            "degree": self.degree,
            "equilibria": self.equilibria,
            "verdicts": self.verdicts,
            "detections": self.detections,
            "versions": self.versions,
            "tolerances": self.tolerances,
        }

    @classmethod
    def from_json(cls, d: dict) -> "AnalysisReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        rep = cls(d["field"], d["degree"], d["equilibria"], d["verdicts"], d["detections"],
                  d["versions"], d["tolerances"])
        for item in rep.equilibria:
            if item["triple"] is not None:
                ConleyIndexTriple.from_json(item["triple"])
        return rep

    def dumps(self) -> str:
        return dumps(self.to_json()) + "\n"


# --- input helpers -----------------------------------------------------------------

def read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None


def read_field(path: str) -> PolyMap:
    text = read_text(path)
    try:
        return parse_field(text)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except FieldError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None


def read_block(path: str) -> PlanarBlock:
    text = read_text(path)
    try:
        return PlanarBlock.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed block file: {exc}", EXIT_BLOCK) from None
    except (BlockError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: invalid block: {exc}", EXIT_BLOCK) from None


def write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}", EXIT_IO) from None


def equilibria_of(f: PolyMap, cfg: Config) -> list[InfinityEquilibrium]:
    if f.n != 2:
        raise CliError(f"equilibria at infinity need a planar field, got n={f.n}", EXIT_PARSE)
    try:
        return find_equilibria_at_infinity(f, cfg.hyperbolic_tol)
    except DegenerateFieldError as exc:
        raise CliError("degenerate equator: entire equator invariant-pointwise "
                       "(top-degree part is radial)", EXIT_DEGENERATE) from None


def _deg(theta: float) -> str:
    return f"{math.degrees(theta):9.4f}°"


def emit(args, text: str, payload: dict) -> None:
    if getattr(args, "json", False):
        print(dumps({"schema": SCHEMA, **payload}))
    else:
        print(text)


# --- subcommands -------------------------------------------------------------------

def cmd_equilibria(args, cfg: Config) -> int:
    f = read_field(args.field)
    eqs = equilibria_of(f, cfg)
    lines = [f"{len(eqs)} equilibria at infinity for {format_field(f)}"]
    for eq in eqs:
        cls = eq.stability_class.value if eq.stability_class else "NonHyperbolic"
        triple = str(index_triple_hyperbolic(eq)) if eq.hyperbolic else "-"
        lines.append(f"  θ = {_deg(eq.theta)}  {cls:<18} λ_tan = {eq.lambda_tan: .6g}  "
                     f"λ_rad = {eq.lambda_rad: .6g}  {triple}")
    emit(args, "\n".join(lines), {"field": format_field(f), "equilibria": [equilibrium_json(e) for e in eqs]})
    return EXIT_OK


def _labeling(f, b, cfg):
    try:
        return classify_boundary(f, b, cfg.labeling())
    except BlockError as exc:
        raise CliError(str(exc), EXIT_BLOCK) from None


def _verdict_json(forward: ConleyIndexTriple, hat: ConleyIndexTriple) -> dict:
    return {
        "forward": forward.to_json(),
        "hat": hat.to_json(),
        "pattern": classify_triple(hat, ClassifyMode.PATTERN).value,
        "planar_catalog": classify_triple(hat, ClassifyMode.PLANAR_CATALOG).value,
        "verdict": existence_verdict(hat).value,
    }


def cmd_indices(args, cfg: Config) -> int:
    f = read_field(args.field)
    eqs = equilibria_of(f, cfg)
    lines = []
    payload: dict = {"field": format_field(f), "equilibria": [equilibrium_json(e) for e in eqs]}
    for eq in eqs:
        if eq.hyperbolic:
            lines.append(f"θ = {_deg(eq.theta)}  h = {index_triple_hyperbolic(eq)}  "
                         f"ĥ = {hat_index(f, eq)}")
        else:
            lines.append(f"θ = {_deg(eq.theta)}  non-hyperbolic: supply an isolating block of the complement")
    if args.block:
        b = read_block(args.block)
        lab = _labeling(f, b, cfg)
        fwd = block_index(b, lab)
        hat = block_index(b, lab, exit_as_N1=False)
        v = _verdict_json(fwd, hat)
        payload["complement"] = v
        lines.append(f"complement block: h = {fwd}  ĥ(S) = {hat}  verdict {v['verdict']}")
    emit(args, "\n".join(lines), payload)
    return EXIT_OK


def cmd_portrait(args, cfg: Config) -> int:
    f = read_field(args.field)
    eqs = equilibria_of(f, cfg) if f.n == 2 else []
    grid = cfg.portrait_grid if args.grid is None else args.grid
    trs = sample_portrait(f, seed_grid(grid), cfg.portrait_time, cfg.integrator(max_step=0.05))
    write_text(args.out, portrait_svg(trs, eqs))
    if args.csv:
        try:
            write_csv(trs, args.csv)
        except OSError as exc:
            raise CliError(f"cannot write {args.csv}: {exc.strerror or exc}", EXIT_IO) from None
    print(f"wrote {args.out}: {len(trs)} trajectories, {len(eqs)} equilibria")
    return EXIT_OK


def cmd_block_verify(args, cfg: Config) -> int:
    f = read_field(args.field)
    b = read_block(args.block)
    lab = _labeling(f, b, cfg)
    triple = block_index(b, lab)
    lines = [f"isolating block {b.name or args.block}: h = {triple}"]
    for s in lab.subsegments():
        lines.append(f"  ring {s.ring} edge {s.edge} [{s.t0:.6f}, {s.t1:.6f}] {s.label}")
    for t in lab.tangencies:
        lines.append(f"  {t.kind} at ({t.point[0]:.6f}, {t.point[1]:.6f}) exterior")
    payload = {
        "block": b.name,
        "triple": triple.to_json(),
        "exit_components": len(lab.exit_components),
        "entrance_components": len(lab.entrance_components),
        "tangencies": [{"point": list(t.point), "kind": t.kind, "exterior": t.exterior} for t in lab.tangencies],
    }
    emit(args, "\n".join(lines), payload)
    return EXIT_OK


def _parse_pair(spec: str) -> tuple[str, str]:
    table = str.maketrans({"⁻": "-", "⁺": "+"})
    parts = [p.strip().translate(table) for p in spec.strip("() ").split(",")]
    if len(parts) != 2 or not all(parts):
        raise CliError(f"pair must read 'attractor,repeller', got {spec!r}", EXIT_PARSE)
    return parts[0], parts[1]


def _parse_triple(text: str) -> ConleyIndexTriple:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise CliError(f"triple must read 'relH,relHE,relE', got {text!r}", EXIT_PARSE)
    try:
        return ConleyIndexTriple.parse(*parts)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def _run_pairs(fx: fxmod.Fixture, want: tuple[str, str] | None, cfg: Config) -> list[fxmod.PairResult]:
    pairs = fx.pairs
    if want is not None:
        pairs = [p for p in pairs if (p.attractor, p.repeller) == want]
        if not pairs:
            raise CliError(f"no pair {want} in {fx.name}", EXIT_PARSE)
    try:
        comp = fxmod.analyze_complement(fx.field, fx.s_comp_block) if fx.s_comp_block else None
        return [fxmod.run_pair(p, comp) for p in pairs]
    except BlockError as exc:
        raise CliError(str(exc), EXIT_BLOCK) from None


def cmd_detect(args, cfg: Config) -> int:
    if args.triples:
        inv, rep, att = (_parse_triple(t) for t in args.triples)
        w = detect_witnesses(inv, rep, att)
        res = fxmod.PairResult("synthetic", "A", "R", inv, att, rep, w)
        results = [res]
    elif args.fixture:
        try:
            fx = fxmod.load(args.fixture)
        except OSError as exc:
            raise CliError(f"cannot read fixture {args.fixture}: {exc.strerror or exc}", EXIT_IO) from None
        results = _run_pairs(fx, _parse_pair(args.pair) if args.pair else None, cfg)
    else:
        if not (args.field and args.block and args.pair and args.pair_block):
            raise CliError("detect needs FIELD BLOCK --pair A,R --pair-block FILE, or --fixture, or --triples",
                           EXIT_PARSE)
        f = read_field(args.field)
        b = read_block(args.block)
        pf = read_field(args.pair_field) if args.pair_field else f
        att, rep = _parse_pair(args.pair)
        members = {}
        for m in args.member or []:
            name, _, path = m.partition("=")
            members[name.strip()] = read_block(path)
        spec = fxmod.PairSpec("pair", att, rep, pf, read_block(args.pair_block), members)
        for needed in (att, rep):
            if needed not in ("b+", "b-") and needed not in members:
                raise CliError(f"member {needed!r} needs --member {needed}=BLOCK", EXIT_PARSE)
        try:
            lab = classify_boundary(f, b, cfg.labeling())
            comp = fxmod.ComplementAnalysis(lab, block_index(b, lab), block_index(b, lab, False), build_ersatz(b, lab))
            results = [fxmod.run_pair(spec, comp)]
        except BlockError as exc:
            raise CliError(str(exc), EXIT_BLOCK) from None
    lines = []
    for r in results:
        prefix = f"[{r.name}] " if len(results) > 1 else ""
        lines.append(prefix + r.message())
    emit(args, "\n".join(lines), {"detections": [r.to_json() for r in results]})
    return EXIT_OK


def cmd_family_check(args, cfg: Config) -> int:
    if args.fixture:
        fx = fxmod.load(args.fixture)
        f, family = fx.field, fx.family()
        if family is None:
            raise CliError(f"fixture {fx.name} has no block family", EXIT_PARSE)
    else:
        if not args.field or args.center is None:
            raise CliError("family-check needs FIELD --center ANGLE, or --fixture", EXIT_PARSE)
        f = read_field(args.field)
        family = complement_disk_family(args.center, args.r_max, args.r_min)
    n = cfg.family_lambdas
    rep = verify_isolating_family(f, family, samples=cfg.family_samples, lambdas=[k / n for k in range(n)],
                                  horizon=cfg.family_horizon, opts=cfg.integrator())
    status = "PASS" if rep.passed else "FAIL"
    lines = [f"HEURISTIC family check (horizon {rep.horizon:g}, {len(rep.lambdas)} λ values): {status}"]
    for s in rep.failures:
        lines.append(f"  λ = {s.lam:.4f}  point ({s.point[0]:.6f}, {s.point[1]:.6f}) [{s.kind}] does not leave")
    if rep.inconclusive:
        lines.append(f"  {len(rep.inconclusive)} inconclusive samples")
    payload = {
        "heuristic": True,
        "passed": rep.passed,
        "horizon": rep.horizon,
        "lambdas": rep.lambdas,
        "failures": [{"lambda": s.lam, "point": list(s.point), "kind": s.kind} for s in rep.failures],
        "inconclusive": len(rep.inconclusive),
        "samples": len(rep.samples),
    }
    emit(args, "\n".join(lines), payload)
    return EXIT_OK


def build_report(f: PolyMap, cfg: Config, fixture: fxmod.Fixture | None = None,
                 block: PlanarBlock | None = None) -> AnalysisReport:
    eqs = equilibria_of(f, cfg)
    rep = AnalysisReport(format_field(f), f.degree, [equilibrium_json(e) for e in eqs],
                         versions=versions(), tolerances=cfg.to_json())
    if fixture is not None and fixture.s_comp_block is not None:
        block = fixture.s_comp_block
    if block is not None:
        lab = _labeling(f, block, cfg)
        v = _verdict_json(block_index(block, lab), block_index(block, lab, exit_as_N1=False))
        if fixture is not None and fixture.s_theta is not None:
            v["S_theta"] = fixture.s_theta
        rep.verdicts.append(v)
    if fixture is not None and fixture.pairs:
        rep.detections = [r.to_json() for r in _run_pairs(fixture, None, cfg)]
    return rep


def cmd_report(args, cfg: Config) -> int:
    fx = None
    if args.fixture:
        fx = fxmod.load(args.fixture)
        f = fx.field
        if f is None:
            raise CliError(f"fixture {fx.name} has no planar field", EXIT_PARSE)
    elif args.field:
        f = read_field(args.field)
    else:
        raise CliError("report needs FIELD or --fixture", EXIT_PARSE)
    block = read_block(args.block) if args.block else None
    text = build_report(f, cfg, fx, block).dumps()
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_probe(args, cfg: Config) -> int:
    f = read_field(args.field)
    eqs = equilibria_of(f, cfg)
    src = min(eqs, key=lambda e: abs(math.remainder(e.theta - math.radians(args.source), 2 * math.pi)))
    dst = min(eqs, key=lambda e: abs(math.remainder(e.theta - math.radians(args.target), 2 * math.pi)))
    from .compactify import HemispherePoint
    ball = TargetBall(HemispherePoint(dst.direction, 0.0), cfg.probe_radius)
    try:
        rep = connection_probe(f, src, ball, horizon=cfg.probe_horizon, opts=cfg.integrator())
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    lines = [f"probe from θ = {_deg(src.theta)} to θ = {_deg(dst.theta)}"]
    for r in rep.results:
        lines.append(f"  {r.kind:<12} {r.termination.value}" + (f" at t = {r.entry_time:.6g}" if r.entry_time else ""))
    payload = {"reached": rep.reached, "first_entry": rep.first_entry,
               "results": [{"kind": r.kind, "termination": r.termination.value, "entry_time": r.entry_time}
                           for r in rep.results]}
    emit(args, "\n".join(lines), payload)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conley-inf", description="Conley index tools for dynamics at infinity.")
    p.add_argument("--config", help="config file (default: $CONLEY_CONFIG)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config entry")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--json", action="store_true", help="print a JSON fragment")
        return sp

    sp = add("equilibria", cmd_equilibria, "equilibria at infinity with classes and index triples")
    sp.add_argument("field")

    sp = add("indices", cmd_indices, "index triples and indices at infinity")
    sp.add_argument("field")
    sp.add_argument("--block", help="block isolating the dynamical complement of a degenerate set")

    sp = add("portrait", cmd_portrait, "SVG phase portrait on the Poincare disk")
    sp.add_argument("field")
    sp.add_argument("out")
    sp.add_argument("--grid", type=int, help="seed grid size per axis (0 for none)")
    sp.add_argument("--csv", help="also dump trajectories as CSV")

    sp = add("block-verify", cmd_block_verify, "label a block boundary and compute its index")
    sp.add_argument("field")
    sp.add_argument("block")

    sp = add("detect", cmd_detect, "detect connections to a degenerate set at infinity")
    sp.add_argument("field", nargs="?")
    sp.add_argument("block", nargs="?", help="block isolating the dynamical complement")
    sp.add_argument("--pair", help="attractor,repeller, e.g. b-,r")
    sp.add_argument("--pair-block", help="block isolating the invariant set of the pair")
    sp.add_argument("--pair-field", help="field for the pair block (default: FIELD)")
    sp.add_argument("--member", action="append", help="NAME=BLOCK for a non-ersatz pair member")
    sp.add_argument("--fixture", help="run a shipped fixture (name or JSON path)")
    sp.add_argument("--triples", nargs=3, metavar=("INV", "REP", "ATT"),
                    help="compare explicit triples, each 'relH,relHE,relE'")

    sp = add("family-check", cmd_family_check, "HEURISTIC isolation check for a block family")
    sp.add_argument("field", nargs="?")
    sp.add_argument("--fixture")
    sp.add_argument("--center", type=float, help="equator angle (radians) of the shrinking disk")
    sp.add_argument("--r-max", type=float, default=0.6)
    sp.add_argument("--r-min", type=float, default=0.0)

    sp = sub.add_parser("report", help="full JSON analysis report")
    sp.set_defaults(func=cmd_report)
    sp.add_argument("field", nargs="?")
    sp.add_argument("--fixture")
    sp.add_argument("--block")
    sp.add_argument("-o", "--out")

    sp = add("probe", cmd_probe, "shoot from one equilibrium at infinity towards another")
    sp.add_argument("field")
    sp.add_argument("--source", type=float, required=True, help="angle in degrees")
    sp.add_argument("--target", type=float, required=True, help="angle in degrees")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = dict(parse_override(s) for s in args.set or [])
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: cannot read config: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args, cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
