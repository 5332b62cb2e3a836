"""Polygonal isolating blocks on the closed Poincare disk.

A block is drawn in disk coordinates ``chi`` (the hemisphere seen from the
pole).  Its boundary is made of straight segments inside the disk and arcs
of the equator.  The non-equator part is split by the sign of the flux of
the compactified field through the outward normal into an entrance set
``B+`` and an exit set ``B-``; index pairs are read off a triangulation of
the block.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import mapbox_earcut
import numpy as np
import shapely
from shapely.geometry import LineString, Point, Polygon as ShapelyPolygon
from shapely.ops import unary_union

from .compactify import HemispherePoint, compactified_field
from .flowsim import FlowIntegrator, IntegratorOptions, Termination
from .homology import SimplicialComplex, betti_relative
from .indexalg import COMPONENTS, ConleyIndexTriple, HomotopyClass, wedge, wedge_triples
from .polyfield import PolyMap, homogeneous_decompose

EXIT = "Exit"
ENTRANCE = "Entrance"

ARC_TOL = 1e-10
VERTEX_TOL = 1e-9
ARC_STEP = 0.05  # radians between triangulation vertices along equator arcs
MIN_ARC_PIECES = 64
MAX_BOX_SEGMENTS = 1000


class BlockError(ValueError):
    """Invalid block geometry or a block that fails the isolation checks."""


class InternalTangencyError(BlockError):
    pass


class GrazingBoundaryError(BlockError):
    pass


class TriangulationError(BlockError):
    pass


# --- geometry ----------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    p0: tuple[float, float]
    p1: tuple[float, float]

    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "p0", (float(self.p0[0]), float(self.p0[1])))
        object.__setattr__(self, "p1", (float(self.p1[0]), float(self.p1[1])))

    @property
    def start(self) -> np.ndarray:
        return np.array(self.p0)

    @property
    def end(self) -> np.ndarray:
        return np.array(self.p1)

    @property
    def length(self) -> float:
        return float(np.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]))

    def at(self, t: float) -> np.ndarray:
        return (1 - t) * self.start + t * self.end

    @property
    def normal(self) -> np.ndarray:
        """Outward normal: the block lies to the left of the travel direction."""
        d = self.end - self.start
        return np.array([d[1], -d[0]]) / np.linalg.norm(d)

    def to_json(self) -> dict:
        return {"segment": [list(self.p0), list(self.p1)]}


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise equator arc from ``theta0`` to ``theta1``."""

    theta0: float
    theta1: float

    kind = "equator_arc"

    def __post_init__(self):
        t0, t1 = float(self.theta0), float(self.theta1)
        while t1 <= t0:
            t1 += 2 * math.pi
        if t1 - t0 > 2 * math.pi + 1e-12:
            raise BlockError("equator arc longer than a full turn")
        object.__setattr__(self, "theta0", t0)
        object.__setattr__(self, "theta1", t1)

    @property
    def start(self) -> np.ndarray:
        return np.array([math.cos(self.theta0), math.sin(self.theta0)])

    @property
    def end(self) -> np.ndarray:
        return np.array([math.cos(self.theta1), math.sin(self.theta1)])

    @property
    def span(self) -> float:
        return self.theta1 - self.theta0

    def angles(self, step: float = ARC_STEP) -> np.ndarray:
        """Start angle and interior subdivision angles (end excluded).

        Short arcs still get ``MIN_ARC_PIECES`` pieces, so that the chords
        stay well outside flat blocks hugging the equator.
        """
        k = max(MIN_ARC_PIECES, int(math.ceil(self.span / step)))
        return self.theta0 + self.span * np.arange(k) / k

    def to_json(self) -> dict:
        return {"equator_arc": [self.theta0, self.theta1]}


Edge = Segment | Arc


def _edge_from_json(d) -> Edge:
    if "segment" in d:
        return Segment(*d["segment"])
    if "equator_arc" in d:
        return Arc(*d["equator_arc"])
    raise BlockError(f"unknown edge {d!r}")


def _ring_from_vertices(vertices: Sequence[Sequence[float]], arcs: Iterable[int] = ()) -> tuple[Edge, ...]:
    """Edge ``i`` joins vertex ``i`` to ``i+1``; indices in ``arcs`` become equator arcs."""
    arcs = set(arcs)
    m = len(vertices)
    edges = []
    for i in range(m):
        a, b = vertices[i], vertices[(i + 1) % m]
        if i in arcs:
            edges.append(Arc(math.atan2(a[1], a[0]), math.atan2(b[1], b[0])))
        else:
            edges.append(Segment(a, b))
    return tuple(edges)


def _ring_polyline(ring: Sequence[Edge], arc_step: float = 0.01) -> np.ndarray:
    pts = []
    for e in ring:
        if isinstance(e, Arc):
            for a in e.angles(arc_step):
                pts.append((math.cos(a), math.sin(a)))
        else:
            pts.append(e.p0)
    return np.array(pts)


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class BlockPolygon:
    outer: tuple[Edge, ...]
    holes: tuple[tuple[Edge, ...], ...] = ()

    def rings(self) -> list[tuple[Edge, ...]]:
        return [self.outer, *self.holes]


@dataclass(frozen=True, eq=False)
class PlanarBlock:
    """Union of polygons (with holes) in the closed unit disk.

    Outer rings run counter-clockwise and holes clockwise, so the block is
    always on the left of an edge and the right-hand normal points outward.
    Equator arcs may only occur on outer rings.
    """

    polygons: tuple[BlockPolygon, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "polygons", tuple(self.polygons))
        if not self.polygons:
            raise BlockError("block without polygons")
        for poly in self.polygons:
            for ri, ring in enumerate(poly.rings()):
                self._check_ring(ring, hole=ri > 0)
        geom = self.geometry
        if not geom.is_valid or geom.area <= 0:
            raise BlockError("block polygons overlap or are degenerate")

    @staticmethod
    def _check_ring(ring, hole: bool) -> None:
        if not ring:
            raise BlockError("empty ring")
        for i, e in enumerate(ring):
            nxt = ring[(i + 1) % len(ring)]
            if np.linalg.norm(e.end - nxt.start) > VERTEX_TOL:
                raise BlockError(f"ring is not closed between edges {i} and {i + 1}")
            if isinstance(e, Segment):
                if e.length <= VERTEX_TOL:
                    raise BlockError("zero-length segment")
                for p in (e.p0, e.p1):
                    if math.hypot(*p) > 1 + ARC_TOL:
                        raise BlockError(f"vertex {p} outside the closed unit disk")
            elif hole:
                raise BlockError("equator arcs cannot bound a hole")
        area = _signed_area(_ring_polyline(ring))
        if (area > 0) == hole:
            raise BlockError("outer rings must run counter-clockwise and holes clockwise")

    # construction ---------------------------------------------------------
    @classmethod
    def from_vertices(cls, vertices, arcs: Iterable[int] = (), holes: Sequence = (), name: str = "") -> "PlanarBlock":
        outer = _ring_from_vertices(vertices, arcs)
        return cls((BlockPolygon(outer, tuple(_ring_from_vertices(h) for h in holes)),), name)

    @classmethod
    def half_disk(cls, theta: float, delta: float, name: str = "") -> "PlanarBlock":
        """Region between the equator and the chord from ``theta - delta`` to ``theta + delta``."""
        a, b = theta - delta, theta + delta
        pa, pb = (math.cos(a), math.sin(a)), (math.cos(b), math.sin(b))
        return cls((BlockPolygon((Arc(a, b), Segment(pb, pa))),), name)

    @classmethod
    def chart_box(cls, theta: float, r: float, h: float, segments: int = 32, name: str = "") -> "PlanarBlock":
        """Box ``|u| <= r, 0 <= zeta <= h`` of the vertical chart at the equator angle ``theta``.

        The sides ``u = +-r`` are radial segments of the disk; the top
        ``zeta = h`` is drawn as a polygon with ``segments`` pieces.
        """
        e = np.array([math.cos(theta), math.sin(theta)])
        ep = np.array([-e[1], e[0]])

        def point(u, zeta):
            return (e + u * ep) / math.sqrt(1.0 + u * u + zeta * zeta)

        a, b = theta - math.atan(r), theta + math.atan(r)
        top = [point(u, h) for u in np.linspace(r, -r, segments + 1)]
        corners = [np.array([math.cos(b), math.sin(b)])] + top + [np.array([math.cos(a), math.sin(a)])]
        edges: list[Edge] = [Arc(a, b)]
        edges += [Segment(corners[i], corners[i + 1]) for i in range(len(corners) - 1)]
        return cls((BlockPolygon(tuple(edges)),), name)

    @classmethod
    def from_json(cls, d: dict) -> "PlanarBlock":
        polys = []
        for p in d["polygons"]:
            polys.append(BlockPolygon(_ring_json(p["outer"]), tuple(_ring_json(h) for h in p.get("holes", []))))
        return cls(tuple(polys), d.get("name", ""))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "polygons": [
                {"outer": [e.to_json() for e in p.outer], "holes": [[e.to_json() for e in h] for h in p.holes]}
                for p in self.polygons
            ],
        }

    @classmethod
    def load(cls, path) -> "PlanarBlock":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    # queries --------------------------------------------------------------
    def rings(self):
        """Yield ``((polygon index, ring index), ring)``."""
        for pi, poly in enumerate(self.polygons):
            for ri, ring in enumerate(poly.rings()):
                yield (pi, ri), ring

    @cached_property
    def geometry(self):
        polys = []
        for p in self.polygons:
            polys.append(ShapelyPolygon(_ring_polyline(p.outer), [_ring_polyline(h) for h in p.holes]))
        g = unary_union(polys) if len(polys) > 1 else polys[0]
        shapely.prepare(g)
        return g

    def contains(self, p, tol: float = 0.0) -> bool:
        """Point test in disk coordinates; ``tol > 0`` accepts points within ``tol`` of the block."""
        pt = Point(float(p[0]), float(p[1]))
        if tol > 0:
            return self.geometry.distance(pt) <= tol
        return self.geometry.contains(pt)

    def boundary_points(self, count: int) -> list[np.ndarray]:
        """``count`` points evenly spaced by arclength on the non-equator boundary."""
        segs = [e for _, ring in self.rings() for e in ring if isinstance(e, Segment)]
        if not segs or count <= 0:
            return []
        cum = np.cumsum([0.0] + [e.length for e in segs])
        out = []
        for s in (np.arange(count) + 0.5) / count * cum[-1]:
            i = min(int(np.searchsorted(cum, s, side="right")) - 1, len(segs) - 1)
            out.append(segs[i].at((s - cum[i]) / segs[i].length))
        return out

    def meets_equator(self) -> bool:
        return any(isinstance(e, Arc) for _, ring in self.rings() for e in ring)


def _ring_json(r) -> tuple[Edge, ...]:
    if isinstance(r, dict) and "vertices" in r:
        return _ring_from_vertices(r["vertices"], r.get("arcs", ()))
    return tuple(_edge_from_json(e) for e in r)


# --- boundary labeling --------------------------------------------------------

@dataclass(frozen=True)
class SubSegment:
    ring: tuple[int, int]
    edge: int
    t0: float
    t1: float
    label: str
    p0: tuple[float, float]
    p1: tuple[float, float]


@dataclass(frozen=True)
class TangencyPoint:
    point: tuple[float, float]
    ring: tuple[int, int]
    edge: int
    t: float
    exterior: bool
    kind: str = "tangency"  # or "corner" where the label changes at a vertex


@dataclass
class BoundaryLabeling:
    block: PlanarBlock
    pieces: dict[tuple[int, int], list[SubSegment | Arc]]
    tangencies: list[TangencyPoint]

    def subsegments(self, label: str | None = None) -> list[SubSegment]:
        return [s for ring in self.pieces.values() for s in ring
                if isinstance(s, SubSegment) and (label is None or s.label == label)]

    def components(self, label: str) -> list[list[SubSegment]]:
        """Connected components of the closure of the ``label`` set."""
        comps = []
        for items in self.pieces.values():
            groups: list[list[SubSegment]] = []
            current: list[SubSegment] = []
            for it in items:
                if isinstance(it, SubSegment) and it.label == label:
                    current.append(it)
                elif current:
                    groups.append(current)
                    current = []
            if current:
                groups.append(current)
            # a ring without separators is a cycle: join the ends
            cyclic = len(groups) >= 2 and _is(items[0], label) and _is(items[-1], label)
            if cyclic:
                groups[0] = groups.pop() + groups[0]
            comps += groups
        return comps

    @property
    def exit_components(self) -> list[list[SubSegment]]:
        return self.components(EXIT)

    @property
    def entrance_components(self) -> list[list[SubSegment]]:
        return self.components(ENTRANCE)


def _is(item, label) -> bool:
    return isinstance(item, SubSegment) and item.label == label


def boundary_flux(f: PolyMap, p, normal) -> float:
    h = HemispherePoint.from_disk(_clip_disk(p))
    dchi, _ = compactified_field(f, h)
    return float(dchi @ normal)


def _clip_disk(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    r = math.hypot(p[0], p[1])
    return p / r if r > 1 else p


def _bisect_zero(fun: Callable[[float], float], a: float, b: float, fa: float, tol: float) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = fun(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


@dataclass(frozen=True)
class LabelingOptions:
    samples: int = 32
    tangency_tol: float = 1e-10
    probe_time: float = 1e-3
    grazing_tol: float = 1e-12


def _edge_pieces(f, seg: Segment, opts: LabelingOptions):
    """Split points and labels along one segment edge."""
    n = seg.normal
    fun = lambda t: boundary_flux(f, seg.at(t), n)
    ts = np.linspace(0.0, 1.0, opts.samples)
    vals = np.array([fun(t) for t in ts])
    if np.all(np.abs(vals) < opts.grazing_tol):
        raise GrazingBoundaryError("grazing boundary, refine block")
    nz = [i for i in range(len(ts)) if vals[i] != 0]
    splits = []
    tol = opts.tangency_tol / max(seg.length, 1e-300)
    for i, j in zip(nz, nz[1:]):
        if (vals[i] > 0) != (vals[j] > 0):
            splits.append(_bisect_zero(fun, ts[i], ts[j], vals[i], tol))
    bounds = [0.0, *splits, 1.0]
    labels = []
    for a, b in zip(bounds, bounds[1:]):
        inside = [v for t, v in zip(ts, vals) if a <= t <= b and abs(v) >= opts.grazing_tol]
        if not inside:
            mid = fun(0.5 * (a + b))
            if abs(mid) < opts.grazing_tol:
                raise GrazingBoundaryError("grazing boundary, refine block")
            inside = [mid]
        if min(inside) < 0 < max(inside):
            raise BlockError("mixed flux sign on a boundary piece; refine sampling")
        labels.append(EXIT if inside[0] > 0 else ENTRANCE)
    return bounds, labels


def _probe_exterior(f: PolyMap, block: PlanarBlock, p, h: float) -> bool:
    start = HemispherePoint.from_disk(_clip_disk(p))
    outside = 0
    for sign in (1, -1):
        q = FlowIntegrator(f, IntegratorOptions(), sign).fixed_step(start, h)
        if not block.contains(q.chi):
            outside += 1
    return outside == 2


def label_boundary(f: PolyMap, b: PlanarBlock, opts: LabelingOptions | None = None,
                   strict: bool = True) -> BoundaryLabeling:
    opts = opts or LabelingOptions()
    pieces: dict[tuple[int, int], list] = {}
    tangencies: list[TangencyPoint] = []
    for key, ring in b.rings():
        items: list = []
        for ei, e in enumerate(ring):
            if isinstance(e, Arc):
                items.append(e)
                continue
            bounds, labels = _edge_pieces(f, e, opts)
            for k, (t0, t1) in enumerate(zip(bounds, bounds[1:])):
                items.append(SubSegment(key, ei, t0, t1, labels[k], tuple(e.at(t0)), tuple(e.at(t1))))
            for t in bounds[1:-1]:
                p = e.at(t)
                tangencies.append(TangencyPoint(tuple(p), key, ei, t, _probe_exterior(f, b, p, opts.probe_time)))
        # label changes at corners between two segments
        m = len(items)
        for i in range(m):
            a, c = items[i], items[(i + 1) % m]
            if isinstance(a, SubSegment) and isinstance(c, SubSegment) and a.label != c.label and a.edge != c.edge:
                p = np.array(a.p1)
                tangencies.append(TangencyPoint(tuple(p), key, c.edge, 0.0,
                                                _probe_exterior(f, b, p, opts.probe_time), "corner"))
        pieces[key] = items
    lab = BoundaryLabeling(b, pieces, tangencies)
    if strict:
        bad = [t for t in tangencies if not t.exterior]
        if bad:
            raise InternalTangencyError(
                f"not an isolating block: internal tangency at {tuple(round(c, 6) for c in bad[0].point)}")
    return lab


def classify_boundary(f: PolyMap, b: PlanarBlock, opts: LabelingOptions | None = None, **kw) -> BoundaryLabeling:
    """Entrance/exit labeling of the non-equator boundary of ``b`` under ``f``."""
    if kw:
        opts = LabelingOptions(**kw)
    return label_boundary(f, b, opts, strict=True)


# --- triangulation and index pairs -------------------------------------------

@dataclass
class BlockComplex:
    N: SimplicialComplex
    exit: SimplicialComplex
    entrance: SimplicialComplex
    E: SimplicialComplex
    points: np.ndarray


def triangulate(lab: BoundaryLabeling) -> BlockComplex:
    """Earcut triangulation whose boundary vertices include all label changes."""
    block = lab.block
    all_pts: list[tuple[float, float]] = []
    tris: list[tuple[int, int, int]] = []
    edges = {EXIT: [], ENTRANCE: [], "E": []}
    for pi, poly in enumerate(block.polygons):
        base = len(all_pts)
        local: list[tuple[float, float]] = []
        kinds: list[str] = []
        ring_ends = []
        for ri in range(len(poly.rings())):
            start = len(local)
            for it in lab.pieces[(pi, ri)]:
                if isinstance(it, Arc):
                    for a in it.angles():
                        local.append((math.cos(a), math.sin(a)))
                        kinds.append("E")
                else:
                    local.append(it.p0)
                    kinds.append(it.label)
            # drop coincident consecutive vertices (e.g. splits at a vertex)
            ring_pts, ring_kinds = [], []
            for p, k in zip(local[start:], kinds[start:]):
                if ring_pts and math.dist(p, ring_pts[-1]) < 1e-12:
                    ring_kinds[-1] = k
                    continue
                ring_pts.append(p)
                ring_kinds.append(k)
            if len(ring_pts) > 1 and math.dist(ring_pts[0], ring_pts[-1]) < 1e-12:
                ring_pts.pop()
                ring_kinds.pop()
            del local[start:], kinds[start:]
            local += ring_pts
            kinds += ring_kinds
            for j in range(len(ring_pts)):
                a = base + start + j
                b = base + start + (j + 1) % len(ring_pts)
                edges[ring_kinds[j]].append((a, b))
            ring_ends.append(len(local))
        verts = np.array(local, dtype=np.float64)
        idx = mapbox_earcut.triangulate_float64(verts, np.array(ring_ends, dtype=np.uint32))
        if len(idx) == 0:
            raise TriangulationError("triangulation failed on a degenerate polygon")
        tris += [tuple(int(base + i) for i in idx[k:k + 3]) for k in range(0, len(idx), 3)]
        all_pts += local
        expected_chi = 1 - len(poly.holes)
        K = SimplicialComplex(tris[-(len(idx) // 3):])
        if K.euler_characteristic() != expected_chi or len(K.vertices) != len(local):
            raise TriangulationError("triangulation does not cover the polygon")
    return BlockComplex(
        N=SimplicialComplex(tris),
        exit=SimplicialComplex(edges[EXIT]),
        entrance=SimplicialComplex(edges[ENTRANCE]),
        E=SimplicialComplex(edges["E"]),
        points=np.array(all_pts),
    )


def block_index(b: PlanarBlock, lab: BoundaryLabeling, exit_as_N1: bool = True) -> ConleyIndexTriple:
    """``(H(N, N1), H(N, N1 u (N n E)), H(N n E, N1 n E))`` for the block's index pair.

    With ``exit_as_N1=False`` the entrance set plays the exit set, which is
    the index pair of the same block under reversed time.
    """
    if lab.block is not b:
        raise BlockError("labeling belongs to a different block")
    bad = [t for t in lab.tangencies if not t.exterior]
    if bad:
        raise InternalTangencyError("not an isolating block: internal tangency")
    cx = triangulate(lab)
    N1 = cx.exit if exit_as_N1 else cx.entrance
    relH = betti_relative(cx.N, N1)
    relHE = betti_relative(cx.N, N1.union(cx.E))
    relE = betti_relative(cx.E, N1.intersection(cx.E))
    return ConleyIndexTriple.from_betti(relH, relHE, relE)


# --- ersatz infinities -------------------------------------------------------

ERSATZ_MINUS = ConleyIndexTriple(HomotopyClass.sphere(0), HomotopyClass.trivial(), HomotopyClass.sphere(0))
ERSATZ_PLUS = ConleyIndexTriple(HomotopyClass.trivial(), HomotopyClass.sphere(2), HomotopyClass.sphere(1))


@dataclass
class ErsatzModel:
    """Point retractions of the components of ``B+`` (repellers ``b+``) and ``B-`` (attractors ``b-``)."""

    block: PlanarBlock
    labeling: BoundaryLabeling
    b_plus: list[tuple[float, float]]
    b_minus: list[tuple[float, float]]
    component_triples: dict[str, list[ConleyIndexTriple]]

    @property
    def triple_plus(self) -> ConleyIndexTriple:
        return wedge_triples(self.component_triples["b+"])

    @property
    def triple_minus(self) -> ConleyIndexTriple:
        return wedge_triples(self.component_triples["b-"])


def _component_point(comp: list[SubSegment]) -> tuple[float, float]:
    mid = comp[len(comp) // 2]
    return tuple(0.5 * (np.array(mid.p0) + np.array(mid.p1)))


def build_ersatz(b: PlanarBlock, lab: BoundaryLabeling) -> ErsatzModel:
    exits = lab.exit_components
    entrances = lab.entrance_components
    if not exits and not entrances:
        raise BlockError("block boundary all tangent: invalid")
    return ErsatzModel(
        block=b,
        labeling=lab,
        b_plus=[_component_point(c) for c in entrances],
        b_minus=[_component_point(c) for c in exits],
        component_triples={"b+": [ERSATZ_PLUS] * len(entrances), "b-": [ERSATZ_MINUS] * len(exits)},
    )


# --- detection ---------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    component: str
    index: HomotopyClass
    repeller: HomotopyClass
    attractor: HomotopyClass

    @property
    def wedge(self) -> HomotopyClass:
        return wedge(self.repeller, self.attractor)

    def __str__(self) -> str:
        parts = [str(c) for c in (self.repeller, self.attractor) if not c.is_trivial]
        rhs = "∨".join(parts) if parts else "0̄"
        return f"{self.component}: {self.index} ≠ {rhs}"


def detect_witnesses(hI: ConleyIndexTriple, hRep: ConleyIndexTriple, hAtt: ConleyIndexTriple) -> list[Witness]:
    out = []
    for k in COMPONENTS:
        w = Witness(k, hI[k], hRep[k], hAtt[k])
        if w.index != w.wedge:
            out.append(w)
    return out


def detect(hI: ConleyIndexTriple, hRep: ConleyIndexTriple, hAtt: ConleyIndexTriple) -> bool:
    """Index inequality certifying a connection from the repeller to the attractor."""
    return bool(detect_witnesses(hI, hRep, hAtt))


# --- entrance and exit times --------------------------------------------------

@dataclass(frozen=True)
class EntranceExitTimes:
    t_minus: float
    t_plus: float
    entry_point: HemispherePoint | None
    exit_point: HemispherePoint | None


def _crossing_time(f: PolyMap, block: PlanarBlock, direction: int, x: HemispherePoint,
                   horizon: float, tol: float, opts: IntegratorOptions):
    integ = FlowIntegrator(f, opts, direction)
    inside = lambda p: block.contains(p.chi, tol=1e-12)
    tr = integ.run(x, horizon, domain=inside)
    if tr.termination is not Termination.LEFT_DOMAIN:
        return math.inf, None
    (t0, p0), (t1, _) = tr.samples[-2], tr.samples[-1]
    lo, hi = 0.0, t1 - t0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(integ.fixed_step(p0, mid)):
            lo = mid
        else:
            hi = mid
    return t0 + hi, integ.fixed_step(p0, hi) if hi > 0 else p0


def entrance_exit_times(f: PolyMap, b: PlanarBlock, x: HemispherePoint, horizon: float = 50.0,
                        tol: float = 1e-9, opts: IntegratorOptions | None = None) -> EntranceExitTimes:
    """Times ``T- <= 0 <= T+`` at which the orbit of ``x`` crosses ``d b``; infinite if never."""
    if not b.contains(x.chi, tol=1e-12):
        raise BlockError("point outside the block")
    opts = opts or IntegratorOptions(max_step=0.05)
    tp, pexit = _crossing_time(f, b, 1, x, horizon, tol, opts)
    tm, pentry = _crossing_time(f, b, -1, x, horizon, tol, opts)
    return EntranceExitTimes(-tm, tp, pentry, pexit)


# --- separation ---------------------------------------------------------------

_DISK = ShapelyPolygon([(math.cos(a), math.sin(a)) for a in np.linspace(0, 2 * math.pi, 4096, endpoint=False)])


_SLIVER = 1e-4  # wider than the gap between the disk polygon and arc polylines


def _complement(b: PlanarBlock):
    # opening removes the slivers left between the block's arc polylines and the disk polygon
    comp = _DISK.difference(b.geometry).buffer(-_SLIVER).buffer(_SLIVER)
    parts = getattr(comp, "geoms", [comp])
    return unary_union([p for p in parts if p.area > 1e-8])


def check_separation(blocks: Sequence[PlanarBlock], tol: float = 1e-9) -> bool:
    """Pairwise disjointness of the closures of the block complements."""
    if len(blocks) < 2:
        raise ValueError("separation needs at least two blocks")
    comps = [_complement(b) for b in blocks]
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if comps[i].is_empty or comps[j].is_empty:
                continue
            if comps[i].distance(comps[j]) <= tol:
                return False
    return True


# --- isolating families ------------------------------------------------------

@dataclass(frozen=True)
class FamilySample:
    lam: float
    point: tuple[float, float]
    status: str  # "exits", "fails" or "inconclusive"
    t_forward: float
    t_backward: float
    kind: str = "sample"


@dataclass
class FamilyReport:
    samples: list[FamilySample]
    lambdas: list[float]
    horizon: float
    heuristic: bool = True

    @property
    def failures(self) -> list[FamilySample]:
        return [s for s in self.samples if s.status == "fails"]

    @property
    def inconclusive(self) -> list[FamilySample]:
        return [s for s in self.samples if s.status == "inconclusive"]

    @property
    def passed(self) -> bool:
        return not self.failures


def _leave_time(f: PolyMap, block: PlanarBlock, p, direction: int, horizon: float, opts: IntegratorOptions):
    start = HemispherePoint.from_disk(_clip_disk(p))
    tr = FlowIntegrator(f, opts, direction).run(start, horizon, domain=lambda q: block.contains(q.chi, tol=1e-9))
    return tr.termination, tr.end_time


def verify_isolating_family(f: PolyMap, family: Callable[[float], PlanarBlock], samples: int = 16,
                            lambdas: Sequence[float] | None = None, horizon: float = 50.0,
                            opts: IntegratorOptions | None = None) -> FamilyReport:
    """HEURISTIC check that boundary points of every ``K_lambda`` leave it in some time direction.

    Boundary samples and the flux sign changes (tangency points) of each
    block are integrated forward and backward for at most ``horizon``.
    """
    lambdas = list(lambdas) if lambdas is not None else [k / 16 for k in range(16)]
    opts = opts or IntegratorOptions()
    out = []
    for lam in lambdas:
        blk = family(lam)
        pts = [(p, "sample") for p in blk.boundary_points(samples)]
        try:
            lab = label_boundary(f, blk, strict=False)
            pts += [(np.array(t.point), t.kind) for t in lab.tangencies]
        except BlockError:
            pass
        for p, kind in pts:
            tf, tb = math.inf, math.inf
            status = "fails"
            term, t = _leave_time(f, blk, p, 1, horizon, opts)
            if term is Termination.LEFT_DOMAIN:
                tf, status = t, "exits"
            else:
                term2, t2 = _leave_time(f, blk, p, -1, horizon, opts)
                if term2 is Termination.LEFT_DOMAIN:
                    tb, status = t2, "exits"
                elif Termination.STEP_FAILURE in (term, term2):
                    status = "inconclusive"
            out.append(FamilySample(lam, tuple(float(c) for c in p), status, tf, tb, kind))
    return FamilyReport(out, lambdas, horizon)


def complement_disk_family(center_angle: float, r_max: float, r_min: float = 0.0,
                           segments: int = 48) -> Callable[[float], PlanarBlock]:
    """``K_lambda`` = closed disk minus an open disk of radius ``r(lambda)`` around an equator point.

    The radius shrinks linearly from ``r_max`` at ``lambda = 0`` towards
    ``r_min`` as ``lambda -> 1``; the inner circle is approximated by a polygon.
    """
    c = np.array([math.cos(center_angle), math.sin(center_angle)])

    def block(lam: float) -> PlanarBlock:
        r = r_max + (r_min - r_max) * lam
        if not 0 < r < 2:
            raise BlockError("radius out of range")
        # intersections of |p - c| = r with the unit circle are at angle offsets +-phi
        phi = 2 * math.asin(r / 2)
        a0, a1 = center_angle + phi, center_angle - phi + 2 * math.pi
        p_end = np.array([math.cos(a1), math.sin(a1)])
        p_start = np.array([math.cos(a0), math.sin(a0)])
        # walk the small circle through the disk interior from p_end back to p_start
        b_end = math.atan2(*(p_end - c)[::-1])
        b_start = math.atan2(*(p_start - c)[::-1])
        while b_start > b_end:
            b_start -= 2 * math.pi
        betas = np.linspace(b_end, b_start, segments + 1)
        pts = [c + r * np.array([math.cos(b), math.sin(b)]) for b in betas]
        pts[0], pts[-1] = p_end, p_start
        edges: list[Edge] = [Arc(a0, a1)]
        edges += [Segment(pts[i], pts[i + 1]) for i in range(segments)]
        return PlanarBlock((BlockPolygon(tuple(edges)),), f"K({lam:.4f})")

    return block


# --- automatic blocks at hyperbolic equilibria -----------------------------------

@dataclass
class AutoBlock:
    block: PlanarBlock
    labeling: BoundaryLabeling
    triple: ConleyIndexTriple
    delta: float


def chart_linearization(f: PolyMap, theta: float) -> tuple[float, float, float]:
    """``(lam_tan, g, lam_rad)`` of the linearized chart flow at an equilibrium at infinity.

    In the vertical chart at ``e`` the linearization is
    ``u' = lam_tan u + g zeta``, ``zeta' = lam_rad zeta`` with
    ``g = <p(e), e_perp>`` for ``p`` the part of ``f`` of degree ``d - 1``.
    """
    from .infinity import tangency_form

    dec = homogeneous_decompose(f)
    e = np.array([math.cos(theta), math.sin(theta)])
    ep = np.array([-e[1], e[0]])
    T = tangency_form(f)
    lam_tan = float(T.diff(0)(e) * ep[0] + T.diff(1)(e) * ep[1])
    lam_rad = -float(dec.top.evaluate(e) @ e)
    lower = PolyMap([p.homogeneous_part(dec.degree - 1) for p in f.components])
    return lam_tan, float(lower.evaluate(e) @ ep), lam_rad


def auto_half_disk(f: PolyMap, theta: float, neighbours: Sequence[float] = (),
                   delta0: float = 0.2, max_halvings: int = 8) -> AutoBlock:
    """Block at an equator direction meeting the equator in one arc, shrunk until its index is stable.

    Without a ``zeta`` term in the linearized chart flow (see
    :func:`chart_linearization`) the block is the half-disk cut off by a
    straight chord.  Otherwise the term ``g zeta`` can make the flux through
    any half-disk change sign, so a chart box of height
    ``h = min(r, |lam_tan| r / (2 |g|))`` is used: its sides then carry the
    sign of ``lam_tan`` and its top the sign of ``lam_rad``.  Starting from
    ``delta0`` (capped at 0.4 times the angular gap to the nearest other
    equilibrium), ``delta`` is halved until the block labels cleanly and
    halving once more gives the same triple.
    """
    lam_tan, g, lam_rad = chart_linearization(f, theta)
    gaps = [abs((n - theta + math.pi) % (2 * math.pi) - math.pi) for n in neighbours]
    gaps = [x for x in gaps if x > 1e-9]
    delta = min([delta0] + [0.4 * x for x in gaps])
    aspect = 1.0 if g == 0.0 else min(1.0, abs(lam_tan) / (2.0 * abs(g)))
    # seen from the pole the top edge hugs the equator: its normal flux is of
    # order lam_rad h^2 while chord slope errors are of order (r / segments)
    # times the tangential speed, so the segment count scales with their ratio
    speed = abs(lam_tan) + abs(g) * aspect
    segments = int(math.ceil(4.0 * speed / max(abs(lam_rad) * aspect ** 2, 1e-12)))
    segments = min(MAX_BOX_SEGMENTS, max(16, segments))
    previous = None
    last_error: Exception | None = None
    for _ in range(max_halvings):
        r = math.tan(delta)
        if g == 0.0:
            blk = PlanarBlock.half_disk(theta, delta)
        else:
            blk = PlanarBlock.chart_box(theta, r, aspect * r, segments)
        try:
            lab = classify_boundary(f, blk)
            t = block_index(blk, lab)
        except BlockError as exc:
            last_error, previous = exc, None
            delta *= 0.5
            continue
        if previous is not None and previous.triple == t:
            return previous
        previous = AutoBlock(blk, lab, t, delta)
        delta *= 0.5
    if previous is not None:
        return previous
    raise BlockError(f"no stable half-disk block found: {last_error}")
