"""Integration of the compactified flow on the Poincare hemisphere.

Away from the equator the state is the unit vector ``(chi, z)`` and every
accepted Dormand-Prince 4(5) step is renormalized onto the sphere.  Below
``z = 0.05`` the state is carried in the vertical chart at the nearest
equator direction ``e``, where ``zeta' = -<g, e> zeta`` keeps the equator
invariant exactly.  The chart field is multiplied by ``s^(d-1)``,
``s = <chi, e>``, so both representations share the normalized hemisphere
time.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .compactify import HemispherePoint, _homogenized, perp_frame
from .polyfield import PolyMap

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class Termination(str, Enum):
    HORIZON_REACHED = "HorizonReached"
    ENTERED_TARGET_BALL = "EnteredTargetBall"
    LEFT_DOMAIN = "LeftDomain"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class IntegratorOptions:
    step: float = 1e-2
    rtol: float = 1e-9
    atol: float = 1e-11
    max_step: float = 0.1
    chart_switch: float = 0.05
    norm_tol: float = 1e-8
    max_halvings: int = 20
    max_steps: int = 200_000
    record_every: int = 1

    def __post_init__(self):
        if not 1e-6 < self.step < 1e-1:
            raise ValueError("initial step must lie in (1e-6, 1e-1)")


@dataclass(frozen=True)
class TargetBall:
    """Chordal ball on the hemisphere."""

    center: HemispherePoint
    radius: float

    def contains(self, h: HemispherePoint) -> bool:
        return float(np.linalg.norm(h.vector - self.center.vector)) < self.radius


@dataclass
class Trajectory:
    """Samples ``(t, point)`` with ``t`` the elapsed normalized time along the
    integration direction (``direction = -1`` for backward runs)."""

    samples: list[tuple[float, HemispherePoint]]
    termination: Termination
    direction: int = 1
    max_norm_drift: float = 0.0
    message: str = ""

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.samples])

    @property
    def points(self) -> np.ndarray:
        return np.array([p.vector for _, p in self.samples])

    @property
    def end(self) -> HemispherePoint:
        return self.samples[-1][1]

    @property
    def end_time(self) -> float:
        return self.samples[-1][0]


class _State:
    """Either hemisphere coordinates ``y = (chi, z)`` or chart ``(e, w = (u, zeta))``."""

    __slots__ = ("mode", "y", "e", "frame", "w")

    def __init__(self, mode, y=None, e=None, frame=None, w=None):
        self.mode, self.y, self.e, self.frame, self.w = mode, y, e, frame, w

    def raw_vector(self) -> np.ndarray:
        if self.mode == "hemi":
            return self.y
        v = np.append(self.e + self.frame.T @ self.w[:-1], self.w[-1])
        return v / np.linalg.norm(v)

    def point(self) -> HemispherePoint:
        if self.mode == "hemi":
            return HemispherePoint(self.y[:-1], max(self.y[-1], 0.0))
        xi = self.e + self.frame.T @ self.w[:-1]
        zeta = self.w[-1]
        v = np.append(xi, zeta)
        v = v / np.linalg.norm(v)
        return HemispherePoint(v[:-1], 0.0 if zeta == 0.0 else v[-1])


class FlowIntegrator:
    """Adaptive integrator for the compactified field of ``f`` (or of ``-f``)."""

    def __init__(self, f: PolyMap, opts: IntegratorOptions | None = None, direction: int = 1):
        self.f = f
        self.G = _homogenized(f)
        self.d = f.degree
        self.opts = opts or IntegratorOptions()
        self.sign = 1.0 if direction >= 0 else -1.0

    # right-hand sides -----------------------------------------------------
    def rhs_hemi(self, y: np.ndarray) -> np.ndarray:
        chi, z = y[:-1], y[-1]
        g = self.G(chi, z)
        s = float(g @ chi)
        out = np.empty(len(y))
        out[:-1] = g - s * chi
        out[-1] = -s * z
        return self.sign * out

    def rhs_chart(self, e: np.ndarray, frame: np.ndarray, w: np.ndarray) -> np.ndarray:
        xi = e + frame.T @ w[:-1]
        zeta = w[-1]
        g = self.G(xi, zeta)
        ge = float(g @ e)
        dxi = g - ge * xi
        du = frame @ dxi
        dzeta = -ge * zeta
        scale = (1.0 + float(w[:-1] @ w[:-1]) + zeta * zeta) ** (-(self.d - 1) / 2.0)
        out = np.empty(len(w))
        out[:-1] = du
        out[-1] = dzeta
        return (self.sign * scale) * out

    # state handling -------------------------------------------------------
    def to_state(self, h: HemispherePoint) -> _State:
        if h.z >= self.opts.chart_switch:
            return _State("hemi", y=h.vector.copy())
        st = self._chart_from_vector(h.vector)
        if h.z == 0.0:
            st.w[-1] = 0.0
        return st

    def _next_state(self, new: _State) -> _State:
        """Switch representation when crossing ``chart_switch`` or drifting far in a chart."""
        sw = self.opts.chart_switch
        if new.mode == "hemi":
            if new.y[-1] >= sw:
                return new
            return self._chart_from_vector(new.y)
        v = new.raw_vector()
        if v[-1] >= sw:
            return _State("hemi", y=v)
        if np.all(np.abs(new.w[:-1]) < 0.5):
            return new
        st = self._chart_from_vector(v)
        if new.w[-1] == 0.0:
            st.w[-1] = 0.0
        return st

    def _chart_from_vector(self, v: np.ndarray) -> _State:
        chi, z = v[:-1], v[-1]
        e = chi / np.linalg.norm(chi)
        frame = perp_frame(e)
        s = float(chi @ e)
        return _State("chart", e=e, frame=frame, w=np.append(frame @ (chi / s), z / s))

    def _rk_step(self, rhs: Callable, y: np.ndarray, h: float):
        k = np.empty((7, y.size))
        k[0] = rhs(y)
        for i in range(1, 7):
            k[i] = rhs(y + h * (np.array(_A[i]) @ k[:i]))
        y5 = y + h * (_B5 @ k)
        err = h * ((_B5 - _B4) @ k)
        return y5, err

    def step(self, st: _State, h: float):
        """One trial step; returns (new state, scaled error, norm drift)."""
        if st.mode == "hemi":
            y5, err = self._rk_step(self.rhs_hemi, st.y, h)
            scale = self.opts.atol + self.opts.rtol * np.maximum(np.abs(st.y), np.abs(y5))
            drift = abs(float(np.linalg.norm(y5)) - 1.0)
            if y5[-1] < 0:
                return None, np.inf, drift
            y5 = y5 / np.linalg.norm(y5)
            return _State("hemi", y=y5), float(np.max(np.abs(err) / scale)), drift
        rhs = lambda w: self.rhs_chart(st.e, st.frame, w)
        w5, err = self._rk_step(rhs, st.w, h)
        if st.w[-1] == 0.0:
            w5[-1] = 0.0
        elif w5[-1] < 0:
            return None, np.inf, 0.0
        scale = self.opts.atol + self.opts.rtol * np.maximum(np.abs(st.w), np.abs(w5))
        return _State("chart", e=st.e, frame=st.frame, w=w5), float(np.max(np.abs(err) / scale)), 0.0

    def fixed_step(self, h0: HemispherePoint, h: float) -> HemispherePoint:
        """Single step of length ``h`` without error control (event bisection)."""
        new, _, _ = self.step(self.to_state(h0), h)
        if new is None:
            raise FloatingPointError("fixed step left the hemisphere")
        return new.point()

    def run(self, start: HemispherePoint, t_span: float,
            target: TargetBall | None = None,
            domain: Callable[[HemispherePoint], bool] | None = None,
            on_step: Callable[[float, HemispherePoint], bool] | None = None) -> Trajectory:
        o = self.opts
        direction = 1 if self.sign > 0 else -1
        samples = [(0.0, start)]
        if target is not None and target.contains(start):
            return Trajectory(samples, Termination.ENTERED_TARGET_BALL, direction)
        if domain is not None and not domain(start):
            return Trajectory(samples, Termination.LEFT_DOMAIN, direction)
        st = self.to_state(start)
        t, h = 0.0, o.step
        max_drift = 0.0
        rejects = 0
        n = 0
        while t < t_span:
            h = min(h, o.max_step, t_span - t)
            new, err, drift = self.step(st, h)
            if new is None or not np.isfinite(err) or err > 1.0 or drift > o.norm_tol:
                rejects += 1
                if rejects > o.max_halvings:
                    return Trajectory(samples, Termination.STEP_FAILURE, direction, max_drift,
                                      f"step rejected {rejects} times at t={t:.6g}")
                h *= 0.5
                continue
            rejects = 0
            max_drift = max(max_drift, drift)
            t += h
            n += 1
            p = new.point()
            if n % o.record_every == 0 or t >= t_span:
                samples.append((t, p))
            if target is not None and target.contains(p):
                if samples[-1][0] != t:
                    samples.append((t, p))
                return Trajectory(samples, Termination.ENTERED_TARGET_BALL, direction, max_drift)
            if domain is not None and not domain(p):
                if samples[-1][0] != t:
                    samples.append((t, p))
                return Trajectory(samples, Termination.LEFT_DOMAIN, direction, max_drift)
            if on_step is not None and on_step(t, p):
                if samples[-1][0] != t:
                    samples.append((t, p))
                return Trajectory(samples, Termination.HORIZON_REACHED, direction, max_drift, "stopped")
            if n >= o.max_steps:
                return Trajectory(samples, Termination.STEP_FAILURE, direction, max_drift,
                                  "maximum number of steps reached")
            st = self._next_state(new)
            fac = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        return Trajectory(samples, Termination.HORIZON_REACHED, direction, max_drift)


def integrate(f: PolyMap, start: HemispherePoint, t_span: float,
              opts: IntegratorOptions | None = None, **kwargs) -> Trajectory:
    """Integrate for normalized time ``|t_span|``; negative spans run backward."""
    direction = 1 if t_span >= 0 else -1
    return FlowIntegrator(f, opts, direction).run(start, abs(t_span), **kwargs)


# --- connection probes ------------------------------------------------------

@dataclass
class ProbeResult:
    start: HemispherePoint
    kind: str
    termination: Termination
    entry_time: float | None


@dataclass
class ProbeReport:
    source_theta: float
    results: list[ProbeResult]

    @property
    def reached(self) -> bool:
        return any(r.entry_time is not None for r in self.results)

    @property
    def first_entry(self) -> float | None:
        times = [r.entry_time for r in self.results if r.entry_time is not None]
        return min(times) if times else None


def connection_probe(f: PolyMap, source, target: TargetBall,
                     offsets: Sequence[float] = (1e-3,), horizon: float = 100.0,
                     opts: IntegratorOptions | None = None) -> ProbeReport:
    """Shoot from a hyperbolic equilibrium at infinity along its unstable directions."""
    if not source.hyperbolic or (source.lambda_tan <= 0 and source.lambda_rad <= 0):
        raise ValueError("connection probe needs a hyperbolic source with an unstable direction")
    starts = []
    theta = source.theta
    for off in offsets:
        if source.lambda_tan > 0:
            starts += [("tangential+", HemispherePoint.from_angle(theta + off)),
                       ("tangential-", HemispherePoint.from_angle(theta - off))]
        if source.lambda_rad > 0:
            starts.append(("radial", HemispherePoint.from_angle(theta, off)))
    results = []
    for kind, p in starts:
        tr = integrate(f, p, horizon, opts, target=target)
        hit = tr.termination is Termination.ENTERED_TARGET_BALL
        results.append(ProbeResult(p, kind, tr.termination, tr.end_time if hit else None))
    return ProbeReport(theta, results)


# --- portraits --------------------------------------------------------------

MAX_SEEDS = 10_000


def seed_grid(n: int) -> list[HemispherePoint]:
    """``n x n`` grid of seeds in the open Poincare disk (points outside dropped)."""
    if n <= 0:
        return []
    xs = np.linspace(-0.9, 0.9, n) if n > 1 else np.array([0.0])
    return [HemispherePoint.from_disk((x, y)) for x in xs for y in xs if x * x + y * y < 0.95]


def sample_portrait(f: PolyMap, seeds: Iterable[HemispherePoint], t_span: float = 20.0,
                    opts: IntegratorOptions | None = None) -> list[Trajectory]:
    """Forward and backward trajectory per seed; failures are recorded, not raised."""
    seeds = list(seeds)
    if len(seeds) > MAX_SEEDS:
        raise ValueError(f"at most {MAX_SEEDS} seeds")
    opts = opts or IntegratorOptions(max_step=0.05, record_every=1)
    out = []
    for s in seeds:
        for sign in (1, -1):
            try:
                out.append(integrate(f, s, sign * t_span, opts))
            except (FloatingPointError, ValueError, OverflowError) as exc:
                out.append(Trajectory([(0.0, s)], Termination.STEP_FAILURE, sign, message=str(exc)))
    return out


_GLYPH = {
    "AttractorLike": ("#1f77b4", "circle"),
    "RepellerLike": ("#d62728", "circle"),
    "SaddleRadUnstable": ("#ff7f0e", "square"),
    "SaddleRadStable": ("#2ca02c", "square"),
    None: ("#7f7f7f", "diamond"),
}


def portrait_svg(trajectories: Sequence[Trajectory], equilibria: Sequence = (), size: int = 600) -> str:
    """SVG of the Poincare disk seen from the pole."""
    c = size / 2
    R = size / 2 - 20

    def xy(p):
        return c + R * p[0], c - R * p[1]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle class="equator" cx="{c:.2f}" cy="{c:.2f}" r="{R:.2f}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for tr in trajectories:
        if len(tr.samples) < 2:
            continue
        pts = " ".join("%.2f,%.2f" % xy(p.chi) for _, p in tr.samples)
        parts.append(f'<polyline class="trajectory" points="{pts}" fill="none" stroke="#555" stroke-width="0.6"/>')
    for eq in equilibria:
        cls = eq.stability_class.value if eq.stability_class else None
        color, shape = _GLYPH[cls]
        x, y = xy(eq.direction)
        label = cls or "NonHyperbolic"
        if shape == "circle":
            parts.append(f'<circle class="equilibrium" data-class="{label}" cx="{x:.2f}" cy="{y:.2f}" r="6" fill="{color}"/>')
        elif shape == "square":
            parts.append(f'<rect class="equilibrium" data-class="{label}" x="{x - 5:.2f}" y="{y - 5:.2f}" width="10" height="10" fill="{color}"/>')
        else:
            parts.append(f'<polygon class="equilibrium" data-class="{label}" points="{x:.2f},{y - 7:.2f} {x + 7:.2f},{y:.2f} {x:.2f},{y + 7:.2f} {x - 7:.2f},{y:.2f}" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_csv(trajectories: Sequence[Trajectory], path) -> None:
    """Dump ``trajectory, direction, t, chi1, chi2, z`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trajectory", "direction", "t", "chi1", "chi2", "z"])
        for i, tr in enumerate(trajectories):
            for t, p in tr.samples:
                w.writerow([i, tr.direction, repr(t), *(repr(float(c)) for c in p.chi), repr(p.z)])
