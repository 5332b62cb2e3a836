"""Poincare hemisphere, the normalized compactified field, and vertical charts.

Points of the plane are sent to the upper unit hemisphere by central
projection, ``x -> (x, 1) / sqrt(|x|^2 + 1)``.  With the normalization
``rho(z) = z^(d-1)`` the transported field is the polynomial
``G(chi, z) = z^d f(chi / z)`` projected onto the sphere's tangent space,
which is regular up to and including the equator ``z = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .polyfield import DegenerateFieldError, PolyMap, homogenize

NORM_TOL = 1e-9
Z_CLAMP = 1e-12
CHART_CUTOFF = 0.1


class ChartDomainError(ValueError):
    pass


class InfinityLiftError(ValueError):
    pass


@dataclass(frozen=True)
class HemispherePoint:
    chi: np.ndarray
    z: float

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=float).copy()
        chi.setflags(write=False)
        z = float(self.z)
        if abs(z) < Z_CLAMP:
            z = 0.0
        if z < 0:
            raise ValueError(f"hemisphere point below the equator (z={z})")
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "z", z)

    @classmethod
    def normalized(cls, chi, z) -> "HemispherePoint":
        v = np.append(np.asarray(chi, dtype=float), float(z))
        v = v / np.linalg.norm(v)
        return cls(v[:-1], 0.0 if z == 0 else v[-1])

    @classmethod
    def from_angle(cls, theta: float, z: float = 0.0) -> "HemispherePoint":
        r = np.sqrt(max(0.0, 1.0 - z * z))
        return cls(np.array([r * np.cos(theta), r * np.sin(theta)]), z)

    @classmethod
    def from_disk(cls, p) -> "HemispherePoint":
        """Point above ``p`` in the closed unit disk (view from the pole)."""
        p = np.asarray(p, dtype=float)
        r2 = float(p @ p)
        if r2 > 1 + 1e-12:
            raise ValueError("point outside the closed unit disk")
        if r2 >= 1:
            return cls(p / np.sqrt(r2), 0.0)
        return cls(p, np.sqrt(1.0 - r2))

    @property
    def vector(self) -> np.ndarray:
        return np.append(self.chi, self.z)

    def norm_error(self) -> float:
        return abs(float(np.linalg.norm(self.vector)) - 1.0)


@dataclass(frozen=True)
class ChartPoint:
    """Point of the vertical chart tangent at the equator direction ``base``.

    ``xi`` is the full vector in ``R^n`` (so ``<xi, base> = 1``); ``u`` gives
    its coordinates in the frame of ``base``-perp.
    """

    base: np.ndarray
    xi: np.ndarray
    zeta: float

    @property
    def u(self) -> np.ndarray:
        return perp_frame(self.base) @ (self.xi - self.base)


def perp_frame(e) -> np.ndarray:
    """Orthonormal frame of ``e``-perp as rows.  For n=2, ``e=(cos t, sin t)``
    gets the single row ``(-sin t, cos t)``."""
    e = np.asarray(e, dtype=float)
    if e.shape == (2,):
        return np.array([[-e[1], e[0]]])
    q, _ = np.linalg.qr(np.column_stack([e, np.eye(len(e))]))
    frame = q[:, 1:len(e)].T
    return frame * np.sign(q[:, 0] @ e)


def project(x) -> HemispherePoint:
    x = np.asarray(x, dtype=float)
    s = np.sqrt(x @ x + 1.0)
    return HemispherePoint(x / s, 1.0 / s)


def lift(h: HemispherePoint) -> np.ndarray:
    if h.z <= 0:
        raise InfinityLiftError("point at infinity has no finite lift")
    return h.chi / h.z


@lru_cache(maxsize=256)
def _homogenized(f: PolyMap):
    if f.is_zero():
        raise DegenerateFieldError("degenerate field: all components vanish")
    return homogenize(f)


def normalized_homothety(f: PolyMap, chi, z) -> np.ndarray:
    """``rho(z) f_z(chi)`` with ``rho = z^(d-1)``; at ``z = 0`` this is ``P(chi)``."""
    return _homogenized(f)(chi, z)


def sphere_field(f: PolyMap, chi, z):
    """Compactified field at raw coordinates; exact if given Fractions."""
    G = _homogenized(f)
    if not any(isinstance(c, Fraction) for c in list(chi) + [z]):
        g = G(chi, z)
        chi = np.asarray(chi, dtype=float)
        s = float(g @ chi)
        return g - s * chi, -s * float(z)
    g = G.exact(chi, z)
    s = sum(gi * ci for gi, ci in zip(g, chi))
    return [gi - s * ci for gi, ci in zip(g, chi)], -s * z


def compactified_field(f: PolyMap, h: HemispherePoint) -> tuple[np.ndarray, float]:
    """Tangent vector ``(dchi, dz)`` of the normalized flow at ``h``."""
    dchi, dz = sphere_field(f, h.chi, h.z)
    if h.z == 0.0:
        dz = 0.0
    return dchi, dz


def chart_project(e, h: HemispherePoint) -> ChartPoint:
    e = np.asarray(e, dtype=float)
    s = float(h.chi @ e)
    if s <= 0:
        raise ChartDomainError("point outside chart domain")
    return ChartPoint(e, h.chi / s, h.z / s)


def chart_unproject(p: ChartPoint) -> HemispherePoint:
    v = np.append(p.xi, p.zeta)
    v = v / np.linalg.norm(v)
    return HemispherePoint(v[:-1], 0.0 if p.zeta == 0 else v[-1])


def chart_point(e, u, zeta: float) -> ChartPoint:
    e = np.asarray(e, dtype=float)
    return ChartPoint(e, e + perp_frame(e).T @ np.atleast_1d(np.asarray(u, dtype=float)), zeta)


def chart_field(f: PolyMap, e, p: ChartPoint) -> tuple[np.ndarray, float]:
    """Field in the vertical chart at ``e``: ``xi' = g - <g,e> xi``, ``zeta' = -<g,e> zeta``."""
    e = np.asarray(e, dtype=float)
    g = normalized_homothety(f, p.xi, p.zeta)
    s = float(g @ e)
    dxi = g - s * p.xi
    dxi = dxi - (dxi @ e) * e  # remove rounding along e
    dzeta = 0.0 if p.zeta == 0 else -s * p.zeta
    return dxi, dzeta


def chart_field_exact(f: PolyMap, e, xi, zeta):
    g = _homogenized(f).exact(xi, zeta)
    s = sum(gi * ei for gi, ei in zip(g, e))
    return [gi - s * xj for gi, xj in zip(g, xi)], -s * zeta


def original_field_on_hemisphere(f: PolyMap, h: HemispherePoint) -> np.ndarray:
    """Pushforward of ``f`` itself (no normalization), for consistency checks."""
    x = lift(h)
    fx = f.evaluate(x)
    v = np.append(x, 1.0)
    s = np.sqrt(v @ v)
    w = np.append(fx, 0.0)
    return w / s - v * (v @ w) / s ** 3
