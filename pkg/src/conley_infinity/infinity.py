"""Equilibria on the circle at infinity of a planar polynomial field.

On the equator the normalized flow reduces to ``chi' = P(chi) - <P(chi), chi> chi``
with ``P`` the top-degree part, so equilibria are the unit directions where
``P(chi)`` is parallel to ``chi``, i.e. the real zeros on the circle of the
homogeneous form ``T = x1 P2 - x2 P1``.  Along the equator the angular speed
is ``T(cos t, sin t)``; transversally the chart equation ``zeta' = -<g, e> zeta``
gives the radial eigenvalue ``-<P(e), e>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import sturm
from .indexalg import ConleyIndexTriple, HomotopyClass
from .polyfield import DegenerateFieldError, FieldError, Poly, PolyMap, homogeneous_decompose

HYPERBOLIC_TOL = 1e-8
EQUILIBRIUM_TOL = 1e-8


class StabilityClass(str, Enum):
    ATTRACTOR_LIKE = "AttractorLike"
    REPELLER_LIKE = "RepellerLike"
    SADDLE_RAD_UNSTABLE = "SaddleRadUnstable"
    SADDLE_RAD_STABLE = "SaddleRadStable"


class NonHyperbolicError(ValueError):
    pass


@dataclass(frozen=True)
class InfinityEquilibrium:
    direction: np.ndarray
    theta: float
    lambda_tan: float
    lambda_rad: float
    hyperbolic: bool
    stability_class: StabilityClass | None

    @property
    def unstable_tangential(self) -> int:
        return int(self.lambda_tan > 0)


def tangency_form(f: PolyMap) -> Poly:
    """``T = x1 P2 - x2 P1``; vanishes exactly where ``P`` is radial."""
    if f.n != 2:
        raise FieldError("equilibria at infinity are computed for planar fields only")
    P = homogeneous_decompose(f).top.components
    x1, x2 = Poly.variable(2, 0), Poly.variable(2, 1)
    return x1 * P[1] - x2 * P[0]


def _angle(v) -> float:
    return math.atan2(v[1], v[0]) % (2 * math.pi)


def equilibrium_directions(f: PolyMap) -> list[np.ndarray]:
    T = tangency_form(f)
    if T.is_zero():
        raise DegenerateFieldError(
            "degenerate: entire equator invariant-pointwise (top-degree part is radial)")
    m = T.degree
    coeffs = T.as_dict()
    # T = x2^k T'(x1, x2) with T'(1, 0) != 0
    k = min(e[1] for e in coeffs)
    dirs = []
    if k > 0:
        dirs += [np.array([1.0, 0.0]), np.array([-1.0, 0.0])]
    # dehomogenize T' at x2 = 1: coefficient of s^i is that of x1^i x2^(m-i)
    uni = [Fraction(0)] * (m + 1)
    for (i, j), c in coeffs.items():
        uni[i] += c
    for s in sturm.real_roots(uni):
        v = np.array([s, 1.0]) / math.hypot(s, 1.0)
        dirs += [v, -v]
    return sorted(dirs, key=_angle)


def classify(f: PolyMap, e, hyperbolic_tol: float = HYPERBOLIC_TOL,
             equilibrium_tol: float = EQUILIBRIUM_TOL) -> InfinityEquilibrium:
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    P = homogeneous_decompose(f).top
    Pe = P.evaluate(e)
    eperp = np.array([-e[1], e[0]])
    if abs(Pe @ eperp) > equilibrium_tol * max(1.0, np.linalg.norm(Pe)):
        raise ValueError(f"direction {e} is not an equilibrium at infinity")
    T = tangency_form(f)
    lam_tan = float(T.diff(0).__call__(e) * eperp[0] + T.diff(1).__call__(e) * eperp[1])
    lam_rad = float(-(Pe @ e))
    hyp = abs(lam_tan) > hyperbolic_tol and abs(lam_rad) > hyperbolic_tol
    cls = None
    if hyp:
        cls = {
            (False, False): StabilityClass.ATTRACTOR_LIKE,
            (True, True): StabilityClass.REPELLER_LIKE,
            (False, True): StabilityClass.SADDLE_RAD_UNSTABLE,
            (True, False): StabilityClass.SADDLE_RAD_STABLE,
        }[(lam_tan > 0, lam_rad > 0)]
    return InfinityEquilibrium(e, _angle(e), lam_tan, lam_rad, hyp, cls)


def find_equilibria_at_infinity(f: PolyMap, hyperbolic_tol: float = HYPERBOLIC_TOL) -> list[InfinityEquilibrium]:
    return [classify(f, e, hyperbolic_tol) for e in equilibrium_directions(f)]


def index_triple_hyperbolic(eq: InfinityEquilibrium) -> ConleyIndexTriple:
    """Index triple of a hyperbolic equilibrium on the circle at infinity.

    With ``u`` the number of unstable tangential directions: radially
    attracting gives ``(S^u, 0, S^u)``, radially repelling ``(0, S^(u+1), S^u)``.
    """
    if not eq.hyperbolic:
        raise NonHyperbolicError("index lookup requires hyperbolicity; use block_index instead")
    u = eq.unstable_tangential
    if eq.lambda_rad < 0:
        return ConleyIndexTriple(HomotopyClass.sphere(u), HomotopyClass.trivial(), HomotopyClass.sphere(u))
    return ConleyIndexTriple(HomotopyClass.trivial(), HomotopyClass.sphere(u + 1), HomotopyClass.sphere(u))


def reversed_equilibrium(eq: InfinityEquilibrium) -> InfinityEquilibrium:
    """The same equilibrium under the time-reversed field ``-f``."""
    cls = None
    if eq.hyperbolic:
        flip = {
            StabilityClass.ATTRACTOR_LIKE: StabilityClass.REPELLER_LIKE,
            StabilityClass.REPELLER_LIKE: StabilityClass.ATTRACTOR_LIKE,
            StabilityClass.SADDLE_RAD_UNSTABLE: StabilityClass.SADDLE_RAD_STABLE,
            StabilityClass.SADDLE_RAD_STABLE: StabilityClass.SADDLE_RAD_UNSTABLE,
        }
        cls = flip[eq.stability_class]
    return InfinityEquilibrium(eq.direction, eq.theta, -eq.lambda_tan, -eq.lambda_rad, eq.hyperbolic, cls)
