"""Real root isolation for univariate polynomials with rational coefficients.

Polynomials are coefficient lists, lowest degree first, of Fractions.  All
sign decisions are exact; only the final midpoints are converted to float.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Coeffs = list[Fraction]


def trim(p: Sequence[Fraction]) -> Coeffs:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence[Fraction]) -> int:
    return len(trim(p)) - 1


def evaluate(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Sequence[Fraction]) -> Coeffs:
    return trim([c * k for k, c in enumerate(p)][1:])


def divmod_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            r[i + k] -= c * bc
        r = trim(r)
    return trim(q), r


def gcd_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return [c / a[-1] for c in a] if a else a


def squarefree(p: Sequence[Fraction]) -> Coeffs:
    p = trim(p)
    g = gcd_poly(p, derivative(p))
    if len(g) <= 1:
        return p
    return divmod_poly(p, g)[0]


def sturm_sequence(p: Sequence[Fraction]) -> list[Coeffs]:
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def sign_changes(seq: list[Coeffs], x: Fraction) -> int:
    signs = [s for s in (evaluate(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def cauchy_bound(p: Sequence[Fraction]) -> Fraction:
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(a, b]`` each containing exactly one distinct real root."""
    p = squarefree(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    B = cauchy_bound(p)
    out = []
    stack = [(-B, B)]
    while stack:
        a, b = stack.pop()
        count = sign_changes(seq, a) - sign_changes(seq, b)
        if count == 0:
            continue
        if count == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        stack.extend([(m, b), (a, m)])
    return sorted(out)


def refine_root(p: Sequence[Fraction], a: Fraction, b: Fraction, tol: float = 1e-12) -> float:
    """Bisect a root of the square-free ``p`` in ``(a, b]`` to width ``tol``."""
    p = squarefree(p)
    if evaluate(p, b) == 0:
        return float(b)
    fa = evaluate(p, a)
    if fa == 0:
        # a itself is a (simple) root outside the half-open interval; the
        # sign just to its right is that of p'(a)
        fa = evaluate(derivative(p), a)
    while b - a > Fraction(tol):
        m = (a + b) / 2
        fm = evaluate(p, m)
        if fm == 0:
            return float(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return float((a + b) / 2)


def real_roots(p: Sequence[Fraction], tol: float = 1e-12) -> list[float]:
    return [refine_root(p, a, b, tol) for a, b in isolate_real_roots(p)]

