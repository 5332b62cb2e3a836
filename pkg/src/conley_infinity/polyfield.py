"""Polynomial vector fields with exact rational coefficients.

A :class:`Poly` is a canonical sparse polynomial in ``n`` variables; a
:class:`PolyMap` is an ``n``-tuple of them, i.e. the right-hand side of
``x' = f(x)``.  Coefficients are :class:`fractions.Fraction`; floats given
on input are converted exactly, so a double-precision field round-trips
bit for bit.

The text grammar read by the CLI is::

    dx1 = x1^2 + x2^2 - 1; dx2 = 5(x1 x2 - 1)

with ``^`` for powers, implicit multiplication by juxtaposition, rational
literals such as ``3/2`` and decimals.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class FieldError(ValueError):
    """Malformed or unusable field input."""


class DegenerateFieldError(FieldError):
    pass


class ParseError(FieldError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, np.integer):
        return Fraction(int(c))
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, (float, np.floating)):
        if not np.isfinite(c):
            raise FieldError(f"non-finite coefficient {c!r}")
        return Fraction(float(c))
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


@dataclass(frozen=True)
class Poly:
    """Sparse polynomial; ``terms`` is sorted graded-lex descending and merged."""

    n: int
    terms: tuple[tuple[Exponent, Fraction], ...] = ()

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[Sequence[int], object]] | Mapping) -> "Poly":
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Exponent, Fraction] = {}
        for exp, c in terms:
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise FieldError(f"exponent {exp} has length {len(exp)}, expected {n}")
            if any(e < 0 for e in exp):
                raise FieldError(f"negative exponent in {exp}")
            acc[exp] = acc.get(exp, Fraction(0)) + _as_fraction(c)
        items = sorted(((e, c) for e, c in acc.items() if c != 0),
                       key=lambda t: _grlex_key(t[0]), reverse=True)
        return cls(n, tuple(items))

    @classmethod
    def constant(cls, n: int, c) -> "Poly":
        return cls.from_terms(n, [((0,) * n, c)])

    @classmethod
    def variable(cls, n: int, i: int) -> "Poly":
        exp = [0] * n
        exp[i] = 1
        return cls.from_terms(n, [(exp, 1)])

    def as_dict(self) -> dict[Exponent, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e, _ in self.terms), default=-1)

    def homogeneous_part(self, k: int) -> "Poly":
        return Poly(self.n, tuple(t for t in self.terms if sum(t[0]) == k))

    def lower_part(self, k: int) -> "Poly":
        """Terms of total degree strictly below ``k``."""
        return Poly(self.n, tuple(t for t in self.terms if sum(t[0]) < k))

    def __add__(self, other: "Poly") -> "Poly":
        return Poly.from_terms(self.n, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Poly":
        return Poly(self.n, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _as_fraction(other)
            return Poly.from_terms(self.n, [(e, a * c) for e, a in self.terms])
        out: dict[Exponent, Fraction] = {}
        for e1, a in self.terms:
            for e2, b in other.terms:
                e = tuple(i + j for i, j in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + a * b
        return Poly.from_terms(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, j: int) -> "Poly":
        out = []
        for e, c in self.terms:
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                out.append((e2, c * e[j]))
        return Poly.from_terms(self.n, out)

    def __call__(self, x):
        """Evaluate with whatever arithmetic ``x`` carries (Fractions stay exact)."""
        total = 0
        for e, c in self.terms:
            term = c
            for xi, k in zip(x, e):
                if k:
                    term = term * xi ** k
            total = total + term
        return total

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.n)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{_frac_str(mag)}*{mono}"
            else:
                body = _frac_str(mag)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        s = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self) -> str:
        return self.to_str()


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class PolyMap:
    """Polynomial vector field ``f: R^n -> R^n``; immutable."""

    __slots__ = ("components", "_exps", "_coeffs")

    def __init__(self, components: Sequence[Poly]):
        components = tuple(components)
        if not components:
            raise FieldError("a field needs at least one component")
        n = components[0].n
        if any(p.n != n for p in components):
            raise FieldError("components disagree on the number of variables")
        if len(components) != n:
            raise FieldError(f"{len(components)} components for {n} variables")
        object.__setattr__(self, "components", components)
        exps, coeffs = [], []
        for p in components:
            exps.append(np.array([e for e, _ in p.terms], dtype=np.int64).reshape(-1, n))
            coeffs.append(np.array([float(c) for _, c in p.terms], dtype=float))
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap is immutable")

    @classmethod
    def from_terms(cls, n: int, comps: Sequence) -> "PolyMap":
        return cls([Poly.from_terms(n, c) for c in comps])

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        """Maximal total degree over all components jointly."""
        return max(p.degree for p in self.components)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMap) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __neg__(self) -> "PolyMap":
        return PolyMap([-p for p in self.components])

    def __add__(self, other: "PolyMap") -> "PolyMap":
        return PolyMap([a + b for a, b in zip(self.components, other.components)])

    def __repr__(self) -> str:
        return f"PolyMap({format_field(self)!r})"

    def evaluate(self, x) -> np.ndarray:
        """Double-precision evaluation."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise FieldError(f"point has shape {x.shape}, field dimension is {self.n}")
        out = np.empty(self.n)
        for i, (E, c) in enumerate(zip(self._exps, self._coeffs)):
            out[i] = np.prod(x ** E, axis=1) @ c if len(c) else 0.0
        return out

    def evaluate_exact(self, x) -> list:
        if len(x) != self.n:
            raise FieldError(f"point has length {len(x)}, field dimension is {self.n}")
        return [p(x) for p in self.components]


def evaluate(f: PolyMap, x) -> np.ndarray:
    return f.evaluate(x)


@dataclass(frozen=True)
class HomogeneousDecomposition:
    top: PolyMap
    rest: PolyMap
    degree: int


def homogeneous_decompose(f: PolyMap) -> HomogeneousDecomposition:
    """Split ``f = P + p`` with ``P`` homogeneous of the joint top degree ``d``."""
    if f.is_zero():
        raise DegenerateFieldError("degenerate field: all components vanish")
    d = f.degree
    top = PolyMap([p.homogeneous_part(d) for p in f.components])
    rest = PolyMap([p.lower_part(d) for p in f.components])
    return HomogeneousDecomposition(top, rest, d)


def jacobian(f: PolyMap) -> list[list[Poly]]:
    return [[p.diff(j) for j in range(f.n)] for p in f.components]


def homogenize(f: PolyMap, degree: int | None = None) -> "HomogenizedField":
    """``G(x, z) = z^d f(x/z)``: ``n`` polynomials in ``n+1`` variables.

    ``G`` is homogeneous of degree ``d``; on the hemisphere it equals the
    normalized homothety ``z^(d-1) f_z``, and ``G(chi, 0) = P(chi)``.
    """
    d = f.degree if degree is None else degree
    comps = []
    for p in f.components:
        comps.append(Poly.from_terms(f.n + 1, [(e + (d - sum(e),), c) for e, c in p.terms]))
    return HomogenizedField(comps, d)


class HomogenizedField:
    """Fast evaluator for ``G(chi, z)``; see :func:`homogenize`."""

    def __init__(self, comps: Sequence[Poly], degree: int):
        self.components = tuple(comps)
        self.degree = degree
        self._nvars = comps[0].n
        # sparse monomials: (coefficient, ((variable, power), ...)) with power > 0
        self._terms = [
            [(float(c), tuple((j, k) for j, k in enumerate(e) if k)) for e, c in p.terms] for p in comps
        ]

    def __call__(self, chi, z) -> np.ndarray:
        y = [float(v) for v in chi]
        y.append(float(z))
        pw = []
        for v in y:
            row = [1.0]
            for _ in range(self.degree):
                row.append(row[-1] * v)
            pw.append(row)
        out = np.empty(len(self._terms))
        for i, terms in enumerate(self._terms):
            acc = 0.0
            for c, mono in terms:
                for j, k in mono:
                    c *= pw[j][k]
                acc += c
            out[i] = acc
        return out

    def exact(self, chi, z) -> list:
        y = list(chi) + [z]
        return [p(y) for p in self.components]


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, n: int, offset: int, source: str):
        self.text, self.n, self.offset, self.source = text, n, offset, source
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                self.fail("unexpected character", pos + len(text[pos:]) - len(text[pos:].lstrip()))
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def fail(self, msg: str, pos: int):
        at = self.offset + pos
        line = self.source.count("\n", 0, at) + 1
        col = at - (self.source.rfind("\n", 0, at) + 1) + 1
        raise ParseError(msg, line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Poly:
        if not self.toks:
            self.fail("empty expression", 0)
        p = self.expr()
        if self.peek() is not None:
            self.fail(f"unexpected token {self.peek()[1]!r}", self.peek()[2])
        return p

    def expr(self) -> Poly:
        sign = 1
        t = self.peek()
        if t and t[1] in "+-" and t[0] == "op":
            self.take()
            sign = -1 if t[1] == "-" else 1
        p = self.term() * sign
        while (t := self.peek()) and t[0] == "op" and t[1] in "+-":
            self.take()
            q = self.term()
            p = p + q if t[1] == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.power()
        while (t := self.peek()) is not None:
            if t[0] == "op" and t[1] == "*":
                self.take()
                p = p * self.power()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                q = self.power()
                if q.degree > 0 or q.is_zero():
                    self.fail("division only by a nonzero constant", t[2])
                p = p * (1 / q.terms[0][1])
            elif t[0] in ("num", "var") or t[1] == "(":
                p = p * self.power()  # implicit multiplication
            else:
                break
        return p

    def power(self) -> Poly:
        base = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e is None or e[0] != "num" or not e[1].isdigit():
                self.fail("exponent must be a non-negative integer", e[2] if e else len(self.text))
            base = base ** int(e[1])
        return base

    def atom(self) -> Poly:
        t = self.take()
        if t is None:
            self.fail("unexpected end of expression", len(self.text))
        kind, val, pos = t
        if kind == "num":
            return Poly.constant(self.n, Fraction(val))
        if kind == "var":
            i = int(val[1:]) - 1
            if not 0 <= i < self.n:
                self.fail(f"variable {val} out of range for n={self.n}", pos)
            return Poly.variable(self.n, i)
        if val == "(":
            p = self.expr()
            close = self.take()
            if close is None or close[1] != ")":
                self.fail("missing ')'", close[2] if close else len(self.text))
            return p
        if val == "-":
            return -self.power()
        self.fail(f"unexpected token {val!r}", pos)


_EQN = re.compile(r"\s*dx(\d+)\s*=")


def parse_field(text: str) -> PolyMap:
    """Parse ``dx1 = ...; dx2 = ...``; separators are ``;`` or newlines."""
    chunks = []
    start = 0
    for m in re.finditer(r"[;\n]", text + ";"):
        chunks.append((start, text[start:m.start()]))
        start = m.end()
    eqs: dict[int, tuple[int, str]] = {}
    for off, chunk in chunks:
        if not chunk.strip() or chunk.strip().startswith("#"):
            continue
        m = _EQN.match(chunk)
        if not m:
            lead = len(chunk) - len(chunk.lstrip())
            at = off + lead
            line = text.count("\n", 0, at) + 1
            col = at - (text.rfind("\n", 0, at) + 1) + 1
            raise ParseError("expected 'dx<i> ='", line, col)
        i = int(m.group(1))
        if i in eqs:
            raise ParseError(f"duplicate equation dx{i}", text.count("\n", 0, off) + 1, 1)
        eqs[i] = (off + m.end(), chunk[m.end():])
    if not eqs:
        raise ParseError("no equations found", 1, 1)
    n = len(eqs)
    if sorted(eqs) != list(range(1, n + 1)):
        raise ParseError(f"equations must be dx1..dx{n}", 1, 1)
    comps = [_Parser(eqs[i][1], n, eqs[i][0], text).parse() for i in range(1, n + 1)]
    return PolyMap(comps)


def format_field(f: PolyMap) -> str:
    return "; ".join(f"dx{i + 1} = {p.to_str()}" for i, p in enumerate(f.components))
