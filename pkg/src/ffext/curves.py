"""Bivariate polynomials over F_q and their zero sets in the plane."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegreeExceedsCharacteristic, ParseError, ZeroPolynomial
from .finite_field import FieldSpec


@dataclass(frozen=True)
class BivariatePoly:
    """P(x1, x2) = sum of c_ij x1^i x2^j with c_ij encoded field elements.

    ``coeffs`` maps exponent pairs to nonzero encoded coefficients.  The
    degree must stay below the characteristic.
    """

    field: FieldSpec
    coeffs: tuple[tuple[tuple[int, int], int], ...]
    text: str | None = None

    def __post_init__(self):
        if not self.coeffs:
            raise ZeroPolynomial("the zero polynomial defines no curve")
        if self.degree >= self.field.p:
            raise DegreeExceedsCharacteristic(
                f"degree {self.degree} is not below the characteristic {self.field.p}")

    @classmethod
    def from_terms(cls, field: FieldSpec, terms: dict, text: str | None = None) -> "BivariatePoly":
        """Build from {(i, j): coefficient}.

        Coefficients are FieldElements or encoded ints in range(q); use
        ``field(n)`` to pass an integer literal.
        """
        clean = {}
        for (i, j), c in terms.items():
            c = c.value if hasattr(c, "value") else int(c)
            if not 0 <= c < field.q:
                raise ValueError(f"encoded coefficient {c} out of range")
            if c:
                clean[(int(i), int(j))] = c
        return cls(field, tuple(sorted(clean.items())), text)

    @property
    def terms(self) -> dict[tuple[int, int], int]:
        return dict(self.coeffs)

    @property
    def degree(self) -> int:
        return max(i + j for (i, j), _ in self.coeffs)

    def __str__(self) -> str:
        return self.text if self.text is not None else self.render()

    def render(self) -> str:
        f = self.field
        parts = []
        for (i, j), c in sorted(self.coeffs, key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = "*".join(
                s for s in (
                    "" if i == 0 else ("x1" if i == 1 else f"x1^{i}"),
                    "" if j == 0 else ("x2" if j == 1 else f"x2^{j}"),
                ) if s)
            if c < f.p:
                coef = str(c)
            else:
                coef = "[" + ",".join(str(d) for d in f.digits[c]) + "]"
            if not mono:
                parts.append(coef)
            elif coef == "1":
                parts.append(mono)
            else:
                parts.append(f"{coef}*{mono}")
        return " + ".join(parts)

    def evaluate(self, x1, x2):
        """P at encoded points; x1 and x2 broadcast against each other."""
        f = self.field
        x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=np.int64), np.asarray(x2, dtype=np.int64))
        acc = np.zeros(x1.shape, dtype=np.int64)
        for (i, j), c in self.coeffs:
            term = f.mul(c, f.mul(f.pow(x1, i), f.pow(x2, j)))
            acc = f.add(acc, term)
        return acc

    @cached_property
    def grid(self) -> np.ndarray:
        """P(x1, x2) for every plane point, shape (q, q)."""
        e = self.field.elements()
        return self.evaluate(e[:, None], e[None, :])

    def shifted(self, constant: int) -> "BivariatePoly":
        """P - t for an encoded constant t."""
        terms = self.terms
        terms[(0, 0)] = self.field.sub(terms.get((0, 0), 0), constant)
        return BivariatePoly.from_terms(self.field, {k: int(v) for k, v in terms.items()})

    def reflected(self, a) -> "BivariatePoly":
        """x -> P(a - x), expanded symbolically."""
        f = self.field
        lin1 = {(0, 0): int(a[0]), (1, 0): f.neg(1)}
        lin2 = {(0, 0): int(a[1]), (0, 1): f.neg(1)}
        out: dict = {}
        for (i, j), c in self.coeffs:
            term = _pmul(f, _ppow(f, lin1, i), _ppow(f, lin2, j))
            out = _padd(f, out, _pscale(f, term, c))
        return BivariatePoly.from_terms(f, out)


# -- sparse polynomial arithmetic on {(i, j): encoded coefficient} ------------

def _padd(f: FieldSpec, a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        v = f.add(out.get(k, 0), c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pneg(f: FieldSpec, a: dict) -> dict:
    return {k: f.neg(c) for k, c in a.items()}


def _pscale(f: FieldSpec, a: dict, c: int) -> dict:
    out = {k: f.mul(v, c) for k, v in a.items()}
    return {k: v for k, v in out.items() if v}


def _pmul(f: FieldSpec, a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = f.add(out.get(key, 0), f.mul(c1, c2))
    return {k: v for k, v in out.items() if v}


def _ppow(f: FieldSpec, a: dict, n: int) -> dict:
    out = {(0, 0): 1}
    for _ in range(n):
        out = _pmul(f, out, a)
    return out


# -- text grammar ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(x1|x2)|(\*\*|[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("var", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, field: FieldSpec):
        self.field = field
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])

    def parse(self) -> dict:
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return out

    def expr(self) -> dict:
        out = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            out = _padd(self.field, out, rhs if op == "+" else _pneg(self.field, rhs))
        return out

    def term(self) -> dict:
        out = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
            elif tok[0] in ("num", "var") or tok[1] == "(":
                pass  # juxtaposition, e.g. 2x1
            else:
                return out
            out = _pmul(self.field, out, self.unary())

    def unary(self) -> dict:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if tok[1] == "+" else _pneg(self.field, inner)
        return self.power()

    def power(self) -> dict:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a non-negative integer", tok[2])
            return _ppow(self.field, base, int(tok[1]))
        return base

    def atom(self) -> dict:
        tok = self.take()
        if tok[0] == "num":
            c = self.field.scalar(int(tok[1]))
            return {(0, 0): c} if c else {}
        if tok[0] == "var":
            return {(1, 0): 1} if tok[1] == "x1" else {(0, 1): 1}
        if tok[1] == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2])


def parse_poly(text: str, field: FieldSpec) -> BivariatePoly:
    """Parse e.g. ``"x1^4 + x2^4 - 1"``; integer coefficients are reduced mod p."""
    terms = _Parser(text, field).parse()
    if not terms:
        raise ZeroPolynomial(f"{text!r} reduces to the zero polynomial over F_{field.q}")
    return BivariatePoly(field, tuple(sorted(terms.items())), text.strip())


def random_poly(field: FieldSpec, degree: int, rng: np.random.Generator) -> BivariatePoly:
    """Uniform coefficients on all monomials of total degree <= degree, top degree nonzero."""
    terms = {}
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            terms[(i, j)] = int(rng.integers(field.q))
    top = [(i, degree - i) for i in range(degree + 1)]
    if not any(terms[t] for t in top):
        terms[top[int(rng.integers(len(top)))]] = int(rng.integers(1, field.q))
    return BivariatePoly.from_terms(field, terms)


# -- varieties -------------------------------------------------------------------

@dataclass(frozen=True)
class LineWitness:
    """An affine line {x2 = slope*x1 + intercept}, or {x1 = intercept} if vertical."""

    vertical: bool
    slope: int
    intercept: int
    points: np.ndarray

    def describe(self, field: FieldSpec) -> str:
        if self.vertical:
            return f"x1 = {_elem_text(field, self.intercept)}"
        return f"x2 = {_elem_text(field, self.slope)}*x1 + {_elem_text(field, self.intercept)}"


def _elem_text(field: FieldSpec, v: int) -> str:
    if v < field.p:
        return str(v)
    return "[" + ",".join(str(d) for d in field.digits[v]) + "]"


@dataclass
class Variety:
    poly: BivariatePoly
    points: np.ndarray  # (n, 2) encoded coordinates, row-major sorted

    @property
    def field(self) -> FieldSpec:
        return self.poly.field

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def mask(self) -> np.ndarray:
        q = self.field.q
        m = np.zeros((q, q), dtype=bool)
        m[self.points[:, 0], self.points[:, 1]] = True
        return m

    def to_dict(self) -> dict:
        w = contains_line(self.poly)
        return {
            "poly_text": str(self.poly),
            "q": self.field.q,
            "points": self.points.tolist(),
            "cardinality": self.cardinality,
            "contains_line": None if w is None else w.describe(self.field),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def variety_of(poly: BivariatePoly) -> Variety:
    """Exhaustive zero set of poly in F_q^2."""
    return Variety(poly, np.argwhere(poly.grid == 0))


def level_set(poly: BivariatePoly, t: int) -> Variety:
    return Variety(poly.shifted(t), np.argwhere(poly.grid == t))


def line_incidences(mask: np.ndarray, field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """Points of ``mask`` on every affine line.

    Returns ``(slope_counts, vertical_counts)`` where ``slope_counts[a, b]``
    counts mask points on x2 = a x1 + b and ``vertical_counts[c]`` those on x1 = c.
    """
    e = field.elements()
    ax = field.mul_table  # ax[a, x1] = a*x1
    # x2[a, b, x1] = a*x1 + b
    x2 = field.add(ax[:, None, :], e[None, :, None])
    slope_counts = mask[np.broadcast_to(e, x2.shape), x2].sum(axis=-1)
    return slope_counts, mask.sum(axis=1)


def contains_line(poly: BivariatePoly) -> LineWitness | None:
    """First affine line on which poly vanishes identically, or None.

    P restricted to a line is univariate of degree < q, so vanishing at all
    q points of the line means the linear form divides P.
    """
    f, q = poly.field, poly.field.q
    zero = poly.grid == 0
    slope_counts, vert_counts = line_incidences(zero, f)
    e = f.elements()
    full = np.argwhere(vert_counts == q)
    if len(full):
        c = int(full[0, 0])
        return LineWitness(True, 0, c, np.stack([np.full(q, c), e], axis=1))
    full = np.argwhere(slope_counts == q)
    if len(full):
        a, b = (int(v) for v in full[0])
        return LineWitness(False, a, b, np.stack([e, f.add(f.mul(a, e), b)], axis=1))
    return None


def linear_factors(poly: BivariatePoly) -> list[LineWitness]:
    """All normalised linear forms dividing poly, found by symbolic substitution.

    Division of P by x2 - (a x1 + b) leaves the remainder P(x1, a x1 + b), and by
    x1 - c leaves P(c, x2).  Both are expanded as polynomials (no point
    evaluation), so this does not rely on the degree < q argument.
    """
    f, q = poly.field, poly.field.q
    e = f.elements()
    out = []
    for c in range(q):
        rem: dict = {}
        for (i, j), coef in poly.coeffs:
            rem = _padd(f, rem, {(0, j): f.mul(coef, f.pow(c, i))})
        if not rem:
            out.append(LineWitness(True, 0, c, np.stack([np.full(q, c), e], axis=1)))
    for a in range(q):
        for b in range(q):
            sub2 = {(0, 0): b, (1, 0): a} if a else ({(0, 0): b} if b else {})
            rem = {}
            for (i, j), coef in poly.coeffs:
                term = _pmul(f, {(i, 0): coef}, _ppow(f, sub2, j))
                rem = _padd(f, rem, term)
            if not rem:
                out.append(LineWitness(False, a, b, np.stack([e, f.add(f.mul(a, e), b)], axis=1)))
    return out


@dataclass(frozen=True)
class IntersectionResult:
    count: int
    bezout_bound: int
    shared_component: bool


def intersect_count(a: Variety, b: Variety) -> IntersectionResult:
    """Exact |V_a ∩ V_b|; a count above deg(a) deg(b) flags a common component."""
    if a.field != b.field:
        raise ValueError("varieties over different fields")
    count = int(np.count_nonzero(a.mask & b.mask))
    bound = a.poly.degree * b.poly.degree
    return IntersectionResult(count, bound, count > bound)


def _monomials(deg: int) -> list[tuple[int, int]]:
    return [(i, d - i) for d in range(deg + 1) for i in range(d + 1)]


def _rank(f: FieldSpec, rows: list[list[int]]) -> int:
    """Rank over F_q by Gaussian elimination on encoded entries."""
    m = [list(r) for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = f.inv(m[rank][col])
        m[rank] = [f.mul(v, inv) for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                c = m[r][col]
                m[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def common_factor(a: BivariatePoly, b: BivariatePoly) -> bool:
    """True when a and b share a nonconstant factor in F_q[x1, x2].

    They do exactly when u a = v b has a solution with u, v not both zero,
    deg u < deg b and deg v < deg a.  That is a kernel computation for a
    linear map over F_q, so no point counting is involved.
    """
    f = a.field
    if b.field != f:
        raise ValueError("polynomials over different fields")
    if a.degree == 0 or b.degree == 0:
        return False
    mons_u, mons_v = _monomials(b.degree - 1), _monomials(a.degree - 1)
    target = {mon: k for k, mon in enumerate(_monomials(a.degree + b.degree - 1))}
    cols = []
    for mon in mons_u:
        cols.append(_pmul(f, {mon: 1}, a.terms))
    for mon in mons_v:
        cols.append(_pneg(f, _pmul(f, {mon: 1}, b.terms)))
    # rows = unknowns, columns = output monomials; rank deficiency means a kernel
    rows = [[0] * len(target) for _ in cols]
    for r, poly in enumerate(cols):
        for mon, c in poly.items():
            rows[r][target[mon]] = c
    return _rank(f, rows) < len(cols)


def variety_character_sum(v: Variety, m) -> complex:
    """sum over x in V of chi(x . m)."""
    f = v.field
    if len(v.points) == 0:
        return 0j
    c = f.char_matrix
    return complex(np.sum(c[m[0], v.points[:, 0]] * c[m[1], v.points[:, 1]]))


def variety_character_sums(v: Variety) -> np.ndarray:
    """S[m1, m2] = sum over x in V of chi(x . m), for every frequency."""
    c = v.field.char_matrix
    x1, x2 = v.points[:, 0], v.points[:, 1]
    return c[:, x1] @ c[:, x2].T


def katz_constant(v: Variety) -> float:
    """max over m != 0 of |sum_{x in V} chi(x.m)| / sqrt(q)."""
    s = np.abs(variety_character_sums(v))
    s[0, 0] = 0.0
    return float(s.max() / math.sqrt(v.field.q))


def schwartz_zippel_margin(v: Variety) -> float:
    """|V| / (deg P * q); at most 1 for every nonzero P."""
    return v.cardinality / (v.poly.degree * v.field.q)


def size_comparable_to_q(v: Variety, c_low: float = 0.5, c_high: float | None = None) -> bool:
    """c_low <= |V|/q <= c_high, with c_high defaulting to deg P."""
    c_high = v.poly.degree if c_high is None else c_high
    r = v.cardinality / v.field.q
    return c_low <= r <= c_high
