"""Arithmetic in F_q, q = p^k with p odd.

Elements are encoded as integers in ``range(q)``: the element
c_0 + c_1 θ + ... + c_{k-1} θ^{k-1} of F_p[θ]/(modulus) is stored as
c_0 + c_1 p + ... + c_{k-1} p^{k-1}.  With this encoding the prime
subfield F_p is exactly ``range(p)`` and the integer literal ``n`` maps
to index ``n % p``.

Every arithmetic method on :class:`FieldSpec` is vectorised: it accepts
Python ints or integer numpy arrays and returns the same shape.
Multiplication runs through log/antilog tables built once per field.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import CapExceeded, EvenCharacteristic, NotPrime, ZeroInverse

DEFAULT_CAP = 2**14
# q x q lookup tables (addition, multiplication, characters of products)
# are only materialised up to this order.
TABLE_CAP = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` or None if q is not a prime power."""
    if q < 2:
        return None
    p = prime_factors(q)
    if len(p) != 1:
        return None
    p = p[0]
    k = round(math.log(q, p))
    return (p, k) if p**k == q else None


def odd_prime_powers(lo: int, hi: int) -> list[int]:
    """All q in [lo, hi] of the form p^k with p an odd prime."""
    out = []
    for q in range(max(lo, 3), hi + 1):
        pk = prime_power(q)
        if pk is not None and pk[0] % 2 == 1:
            out.append(q)
    return out


# -- polynomials over F_p, coefficient lists low-to-high ---------------------

def _poly_divmod_rem(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo the monic polynomial m."""
    a = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    a = a[:dm] if dm > 0 else []
    return a + [0] * (dm - len(a))


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_divmod_rem(prod, m, p)


def _poly_powmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    k = len(m) - 1
    result = [1] + [0] * (k - 1)
    base = list(a)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_rem_general(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by monic b (b need not define the working field)."""
    a = [c % p for c in a]
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return a[:db]


def is_irreducible(modulus: tuple[int, ...] | list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_poly_rem_general(list(modulus), divisor, p)):
                return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    Coefficients are compared low degree first, so for k = 1 this is ``x``.
    """
    for low in itertools.product(range(p), repeat=k):
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {k} over F_{p}")


class FieldSpec:
    """The finite field F_q with q = p^k, p an odd prime."""

    def __init__(self, p: int, k: int = 1, cap: int = DEFAULT_CAP):
        p, k = int(p), int(k)
        if k < 1:
            raise ValueError("exponent k must be >= 1")
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p == 2:
            raise EvenCharacteristic("characteristic 2 is not supported")
        if p**k > cap:
            raise CapExceeded(f"q = {p}^{k} exceeds the cap {cap}")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = smallest_irreducible(p, k)
        self._weights = p ** np.arange(k, dtype=np.int64)
        idx = np.arange(self.q, dtype=np.int64)
        self.digits = (idx[:, None] // self._weights[None, :]) % p
        self._build_log_tables()

    def _build_log_tables(self) -> None:
        q, p, m = self.q, self.p, list(self.modulus)
        order = q - 1
        factors = prime_factors(order) if order > 1 else []
        one = [1] + [0] * (self.k - 1)
        gen = None
        for c in range(1, q):
            cand = [int(d) for d in self.digits[c]]
            if all(_poly_powmod(cand, order // r, m, p) != one for r in factors):
                gen = cand
                self.generator = c
                break
        assert gen is not None
        exp = np.empty(order, dtype=np.int64)
        cur = one
        for i in range(order):
            exp[i] = int(np.dot(cur, self._weights))
            cur = _poly_mulmod(cur, gen, m, p)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(order)
        if len(np.unique(exp)) != order:
            raise AssertionError("antilog table has repeats; generator is not primitive")
        self.exp_table = exp
        self.log_table = log

    # -- identity, comparison ------------------------------------------------

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, k={self.k})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    def __call__(self, value) -> "FieldElement":
        """Element from an integer literal (reduced mod p) or a coefficient sequence."""
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, int(value) % self.p)
        return FieldElement(self, self.index_of(value))

    def index_of(self, coeffs) -> int:
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.k:
            raise ValueError(f"expected at most {self.k} coefficients")
        coeffs += [0] * (self.k - len(coeffs))
        return int(np.dot(coeffs, self._weights))

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def modulus_text(self) -> str:
        terms = []
        for i in range(self.k, -1, -1):
            c = self.modulus[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) if terms else "x"

    # -- vectorised arithmetic on encoded elements -----------------------------

    @staticmethod
    def _out(res, *inputs):
        if all(np.ndim(a) == 0 for a in inputs):
            return int(res)
        return res

    def add(self, a, b):
        a_, b_ = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.k == 1:
            res = (a_ + b_) % self.p
        else:
            res = ((self.digits[a_] + self.digits[b_]) % self.p) @ self._weights
        return self._out(res, a, b)

    def neg(self, a):
        a_ = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            res = (-a_) % self.p
        else:
            res = ((-self.digits[a_]) % self.p) @ self._weights
        return self._out(res, a)

    def sub(self, a, b):
        a_, b_ = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.k == 1:
            res = (a_ - b_) % self.p
        else:
            res = ((self.digits[a_] - self.digits[b_]) % self.p) @ self._weights
        return self._out(res, a, b)

    def mul(self, a, b):
        a_, b_ = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        la, lb = self.log_table[a_], self.log_table[b_]
        res = self.exp_table[(la + lb) % (self.q - 1)]
        res = np.where((a_ == 0) | (b_ == 0), 0, res)
        return self._out(res, a, b)

    def inv(self, a):
        a_ = np.asarray(a, dtype=np.int64)
        if np.any(a_ == 0):
            raise ZeroInverse("0 has no multiplicative inverse")
        res = self.exp_table[(-self.log_table[a_]) % (self.q - 1)]
        return self._out(res, a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        a_ = np.asarray(a, dtype=np.int64)
        n = int(n)
        if n < 0:
            return self.pow(self.inv(a), -n)
        res = self.exp_table[(self.log_table[a_] * n) % (self.q - 1)]
        if n == 0:
            res = np.ones_like(a_)
        else:
            res = np.where(a_ == 0, 0, res)
        return self._out(res, a)

    def scalar(self, n: int) -> int:
        """Encoded element for the integer n (image of Z -> F_p)."""
        return int(n) % self.p

    # -- characters ------------------------------------------------------------

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr(a) = a + a^p + ... + a^{p^(k-1)} for every element, as ints in [0, p)."""
        elems = self.elements()
        acc = np.zeros(self.q, dtype=np.int64)
        for i in range(self.k):
            acc = self.add(acc, self.pow(elems, self.p**i))
        if np.any(acc >= self.p):
            raise AssertionError("trace left the prime subfield")
        return acc

    @cached_property
    def chi_table(self) -> np.ndarray:
        """Canonical additive character exp(2 pi i Tr(a) / p)."""
        return np.exp(2j * np.pi * self.trace_table / self.p)

    @cached_property
    def eta_table(self) -> np.ndarray:
        """Quadratic character via Euler's criterion a^((q-1)/2)."""
        e = self.pow(self.elements(), (self.q - 1) // 2)
        minus_one = self.neg(1)
        out = np.zeros(self.q, dtype=np.int64)
        out[e == 1] = 1
        out[e == minus_one] = -1
        out[0] = 0
        return out

    def trace(self, a):
        return self._out(self.trace_table[np.asarray(a, dtype=np.int64)], a)

    def chi(self, a):
        res = self.chi_table[np.asarray(a, dtype=np.int64)]
        return complex(res) if np.ndim(a) == 0 else res

    def eta(self, a):
        return self._out(self.eta_table[np.asarray(a, dtype=np.int64)], a)

    # -- q x q tables ----------------------------------------------------------

    def _check_table_cap(self) -> None:
        if self.q > TABLE_CAP:
            raise CapExceeded(f"q = {self.q} is too large for q x q tables (cap {TABLE_CAP})")

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_table_cap()
        e = self.elements()
        return self.add(e[:, None], e[None, :])

    @cached_property
    def sub_table(self) -> np.ndarray:
        self._check_table_cap()
        e = self.elements()
        return self.sub(e[:, None], e[None, :])

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_table_cap()
        e = self.elements()
        return self.mul(e[:, None], e[None, :])

    @cached_property
    def char_matrix(self) -> np.ndarray:
        """C[a, b] = chi(a * b).  Symmetric; chi(-a*b) is its conjugate."""
        return self.chi_table[self.mul_table]


@dataclass(frozen=True)
class FieldElement:
    """A single element of a FieldSpec, with operator overloading."""

    field: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"encoded value {self.value} out of range for q = {self.field.q}")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.digits[self.value])

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.field.scalar(other)
        return NotImplemented

    def _wrap(self, v) -> "FieldElement":
        return FieldElement(self.field, int(v))

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.value, n))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def trace(self) -> int:
        return int(self.field.trace_table[self.value])

    def chi(self) -> complex:
        return complex(self.field.chi_table[self.value])

    def eta(self) -> int:
        return int(self.field.eta_table[self.value])

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        if self.field.k == 1:
            return f"F{self.field.q}({self.value})"
        return f"F{self.field.q}{self.coeffs}"


@lru_cache(maxsize=64)
def construct_field(p: int, k: int = 1, cap: int = DEFAULT_CAP) -> FieldSpec:
    """Build (and memoise) F_{p^k} with the smallest irreducible modulus."""
    return FieldSpec(p, k, cap)


def field_of_order(q: int, cap: int = DEFAULT_CAP) -> FieldSpec:
    pk = prime_power(q)
    if pk is None:
        raise NotPrime(f"{q} is not a prime power")
    return construct_field(pk[0], pk[1], cap)


def gauss_sum(field: FieldSpec) -> complex:
    """G_1 = sum over t != 0 of eta(t) chi(t), by direct summation."""
    t = field.elements()[1:]
    return complex(np.sum(field.eta_table[t] * field.chi_table[t]))


def gauss_sum_closed_form(field: FieldSpec) -> complex:
    """Closed form of G_1 for the canonical character.

    (-1)^(k-1) sqrt(q) when p = 1 mod 4 and (-1)^(k-1) i^k sqrt(q) when p = 3 mod 4.
    """
    sign = (-1) ** (field.k - 1)
    root = math.sqrt(field.q)
    if field.p % 4 == 1:
        return complex(sign * root)
    return sign * (1j**field.k) * root


def gauss_sum_squared(field: FieldSpec) -> int:
    """G_1^2 = eta(-1) q, an exact integer."""
    return int(field.eta_table[field.neg(1)]) * field.q

