"""Functions on F_q^2 and their Fourier transforms.

Two measure conventions live on the plane.  The function space carries the
normalised counting measure dx (total mass 1); the frequency space carries
the counting measure dm.  Every :class:`PlaneFunction` is tagged with the
space it lives in, and transforms/norms refuse inputs with the wrong tag.

Values are stored as a dense ``(q, q)`` complex array indexed by the encoded
coordinates ``(x1, x2)``; flattening gives the canonical row-major order.

The character factorises, chi(m.x) = chi(m1 x1) chi(m2 x2), so every
transform below is the exact double sum evaluated as two q x q matrix
products against the table ``C[a, b] = chi(a b)``.  No fast-transform
trickery is involved.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import BadExponent, SpaceMismatch
from .finite_field import FieldSpec, construct_field

FUNCTION_SPACE = "dx"
FREQUENCY_SPACE = "dm"
_SPACES = (FUNCTION_SPACE, FREQUENCY_SPACE)


@dataclass(frozen=True)
class PlanePoint:
    x1: int
    x2: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.x1, self.x2)


@dataclass
class PlaneFunction:
    field: FieldSpec
    space: str
    values: np.ndarray
    support: np.ndarray | None = dc_field(default=None)

    def __post_init__(self):
        if self.space not in _SPACES:
            raise SpaceMismatch(f"unknown space tag {self.space!r}")
        q = self.field.q
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.size != q * q:
            raise ValueError(f"expected {q * q} values, got {self.values.size}")
        self.values = self.values.reshape(q, q)
        if self.support is not None:
            self.support = np.asarray(self.support, dtype=np.int64).reshape(-1, 2)
            mask = np.ones((q, q), dtype=bool)
            mask[self.support[:, 0], self.support[:, 1]] = False
            if np.any(self.values[mask] != 0):
                raise ValueError("values do not vanish off the declared support")

    @property
    def q(self) -> int:
        return self.field.q

    def __call__(self, x1: int, x2: int) -> complex:
        return complex(self.values[x1, x2])

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def nonzero_points(self) -> np.ndarray:
        if self.support is not None:
            return self.support
        return np.argwhere(self.values != 0)

    def _like(self, values: np.ndarray, space: str | None = None) -> "PlaneFunction":
        return PlaneFunction(self.field, space or self.space, values)

    def __add__(self, other: "PlaneFunction") -> "PlaneFunction":
        _same(self, other)
        return self._like(self.values + other.values)

    def __sub__(self, other: "PlaneFunction") -> "PlaneFunction":
        _same(self, other)
        return self._like(self.values - other.values)

    def __mul__(self, other):
        if isinstance(other, PlaneFunction):
            _same(self, other)
            return self._like(self.values * other.values)
        return self._like(self.values * other)

    __rmul__ = __mul__

    def conj(self) -> "PlaneFunction":
        return self._like(np.conj(self.values))

    # -- serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        flat = self.flat()
        return {
            "p": self.field.p,
            "k": self.field.k,
            "modulus": list(self.field.modulus),
            "space": self.space,
            "values": [[float(v.real), float(v.imag)] for v in flat],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PlaneFunction":
        field = construct_field(data["p"], data["k"])
        if tuple(data["modulus"]) != tuple(field.modulus):
            raise ValueError("serialised modulus differs from the canonical one")
        vals = np.array([complex(re, im) for re, im in data["values"]])
        return cls(field, data["space"], vals)

    @classmethod
    def from_json(cls, text: str) -> "PlaneFunction":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x1", "x2", "re", "im"])
        q = self.q
        for x1 in range(q):
            for x2 in range(q):
                v = self.values[x1, x2]
                w.writerow([x1, x2, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, field: FieldSpec, space: str) -> "PlaneFunction":
        q = field.q
        vals = np.zeros((q, q), dtype=complex)
        for row in csv.DictReader(io.StringIO(text)):
            vals[int(row["x1"]), int(row["x2"])] = complex(float(row["re"]), float(row["im"]))
        return cls(field, space, vals)


def _same(f: PlaneFunction, g: PlaneFunction) -> None:
    if f.field != g.field:
        raise ValueError("functions live over different fields")
    if f.space != g.space:
        raise SpaceMismatch(f"{f.space} vs {g.space}")


def _require(f: PlaneFunction, space: str) -> None:
    if f.space != space:
        raise SpaceMismatch(f"expected a function tagged {space}, got {f.space}")


def zeros(field: FieldSpec, space: str = FUNCTION_SPACE) -> PlaneFunction:
    return PlaneFunction(field, space, np.zeros((field.q, field.q), dtype=complex))


def constant(field: FieldSpec, c: complex = 1.0, space: str = FUNCTION_SPACE) -> PlaneFunction:
    return PlaneFunction(field, space, np.full((field.q, field.q), c, dtype=complex))


def indicator(field: FieldSpec, points, space: str = FUNCTION_SPACE) -> PlaneFunction:
    """Characteristic function of a point set given as an (n, 2) index array."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    vals = np.zeros((field.q, field.q), dtype=complex)
    vals[pts[:, 0], pts[:, 1]] = 1.0
    return PlaneFunction(field, space, vals, support=np.unique(pts, axis=0))


def point_mass(field: FieldSpec, point, space: str = FUNCTION_SPACE) -> PlaneFunction:
    return indicator(field, [point], space)


def random_function(field: FieldSpec, rng: np.random.Generator,
                    space: str = FUNCTION_SPACE) -> PlaneFunction:
    q = field.q
    vals = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    return PlaneFunction(field, space, vals)


def dot(field: FieldSpec, m, x):
    """m . x = m1 x1 + m2 x2 in F_q (vectorised over leading axes)."""
    m, x = np.asarray(m), np.asarray(x)
    return field.add(field.mul(m[..., 0], x[..., 0]), field.mul(m[..., 1], x[..., 1]))


def plane_points(field: FieldSpec) -> np.ndarray:
    """All q^2 points in canonical row-major order, shape (q^2, 2)."""
    e = field.elements()
    return np.stack(np.meshgrid(e, e, indexing="ij"), axis=-1).reshape(-1, 2)


def _separable(mat: np.ndarray, values: np.ndarray, support: np.ndarray | None) -> np.ndarray:
    """out[m1, m2] = sum_x mat[m1, x1] mat[m2, x2] values[x1, x2]."""
    q = values.shape[0]
    if support is None:
        nz = np.argwhere(values != 0)
        if len(nz) < q:
            support = nz
    if support is not None and len(support) < q:
        x1, x2 = support[:, 0], support[:, 1]
        w = values[x1, x2]
        return (mat[:, x1] * w[None, :]) @ mat[:, x2].T
    return mat @ values @ mat.T


def forward_ft(f: PlaneFunction) -> PlaneFunction:
    """f^(m) = q^-2 sum_x chi(-m.x) f(x); dx-tagged in, dm-tagged out."""
    _require(f, FUNCTION_SPACE)
    q = f.q
    cbar = np.conj(f.field.char_matrix)
    return PlaneFunction(f.field, FREQUENCY_SPACE, _separable(cbar, f.values, f.support) / q**2)


def inverse_ft(g: PlaneFunction) -> PlaneFunction:
    """f(x) = sum_m chi(m.x) g(m); dm-tagged in, dx-tagged out."""
    _require(g, FREQUENCY_SPACE)
    c = g.field.char_matrix
    return PlaneFunction(g.field, FUNCTION_SPACE, _separable(c, g.values, g.support))


def dual_ft(g: PlaneFunction) -> PlaneFunction:
    """Transform of a frequency-side function: g^(x) = sum_m chi(-x.m) g(m).

    There is no normalising prefactor, since dm is the counting measure.
    """
    _require(g, FREQUENCY_SPACE)
    cbar = np.conj(g.field.char_matrix)
    return PlaneFunction(g.field, FUNCTION_SPACE, _separable(cbar, g.values, g.support))


def convolve(f: PlaneFunction, h: PlaneFunction) -> PlaneFunction:
    """(f * h)(y) = q^-2 sum_x f(y - x) h(x), summed directly."""
    _require(f, FUNCTION_SPACE)
    _require(h, FUNCTION_SPACE)
    if f.field != h.field:
        raise ValueError("functions live over different fields")
    field, q = f.field, f.q
    sub = field.sub_table
    # iterate over the sparser factor; convolution is commutative
    if np.count_nonzero(h.values) > np.count_nonzero(f.values):
        f, h = h, f
    out = np.zeros((q, q), dtype=complex)
    for x1, x2 in np.argwhere(h.values != 0):
        out += h.values[x1, x2] * f.values[np.ix_(sub[:, x1], sub[:, x2])]
    return PlaneFunction(field, FUNCTION_SPACE, out / q**2)


def norm_lp(f: PlaneFunction, exponent: float) -> float:
    """L^p norm under the measure implied by the space tag."""
    exponent = float(exponent)
    if not exponent >= 1:
        raise BadExponent(f"exponent must be >= 1, got {exponent}")
    a = np.abs(f.values)
    if np.isinf(exponent):
        return float(a.max())
    s = np.sum(a**exponent)
    if f.space == FUNCTION_SPACE:
        s /= f.q**2
    return float(s ** (1.0 / exponent))


def inner(f: PlaneFunction, h: PlaneFunction) -> complex:
    """<f, h> = integral of f conj(h) under the tagged measure."""
    _same(f, h)
    s = np.sum(f.values * np.conj(h.values))
    if f.space == FUNCTION_SPACE:
        s /= f.q**2
    return complex(s)
