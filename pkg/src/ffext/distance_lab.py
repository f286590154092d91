"""Level-set families, distance counting and the Falconer-type experiment.

For a polynomial P the family V_t = {x : P(x) = t} partitions the plane.
With P = x1^2 + x2^2 these are the circles, whose Fourier transforms have a
closed form in terms of the Gauss sum.  The counting function

    nu(t) = #{(x, y) in E x F : P(x - y) = t}

is computed both by a direct double loop and through the Fourier identity
nu(t) = q^4 sum_m conj(E^)(m) F^(m) V_t^(m), and every step of the
second-moment argument for sum_t nu(t)^2 is exposed as an exact quantity.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .curves import BivariatePoly, Variety
from .errors import (BadExponent, BadSizes, NonDiagonalPolynomial, WrongPolynomial,
                     WrongResidueClass, ZeroFrequency, ZeroRadius)
from .finite_field import FieldSpec, field_of_order, gauss_sum_closed_form
from .plane_fourier import forward_ft, indicator


def norm_poly(field: FieldSpec, n: int = 2) -> BivariatePoly:
    """||x||_n = x1^n + x2^n."""
    if n < 2 or n >= field.p:
        raise BadExponent(f"need 2 <= n < p = {field.p}, got n = {n}")
    return BivariatePoly.from_terms(field, {(n, 0): 1, (0, n): 1}, text=f"x1^{n} + x2^{n}")


def diagonal_poly(field: FieldSpec, d: int, a1: int = 1, a2: int = 1) -> BivariatePoly:
    """a1 x1^d + a2 x2^d with encoded nonzero coefficients."""
    if d < 2 or d >= field.p:
        raise BadExponent(f"need 2 <= d < p = {field.p}, got d = {d}")
    return BivariatePoly.from_terms(field, {(d, 0): a1, (0, d): a2})


def _is_circle(poly: BivariatePoly) -> bool:
    return poly.terms == {(2, 0): 1, (0, 2): 1}


class LevelSetFamily:
    """All level sets V_t of one polynomial, with lazily cached transforms."""

    def __init__(self, field: FieldSpec, poly: BivariatePoly | None = None):
        self.field = field
        self.poly = norm_poly(field, 2) if poly is None else poly
        if self.poly.field != field:
            raise ValueError("polynomial lives over a different field")
        self.values = self.poly.grid
        self.sizes = np.bincount(self.values.ravel(), minlength=field.q)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def is_circle(self) -> bool:
        return _is_circle(self.poly)

    def variety(self, t: int) -> Variety:
        return Variety(self.poly.shifted(t), np.argwhere(self.values == t))

    def mask(self, t: int) -> np.ndarray:
        return self.values == t

    @cached_property
    def ft_cache(self) -> np.ndarray:
        """V_t^(m) = q^-2 sum_{P(x)=t} chi(-x.m) for all t, shape (q, q, q) indexed [t, m1, m2]."""
        q = self.q
        cbar = np.conj(self.field.char_matrix)
        out = np.empty((q, q, q), dtype=complex)
        for t in range(q):
            out[t] = cbar @ (self.values == t) @ cbar.T
        return out / q**2

    def radius_of(self, m) -> int:
        return int(self.values[m[0], m[1]])


def circle_family(field: FieldSpec) -> LevelSetFamily:
    return LevelSetFamily(field, norm_poly(field, 2))


def diagonal_family(field: FieldSpec, d: int, a1: int = 1, a2: int = 1) -> LevelSetFamily:
    return LevelSetFamily(field, diagonal_poly(field, d, a1, a2))


def weil_constant(fam: LevelSetFamily) -> float:
    """max over t != 0 of ||V_t| - q| / sqrt(q)."""
    dev = np.abs(fam.sizes[1:] - fam.q)
    return float(dev.max() / math.sqrt(fam.q))


# -- point sets --------------------------------------------------------------------

@dataclass
class PointSetPair:
    E: np.ndarray
    F: np.ndarray
    source: str = "literal"

    def __post_init__(self):
        self.E = np.unique(np.asarray(self.E, dtype=np.int64).reshape(-1, 2), axis=0)
        self.F = np.unique(np.asarray(self.F, dtype=np.int64).reshape(-1, 2), axis=0)


def _random_subset(q: int, size: int, rng: np.random.Generator, pool: np.ndarray | None = None) -> np.ndarray:
    if pool is None:
        idx = rng.choice(q * q, size=size, replace=False)
        return np.stack([idx // q, idx % q], axis=1)
    take = rng.choice(len(pool), size=size, replace=False)
    return pool[take]


def uniform_random(field: FieldSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    return _random_subset(field.q, size, rng)


def line_concentrated(field: FieldSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Whole random lines x2 = a x1 + b until ``size`` points are collected."""
    q = field.q
    e = field.elements()
    chosen = np.zeros((q, q), dtype=bool)
    lines = rng.permutation(q * q)
    for code in lines:
        if chosen.sum() >= size:
            break
        a, b = divmod(int(code), q)
        chosen[e, field.add(field.mul(a, e), b)] = True
    pts = np.argwhere(chosen)
    return _random_subset(q, size, rng, pool=pts)


def subfield_grid(field: FieldSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Points of translates of F_p x F_p, which only realise distances in a subfield."""
    if field.k != 2:
        raise BadSizes("the subfield grid generator needs q = p^2")
    q, p = field.q, field.p
    sub = np.arange(p)
    grid = np.stack(np.meshgrid(sub, sub, indexing="ij"), axis=-1).reshape(-1, 2)
    chosen = np.zeros((q, q), dtype=bool)
    first = True
    while chosen.sum() < size:
        shift = (0, 0) if first else tuple(int(v) for v in rng.integers(q, size=2))
        first = False
        chosen[field.add(grid[:, 0], shift[0]), field.add(grid[:, 1], shift[1])] = True
    return _random_subset(q, size, rng, pool=np.argwhere(chosen))


def circle_union(field: FieldSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    """Whole circles x1^2 + x2^2 = t (random radii) until ``size`` points are collected."""
    q = field.q
    vals = norm_poly(field, 2).grid
    chosen = np.zeros((q, q), dtype=bool)
    for t in rng.permutation(q):
        if chosen.sum() >= size:
            break
        chosen |= vals == t
    return _random_subset(q, size, rng, pool=np.argwhere(chosen))


GENERATORS = {
    "uniform": uniform_random,
    "line": line_concentrated,
    "subfield": subfield_grid,
    "circles": circle_union,
}


# -- counting function ------------------------------------------------------------

@dataclass
class NuFunction:
    values: np.ndarray  # int64, indexed by encoded t

    def __getitem__(self, t: int) -> int:
        return int(self.values[t])

    def total(self) -> int:
        return int(self.values.sum())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)


def _difference_values(E: np.ndarray, F: np.ndarray, poly_grid: np.ndarray, field: FieldSpec,
                       chunk: int = 256) -> np.ndarray:
    q = field.q
    counts = np.zeros(q, dtype=np.int64)
    sub = field.sub_table
    for start in range(0, len(E), chunk):
        e = E[start:start + chunk]
        d1 = sub[e[:, 0][:, None], F[:, 0][None, :]]
        d2 = sub[e[:, 1][:, None], F[:, 1][None, :]]
        counts += np.bincount(poly_grid[d1, d2].ravel(), minlength=q)
    return counts


def counting_function(pair: PointSetPair, fam: LevelSetFamily) -> NuFunction:
    """nu(t) = #{(x, y) in E x F : P(x - y) = t}, by direct enumeration."""
    return NuFunction(_difference_values(pair.E, pair.F, fam.values, fam.field))


def set_transform(field: FieldSpec, pts: np.ndarray) -> np.ndarray:
    """A^(m) = q^-2 sum_{x in A} chi(-x.m) as a (q, q) array."""
    return forward_ft(indicator(field, pts)).values


def counting_function_fourier(pair: PointSetPair, fam: LevelSetFamily) -> np.ndarray:
    """nu(t) through q^4 sum_m conj(E^)(m) F^(m) V_t^(m); complex, one entry per t."""
    w = np.conj(set_transform(fam.field, pair.E)) * set_transform(fam.field, pair.F)
    return fam.q**4 * np.tensordot(fam.ft_cache, w, axes=([1, 2], [0, 1]))


def distance_set(pair: PointSetPair, field: FieldSpec, n: int = 2) -> np.ndarray:
    """Sorted encoded values of ||x - y||_n over x in E, y in F."""
    poly = norm_poly(field, n)
    counts = _difference_values(pair.E, pair.F, poly.grid, field)
    return np.flatnonzero(counts)


# -- circle Fourier formulas -------------------------------------------------------

def _require_circle(fam: LevelSetFamily) -> None:
    if not fam.is_circle:
        raise WrongPolynomial("this identity needs P = x1^2 + x2^2")


def sphere_ft_explicit(fam: LevelSetFamily, t: int, m) -> complex:
    """Closed form q^-1 delta_0(m) + q^-3 G_1^2 sum_{s != 0} chi(||m|| / (4s) + s t)."""
    _require_circle(fam)
    f, q = fam.field, fam.q
    g2 = gauss_sum_closed_form(f) ** 2
    s = f.elements()[1:]
    four_inv = f.inv(f.scalar(4))
    norm_m = fam.radius_of(m)
    arg = f.add(f.mul(norm_m, f.mul(four_inv, f.inv(s))), f.mul(s, t))
    total = g2 * np.sum(f.chi_table[arg]) / q**3
    if m[0] == 0 and m[1] == 0:
        total += 1.0 / q
    return complex(total)


def sphere_ft_explicit_all(fam: LevelSetFamily) -> np.ndarray:
    """The closed form for every (t, m1, m2), same layout as ``ft_cache``."""
    _require_circle(fam)
    f, q = fam.field, fam.q
    g2 = gauss_sum_closed_form(f) ** 2
    s = f.elements()[1:]
    e = f.elements()
    four_inv = f.inv(f.scalar(4))
    # a[k, s] = k / (4 s), b[t, s] = s t
    a = f.mul(e[:, None], f.mul(four_inv, f.inv(s))[None, :])
    b = f.mul(e[:, None], s[None, :])
    # by_radius[t, k] = sum_s chi(k/(4s) + s t)
    by_radius = np.empty((q, q), dtype=complex)
    for t in range(q):
        by_radius[t] = f.chi_table[f.add(a, b[t][None, :])].sum(axis=1)
    out = g2 * by_radius[:, fam.values] / q**3
    out[:, 0, 0] += 1.0 / q
    return out


# -- lemma quantities -----------------------------------------------------------------

@dataclass
class KeylemmaSum:
    value: complex
    mean_part: complex
    fluctuation_part: complex


def _require_diagonal(fam: LevelSetFamily) -> None:
    terms = fam.poly.terms
    keys = sorted(terms)
    if len(keys) != 2:
        raise NonDiagonalPolynomial("expected exactly two terms a1 x1^d + a2 x2^d")
    (i1, j1), (i2, j2) = keys
    d = i2
    if not (j1 == d and i1 == 0 and j2 == 0 and d >= 2):
        raise NonDiagonalPolynomial("expected a1 x1^d + a2 x2^d with d >= 2")


def keylemma_sum(fam: LevelSetFamily, m) -> KeylemmaSum:
    """sum_t V_t^(m) |V_t| and its split with |V_t| = q + R_t.

    The mean part q * q^-2 sum_t sum_{P(x)=t} chi(-x.m) vanishes for m != 0;
    the fluctuation part carries the R_t weights.
    """
    _require_diagonal(fam)
    if m[0] == 0 and m[1] == 0:
        raise ZeroFrequency("the sum is only bounded for m != (0, 0)")
    q = fam.q
    ft_m = fam.ft_cache[:, m[0], m[1]]
    sizes = fam.sizes.astype(float)
    value = complex(np.sum(ft_m * sizes))
    mean_part = complex(q * np.sum(ft_m))
    fluct = complex(np.sum((sizes - q) * ft_m))
    return KeylemmaSum(value, mean_part, fluct)


def keylemma_all(fam: LevelSetFamily) -> np.ndarray:
    """|sum_t V_t^(m) |V_t|| for every m, with the m = 0 entry zeroed."""
    _require_diagonal(fam)
    vals = np.abs(np.tensordot(fam.sizes.astype(float), fam.ft_cache, axes=(0, 0)))
    vals[0, 0] = 0.0
    return vals


def double_decay_sum(fam: LevelSetFamily, m, xi) -> tuple[complex, complex]:
    """Both sides of sum_t V_t^(m) V_t^(xi) = q^-3 sum_{s != 0} chi(s(||m|| - ||xi||))."""
    _require_circle(fam)
    if (m[0] == 0 and m[1] == 0) or (xi[0] == 0 and xi[1] == 0):
        raise ZeroFrequency("m and xi must both be nonzero")
    f, q = fam.field, fam.q
    lhs = complex(np.sum(fam.ft_cache[:, m[0], m[1]] * fam.ft_cache[:, xi[0], xi[1]]))
    diff = f.sub(fam.radius_of(m), fam.radius_of(xi))
    s = f.elements()[1:]
    rhs = complex(np.sum(f.chi_table[f.mul(s, diff)]) / q**3)
    return lhs, rhs


def double_decay_closed(fam: LevelSetFamily, m, xi) -> float:
    """(q - 1)/q^3 when ||m|| = ||xi||, else -1/q^3."""
    q = fam.q
    return (q - 1) / q**3 if fam.radius_of(m) == fam.radius_of(xi) else -1.0 / q**3


@dataclass
class NuZeroDecomposition:
    direct: int
    mass_term: float
    null_cone_term: complex
    plancherel_term: complex

    @property
    def reconstructed(self) -> complex:
        return self.mass_term + self.null_cone_term + self.plancherel_term


def nu_zero_decomposition(pair: PointSetPair, fam: LevelSetFamily) -> NuZeroDecomposition:
    """nu(0) = q^-1|E||F| + q^3 sum_{||m||=0} conj(E^)F^ - q^2 sum_m conj(E^)F^ (q = 1 mod 4)."""
    _require_circle(fam)
    q = fam.q
    if q % 4 != 1:
        raise WrongResidueClass("needs q = 1 mod 4; otherwise V_0 is just the origin")
    direct = counting_function(pair, fam)[0]
    w = np.conj(set_transform(fam.field, pair.E)) * set_transform(fam.field, pair.F)
    return NuZeroDecomposition(
        direct=direct,
        mass_term=len(pair.E) * len(pair.F) / q,
        null_cone_term=complex(q**3 * np.sum(w[fam.values == 0])),
        plancherel_term=complex(-(q**2) * np.sum(w)),
    )


@dataclass
class RestrictionEnergy:
    energy: float
    bound: float
    ratio: float


def restriction_energy(H: np.ndarray, fam: LevelSetFamily, t: int) -> RestrictionEnergy:
    """sum_{m in V_t} |H^(m)|^2 against q^-3 |H|^(3/2)."""
    if t == 0 and fam.is_circle:
        raise ZeroRadius("the circle of radius 0 is excluded")
    H = np.unique(np.asarray(H, dtype=np.int64).reshape(-1, 2), axis=0)
    q = fam.q
    hh = set_transform(fam.field, H)
    energy = float(np.sum(np.abs(hh[fam.values == t]) ** 2))
    bound = q**-3 * len(H) ** 1.5
    return RestrictionEnergy(energy, bound, energy / bound)


def restriction_energy_all(H: np.ndarray, fam: LevelSetFamily) -> np.ndarray:
    """Ratios for every radius t (entry 0 set to nan for the circle)."""
    H = np.unique(np.asarray(H, dtype=np.int64).reshape(-1, 2), axis=0)
    q = fam.q
    power = np.abs(set_transform(fam.field, H)) ** 2
    energy = np.bincount(fam.values.ravel(), weights=power.ravel(), minlength=q)
    ratio = energy / (q**-3 * len(H) ** 1.5)
    if fam.is_circle:
        ratio[0] = np.nan
    return ratio


@dataclass
class SecondMoment:
    direct: int
    I: float
    II: complex
    III: complex
    III_1: complex
    III_2: complex
    main_term: complex
    remainder: complex

    @property
    def reconstructed(self) -> complex:
        return self.I + self.II + self.III

    @property
    def reconstructed_split(self) -> complex:
        return self.I + self.II + self.III_1 + self.III_2


def second_moment_decomposition(pair: PointSetPair, fam: LevelSetFamily) -> SecondMoment:
    """sum_t nu(t)^2 directly and as I + II + III with III = III_1 + III_2.

    III is evaluated from the cached transforms, III_1 + III_2 from the
    collapsed double-decay form, so the two routes check each other.
    ``main_term`` is q^6 sum_k (sum_{m in V_k} conj(E^)F^)^2 and
    ``remainder`` is everything else, so main_term + remainder = sum nu^2.
    """
    _require_circle(fam)
    q = fam.q
    nE, nF = len(pair.E), len(pair.F)
    nu = counting_function(pair, fam).values
    direct = int(np.sum(nu.astype(np.int64) ** 2))

    w = np.conj(set_transform(fam.field, pair.E)) * set_transform(fam.field, pair.F)
    w_nz = w.copy()
    w_nz[0, 0] = 0
    sizes = fam.sizes.astype(float)
    cache = fam.ft_cache

    term_I = q**-4 * nE**2 * nF**2 * float(np.sum(sizes**2))
    weighted = np.tensordot(sizes, cache, axes=(0, 0))  # sum_t |V_t| V_t^(m)
    term_II = complex(2 * q**2 * nE * nF * np.sum(w_nz * weighted))
    per_t = np.tensordot(cache, w_nz, axes=([1, 2], [0, 1]))  # sum_{m != 0} w(m) V_t^(m)
    term_III = complex(q**8 * np.sum(per_t**2))

    total_nz = np.sum(w_nz)
    term_III_1 = complex(-(q**5) * total_nz**2)
    by_radius = np.bincount(fam.values.ravel(), weights=w_nz.real.ravel(), minlength=q) \
        + 1j * np.bincount(fam.values.ravel(), weights=w_nz.imag.ravel(), minlength=q)
    term_III_2 = complex(q**6 * np.sum(by_radius**2))

    full_by_radius = by_radius.copy()
    full_by_radius[0] += w[0, 0]
    main = complex(q**6 * np.sum(full_by_radius**2))
    remainder = term_I + term_II + term_III_1 + term_III_2 - main
    return SecondMoment(direct, term_I, term_II, term_III, term_III_1, term_III_2, main, remainder)


# -- experiment ------------------------------------------------------------------------

@dataclass
class ExperimentRow:
    q: int
    residue_class: int
    size_E: int
    size_F: int
    product_vs_q83: float
    distances: int
    ratio: float
    generator: str
    seed: int
    trial: int

    CSV_FIELDS = ("q", "residue_class", "size_E", "size_F", "product_vs_q83", "distances",
                  "ratio", "generator", "seed", "trial")

    def csv_row(self) -> list:
        d = asdict(self)
        return [d[k] for k in self.CSV_FIELDS]

    def to_dict(self) -> dict:
        return asdict(self)


def falconer_experiment(q: int, size_E: int, size_F: int, trials: int = 100, seed: int = 42,
                        generators=("uniform",)) -> list[ExperimentRow]:
    """Draw E, F from each named generator and record |Delta(E, F)| / q per trial."""
    field = field_of_order(q)
    if size_E < 1 or size_F < 1 or size_E > q * q or size_F > q * q:
        raise BadSizes(f"set sizes must lie in [1, q^2] = [1, {q * q}]")
    for g in generators:
        if g not in GENERATORS:
            raise BadSizes(f"unknown generator {g!r}; choose from {sorted(GENERATORS)}")
    grid = norm_poly(field, 2).grid
    rows = []
    for gi, gen_name in enumerate(generators):
        gen = GENERATORS[gen_name]
        for trial in range(trials):
            rng = np.random.default_rng([seed, gi, trial])
            E = gen(field, size_E, rng)
            F = gen(field, size_F, rng)
            counts = _difference_values(E, F, grid, field)
            nd = int(np.count_nonzero(counts))
            rows.append(ExperimentRow(
                q=q, residue_class=q % 4, size_E=size_E, size_F=size_F,
                product_vs_q83=size_E * size_F / q ** (8 / 3), distances=nd, ratio=nd / q,
                generator=gen_name, seed=seed, trial=trial,
            ))
    return rows


def summarize(rows: list[ExperimentRow]) -> dict:
    """min/mean of |Delta|/q, split by generator and by |E||F| >= q^(8/3)."""
    out: dict = {}
    for r in rows:
        key = f"{r.generator}:{'above' if r.product_vs_q83 >= 1 else 'below'}"
        out.setdefault(key, []).append(r.ratio)
    return {k: {"min": float(min(v)), "mean": float(np.mean(v)), "trials": len(v)} for k, v in out.items()}


@dataclass
class LemmaCheck:
    lemma: str
    q: int
    max_abs_value: float
    bound: float
    ratio: float
    witness: list | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())
