"""Surface measures on plane curves and the L^p -> L^r extension operator.

A function f on a variety V (stored as a vector aligned with
``variety.points``) is extended to the frequency plane by

    (f dsigma)^v(m) = |V|^-1 sum_{x in V} chi(m.x) f(x),

and the extension constant R*(p -> r) is the operator norm from
L^p(V, dsigma) to L^r(F_q^2, dm).  This module estimates it from below by
multi-start projected gradient ascent, evaluates it exactly on structured
test functions, and bounds it from above in the (2, 4) case through the
autocorrelation of V.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .curves import BivariatePoly, LineWitness, Variety, contains_line, line_incidences, variety_of
from .errors import BadRange, EmptyVariety, SupportViolation, ZeroFunction
from .plane_fourier import FREQUENCY_SPACE, FUNCTION_SPACE, PlaneFunction, dual_ft, norm_lp


class SurfaceMeasure:
    """Normalised measure on V, i.e. the plane density (q^2/|V|) 1_V."""

    def __init__(self, variety: Variety):
        if variety.cardinality == 0:
            raise EmptyVariety(f"{variety.poly} has no zeros over F_{variety.field.q}")
        self.variety = variety
        q = variety.field.q
        self.density = PlaneFunction(
            variety.field, FUNCTION_SPACE,
            variety.mask * (q**2 / variety.cardinality),
            support=variety.points,
        )

    @property
    def field(self):
        return self.variety.field

    @property
    def size(self) -> int:
        return self.variety.cardinality

    def total_mass(self) -> float:
        return float(np.sum(self.density.values).real / self.field.q**2)

    @cached_property
    def matrix(self) -> np.ndarray:
        """A[m, x] = chi(m.x) / |V|, shape (q^2, |V|), rows in row-major m order."""
        c = self.field.char_matrix
        x1, x2 = self.variety.points[:, 0], self.variety.points[:, 1]
        q, n = self.field.q, self.size
        return (c[:, None, x1] * c[None, :, x2]).reshape(q * q, n) / n


def surface_measure(variety: Variety) -> SurfaceMeasure:
    return SurfaceMeasure(variety)


def _values_on_variety(f, sigma: SurfaceMeasure) -> np.ndarray:
    if isinstance(f, PlaneFunction):
        if f.space != FUNCTION_SPACE:
            raise SupportViolation("a function on V must live in the function space")
        if np.any(f.values[~sigma.variety.mask] != 0):
            raise SupportViolation("function does not vanish off the variety")
        pts = sigma.variety.points
        return f.values[pts[:, 0], pts[:, 1]]
    f = np.asarray(f, dtype=complex).reshape(-1)
    if f.size != sigma.size:
        raise SupportViolation(f"expected {sigma.size} values on V, got {f.size}")
    return f


def extend(f, sigma: SurfaceMeasure) -> PlaneFunction:
    """(f dsigma)^v on every frequency."""
    vals = _values_on_variety(f, sigma)
    q = sigma.field.q
    c = sigma.field.char_matrix
    x1, x2 = sigma.variety.points[:, 0], sigma.variety.points[:, 1]
    out = (c[:, x1] * vals[None, :]) @ c[:, x2].T / sigma.size
    return PlaneFunction(sigma.field, FREQUENCY_SPACE, out.reshape(q, q))


# -- norms and ratios (batched over columns) -----------------------------------

def _check_exponent(e: float) -> float:
    e = float(e)
    if not e >= 1:
        raise BadRange(f"exponent must lie in [1, inf], got {e}")
    return e


def _lp_sigma(f: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(f)
    if np.isinf(p):
        return a.max(axis=0)
    return np.mean(a**p, axis=0) ** (1.0 / p)


def _lr_counting(y: np.ndarray, r: float) -> np.ndarray:
    a = np.abs(y)
    if np.isinf(r):
        return a.max(axis=0)
    return np.sum(a**r, axis=0) ** (1.0 / r)


class _ExtensionOperator:
    """f -> (f dsigma)^v as q x q frequency arrays, using chi(m.x) = chi(m1 x1) chi(m2 x2)."""

    def __init__(self, sigma: SurfaceMeasure):
        c = sigma.field.char_matrix
        self.n = sigma.size
        self.q = sigma.field.q
        self.c1 = np.ascontiguousarray(c[:, sigma.variety.points[:, 0]])
        self.c2t = np.ascontiguousarray(c[:, sigma.variety.points[:, 1]].T)
        self.c2bar = np.conj(self.c2t.T)
        self.c1bar = np.conj(self.c1)

    def apply(self, f: np.ndarray) -> np.ndarray:
        return ((self.c1 * f[None, :]) @ self.c2t).reshape(-1) / self.n

    def adjoint(self, w: np.ndarray) -> np.ndarray:
        W = w.reshape(self.q, self.q)
        return np.sum(self.c1bar * (W @ self.c2bar), axis=0) / self.n

    def ratio(self, f: np.ndarray, p: float, r: float) -> float:
        return float(_lr_counting(self.apply(f), r) / _lp_sigma(f, p))


def _ratios(A: np.ndarray, F: np.ndarray, p: float, r: float) -> np.ndarray:
    return _lr_counting(A @ F, r) / _lp_sigma(F, p)


def rstar_ratio(f, sigma: SurfaceMeasure, p: float, r: float) -> float:
    """||(f dsigma)^v||_{L^r(dm)} / ||f||_{L^p(V, dsigma)}."""
    p, r = _check_exponent(p), _check_exponent(r)
    vals = _values_on_variety(f, sigma)
    if not np.any(vals):
        raise ZeroFunction("the test function vanishes identically")
    return _ExtensionOperator(sigma).ratio(vals, p, r)


def dual_exponent(p: float) -> float:
    p = float(p)
    if p == 1:
        return math.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


def restriction_ratio(g: PlaneFunction, sigma: SurfaceMeasure, p: float, r: float) -> float:
    """||g^||_{L^p'(V, dsigma)} / ||g||_{L^r'(dm)}, with g^ the frequency-side transform."""
    p, r = _check_exponent(p), _check_exponent(r)
    if not np.any(g.values):
        raise ZeroFunction("g vanishes identically")
    gh = dual_ft(g).values
    pts = sigma.variety.points
    num = _lp_sigma(gh[pts[:, 0], pts[:, 1]], dual_exponent(p))
    return float(num / norm_lp(g, dual_exponent(r)))


# -- ascent --------------------------------------------------------------------

def _log_ratio_gradient(op: _ExtensionOperator, f: np.ndarray, p: float, r: float) -> np.ndarray:
    """Steepest-ascent direction of log ratio over (Re f, Im f)."""
    y = op.apply(f)
    a = np.abs(y)
    if np.isinf(r):
        k = int(np.argmax(a))
        w = np.zeros_like(y)
        w[k] = y[k] / a[k] ** 2
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(a > 0, a ** (r - 2) * y, 0) / np.sum(a**r)
    g = op.adjoint(w)
    if not np.isinf(p):
        b = np.abs(f)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = g - np.where(b > 0, b ** (p - 2) * f, 0) / np.sum(b**p)
    return g


def _ascend(op: _ExtensionOperator, f0, p, r, max_iter, tol, nonneg):
    """Projected gradient ascent on the unit L^p(dsigma) sphere.

    Backtracking halves the step from at most 0.5 (in units of ||f||_2);
    each search starts from twice the previously accepted step.
    """
    def project(v):
        if nonneg:
            v = np.maximum(v.real, 0).astype(complex)
        s = _lp_sigma(v, p)
        return v / s if s > 0 else None

    f = project(np.asarray(f0, dtype=complex))
    if f is None:
        return 0.0, np.asarray(f0, dtype=complex), 0
    val = op.ratio(f, p, r)
    it, step0 = 0, 0.5
    for it in range(1, max_iter + 1):
        g = _log_ratio_gradient(op, f, p, r)
        if nonneg:
            g = g.real.astype(complex)
        gn = np.linalg.norm(g)
        if gn == 0 or not np.isfinite(gn):
            break
        direction = g * (np.linalg.norm(f) / gn)
        step, accepted = step0, None
        while step > 1e-7:
            cand = project(f + step * direction)
            if cand is not None:
                v = op.ratio(cand, p, r)
                if v > val:
                    accepted = (cand, v)
                    break
            step *= 0.5
        if accepted is None:
            break
        step0 = min(0.5, 2 * step)
        gain = accepted[1] - val
        f, val = accepted
        if gain < tol:
            break
    return float(val), f, it


@dataclass
class RStarEstimate:
    ratio: float
    witness: np.ndarray
    nonneg_ratio: float
    nonneg_witness: np.ndarray
    exhaustive_ratio: float | None
    starts: int
    source: str


def _structured_starts(sigma: SurfaceMeasure, max_lines: int):
    """Constant, every point mass, and indicators of rich lines through V."""
    n = sigma.size
    starts = [("constant", np.ones(n, dtype=complex))]
    eye = np.eye(n, dtype=complex)
    starts += [(f"point{j}", eye[:, j]) for j in range(n)]
    v, f = sigma.variety, sigma.field
    slope_counts, vert_counts = line_incidences(v.mask, f)
    cand = [(int(c), False, int(a), int(b)) for (a, b), c in np.ndenumerate(slope_counts) if c >= 3]
    cand += [(int(c), True, 0, int(x)) for x, c in enumerate(vert_counts) if c >= 3]
    cand.sort(key=lambda t: (-t[0], t[1], t[2], t[3]))
    pts = v.points
    for count, vertical, a, b in cand[:max_lines]:
        if vertical:
            on = pts[:, 0] == b
            name = f"line x1={b}"
        else:
            on = pts[:, 1] == f.add(f.mul(a, pts[:, 0]), b)
            name = f"line x2={a}x1+{b}"
        starts.append((name, on.astype(complex)))
    return starts


def exhaustive_sign_search(sigma: SurfaceMeasure, p: float, r: float, max_size: int = 12) -> float | None:
    """Best ratio over all nonzero f with values in {-1, 0, 1}; None if |V| > max_size."""
    n = sigma.size
    if n > max_size:
        return None
    A = sigma.matrix
    best = 0.0
    combos = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n))).T
    combos = combos[:, np.any(combos != 0, axis=0)]
    for start in range(0, combos.shape[1], 4096):
        block = combos[:, start:start + 4096].astype(complex)
        best = max(best, float(_ratios(A, block, p, r).max()))
    return best


def estimate_rstar(sigma: SurfaceMeasure, p: float = 2, r: float = 4, restarts: int = 32,
                   seed: int = 42, max_iter: int = 200, tol: float = 1e-8,
                   structured_ascents: int = 4, max_lines: int | None = None) -> RStarEstimate:
    """Lower bound on R*(p -> r) by multi-start projected gradient ascent.

    Every structured start is scored; the best ``structured_ascents`` of them,
    the constant function and ``restarts`` seeded complex Gaussian starts
    are then refined by ascent.  For fields with q <= 5 an exhaustive search
    over {-1, 0, 1}-valued functions supplies an independent floor.
    """
    p, r = _check_exponent(p), _check_exponent(r)
    n, q = sigma.size, sigma.field.q
    max_lines = 2 * q if max_lines is None else max_lines
    op = _ExtensionOperator(sigma)

    starts = _structured_starts(sigma, max_lines)
    scores = np.array([op.ratio(s, p, r) for _, s in starts])
    order = np.argsort(-scores, kind="stable")
    best_idx = int(order[0])
    best = (float(scores[best_idx]), starts[best_idx][1], starts[best_idx][0])
    # structured starts are all nonnegative
    best_nn = best

    chosen = [0] + [int(i) for i in order[:structured_ascents] if i != 0]
    rng = np.random.default_rng(seed)
    runs = [(starts[i][0], starts[i][1]) for i in chosen]
    runs += [(f"random{j}", rng.standard_normal(n) + 1j * rng.standard_normal(n))
             for j in range(restarts)]

    for name, f0 in runs:
        val, f, _ = _ascend(op, f0, p, r, max_iter, tol, nonneg=False)
        if val > best[0]:
            best = (val, f, name + "+ascent")
    for name, f0 in runs[:len(chosen)]:
        val, f, _ = _ascend(op, f0, p, r, max_iter, tol, nonneg=True)
        if val > best_nn[0]:
            best_nn = (val, f, name)
    if best_nn[0] > best[0]:
        best = (best_nn[0], best_nn[1], best_nn[2] + "+nonneg ascent")

    exhaustive = exhaustive_sign_search(sigma, p, r) if q <= 5 else None
    if exhaustive is not None and exhaustive > best[0]:
        best = (exhaustive, best[1], "exhaustive")
    return RStarEstimate(
        ratio=best[0], witness=np.asarray(best[1]), nonneg_ratio=best_nn[0],
        nonneg_witness=np.asarray(best_nn[1]), exhaustive_ratio=exhaustive,
        starts=len(starts) + len(runs), source=best[2],
    )


# -- exact combinatorial quantities ------------------------------------------

def _pair_sum_counts(v: Variety) -> np.ndarray:
    f, q = v.field, v.field.q
    x1, x2 = v.points[:, 0], v.points[:, 1]
    s1 = f.add_table[x1[:, None], x1[None, :]]
    s2 = f.add_table[x2[:, None], x2[None, :]]
    return np.bincount((s1 * q + s2).ravel(), minlength=q * q).reshape(q, q)


def additive_energy(v: Variety) -> int:
    """|{(a, b, c, d) in V^4 : a + b = c + d}|."""
    counts = _pair_sum_counts(v).astype(np.int64)
    return int(np.sum(counts**2))


def constant_function_ratio(v: Variety) -> float:
    """Exact R*(2 -> 4) ratio of f = 1, from the additive energy.

    ||(dsigma)^v||_4^4 = q^2 E(V) / |V|^4 and ||1||_{L^2(dsigma)} = 1.
    """
    n, q = v.cardinality, v.field.q
    return (q**2 * additive_energy(v) / n**4) ** 0.25


@dataclass
class AutocorrelationProfile:
    """counts[a] = sum_{x in V} V(a - x), i.e. the number of ways a = x + y in V."""

    counts: np.ndarray
    max_count: int
    argmax: tuple[int, int]
    second_max: int
    threshold: int
    exceptional: list[tuple[tuple[int, int], int]]
    max_regular: int


def autocorrelation_profile(v: Variety) -> AutocorrelationProfile:
    counts = _pair_sum_counts(v)
    flat = counts.ravel()
    order = np.argsort(-flat, kind="stable")
    q = v.field.q
    top = int(order[0])
    threshold = v.poly.degree ** 2
    exc_idx = np.flatnonzero(flat > threshold)
    exceptional = [((int(i // q), int(i % q)), int(flat[i])) for i in exc_idx]
    regular = flat[flat <= threshold]
    return AutocorrelationProfile(
        counts=counts,
        max_count=int(flat[top]),
        argmax=(top // q, top % q),
        second_max=int(flat[order[1]]) if flat.size > 1 else 0,
        threshold=threshold,
        exceptional=exceptional,
        max_regular=int(regular.max()) if regular.size else 0,
    )


def rstar_upper_bound(v: Variety, profile: AutocorrelationProfile | None = None) -> float:
    """Certified upper bound on R*(2 -> 4) via the autocorrelation of V.

    With g = f dsigma and X the exceptional set of the profile,
    ||(f dsigma)^v||_4^4 = ||g * g||_{L^2(dx)}^2 splits into the points of X,
    each bounded through Young by (q/|V|)^2 ||f||^4, and the rest, bounded
    through Cauchy-Schwarz by max_{a not in X} (dsigma * dsigma)(a) ||f||^4.
    """
    profile = autocorrelation_profile(v) if profile is None else profile
    n, q = v.cardinality, v.field.q
    return ((q / n) ** 2 * (len(profile.exceptional) + profile.max_regular)) ** 0.25


def point_mass_ratio(v: Variety, p: float = 2, r: float = 4) -> float:
    """Closed-form ratio of a point mass: (q^2)^(1/r) |V|^(1/p - 1)."""
    n, q = v.cardinality, v.field.q
    lr = 1.0 if np.isinf(r) else q ** (2.0 / r)
    lp = 1.0 if np.isinf(p) else n ** (-1.0 / p)
    return lr / (n * lp)


def line_test_ratio(sigma: SurfaceMeasure, witness: LineWitness, p: float = 2, r: float = 4) -> float:
    """rstar_ratio of the indicator of a line lying inside V."""
    pts = sigma.variety.points
    on_line = np.zeros(len(pts), dtype=bool)
    wl = {tuple(x) for x in witness.points.tolist()}
    for i, x in enumerate(pts.tolist()):
        on_line[i] = tuple(x) in wl
    return rstar_ratio(on_line.astype(complex), sigma, p, r)


@dataclass
class Admissibility:
    admissible: bool
    n1_size: float
    n1_point: float
    n3_line: float | None

    def __bool__(self) -> bool:
        return self.admissible


def necessary_conditions(p: float, r: float, s: float, alpha: int = 0) -> Admissibility:
    """Check r against the lower bounds forced by |V| ~ q^s and an alpha-dim subspace in V.

    r >= 4/s and r >= 2p/(s(p-1)); when alpha = 1 additionally
    r >= p(2-alpha)/((p-1)(s-alpha)).  Infinite bounds admit only r = inf.
    """
    p, r = float(p), float(r)
    if not (p >= 1 and r >= 1):
        raise BadRange("exponents must lie in [1, inf]")
    if not 0 < s < 2:
        raise BadRange("s must lie in (0, 2)")
    if alpha not in (0, 1):
        raise BadRange("alpha must be 0 or 1")

    def ratio_p(num_factor: float, denom: float) -> float:
        # num_factor * p / ((p - 1) * denom), with p = inf -> num_factor / denom
        if denom <= 0 or p == 1:
            return math.inf
        if np.isinf(p):
            return num_factor / denom
        return num_factor * p / ((p - 1) * denom)

    n1_size = 4.0 / s
    n1_point = ratio_p(2.0, s)
    bounds = [n1_size, n1_point]
    n3 = None
    if alpha == 1:
        n3 = ratio_p(2.0 - alpha, s - alpha)
        bounds.append(n3)
    ok = all(np.isinf(r) if np.isinf(b) else r >= b for b in bounds)
    return Admissibility(ok, n1_size, n1_point, n3)


def component_overlaps(components: list[BivariatePoly]) -> np.ndarray:
    """|V_i ∩ V_j| for every pair of user-supplied component polynomials."""
    masks = [variety_of(c).mask for c in components]
    k = len(masks)
    out = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            out[i, j] = np.count_nonzero(masks[i] & masks[j])
    return out


# -- report ----------------------------------------------------------------------

@dataclass
class ExtensionReport:
    q: int
    poly_text: str
    cardinality: int
    contains_line: bool
    line_witness: str | None
    p_exp: float
    r_exp: float
    rstar_lower: float
    rstar_nonneg: float
    rstar_energy_bound: float
    rstar_upper: float | None
    point_mass_ratio: float
    line_test_ratio: float | None
    exhaustive_ratio: float | None
    autocorr_max: int
    autocorr_max_regular: int
    exceptional_points: list = dc_field(default_factory=list)

    CSV_FIELDS = ("q", "poly_text", "cardinality", "contains_line", "line_witness", "p_exp",
                  "r_exp", "rstar_lower", "rstar_nonneg", "rstar_energy_bound", "rstar_upper",
                  "point_mass_ratio", "line_test_ratio", "exhaustive_ratio", "autocorr_max",
                  "autocorr_max_regular", "exceptional_points")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_row(self) -> list:
        d = self.to_dict()
        d["exceptional_points"] = json.dumps(d["exceptional_points"])
        return ["" if d[k] is None else d[k] for k in self.CSV_FIELDS]


def extension_report(poly: BivariatePoly, p: float = 2, r: float = 4, restarts: int = 32,
                     seed: int = 42) -> ExtensionReport:
    v = variety_of(poly)
    sigma = surface_measure(v)
    est = estimate_rstar(sigma, p, r, restarts=restarts, seed=seed)
    witness = contains_line(poly)
    profile = autocorrelation_profile(v)
    is_24 = (p, r) == (2, 4)
    return ExtensionReport(
        q=v.field.q,
        poly_text=str(poly),
        cardinality=v.cardinality,
        contains_line=witness is not None,
        line_witness=None if witness is None else witness.describe(v.field),
        p_exp=float(p),
        r_exp=float(r),
        rstar_lower=est.ratio,
        rstar_nonneg=est.nonneg_ratio,
        rstar_energy_bound=constant_function_ratio(v) if is_24 else rstar_ratio(np.ones(v.cardinality), sigma, p, r),
        rstar_upper=rstar_upper_bound(v, profile) if is_24 else None,
        point_mass_ratio=point_mass_ratio(v, p, r),
        line_test_ratio=None if witness is None else line_test_ratio(sigma, witness, p, r),
        exhaustive_ratio=est.exhaustive_ratio,
        autocorr_max=profile.max_count,
        autocorr_max_regular=profile.max_regular,
        exceptional_points=[[a[0], a[1], c] for a, c in profile.exceptional],
    )
