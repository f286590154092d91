"""Invariant suites used by ``ffext verify``.

Each suite returns a list of :class:`Check` records.  A check passes when
``measured <= bound``; identities are phrased as an absolute error measured
against a tolerance, bounds as a measured constant against its ceiling.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .curves import common_factor, contains_line, intersect_count, linear_factors, parse_poly, random_poly, variety_of
from .distance_lab import (PointSetPair, circle_family, counting_function, counting_function_fourier,
                           diagonal_family, keylemma_all, restriction_energy_all,
                           second_moment_decomposition, sphere_ft_explicit_all, uniform_random,
                           weil_constant)
from .extension_lab import estimate_rstar, line_test_ratio, rstar_upper_bound, surface_measure
from .finite_field import field_of_order, gauss_sum, gauss_sum_closed_form
from .plane_fourier import convolve, forward_ft, inverse_ft, norm_lp, random_function

SUITES = ("fourier", "curves", "extension", "distance")


@dataclass
class Check:
    name: str
    q: int
    measured: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _check(name: str, q: int, measured: float, bound: float) -> Check:
    measured = float(measured)
    return Check(name, q, measured, float(bound), bool(measured <= bound))


def fourier_suite(q: int, tol: float = 1e-9, samples: int = 5, seed: int = 42) -> list[Check]:
    f = field_of_order(q)
    rng = np.random.default_rng([seed, q])
    planch = inv = conv = 0.0
    for _ in range(samples):
        a, b = random_function(f, rng), random_function(f, rng)
        fa, fb = forward_ft(a), forward_ft(b)
        planch = max(planch, abs(norm_lp(fa, 2) - norm_lp(a, 2)) / norm_lp(a, 2))
        inv = max(inv, float(np.abs(inverse_ft(fa).values - a.values).max()))
        lhs = forward_ft(convolve(a, b)).values
        conv = max(conv, float(np.abs(lhs - fa.values * fb.values).max()))
    gauss = abs(gauss_sum(f) - gauss_sum_closed_form(f))
    return [
        _check("plancherel", q, planch, tol),
        _check("inversion", q, inv, tol),
        _check("convolution_theorem", q, conv, tol),
        _check("gauss_sum_closed_form", q, gauss, max(tol, 1e-8)),
    ]


def curves_suite(q: int, tol: float = 1e-9, pairs: int = 20, seed: int = 42) -> list[Check]:
    f = field_of_order(q)
    rng = np.random.default_rng([seed, q])
    max_deg = min(f.p - 1, 4)
    bezout_viol = sz_viol = 0
    for _ in range(pairs):
        a = random_poly(f, int(rng.integers(1, max_deg + 1)), rng)
        b = random_poly(f, int(rng.integers(1, max_deg + 1)), rng)
        va, vb = variety_of(a), variety_of(b)
        res = intersect_count(va, vb)
        if not common_factor(a, b) and res.count > res.bezout_bound:
            bezout_viol += 1
        for v in (va, vb):
            if v.cardinality > v.poly.degree * q:
                sz_viol += 1
    checks = [_check("bezout_violations", q, bezout_viol, 0), _check("schwartz_zippel_violations", q, sz_viol, 0)]
    if f.p > 2:
        hyper = parse_poly("x1*x2", f)
        agree = (contains_line(hyper) is not None) == bool(linear_factors(hyper))
        checks.append(_check("line_detection_disagreements", q, 0 if agree else 1, 0))
    return checks


def extension_suite(q: int, tol: float = 1e-9, restarts: int = 8, seed: int = 42) -> list[Check]:
    f = field_of_order(q)
    circle = variety_of(parse_poly("x1^2 + x2^2 - 1", f))
    est = estimate_rstar(surface_measure(circle), 2, 4, restarts=restarts, seed=seed)
    checks = [
        _check("circle_rstar_lower", q, est.ratio, 3.0),
        _check("circle_rstar_vs_upper", q, est.ratio - rstar_upper_bound(circle), tol),
    ]
    hyper = parse_poly("x1*x2", f)
    sigma = surface_measure(variety_of(hyper))
    ratio = line_test_ratio(sigma, contains_line(hyper), 2, 4)
    # blow-up check: the measured ratio must clear half of q^(1/4)
    checks.append(_check("line_blowup_margin", q, 0.5 * q**0.25 - ratio, 0.0))
    return checks


def distance_suite(q: int, tol: float = 1e-9, pairs: int = 3, seed: int = 42) -> list[Check]:
    f = field_of_order(q)
    fam = circle_family(f)
    explicit = float(np.abs(sphere_ft_explicit_all(fam) - fam.ft_cache).max())
    cache = fam.ft_cache.reshape(q, -1)
    lhs = cache.T @ cache
    same = fam.values.reshape(-1)[:, None] == fam.values.reshape(-1)[None, :]
    rhs = np.where(same, (q - 1) / q**3, -1.0 / q**3)
    lhs[0, :] = rhs[0, :]
    lhs[:, 0] = rhs[:, 0]
    decay = float(np.abs(lhs - rhs).max())
    checks = [
        _check("explicit_circle_formula", q, explicit, tol),
        _check("double_decay", q, decay, tol),
        _check("weil_constant", q, weil_constant(fam), 2.0),
    ]
    for d in (2, 3, 4):
        if d < f.p:
            checks.append(_check(f"keylemma_d{d}", q, keylemma_all(diagonal_family(f, d)).max(), 4.0))
    rng = np.random.default_rng([seed, q])
    nu_err = sm_err = 0.0
    restr = 0.0
    for _ in range(pairs):
        size = max(1, int(rng.integers(q, 3 * q)))
        pair = PointSetPair(uniform_random(f, size, rng), uniform_random(f, size, rng))
        nu = counting_function(pair, fam).values
        nu_err = max(nu_err, float(np.abs(counting_function_fourier(pair, fam) - nu).max()))
        sm = second_moment_decomposition(pair, fam)
        sm_err = max(sm_err, abs(sm.reconstructed - sm.direct) / sm.direct)
        restr = max(restr, float(np.nanmax(restriction_energy_all(pair.E, fam)[1:])))
    checks += [
        _check("nu_fourier_path", q, nu_err, 1e-6),
        _check("second_moment_identity", q, sm_err, 1e-8),
        _check("restriction_energy", q, restr, 4.0),
    ]
    return checks


_RUNNERS = {
    "fourier": fourier_suite,
    "curves": curves_suite,
    "extension": extension_suite,
    "distance": distance_suite,
}


def run_suite(name: str, qs, tol: float = 1e-9) -> list[Check]:
    names = SUITES if name == "all" else (name,)
    out = []
    for suite in names:
        for q in qs:
            out.extend(_RUNNERS[suite](q, tol))
    return out


def summary(checks: list[Check]) -> dict:
    failed = [c for c in checks if not c.passed]
    return {
        "checks": [c.to_dict() for c in checks],
        "total": len(checks),
        "failed": len(failed),
        "pass": not failed,
    }

