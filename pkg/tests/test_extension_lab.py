import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffext.curves import contains_line, parse_poly, variety_of
from ffext.errors import BadRange, EmptyVariety, SupportViolation, ZeroFunction
from ffext.extension_lab import (additive_energy, autocorrelation_profile, component_overlaps,
                                 constant_function_ratio, dual_exponent, estimate_rstar,
                                 exhaustive_sign_search, extend, extension_report, line_test_ratio,
                                 necessary_conditions, point_mass_ratio, restriction_ratio,
                                 rstar_ratio, rstar_upper_bound, surface_measure)
from ffext.finite_field import field_of_order
from ffext.plane_fourier import (FREQUENCY_SPACE, FUNCTION_SPACE, PlaneFunction, constant, convolve,
                                 forward_ft, indicator, norm_lp, point_mass)


def _sigma(text, q):
    return surface_measure(variety_of(parse_poly(text, field_of_order(q))))


def _naive_extend(f, sigma):
    fld, q = sigma.field, sigma.field.q
    out = np.zeros((q, q), dtype=complex)
    for m1 in range(q):
        for m2 in range(q):
            for (x1, x2), v in zip(sigma.variety.points.tolist(), f):
                out[m1, m2] += fld.chi(fld.add(fld.mul(m1, x1), fld.mul(m2, x2))) * v
    return out / sigma.size


def test_surface_measure_mass():
    for q in (5, 7, 9, 13, 25):
        for text in ("x1^2 + x2^2 - 1", "x1^2 - x2", "x1*x2"):
            assert _sigma(text, q).total_mass() == pytest.approx(1, abs=1e-12)
    with pytest.raises(EmptyVariety):
        _sigma("x1^2 + 1", 3)


def test_extend_against_naive_sum():
    sigma = _sigma("x1^2 + x2^2 - 1", 7)
    f = np.random.default_rng(0).standard_normal(sigma.size) + 0j
    assert np.abs(extend(f, sigma).values - _naive_extend(f, sigma)).max() < 1e-12


def test_extend_examples():
    sigma = _sigma("x1^2 + x2^2 - 1", 5)
    one = extend(np.ones(sigma.size), sigma)
    assert one.space == FREQUENCY_SPACE
    assert one(0, 0) == pytest.approx(1)
    e0 = np.zeros(sigma.size)
    e0[2] = 1
    assert np.allclose(np.abs(extend(e0, sigma).values), 1 / sigma.size)
    # consistency with the plane transform of the density
    via_ft = np.conj(forward_ft(indicator(sigma.field, sigma.variety.points)).values) * 25 / sigma.size
    assert np.abs(one.values - via_ft).max() < 1e-12


def test_extend_support_checks():
    sigma = _sigma("x1^2 + x2^2 - 1", 5)
    with pytest.raises(SupportViolation):
        extend(np.ones(3), sigma)
    with pytest.raises(SupportViolation):
        extend(constant(sigma.field), sigma)
    ok = PlaneFunction(sigma.field, FUNCTION_SPACE, sigma.variety.mask.astype(float))
    assert np.allclose(extend(ok, sigma).values, extend(np.ones(sigma.size), sigma).values)


def test_rstar_ratio_examples():
    for q in (5, 7, 11, 13):
        sigma = _sigma("x1^2 - x2", q)  # |V| = q
        e0 = np.zeros(sigma.size)
        e0[0] = 1
        assert rstar_ratio(e0, sigma, 2, 4) == pytest.approx(1)
        assert point_mass_ratio(sigma.variety, 2, 4) == pytest.approx(1)
        ones = np.ones(sigma.size)
        assert rstar_ratio(ones, sigma, 2, 4) >= 1 - 1e-12  # the m = 0 term alone
    with pytest.raises(ZeroFunction):
        rstar_ratio(np.zeros(sigma.size), sigma, 2, 4)
    with pytest.raises(BadRange):
        rstar_ratio(np.ones(sigma.size), sigma, 0.5, 4)


@pytest.mark.parametrize("q", [5, 7, 9, 11, 13, 25, 27, 49, 101])
def test_line_test_closed_form(q):
    sigma = _sigma("x1*x2", q)
    w = contains_line(sigma.variety.poly)
    n = sigma.size
    ratio = line_test_ratio(sigma, w, 2, 4)
    assert ratio == pytest.approx(q**0.25 * math.sqrt(q / n), rel=1e-10)
    assert ratio >= 0.5 * q**0.25


def test_l4_norm_equals_self_convolution_norm():
    rng = np.random.default_rng(5)
    for q in (5, 7, 9, 11, 13):
        sigma = _sigma("x1^2 + x2^2 - 1", q)
        f = rng.standard_normal(sigma.size) + 1j * rng.standard_normal(sigma.size)
        lhs = norm_lp(extend(f, sigma), 4) ** 4
        vals = np.zeros((q, q), dtype=complex)
        pts = sigma.variety.points
        vals[pts[:, 0], pts[:, 1]] = f * q**2 / sigma.size
        g = PlaneFunction(sigma.field, FUNCTION_SPACE, vals)
        rhs = norm_lp(convolve(g, g), 2) ** 2
        assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


def test_additive_energy_examples():
    for q in (5, 7, 9, 11, 13):
        f = field_of_order(q)
        assert additive_energy(variety_of(parse_poly("x2", f))) == q**3
        assert additive_energy(variety_of(parse_poly("x1^2 - x2", f))) == 2 * q * q - q


def test_additive_energy_brute_and_l4_identity():
    f7 = field_of_order(7)
    v = variety_of(parse_poly("x1^2 + x2^2 - 1", f7))
    pts = [tuple(p) for p in v.points.tolist()]
    brute = sum(1 for a, b, c, d in itertools.product(pts, repeat=4)
                if f7.add(a[0], b[0]) == f7.add(c[0], d[0]) and f7.add(a[1], b[1]) == f7.add(c[1], d[1]))
    assert additive_energy(v) == brute
    sigma = surface_measure(v)
    l4 = norm_lp(extend(np.ones(v.cardinality), sigma), 4) ** 4
    assert l4 * v.cardinality**4 / 49 == pytest.approx(brute, rel=1e-12)
    assert constant_function_ratio(v) == pytest.approx(rstar_ratio(np.ones(v.cardinality), sigma, 2, 4))


def test_autocorrelation_examples():
    for q in (7, 11, 19, 23):
        v = variety_of(parse_poly("x1^2 + x2^2 - 1", field_of_order(q)))
        prof = autocorrelation_profile(v)
        assert prof.counts[0, 0] == v.cardinality
        others = prof.counts.copy()
        others[0, 0] = 0
        assert others.max() <= 2
        assert [a for a, _ in prof.exceptional] == [(0, 0)]
    for q in (5, 7, 9, 13):
        v = variety_of(parse_poly("x1^2 - x2", field_of_order(q)))
        prof = autocorrelation_profile(v)
        assert prof.max_count <= 2 and not prof.exceptional
    f5 = field_of_order(5)
    v = variety_of(parse_poly("x1^2 + x2^2 - 1", f5))
    sums = {(f5.add(a[0], b[0]), f5.add(a[1], b[1])) for a in v.points.tolist() for b in v.points.tolist()}
    prof = autocorrelation_profile(v)
    for a in itertools.product(range(5), repeat=2):
        if a not in sums:
            assert prof.counts[a] == 0


@pytest.mark.parametrize("text", ["x1^2 + x2^2 - 1", "x1^2 - x2", "x1^4 + x2^4 - 1"])
def test_autocorrelation_line_free_profile(text):
    for q in (5, 7, 11, 13, 17, 25, 29):
        f = field_of_order(q)
        if parse_poly(text, f).degree >= f.p:
            continue
        prof = autocorrelation_profile(variety_of(parse_poly(text, f)))
        assert len(prof.exceptional) <= 1
        assert prof.max_regular <= prof.threshold


def test_necessary_condition_examples():
    assert necessary_conditions(2, 4, 1, 0)
    ad = necessary_conditions(2, 4, 1, 1)
    assert not ad and math.isinf(ad.n3_line)
    assert necessary_conditions(2, math.inf, 1, 1)
    for s in (0.5, 1.0, 1.5):
        assert necessary_conditions(1, math.inf, s, 0)
        assert necessary_conditions(1, math.inf, s, 1)
    assert not necessary_conditions(2, 3.9, 1, 0)
    with pytest.raises(BadRange):
        necessary_conditions(2, 4, 2.5, 0)
    with pytest.raises(BadRange):
        necessary_conditions(0.5, 4, 1, 0)


def test_dual_exponent():
    assert dual_exponent(2) == 2
    assert dual_exponent(4) == pytest.approx(4 / 3)
    assert math.isinf(dual_exponent(1)) and dual_exponent(math.inf) == 1


def test_restriction_examples():
    sigma = _sigma("x1^2 + x2^2 - 1", 7)
    g = point_mass(sigma.field, (3, 5), FREQUENCY_SPACE)
    assert restriction_ratio(g, sigma, 2, 4) == pytest.approx(1)
    full = constant(sigma.field, 1.0, FREQUENCY_SPACE)
    est = estimate_rstar(sigma, 2, 4, restarts=8)
    assert restriction_ratio(full, sigma, 2, 4) <= est.ratio + 1e-9
    with pytest.raises(ZeroFunction):
        restriction_ratio(constant(sigma.field, 0, FREQUENCY_SPACE), sigma, 2, 4)


@pytest.mark.parametrize("text,q", [("x1^2 + x2^2 - 1", 7), ("x1^2 - x2", 11), ("x1*x2", 7)])
def test_duality_with_dual_witness(text, q):
    """For y = (f dsigma)^v, g = |y|^(r-2) y certifies the same ratio from the restriction side."""
    sigma = _sigma(text, q)
    rng = np.random.default_rng(q)
    for _ in range(5):
        f = rng.standard_normal(sigma.size) + 1j * rng.standard_normal(sigma.size)
        y = extend(f, sigma)
        g = PlaneFunction(sigma.field, FREQUENCY_SPACE, np.abs(y.values) ** 2 * y.values)
        assert restriction_ratio(g, sigma, 2, 4) >= rstar_ratio(f, sigma, 2, 4) - 1e-10
    est = estimate_rstar(sigma, 2, 4, restarts=8)
    y = extend(est.witness, sigma)
    g = PlaneFunction(sigma.field, FREQUENCY_SPACE, np.abs(y.values) ** 2 * y.values)
    # at a critical point the dual witness attains the same value
    assert restriction_ratio(g, sigma, 2, 4) == pytest.approx(est.ratio, rel=1e-3)


def test_estimator_against_exhaustive_floor_and_upper_bound():
    for text in ("x1^2 + x2^2 - 1", "x1^2 - x2", "x1*x2", "x1^2 + x2^2 - 2"):
        sigma = _sigma(text, 5)
        est = estimate_rstar(sigma, 2, 4, restarts=8)
        floor = exhaustive_sign_search(sigma, 2, 4, max_size=12)
        if floor is not None:
            assert est.exhaustive_ratio == pytest.approx(floor)
            assert est.ratio >= floor - 1e-12
        assert est.ratio <= rstar_upper_bound(sigma.variety) + 1e-9
        assert est.nonneg_ratio <= est.ratio + 1e-12


def test_estimator_is_deterministic():
    sigma = _sigma("x1^2 + x2^2 - 1", 13)
    a = estimate_rstar(sigma, 2, 4, restarts=4, seed=7)
    b = estimate_rstar(sigma, 2, 4, restarts=4, seed=7)
    assert a.ratio == b.ratio and np.array_equal(a.witness, b.witness)


def test_estimator_other_exponents():
    sigma = _sigma("x1^2 - x2", 7)
    # (1 -> inf): |(f dsigma)^v| <= ||f||_{L^1(dsigma)}, attained by f = 1 at m = 0
    est = estimate_rstar(sigma, 1, math.inf, restarts=4)
    assert est.ratio == pytest.approx(1, abs=1e-6)
    est = estimate_rstar(sigma, 2, 6, restarts=4)
    assert est.ratio >= point_mass_ratio(sigma.variety, 2, 6) - 1e-12


@pytest.mark.parametrize("text", ["x1^2 + x2^2 - 1", "x1^2 - x2", "x1^4 + x2^4 - 1"])
def test_line_free_estimates_bounded(text):
    vals = []
    for q in (5, 7, 13, 17, 29, 37, 41, 53):
        f = field_of_order(q)
        if parse_poly(text, f).degree >= f.p:
            continue
        est = estimate_rstar(surface_measure(variety_of(parse_poly(text, f))), 2, 4, restarts=8)
        vals.append(est.ratio)
    assert max(vals) <= 3.0


def test_component_overlaps():
    f = field_of_order(7)
    comps = [parse_poly("x1", f), parse_poly("x2", f), parse_poly("x1 - 1", f)]
    ov = component_overlaps(comps)
    assert ov.tolist() == [[7, 1, 0], [1, 7, 1], [0, 1, 7]]


def test_extension_report_fields():
    rep = extension_report(parse_poly("x1*x2", field_of_order(7)), restarts=4)
    assert rep.contains_line and rep.line_test_ratio is not None
    assert rep.rstar_lower <= rep.rstar_upper + 1e-9
    assert rep.rstar_lower >= rep.line_test_ratio - 1e-12
    row = rep.csv_row()
    assert len(row) == len(rep.CSV_FIELDS)
    assert '"q": 7' in rep.to_json()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([("x1^2 + x2^2 - 1", 7), ("x1^2 - x2", 5), ("x1*x2", 5), ("x1^4 + x2^4 - 1", 13)]),
       st.integers(0, 2**32 - 1))
def test_random_ratios_below_upper_bound(case, seed):
    sigma = _sigma(*case)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(sigma.size) + 1j * rng.standard_normal(sigma.size)
    assert rstar_ratio(f, sigma, 2, 4) <= rstar_upper_bound(sigma.variety) + 1e-9
