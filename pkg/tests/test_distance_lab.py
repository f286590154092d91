import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffext.curves import parse_poly
from ffext.distance_lab import (ExperimentRow, LemmaCheck, LevelSetFamily, PointSetPair, circle_family,
                                counting_function, counting_function_fourier, diagonal_family,
                                distance_set, double_decay_closed, double_decay_sum,
                                falconer_experiment, keylemma_all, keylemma_sum, norm_poly,
                                nu_zero_decomposition, restriction_energy, restriction_energy_all,
                                second_moment_decomposition, sphere_ft_explicit,
                                sphere_ft_explicit_all, subfield_grid, summarize, uniform_random,
                                weil_constant)
from ffext.errors import (BadExponent, BadSizes, NonDiagonalPolynomial, WrongPolynomial,
                          WrongResidueClass, ZeroFrequency, ZeroRadius)
from ffext.finite_field import field_of_order, odd_prime_powers


def _plane(q):
    return np.array(list(itertools.product(range(q), repeat=2)))


def _random_pair(f, rng, lo=None, hi=None):
    q = f.q
    lo = lo or q
    hi = hi or 3 * q
    return PointSetPair(uniform_random(f, int(rng.integers(lo, hi)), rng),
                        uniform_random(f, int(rng.integers(lo, hi)), rng))


def _naive_nu(pair, f):
    out = np.zeros(f.q, dtype=np.int64)
    for x in pair.E.tolist():
        for y in pair.F.tolist():
            d1, d2 = f.sub(x[0], y[0]), f.sub(x[1], y[1])
            out[f.add(f.mul(d1, d1), f.mul(d2, d2))] += 1
    return out


def test_level_sets_partition_the_plane():
    for q in odd_prime_powers(3, 49):
        fam = circle_family(field_of_order(q))
        assert fam.sizes.sum() == q * q
    fam = diagonal_family(field_of_order(13), 3, 2, 5)
    assert fam.sizes.sum() == 169


@pytest.mark.parametrize("q", odd_prime_powers(3, 121))
def test_weil_constant(q):
    assert weil_constant(circle_family(field_of_order(q))) <= 2


def test_circle_sizes_closed_form():
    # |V_t| = q - eta(-1) for t != 0, and |V_0| = q + (q - 1) eta(-1)
    for q in (5, 7, 9, 11, 13, 25, 27):
        f = field_of_order(q)
        e = f.eta(f.neg(1))
        fam = circle_family(f)
        assert fam.sizes[0] == q + (q - 1) * e
        assert np.all(fam.sizes[1:] == q - e)


def test_counting_function_examples():
    q = 5
    f = field_of_order(q)
    fam = circle_family(f)
    full = PointSetPair(_plane(q), _plane(q))
    assert np.array_equal(counting_function(full, fam).values, q * q * fam.sizes)
    single = PointSetPair([(0, 0)], [(1, 0)])
    nu = counting_function(single, fam)
    assert nu[1] == 1 and nu.total() == 1


@pytest.mark.parametrize("q", [5, 9, 13])
def test_counting_function_two_paths(q):
    f = field_of_order(q)
    fam = circle_family(f)
    rng = np.random.default_rng(q)
    for _ in range(4):
        pair = _random_pair(f, rng)
        nu = counting_function(pair, fam)
        assert np.array_equal(nu.values, _naive_nu(pair, f))
        assert nu.total() == len(pair.E) * len(pair.F)
        assert np.abs(counting_function_fourier(pair, fam) - nu.values).max() <= 1e-6


def test_distance_set_examples():
    for q in (5, 7, 9, 13):
        f = field_of_order(q)
        axis = np.array([(a, 0) for a in range(q)])
        assert len(distance_set(PointSetPair(axis, axis), f, 2)) == (q + 1) // 2
        assert len(distance_set(PointSetPair([(1, 2)], [(3, 3)]), f, 2)) == 1
        assert len(distance_set(PointSetPair(_plane(q), _plane(q)), f, 2)) == q
    f7 = field_of_order(7)
    d = distance_set(PointSetPair([(1, 2)], [(3, 3)]), f7, 3)
    assert d.tolist() == [f7.add(f7.pow(f7.sub(1, 3), 3), f7.pow(f7.sub(2, 3), 3))]
    with pytest.raises(BadExponent):
        distance_set(PointSetPair([(0, 0)], [(1, 1)]), field_of_order(5), 5)
    with pytest.raises(BadExponent):
        distance_set(PointSetPair([(0, 0)], [(1, 1)]), field_of_order(5), 1)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
def test_explicit_circle_formula(q):
    fam = circle_family(field_of_order(q))
    assert np.abs(sphere_ft_explicit_all(fam) - fam.ft_cache).max() <= 1e-9


def test_explicit_formula_examples():
    f5 = field_of_order(5)
    fam = circle_family(f5)
    for t in range(5):
        assert sphere_ft_explicit(fam, t, (0, 0)) == pytest.approx(fam.sizes[t] / 25)
    assert abs(sphere_ft_explicit(fam, 1, (1, 0)) - fam.ft_cache[1, 1, 0]) < 1e-12
    # specialisation for q = 1 mod 4: q^-2 sum_{s != 0} chi(||m||/(4s) + s t)
    for q in (5, 9, 13):
        f = field_of_order(q)
        fam = circle_family(f)
        four_inv = f.inv(f.scalar(4))
        for t, m in [(1, (1, 0)), (2, (2, 3)), (0, (1, 1))]:
            k = fam.radius_of(m)
            s = np.arange(1, q)
            val = f.chi_table[f.add(f.mul(k, f.mul(four_inv, f.inv(s))), f.mul(s, t))].sum() / q**2
            assert abs(val - fam.ft_cache[t, m[0], m[1]]) < 1e-12
    with pytest.raises(WrongPolynomial):
        sphere_ft_explicit(diagonal_family(f5, 3), 1, (1, 0))


@pytest.mark.parametrize("q", [5, 7, 9, 13])
def test_double_decay_all_pairs(q):
    fam = circle_family(field_of_order(q))
    cache = fam.ft_cache.reshape(q, -1)
    lhs = cache.T @ cache
    radii = fam.values.reshape(-1)
    rhs = np.where(radii[:, None] == radii[None, :], (q - 1) / q**3, -1.0 / q**3)
    assert np.abs(lhs[1:, 1:] - rhs[1:, 1:]).max() <= 1e-9


def test_double_decay_examples():
    f13 = field_of_order(13)
    fam = circle_family(f13)
    lhs, rhs = double_decay_sum(fam, (1, 0), (0, 1))
    assert abs(lhs - rhs) < 1e-10
    assert rhs.real == pytest.approx(12 / 13**3)
    lhs, rhs = double_decay_sum(fam, (1, 0), (1, 1))
    assert abs(lhs - rhs) < 1e-10 and rhs.real == pytest.approx(-1 / 13**3)
    assert double_decay_closed(fam, (1, 0), (1, 1)) == pytest.approx(-1 / 13**3)
    with pytest.raises(ZeroFrequency):
        double_decay_sum(fam, (0, 0), (1, 1))


def test_keylemma_examples():
    f5 = field_of_order(5)
    fam = diagonal_family(f5, 2)
    k = keylemma_sum(fam, (1, 2))
    assert abs(k.mean_part) < 1e-12
    assert abs(k.mean_part + k.fluctuation_part - k.value) < 1e-12
    assert abs(k.value) <= 4
    for m in [(1, 0), (3, 4), (2, 2)]:
        assert abs(np.sum(7.5 * fam.ft_cache[:, m[0], m[1]])) < 1e-12
    with pytest.raises(ZeroFrequency):
        keylemma_sum(fam, (0, 0))
    circle = LevelSetFamily(f5, parse_poly("x1^2 + x1*x2 + x2^2", f5))
    with pytest.raises(NonDiagonalPolynomial):
        keylemma_sum(circle, (1, 0))


def test_keylemma_against_unnormalised_sums():
    f = field_of_order(11)
    fam = diagonal_family(f, 3, 2, 7)
    m = (4, 9)
    total = 0
    for t in range(11):
        pts = np.argwhere(fam.values == t)
        s = sum(f.chi(f.neg(f.add(f.mul(m[0], x[0]), f.mul(m[1], x[1])))) for x in pts.tolist())
        total += s * len(pts) / 121
    assert abs(total - keylemma_sum(fam, m).value) < 1e-12


def test_nu_zero_examples():
    with pytest.raises(WrongResidueClass):
        nu_zero_decomposition(PointSetPair([(0, 0)], [(1, 0)]), circle_family(field_of_order(7)))
    for q in (5, 9, 13):
        fam = circle_family(field_of_order(q))
        full = PointSetPair(_plane(q), _plane(q))
        dec = nu_zero_decomposition(full, fam)
        assert dec.direct == q * q * fam.sizes[0]
        assert abs(dec.reconstructed - dec.direct) < 1e-6
    f13 = field_of_order(13)
    rng = np.random.default_rng(13)
    for _ in range(5):
        dec = nu_zero_decomposition(_random_pair(f13, rng), circle_family(f13))
        assert abs(dec.reconstructed - dec.direct) <= 1e-6


def test_restriction_energy_examples():
    for q in (5, 9, 13):
        fam = circle_family(field_of_order(q))
        r = restriction_energy([(2, 3)], fam, 1)
        assert r.energy == pytest.approx(fam.sizes[1] / q**4)
        assert r.ratio == pytest.approx(fam.sizes[1] / q)
        r = restriction_energy(_plane(q), fam, 2)
        assert r.energy == pytest.approx(0, abs=1e-20)
        with pytest.raises(ZeroRadius):
            restriction_energy([(0, 0)], fam, 0)
        ratios = restriction_energy_all(_plane(q)[:7], fam)
        assert math.isnan(ratios[0])
        assert ratios[3] == pytest.approx(restriction_energy(_plane(q)[:7], fam, 3).ratio)


def test_second_moment_examples():
    for q in (5, 9):
        fam = circle_family(field_of_order(q))
        sm = second_moment_decomposition(PointSetPair([(1, 1)], [(1, 1)]), fam)
        assert sm.direct == 1 and abs(sm.reconstructed - 1) < 1e-9
        full = PointSetPair(_plane(q), _plane(q))
        sm = second_moment_decomposition(full, fam)
        assert sm.direct == q**4 * int(np.sum(fam.sizes.astype(np.int64) ** 2))
        for piece in (sm.II, sm.III, sm.III_1, sm.III_2):
            assert abs(piece) < 1e-6 * sm.direct
        assert sm.I == pytest.approx(sm.direct)


@pytest.mark.parametrize("q", [5, 7, 9, 13])
def test_second_moment_identity(q):
    fam = circle_family(field_of_order(q))
    rng = np.random.default_rng(200 + q)
    for _ in range(5):
        sm = second_moment_decomposition(_random_pair(fam.field, rng), fam)
        assert abs(sm.reconstructed - sm.direct) <= 1e-8 * sm.direct
        assert abs(sm.III - (sm.III_1 + sm.III_2)) <= 1e-8 * sm.direct
        assert abs(sm.main_term + sm.remainder - sm.direct) <= 1e-8 * sm.direct


@pytest.mark.parametrize("d", [2, 3, 4])
def test_keylemma_bounded(d):
    vals = {}
    for q in (5, 7, 11, 13, 17, 19, 23, 25):
        f = field_of_order(q)
        if d >= f.p:
            continue
        vals[q] = keylemma_all(diagonal_family(f, d)).max()
    assert max(vals.values()) <= 4


def test_falconer_examples():
    rows = falconer_experiment(5, 25, 25, trials=2)
    assert all(r.distances == 5 and r.ratio == 1 for r in rows)
    rows = falconer_experiment(25, 73, 73, trials=100)
    assert min(r.ratio for r in rows) >= 0.5
    assert {r.residue_class for r in falconer_experiment(27, 10, 10, trials=1)} == {3}
    with pytest.raises(BadSizes):
        falconer_experiment(5, 26, 1)
    with pytest.raises(BadSizes):
        falconer_experiment(5, 2, 2, generators=("bogus",))
    with pytest.raises(BadSizes):
        subfield_grid(field_of_order(27), 5, np.random.default_rng(0))


def test_falconer_generators_and_summary():
    rows = falconer_experiment(25, 30, 30, trials=3, generators=("uniform", "line", "subfield", "circles"))
    assert len(rows) == 12
    summ = summarize(rows)
    assert set(summ) == {"uniform:below", "line:below", "subfield:below", "circles:below"}
    again = falconer_experiment(25, 30, 30, trials=3, generators=("uniform", "line", "subfield", "circles"))
    assert [r.distances for r in rows] == [r.distances for r in again]
    assert len(ExperimentRow.CSV_FIELDS) == len(rows[0].csv_row())


def test_subfield_grid_distances_stay_in_subfield():
    f = field_of_order(25)
    E = subfield_grid(f, 25, np.random.default_rng(1))
    d = distance_set(PointSetPair(E, E), f, 2)
    assert set(d.tolist()) <= set(range(5))


def test_lemma_check_json():
    c = LemmaCheck("keylemma", 13, 0.5, 4.0, 0.125, [1, 2])
    assert '"lemma": "keylemma"' in c.to_json()


def test_norm_poly_bounds():
    with pytest.raises(BadExponent):
        norm_poly(field_of_order(3), 3)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([5, 7, 9]), st.integers(0, 2**32 - 1))
def test_nu_mass_property(q, seed):
    f = field_of_order(q)
    rng = np.random.default_rng(seed)
    pair = _random_pair(f, rng, 1, q * q // 2)
    assert counting_function(pair, circle_family(f)).total() == len(pair.E) * len(pair.F)
