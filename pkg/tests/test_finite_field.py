import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ffext.errors import CapExceeded, EvenCharacteristic, NotPrime, ZeroInverse
from ffext.finite_field import (construct_field, field_of_order, gauss_sum, gauss_sum_closed_form,
                                gauss_sum_squared, is_irreducible, odd_prime_powers, prime_power)

SMALL_Q = [q for q in odd_prime_powers(3, 49)]


# independent oracle: schoolbook polynomial arithmetic on coefficient lists

def _polymul(a, b, modulus, p):
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            for i in range(k + 1):
                prod[deg - k + i] = (prod[deg - k + i] - c * modulus[i]) % p
    return (prod + [0] * k)[:k]


def _mult_matrix_trace(f, a):
    """Trace of the F_p-linear map x -> a x, read off the power basis."""
    total = 0
    for i in range(f.k):
        basis = [0] * f.k
        basis[i] = 1
        img = _polymul(list(f.digits[a]), basis, list(f.modulus), f.p)
        total += img[i]
    return total % f.p


def test_construct_examples():
    f5 = construct_field(5, 1)
    assert f5.q == 5 and f5.modulus == (0, 1)
    f9 = construct_field(3, 2)
    assert f9.modulus == (1, 0, 1)
    assert f9.modulus_text() == "x^2 + 1"
    with pytest.raises(NotPrime):
        construct_field(4, 1)
    with pytest.raises(EvenCharacteristic):
        construct_field(2, 3)
    with pytest.raises(CapExceeded):
        construct_field(3, 10)


def test_modulus_is_lexicographically_smallest():
    for p, k in [(3, 2), (3, 3), (5, 2), (7, 2), (3, 4)]:
        f = construct_field(p, k)
        assert is_irreducible(f.modulus, p)
        # scan monic candidates in order, comparing c0 first
        cands = sorted((c[::-1] + (1,) for c in itertools.product(range(p), repeat=k)), key=lambda m: m[:k])
        first = next(m for m in cands if is_irreducible(m, p))
        assert first == f.modulus


def test_f9_has_x2_plus_1_root_free():
    assert all((x * x + 1) % 3 for x in range(3))


def test_field_ops_examples():
    f5 = construct_field(5)
    assert f5.inv(2) == 3
    f9 = construct_field(3, 2)
    theta = f9([0, 1])
    assert theta * theta == f9(-1)
    assert (theta * theta).value == 2
    with pytest.raises(ZeroInverse):
        f5.inv(0)
    with pytest.raises(ZeroDivisionError):
        f9.zero.inverse()


@pytest.mark.parametrize("q", SMALL_Q)
def test_multiplication_matches_polynomial_oracle(q):
    f = field_of_order(q)
    mod = list(f.modulus)
    for a in range(q):
        ca = list(f.digits[a])
        for b in range(q):
            cb = list(f.digits[b])
            assert f.index_of(_polymul(ca, cb, mod, f.p)) == f.mul(a, b)


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    f = field_of_order(q)
    add, mul = f.add_table, f.mul_table
    e = f.elements()
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    # associativity and distributivity over all triples
    assert np.array_equal(add[add[:, :, None], e[None, None, :]], add[e[:, None, None], add[None, :, :]])
    assert np.array_equal(mul[mul[:, :, None], e[None, None, :]], mul[e[:, None, None], mul[None, :, :]])
    lhs = mul[e[:, None, None], add[None, :, :]]
    rhs = add[mul[:, :, None], mul[:, None, :]]
    assert np.array_equal(lhs, rhs)
    nz = e[1:]
    assert np.all(f.mul(nz, f.inv(nz)) == 1)
    assert np.all(f.add(e, f.neg(e)) == 0)
    assert np.all(f.pow(nz, q - 1) == 1)


@pytest.mark.parametrize("q", SMALL_Q)
def test_log_tables_are_a_bijection(q):
    f = field_of_order(q)
    assert len(f.exp_table) == q - 1
    assert len(set(f.exp_table.tolist())) == q - 1


@pytest.mark.parametrize("q", [9, 25, 27, 49, 81, 125])
def test_trace_matches_multiplication_matrix_oracle(q):
    f = field_of_order(q)
    for a in range(q):
        assert f.trace(a) == _mult_matrix_trace(f, a)


def test_trace_examples():
    for q in [5, 9, 27, 25]:
        f = field_of_order(q)
        assert f.trace(0) == 0
        assert f.trace(1) == f.k % f.p
    f9 = construct_field(3, 2)
    assert f9.trace(f9.index_of([0, 1])) == 0


def test_chi_examples():
    f5 = construct_field(5)
    assert f5.chi(0) == pytest.approx(1)
    assert abs(f5.chi(1) - cmath.exp(2j * math.pi / 5)) < 1e-15
    for q in SMALL_Q:
        assert abs(field_of_order(q).chi_table.sum()) < 1e-10


@pytest.mark.parametrize("q", SMALL_Q)
def test_chi_homomorphism(q):
    f = field_of_order(q)
    c = f.chi_table
    err = np.abs(c[f.add_table] - c[:, None] * c[None, :]).max()
    assert err <= 1e-10


@pytest.mark.parametrize("q", odd_prime_powers(3, 121))
def test_character_orthogonality(q):
    f = field_of_order(q)
    sums = f.char_matrix[1:].sum(axis=1)
    assert np.abs(sums).max() <= 1e-9


def test_eta_examples():
    f5 = construct_field(5)
    assert f5.eta(0) == 0
    assert f5.eta(2) == -1
    assert f5.eta(4) == 1
    for q in odd_prime_powers(3, 121):
        f = field_of_order(q)
        if q % 4 == 3:
            assert f.eta(f.neg(1)) == -1
        squares = set(f.mul(f.elements()[1:], f.elements()[1:]).tolist())
        assert all((f.eta(a) == 1) == (a in squares) for a in range(1, q))


def test_gauss_examples():
    assert abs(gauss_sum(field_of_order(5)) - math.sqrt(5)) < 1e-9
    assert abs(gauss_sum(field_of_order(3)) - 1j * math.sqrt(3)) < 1e-9
    assert abs(gauss_sum(field_of_order(9)) - 3) < 1e-9


@pytest.mark.parametrize("q", odd_prime_powers(3, 121) + [125, 243])
def test_gauss_closed_form_and_powers(q):
    f = field_of_order(q)
    g = gauss_sum(f)
    assert abs(g - gauss_sum_closed_form(f)) <= 1e-8
    assert abs(g**2 - gauss_sum_squared(f)) <= 1e-8
    if q % 4 == 1:
        assert abs(g**2 - q) <= 1e-8
    assert abs(g**4 - q * q) <= 1e-6


def test_prime_power_helpers():
    assert prime_power(81) == (3, 4)
    assert prime_power(12) is None
    assert odd_prime_powers(20, 30) == [23, 25, 27, 29]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([27, 49, 121, 125]), st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_axioms_sampled_large(q, a, b, c):
    f = field_of_order(q)
    a, b, c = a % q, b % q, c % q
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert abs(f.chi(f.add(a, b)) - f.chi(a) * f.chi(b)) <= 1e-10
    if a:
        assert f.mul(a, f.inv(a)) == 1
        assert f.pow(a, -1) == f.inv(a)
