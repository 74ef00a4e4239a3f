import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusdescent.arith import (
    REAL,
    Place,
    SquareClass,
    crt,
    factorize,
    hensel_solve,
    hilbert_symbol,
    hilbert_relevant_places,
    is_local_square,
    is_prime,
    jacobi,
    legendre,
    local_basis,
    local_square_class,
    prime_stream,
    square_class,
    valuation,
)

from oracles import conic_soluble_bruteforce, is_square_mod_enumeration

# desk-scale values: products of three test rationals stay far below the
# deterministic Miller-Rabin certification limit
nonzero_rationals = st.fractions(
    min_value=-10**4, max_value=10**4, max_denominator=200
).filter(lambda x: x != 0)


# ---------------------------------------------------------------------------
# primality / factorization
# ---------------------------------------------------------------------------


def test_is_prime_small():
    primes = [p for p in range(2, 100) if is_prime(p)]
    assert primes[:10] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_prime(1)
    assert not is_prime(0)
    assert is_prime(2**31 - 1)
    assert not is_prime(2**32 + 1)


def test_is_prime_rejects_oversized():
    with pytest.raises(ValueError):
        is_prime(10**25)


def test_factorize():
    assert factorize(720) == {2: 4, 3: 2, 5: 1}
    assert factorize(-720) == {2: 4, 3: 2, 5: 1}
    assert factorize(1) == {}
    n = 1000003 * 999983
    assert factorize(n) == {999983: 1, 1000003: 1}


# ---------------------------------------------------------------------------
# valuations and square classes
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "x,p,expected",
    [(24, 2, 3), (1, 7, 0), (Fraction(9, 14), 7, -1), (Fraction(-8, 9), 3, -2)],
)
def test_valuation(x, p, expected):
    assert valuation(x, p) == expected


def test_valuation_rejects_zero_and_real():
    with pytest.raises(ValueError):
        valuation(0, 5)
    with pytest.raises(ValueError):
        valuation(3, REAL)


@pytest.mark.parametrize(
    "x,expected",
    [
        (18, SquareClass(1, (2,))),
        (-12, SquareClass(-1, (3,))),
        (1, SquareClass(1, ())),
        (Fraction(4, 9), SquareClass(1, ())),
        (Fraction(-5, 8), SquareClass(-1, (2, 5))),
    ],
)
def test_square_class(x, expected):
    assert square_class(x) == expected


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=200, deadline=None, derandomize=True)
def test_square_class_homomorphism(x, y):
    assert square_class(x * y) == square_class(x) * square_class(y)
    assert square_class(x * y * y) == square_class(x)


def test_places_ordered():
    places = [Place.finite(5), REAL, Place.finite(2), Place.finite(3)]
    assert [str(v) for v in sorted(places)] == ["real", "2", "3", "5"]
    with pytest.raises(ValueError):
        Place.finite(6)


# ---------------------------------------------------------------------------
# quadratic symbols
# ---------------------------------------------------------------------------


def test_legendre_examples():
    assert legendre(2, 7) == 1  # 3^2 = 2 mod 7
    assert legendre(14, 7) == 0
    assert legendre(3, 7) == -1  # squares mod 7 are {1, 2, 4}


def test_legendre_matches_enumeration():
    for p in (3, 5, 7, 11, 13):
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)


def test_legendre_agrees_with_jacobi():
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        for a in range(-30, 30):
            if a % p == 0:
                continue
            assert legendre(a, p) == jacobi(a, p)


# ---------------------------------------------------------------------------
# local squares
# ---------------------------------------------------------------------------


def test_is_local_square_examples():
    assert is_local_square(2, Place.finite(7))
    assert not is_local_square(-5, REAL)
    assert is_local_square(17, Place.finite(2))
    assert not is_local_square(2, Place.finite(3))
    assert not is_local_square(5, Place.finite(2))  # 5 = 5 mod 8


@given(nonzero_rationals)
@settings(max_examples=120, deadline=None, derandomize=True)
def test_is_local_square_matches_enumeration(x):
    for v in (REAL, Place.finite(2), Place.finite(3), Place.finite(7)):
        assert is_local_square(x, v) == is_square_mod_enumeration(x, v)


def test_local_square_class_dimensions():
    assert local_square_class(5, REAL).dim == 1
    assert local_square_class(5, Place.finite(3)).dim == 2
    assert local_square_class(5, Place.finite(2)).dim == 3


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=100, deadline=None, derandomize=True)
def test_local_square_class_homomorphism(x, y):
    for v in (REAL, Place.finite(2), Place.finite(5)):
        assert (
            local_square_class(x * y, v)
            == local_square_class(x, v) * local_square_class(y, v)
        )


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=100, deadline=None, derandomize=True)
def test_local_class_depends_on_square_class_only(x, y):
    for v in (REAL, Place.finite(2), Place.finite(7)):
        assert local_square_class(x * y * y, v) == local_square_class(x, v)


def test_local_basis_spans():
    # every local class is a product of basis classes
    for v in (REAL, Place.finite(2), Place.finite(5)):
        basis = local_basis(v)
        cls = local_square_class(Fraction(-50, 7), v)
        value = Fraction(1)
        for bit, gen in zip(cls.coordinates, basis):
            if bit:
                value *= gen
        assert local_square_class(value, v) == cls


# ---------------------------------------------------------------------------
# Hilbert symbol
# ---------------------------------------------------------------------------


def test_hilbert_examples():
    assert hilbert_symbol(1, 17, REAL) == 0
    assert hilbert_symbol(-1, -1, REAL) == 1
    assert hilbert_symbol(-1, -1, Place.finite(2)) == 1
    assert hilbert_symbol(3, 7, Place.finite(3)) == 0


def test_hilbert_symmetry_and_square_invariance():
    places = [REAL, Place.finite(2), Place.finite(3), Place.finite(5)]
    values = [1, -1, 2, 3, 5, 6, -10, Fraction(3, 4), Fraction(-7, 5)]
    for v in places:
        for a in values:
            for b in values:
                assert hilbert_symbol(a, b, v) == hilbert_symbol(b, a, v)
                assert hilbert_symbol(a * 9, b, v) == hilbert_symbol(a, b, v)


@given(nonzero_rationals, nonzero_rationals, nonzero_rationals)
@settings(max_examples=150, deadline=None, derandomize=True)
def test_hilbert_bilinear(a, b, c):
    for v in (REAL, Place.finite(2), Place.finite(3)):
        left = hilbert_symbol(a * b, c, v)
        right = hilbert_symbol(a, c, v) ^ hilbert_symbol(b, c, v)
        assert left == right


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=200, deadline=None, derandomize=True)
def test_hilbert_reciprocity(a, b):
    total = 0
    for v in hilbert_relevant_places(a, b):
        total ^= hilbert_symbol(a, b, v)
    assert total == 0


def test_hilbert_at_large_prime():
    p = 1_000_003  # prime
    v = Place.finite(p)
    assert hilbert_symbol(p, p, v) == hilbert_symbol(-1, p, v)  # <p,p> = <-1,p>
    assert hilbert_symbol(4, p, v) == 0
    # unit arguments pair trivially at odd places
    assert hilbert_symbol(3, 5, v) == 0


def test_hilbert_vs_bruteforce_small():
    for p in (2, 3, 5):
        v = Place.finite(p)
        for a in range(-9, 10):
            for b in range(-9, 10):
                if a == 0 or b == 0:
                    continue
                closed = hilbert_symbol(a, b, v)
                assert (closed == 0) == conic_soluble_bruteforce(a, b, p)


# ---------------------------------------------------------------------------
# Hensel lifting
# ---------------------------------------------------------------------------


def test_hensel_sqrt2_at_7():
    result = hensel_solve({(2,): 1, (0,): -2}, 7, 2)
    assert result.status == "witness"
    assert result.witness == (10,)  # lifts 3 mod 7
    assert result.smooth_var == 0


def test_hensel_certified_none():
    result = hensel_solve({(2,): 1, (0,): -2}, 3, 3)
    assert result.status == "none"


def test_hensel_trivial_root():
    result = hensel_solve({(2,): 1, (0,): -1}, 5, 2)
    assert result.status == "witness"
    assert result.witness == (1,)


def test_hensel_two_variables():
    # x^2 + y^2 = 1 over Z_7 to depth 3
    result = hensel_solve({(2, 0): 1, (0, 2): 1, (0, 0): -1}, 7, 3)
    assert result.status == "witness"
    x, y = result.witness
    assert (x * x + y * y - 1) % 7**3 == 0


def test_hensel_witness_reduces_correctly():
    result = hensel_solve({(2,): 1, (0,): -17}, 2, 6)
    assert result.status == "witness"
    (x,) = result.witness
    assert (x * x - 17) % 2**6 == 0


def test_hensel_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        hensel_solve({(2,): Fraction(1, 7), (0,): 1}, 7, 2)


# ---------------------------------------------------------------------------
# prime streams and CRT
# ---------------------------------------------------------------------------


def test_prime_stream_examples():
    assert list(itertools.islice(prime_stream(10, {13}), 3)) == [11, 17, 19]
    assert list(itertools.islice(prime_stream(1, set()), 3)) == [2, 3, 5]
    assert list(itertools.islice(prime_stream(0, {2, 3}), 3)) == [5, 7, 11]


def test_crt():
    x, m = crt([(2, 3), (3, 5), (2, 7)])
    assert m == 105
    assert x % 3 == 2 and x % 5 == 3 and x % 7 == 2
