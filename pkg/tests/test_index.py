from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycotype.index import (
    AllUpToDegree,
    Homogeneous,
    Linear,
    MultiIndex,
    SingleVariable,
    bohr_index,
    bohr_integer,
    encode_base,
    enumerate_indices,
    factorize,
    grlex_key,
    nth_prime,
    parse_index_set,
    primes,
)


def entries(alphas, n):
    return [a.padded(n) for a in alphas]


class TestMultiIndex:
    def test_trailing_zeros_trimmed(self):
        assert MultiIndex((1, 0, 2, 0, 0)) == MultiIndex((1, 0, 2))
        assert hash(MultiIndex((3, 0))) == hash(MultiIndex((3,)))
        assert MultiIndex((1, 0, 2)).entries == (1, 0, 2)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            MultiIndex((1, -1))

    def test_degree_and_getitem(self):
        a = MultiIndex((2, 0, 5))
        assert a.degree == 7
        assert a[0] == 2 and a[1] == 0 and a[2] == 5 and a[-1] == 5
        assert a.padded(5) == (2, 0, 5, 0, 0)

    def test_add(self):
        assert (MultiIndex((1, 2)) + MultiIndex((0, 0, 3))).entries == (1, 2, 3)

    def test_unit(self):
        assert MultiIndex.unit(3).entries == (0, 0, 1)

    def test_json_round_trip(self):
        a = MultiIndex((0, 4, 0, 1))
        assert MultiIndex.from_json(a.to_json()) == a

    def test_grlex(self):
        alphas = [MultiIndex(t) for t in [(0, 2), (2, 0), (1, 1), (1,), ()]]
        got = [a.padded(2) for a in sorted(alphas, key=grlex_key)]
        assert got == [(0, 0), (1, 0), (2, 0), (1, 1), (0, 2)]


class TestEnumerate:
    def test_homogeneous_two_vars(self):
        assert entries(enumerate_indices(2, Homogeneous(2)), 2) == [(2, 0), (1, 1), (0, 2)]

    def test_linear(self):
        assert entries(enumerate_indices(3, Linear()), 3) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_homogeneous_count_brute_force(self):
        # oracle: loop over all exponent triples <= 4
        brute = [t for t in itertools.product(range(5), repeat=3) if sum(t) == 4]
        got = enumerate_indices(3, Homogeneous(4))
        assert len(got) == len(brute) == 15
        assert set(entries(got, 3)) == set(brute)

    @pytest.mark.parametrize("n", range(1, 9))
    @pytest.mark.parametrize("m", range(1, 7))
    def test_stars_and_bars(self, n, m):
        assert len(enumerate_indices(n, Homogeneous(m))) == math.comb(m + n - 1, m)

    def test_homogeneous_zero_rejected(self):
        with pytest.raises(ValueError):
            Homogeneous(0)

    def test_single_variable(self):
        assert entries(enumerate_indices(1, SingleVariable(3)), 1) == [(0,), (1,), (2,), (3,)]

    def test_up_to_degree(self):
        got = enumerate_indices(2, AllUpToDegree(2))
        assert len(got) == 6
        assert all(AllUpToDegree(2).contains(a) for a in got)

    def test_no_duplicates(self):
        got = enumerate_indices(4, AllUpToDegree(3))
        assert len(set(got)) == len(got)

    def test_parse(self):
        assert isinstance(parse_index_set("linear"), Linear)
        assert parse_index_set("homogeneous:3") == Homogeneous(3)
        assert parse_index_set("single:4") == SingleVariable(4)
        assert parse_index_set("upto:2") == AllUpToDegree(2)
        with pytest.raises(ValueError):
            parse_index_set("bogus")


class TestEncoding:
    def test_examples(self):
        assert encode_base(MultiIndex((1, 2)), 2) == 7
        assert encode_base(MultiIndex(()), 5) == 0

    def test_injective_81(self):
        codes = {encode_base(MultiIndex(t), 2) for t in itertools.product(range(3), repeat=4)}
        assert len(codes) == 81

    def test_entry_too_large(self):
        with pytest.raises(ValueError):
            encode_base(MultiIndex((3,)), 2)


class TestPrimes:
    def test_small(self):
        assert primes(1) == [2]
        assert primes(5) == [2, 3, 5, 7, 11]

    def test_ten_thousandth(self):
        # frozen from an independent sieve (sympy.prime)
        assert nth_prime(10_000) == 104729

    def test_factorize(self):
        assert factorize(360) == {2: 3, 3: 2, 5: 1}
        assert factorize(1) == {}


class TestBohr:
    def test_examples(self):
        assert bohr_index(12).entries == (2, 1)
        assert bohr_index(360).entries == (3, 2, 1)
        assert bohr_index(1).entries == ()
        assert bohr_integer(MultiIndex((3, 2, 1))) == 360

    def test_round_trip_first_ten_thousand(self):
        for n in range(1, 10_001):
            assert bohr_integer(bohr_index(n)) == n

    @given(st.integers(1, 10**5), st.integers(1, 10**5))
    @settings(max_examples=200, deadline=None)
    def test_multiplicative_on_exponents(self, a, b):
        assert bohr_index(a * b) == bohr_index(a) + bohr_index(b)

    def test_overflow(self):
        with pytest.raises(OverflowError):
            bohr_integer(MultiIndex((70,)))

    def test_invalid(self):
        with pytest.raises(ValueError):
            bohr_index(0)

    def test_large_prime_position(self):
        p = nth_prime(2000)
        assert bohr_index(p) == MultiIndex.unit(2000)
        assert isinstance(bohr_integer(MultiIndex.unit(2000)), int)
        assert np.int64(bohr_integer(MultiIndex.unit(2000))) == p
