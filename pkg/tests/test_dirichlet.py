from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from polycotype.dirichlet import (
    DirichletSeries,
    MultiplicativeSequence,
    bohr_transform,
    inverse_bohr,
    multiplicative_extend,
    multiplier_diagnostic,
    power_law_verdict,
    prime_power_partial_sums,
    prime_table_count,
)
from polycotype.index import MultiIndex, primes
from polycotype.norms import NormConfig
from polycotype.poly import VPolynomial
from polycotype.spaces import SchattenSpace, SequenceSpace

L2 = SequenceSpace(2, 2)


class TestBohrTransform:
    def test_twelve(self):
        x = np.array([1, 2j])
        s = bohr_transform(VPolynomial(L2, {MultiIndex((2, 1)): x}))
        assert list(s.coeffs) == [12] and np.array_equal(s.coeffs[12], x)

    def test_constant(self):
        x = np.array([1, 0])
        assert list(bohr_transform(VPolynomial(L2, {MultiIndex(()): x})).coeffs) == [1]

    def test_round_trip_random(self):
        g = np.random.default_rng(0)
        for _ in range(1000):
            ns = g.integers(1, 10**6 + 1, size=g.integers(1, 6))
            s = DirichletSeries(L2, {int(n): g.standard_normal(2) + 1j for n in ns})
            f = inverse_bohr(s, 10**6)
            assert bohr_transform(f) == s

    def test_max_n(self):
        s = DirichletSeries(L2, {50: np.array([1, 0])})
        with pytest.raises(ValueError):
            inverse_bohr(s, 49)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            DirichletSeries(L2, {0: np.array([1, 0])})

    def test_json(self):
        s = DirichletSeries(SchattenSpace(2, 2), {6: np.eye(2), 9: np.ones((2, 2)) * 1j})
        assert DirichletSeries.from_json(json.loads(json.dumps(s.to_json()))) == s


class TestMultiplicative:
    def test_one_over_n(self):
        ps = primes(1229)  # all primes <= 10^4
        b = MultiplicativeSequence.from_values([Fraction(1, p) for p in ps])
        bn = multiplicative_extend(b, 10**4)
        assert all(bn[n - 1] == Fraction(1, n) for n in range(1, 10**4 + 1))

    def test_twelve(self):
        b = MultiplicativeSequence.from_values([Fraction(1, 2), Fraction(1, 3)])
        assert b.value(12) == Fraction(1, 12)
        assert multiplicative_extend(b, 12)[11] == Fraction(1, 12)

    def test_zero_beyond_stored_primes(self):
        b = MultiplicativeSequence.from_values([0.5, 0.25])
        assert b.value(5) == 0
        assert multiplicative_extend(b, 10)[9] == 0  # 10 = 2 * 5

    def test_pair_scan(self):
        b = MultiplicativeSequence.power_law(0.7, 1229)
        bn = multiplicative_extend(b, 10**4)
        for m in range(1, 101):
            for n in range(1, 10**4 // m + 1):
                assert bn[m * n - 1] == pytest.approx(bn[m - 1] * bn[n - 1], rel=1e-12)

    def test_power_law_values(self):
        b = MultiplicativeSequence.power_law(1.0, 10)
        bn = multiplicative_extend(b, 30)
        assert np.allclose(bn, 1 / np.arange(1, 31))

    def test_power_law_sigma(self):
        with pytest.raises(ValueError):
            MultiplicativeSequence.power_law(0.0, 5)

    def test_prime_table_count(self):
        assert list(prime_table_count(4)) == [2, 3, 5, 7]


class TestVerdict:
    @pytest.mark.parametrize("sigma,expected", [(0.4, "not a multiplier"), (0.5, "not a multiplier"), (0.6, "multiplier")])
    def test_hilbert(self, sigma, expected):
        assert power_law_verdict(sigma, L2)["verdict"] == expected

    def test_l4(self):
        # q = 4, q' = 4/3: threshold 3/4
        assert power_law_verdict(0.7, SequenceSpace(4, 3))["verdict"] == "not a multiplier"
        assert power_law_verdict(0.8, SequenceSpace(4, 3))["verdict"] == "multiplier"

    def test_schatten_open_range(self):
        # S_1: hypercontractive cotype unknown, optimal cotype 2 (necessary sigma > 1/2),
        # Fourier cotype inf is valid but gives no sufficient condition
        sp = SchattenSpace(1, 2)
        assert power_law_verdict(0.4, sp)["verdict"] == "not a multiplier"
        assert power_law_verdict(0.9, sp)["verdict"] == "undetermined"

    def test_schatten_between(self):
        sp = SchattenSpace(1.5, 2)  # Fourier cotype 3: sufficient sigma > 2/3
        assert power_law_verdict(0.6, sp)["verdict"] == "undetermined"
        assert power_law_verdict(0.7, sp)["verdict"] == "multiplier"


class TestDiagnostic:
    def test_prime_zeta_two(self):
        # sum over primes of p^-2; frozen from mpmath.primezeta(2) = 0.45224742004...
        b = MultiplicativeSequence.power_law(1.0, 10**5)
        sums = prime_power_partial_sums(np.array(b.prime_values), 2.0)
        assert sums[-1] == pytest.approx(0.4522474200, abs=1e-6)
        assert np.all(np.diff(sums) >= 0)

    def test_flags_large_values(self):
        b = MultiplicativeSequence.from_values([1.0, 0.5])
        rep = multiplier_diagnostic(b, L2, 2.0, 100, 2, 0, NormConfig(samples=500))
        assert rep["flags"] and rep["verdict"]["verdict"] == "none"

    def test_report(self):
        b = MultiplicativeSequence.power_law(0.8, 50)
        rep = multiplier_diagnostic(b, SequenceSpace(3, 2), 2.0, 1000, 3, 0, NormConfig(samples=500))
        assert rep["verdict"]["verdict"] == "multiplier"
        assert len(rep["empirical"]) == 3
        for row in rep["empirical"]:
            assert type(row["weightedSum"]) is float and row["weightedSum"] > 0
        json.dumps({k: v for k, v in rep.items() if k != "trajectoryFull"})

    def test_descriptive_for_unknown(self):
        b = MultiplicativeSequence.power_law(0.8, 20)
        rep = multiplier_diagnostic(b, SchattenSpace(1, 2), 2.0, 100, 1, 0, NormConfig(samples=500))
        assert rep["descriptiveOnly"]
