from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from polycotype.index import Homogeneous, MultiIndex
from polycotype.mon import (
    PowerLaw,
    abs_monomial_sum,
    b_criterion,
    decreasing_rearrangement,
    divergence_witness,
    eroica_chain_check,
    homogeneous_projection_check,
    power_law_r_n,
    witness_polynomial,
    witness_trajectory,
    witness_weights,
)
from polycotype.norms import NormConfig, sup_norm_grid
from polycotype.poly import VPolynomial, random_polynomial
from polycotype.spaces import SequenceSpace

# frozen from mpmath.harmonic(10**4)
H_10K = 9.78760603604438
# frozen from mpmath.harmonic(10**6) / log(10**6)
R_1M = 1.04178029921368


class TestMonomialSum:
    def test_geometric(self):
        assert abs_monomial_sum([0.5], 5).product == pytest.approx(2.0)

    def test_two_point(self):
        res = abs_monomial_sum([0.5, 0.25], 20)
        # brute force over all (a, b) with a + b <= 20
        brute = sum(0.5**a * 0.25**b for a in range(21) for b in range(21 - a))
        assert res.partial == pytest.approx(brute, rel=1e-14)
        assert res.product == pytest.approx(8 / 3, rel=1e-15)
        assert 0 <= res.gap <= res.tail_bound

    def test_brute_force_three_vars(self):
        z = np.array([0.3, 0.6, 0.2])
        brute = sum(np.prod(z ** np.array(a)) for a in itertools.product(range(9), repeat=3) if sum(a) <= 8)
        assert abs_monomial_sum(z, 8).partial == pytest.approx(brute, rel=1e-13)

    def test_complex_uses_modulus(self):
        assert abs_monomial_sum([0.5j], 10).partial == pytest.approx(abs_monomial_sum([0.5], 10).partial)

    def test_rejects_outside_disc(self):
        with pytest.raises(ValueError):
            abs_monomial_sum([1.0, 0.1], 3)

    def test_zero_point(self):
        res = abs_monomial_sum([0.0, 0.0], 4)
        assert res.partial == res.product == 1.0 and res.tail_bound == 0.0


class TestRearrangement:
    def test_example(self):
        assert list(decreasing_rearrangement([0.1, 0.5, 0.3])) == [0.5, 0.3, 0.1]

    def test_sorted_unchanged(self):
        u = np.array([3.0, 2.0, 2.0, 1.0])
        assert np.array_equal(decreasing_rearrangement(u), u)

    def test_permutation_invariant(self, rng):
        u = rng.standard_normal(50)
        assert np.array_equal(np.abs(decreasing_rearrangement(u)), np.abs(decreasing_rearrangement(rng.permutation(u))))


class TestBCriterion:
    def test_finite_support(self):
        diag = b_criterion([1.0, 0.5, 0.25], [10, 100, 1000])
        rs = [r for _, r in diag.checkpoints]
        assert rs[0] > rs[1] > rs[2] and "finite" in diag.annotation

    def test_theta_one(self):
        diag = b_criterion(PowerLaw(1.0, 0.5), [10**6])
        assert diag.checkpoints[0][1] == pytest.approx(R_1M, rel=1e-10)
        assert power_law_r_n(1.0, 10**6) == pytest.approx(R_1M, rel=1e-12)

    def test_trajectories_settle(self):
        lo = b_criterion(PowerLaw(0.9, 0.5), [10**4, 10**6]).checkpoints
        hi = b_criterion(PowerLaw(1.1, 0.5), [10**4, 10**6]).checkpoints
        assert lo[1][1] < lo[0][1] and hi[1][1] > 1

    def test_annotation(self):
        assert "inside B" in b_criterion(PowerLaw(0.9, 0.5), [10]).annotation
        assert "boundary" in b_criterion(PowerLaw(1.0, 0.5), [10]).annotation
        assert "outside" in b_criterion(PowerLaw(1.1, 0.5), [10]).annotation

    @pytest.mark.parametrize("bad", [[], [1, 10], [10, 10], [100, 10]])
    def test_bad_checkpoints(self, bad):
        with pytest.raises(ValueError):
            b_criterion(PowerLaw(1.0, 0.5), bad)


class TestWitness:
    def test_harmonic(self):
        z = PowerLaw(1.0, 1.0)
        rep = divergence_witness(SequenceSpace(math.inf, 10**4), z, 10**4)
        assert rep["sum"] == pytest.approx(H_10K, abs=1e-10)
        assert rep["supNorm"] == 1.0

    def test_sup_matches_grid(self):
        sp = SequenceSpace(math.inf, 3)
        w = witness_weights(np.array([1, 0.5, 0.2]), math.inf)
        f = witness_polynomial(sp, w)
        assert sup_norm_grid(f).value == pytest.approx(divergence_witness(sp, [1, 0.5, 0.2], 3)["supNorm"])

    def test_summable_z_bounded(self):
        z = PowerLaw(1.0, 2.0)
        bound = math.pi**2 / 6
        for n in (10, 100, 1000):
            assert divergence_witness(SequenceSpace(math.inf, n), z, n)["sum"] <= bound

    def test_l2_pairing(self, rng):
        z = rng.uniform(0, 0.9, 20)
        rep = divergence_witness(SequenceSpace(2, 20), z, 20)
        assert rep["sum"] == pytest.approx(np.sum(z**2), rel=1e-12)
        assert rep["supNorm"] == pytest.approx(np.linalg.norm(z), rel=1e-12)
        assert rep["ratio"] == pytest.approx(np.linalg.norm(z), rel=1e-12)

    def test_ones_weights(self):
        rep = divergence_witness(SequenceSpace(2, 4), [0.5, 0.5, 0.5, 0.5], 4, "ones")
        assert rep["sum"] == pytest.approx(2.0) and rep["supNorm"] == pytest.approx(2.0)

    def test_small_q_rejected(self):
        with pytest.raises(ValueError):
            divergence_witness(SequenceSpace(1.5, 3), [0.1, 0.1, 0.1], 3)

    def test_trajectory_slope(self):
        traj = witness_trajectory(math.inf, PowerLaw(1.0, 1.0), [100, 1000, 10_000])
        assert abs(traj["logSlope"] - 1) < 0.1


class TestEroica:
    def test_single_term_links(self):
        sp = SequenceSpace(2, 3)
        f = VPolynomial(sp, {MultiIndex((1, 1)): np.array([1.0, 2.0, 0.0])})
        rep = eroica_chain_check(f, [0.5, 0.5], NormConfig("mc", 5000, 0))
        l1, l2, l3 = rep["links"]
        assert l1["lhs"] <= l1["rhs"]
        assert l2["parsevalGap"] == pytest.approx(0.0, abs=1e-14)
        assert l3["l2OverL1"] == pytest.approx(1.0)
        assert rep["pass"]

    def test_holder_exact(self, rng):
        for t in range(100):
            f = random_polynomial(SequenceSpace(2, 3), 3, Homogeneous(2), "complexGaussian", t)
            rep = eroica_chain_check(f, rng.uniform(0, 0.95, 3), NormConfig("mc", 200, t))
            assert rep["links"][0]["violation"] <= 1e-10

    def test_non_hilbert(self):
        f = random_polynomial(SequenceSpace(3, 3), 2, Homogeneous(2), "unitSphere", 0)
        with pytest.raises(ValueError):
            eroica_chain_check(f, [0.1, 0.1])

    def test_projection(self):
        f = random_polynomial(SequenceSpace(2, 2), 2, Homogeneous(2), "unitSphere", 0)
        g = f + random_polynomial(SequenceSpace(2, 2), 2, Homogeneous(1), "unitSphere", 1)
        rep = homogeneous_projection_check(g, 2, NormConfig("mc", 20_000, 0))
        assert rep["pass"]
