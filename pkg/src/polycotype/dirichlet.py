"""Bohr transform, multiplicative sequences, and l_1-multiplier diagnostics.

The Bohr transform sends the coefficient of ``z^alpha`` to the coefficient of
``n^(-s)`` with ``n = p_1^alpha_1 p_2^alpha_2 ...``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .index import (
    AllUpToDegree,
    MultiIndex,
    _TABLES,
    bohr_index,
    bohr_integer,
    enumerate_indices,
    prime_table,
)
from .norms import NormConfig, lp_norm
from .poly import VPolynomial, random_polynomial
from .spaces import NormedSpace, dual_exponent, format_exponent, known_cotype, parse_space, vector_from_json, vector_to_json


class DirichletSeries:
    """Finite Dirichlet series ``sum_n a_n n^(-s)`` with vector coefficients."""

    def __init__(self, space: NormedSpace, coeffs: Mapping[int, np.ndarray]):
        self.space = space
        terms = {}
        for n, x in coeffs.items():
            n = int(n)
            if n < 1:
                raise ValueError(f"Dirichlet indices start at 1, got {n}")
            x = space.check(x)
            if np.any(x != 0):
                terms[n] = x
        self.coeffs = dict(sorted(terms.items()))

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, DirichletSeries):
            return NotImplemented
        return (
            self.space == other.space
            and self.coeffs.keys() == other.coeffs.keys()
            and all(np.array_equal(x, other.coeffs[n]) for n, x in self.coeffs.items())
        )

    __hash__ = None

    def __repr__(self):
        top = max(self.coeffs, default=0)
        return f"DirichletSeries({self.space}, terms={len(self)}, max_n={top})"

    def to_json(self) -> dict:
        return {
            "space": self.space.descriptor(),
            "coeffs": [{"n": n, "value": vector_to_json(x)} for n, x in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DirichletSeries":
        space = parse_space(data["space"])
        coeffs = {}
        for term in data["coeffs"]:
            n = int(term["n"])
            if n in coeffs:
                raise ValueError(f"duplicate index n={n}")
            coeffs[n] = vector_from_json(term["value"], space)
        return cls(space, coeffs)


def bohr_transform(f: VPolynomial) -> DirichletSeries:
    return DirichletSeries(f.space, {bohr_integer(a): x for a, x in f.items()})


def inverse_bohr(series: DirichletSeries, max_n: int, num_vars: int | None = None) -> VPolynomial:
    """Power series with ``c_alpha = a_{p^alpha}``; every index must be <= ``max_n``."""
    too_big = [n for n in series.coeffs if n > max_n]
    if too_big:
        raise ValueError(f"indices {too_big[:3]} exceed max_n={max_n}")
    coeffs = {bohr_index(n): x for n, x in series.coeffs.items()}
    return VPolynomial(series.space, coeffs, num_vars)


# ------------------------------------------------- multiplicative sequences


@dataclass(frozen=True)
class MultiplicativeSequence:
    """Completely multiplicative ``b`` fixed by ``b_{p_k}``, k = 1..K; zero at later primes.

    ``sigma`` records a power law ``b_{p_k} = p_k^(-sigma)``, the only case
    for which l_p membership of the infinite sequence is decided.
    """

    prime_values: tuple
    sigma: float | None = None

    @classmethod
    def power_law(cls, sigma: float, num_primes: int) -> "MultiplicativeSequence":
        if not sigma > 0:
            raise ValueError(f"power law needs sigma > 0, got {sigma}")
        ps = prime_table_count(num_primes)
        return cls(tuple(float(p) ** (-sigma) for p in ps), float(sigma))

    @classmethod
    def from_values(cls, values: Sequence) -> "MultiplicativeSequence":
        return cls(tuple(values))

    @property
    def num_primes(self) -> int:
        return len(self.prime_values)

    def value(self, n: int):
        one = Fraction(1) if self._exact() else 1.0
        out = one
        for k, a in bohr_index(n).items:
            if k > self.num_primes:
                return 0 * one
            out = out * self.prime_values[k - 1] ** a
        return out

    def _exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.prime_values)

    def to_json(self) -> dict:
        if self.sigma is not None:
            return {"powerLaw": {"sigma": self.sigma}, "numPrimes": self.num_primes}
        vals = [[float(complex(v).real), float(complex(v).imag)] for v in self.prime_values]
        return {"primeValues": vals}


def prime_table_count(k: int) -> np.ndarray:
    _TABLES.ensure_count(k)
    return _TABLES.primes[:k]


def multiplicative_extend(b: MultiplicativeSequence, n_max: int):
    """``[b_1, ..., b_{n_max}]`` from the prime values.

    Returns a list of Fractions when every prime value is an int or Fraction
    (exact arithmetic), a complex numpy array otherwise.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _TABLES.ensure(n_max)
    spf = _TABLES.spf
    pos = _TABLES.prime_pos
    K = b.num_primes
    exact = b._exact()
    out = [Fraction(0)] * (n_max + 1) if exact else np.zeros(n_max + 1, dtype=complex)
    out[1] = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    for n in range(2, n_max + 1):
        p = int(spf[n])
        k = int(pos[p])
        bp = b.prime_values[k - 1] if k <= K else zero
        out[n] = bp * out[n // p]
    return out[1:]


# ----------------------------------------------------- multiplier report


def power_law_verdict(sigma: float, space: NormedSpace) -> dict:
    """Decide whether ``b_n = n^(-sigma)`` is an l_1-multiplier, from cotype exponents.

    The multiplier property is equivalent to ``(b_{p_k}) in l_{q'}`` (plus
    ``b in B_c0``, automatic for sigma > 0) with q the hypercontractive
    homogeneous cotype, and ``sum_k p_k^(-s)`` converges iff ``s > 1``. When
    the hypercontractive cotype is only bracketed, the sufficient condition
    uses a valid (possibly non-optimal) exponent and the necessary one uses
    the optimal cotype, and the verdict may stay open.
    """
    if not sigma > 0:
        raise ValueError(f"power law needs sigma > 0, got {sigma}")
    meta = known_cotype(space)
    ct = meta.optimal_cotype
    hyp = meta.hypercontractive_cotype
    valid = hyp if not isinstance(hyp, str) else meta.fourier_cotype
    need = sigma * dual_exponent(ct) > 1  # necessary: (b_p) in l_{ct'}
    suff = (not isinstance(valid, str)) and sigma * dual_exponent(valid) > 1
    if suff:
        verdict = "multiplier"
    elif not need:
        verdict = "not a multiplier"
    else:
        verdict = "undetermined"
    threshold_need = 1 / dual_exponent(ct)
    threshold_suff = 1 / dual_exponent(valid) if not isinstance(valid, str) else None
    return {
        "sigma": sigma,
        "optimalCotype": format_exponent(ct),
        "hypercontractiveCotype": hyp if isinstance(hyp, str) else format_exponent(hyp),
        "sufficientIf": f"sigma > {threshold_suff:.6g}" if threshold_suff is not None else "unknown",
        "necessaryIf": f"sigma > {threshold_need:.6g}",
        "sufficient": bool(suff),
        "necessary": bool(need),
        "verdict": verdict,
        "note": meta.note,
    }


def prime_power_partial_sums(values: np.ndarray, exponent: float) -> np.ndarray:
    """``sum_{k <= K} |b_{p_k}|^exponent`` for every K."""
    a = np.abs(np.asarray(values, dtype=complex))
    return np.cumsum(a if exponent == 1 else a**exponent)


def _checkpoints(n: int, per_decade: int = 4) -> list[int]:
    if n < 1:
        return []
    pts = {1, n}
    top = math.log10(n)
    for i in range(int(top * per_decade) + 1):
        pts.add(int(round(10 ** (i / per_decade))))
    return sorted(p for p in pts if 1 <= p <= n)


def multiplier_diagnostic(
    b: MultiplicativeSequence,
    space: NormedSpace,
    p: float = 2.0,
    n_max: int = 10**4,
    trials: int = 5,
    seed: int = 0,
    cfg: NormConfig = NormConfig(),
    num_vars: int = 3,
    degree: int = 4,
) -> dict:
    """Three-part report on ``b`` as an l_1-multiplier for Hardy-Dirichlet series.

    1. verdict (power laws only);
    2. partial sums of ``|b_{p_k}|^{q'}`` over the stored primes;
    3. ``sum_{n <= n_max} ||a_n|| |b_n|`` for random series obtained from random
       polynomials through the Bohr transform, divided by the H_p norm of the
       polynomial.
    """
    meta = known_cotype(space)
    hyp = meta.hypercontractive_cotype
    q = hyp if not isinstance(hyp, str) else meta.optimal_cotype
    qd = dual_exponent(q)
    report: dict = {"space": str(space), "p": "inf" if math.isinf(p) else p, "nMax": n_max, "qDual": qd}
    if isinstance(hyp, str):
        report["descriptiveOnly"] = True
        report["qUsedForTrajectory"] = format_exponent(q)

    big = [k + 1 for k, v in enumerate(b.prime_values) if abs(complex(v)) >= 1]
    report["flags"] = []
    if big:
        report["flags"].append(
            f"|b_p_k| >= 1 for k in {big[:5]}: then |b_(n^j)| >= 1 for all j, "
            "so b lies in no l_p and not in B_c0"
        )

    if b.sigma is not None:
        report["verdict"] = power_law_verdict(b.sigma, space)
    else:
        report["verdict"] = {"verdict": "none", "note": "finite data: trajectory only, no membership verdict"}

    partial = prime_power_partial_sums(np.array([complex(v) for v in b.prime_values]), qd)
    report["trajectory"] = [(k, float(partial[k - 1])) for k in _checkpoints(len(partial))]
    report["trajectoryFull"] = partial

    bn = multiplicative_extend(b, n_max)
    bn_abs = np.abs(np.array([complex(v) for v in bn])) if isinstance(bn, list) else np.abs(bn)
    nv = max(1, min(num_vars, int(np.searchsorted(prime_table(max(n_max, 2)), n_max, side="right"))))
    alphas = [a for a in enumerate_indices(nv, AllUpToDegree(degree)) if _fits(a, n_max)]
    rows = []
    root = np.random.SeedSequence(int(seed))
    for t, child in enumerate(root.spawn(trials)):
        f = random_polynomial(space, nv, alphas, "complexGaussian", np.random.default_rng(child))
        series = bohr_transform(f)
        total = float(sum(float(space.norm(x)) * float(bn_abs[n - 1]) for n, x in series.coeffs.items()))
        h = lp_norm(f, p, cfg.with_seed(cfg.seed + t))
        rows.append(
            {"trial": t, "terms": len(series), "weightedSum": total, "hardyNorm": h.to_json(), "normalized": total / h.value if h.value else None}
        )
    report["empirical"] = rows
    return report


def _fits(alpha: MultiIndex, n_max: int) -> bool:
    try:
        return bohr_integer(alpha) <= n_max
    except OverflowError:
        return False
