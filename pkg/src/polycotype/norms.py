"""L_p(T^N, X) norms of vector-valued polynomials.

Three routes:

* ``exactParseval`` -- for Hilbert-space coefficients and p = 2 the monomials
  are orthonormal, so the norm is ``(sum_alpha ||x_alpha||^2)^(1/2)``.
* ``grid`` -- equispaced tensor grid on T^N. For p = 2 over a Hilbert space
  this is exact as soon as there are more points per variable than the
  largest exponent; otherwise it is periodic trapezoid quadrature.
* ``monteCarlo`` -- independent uniform angles (product Haar measure).

Monte-Carlo samples are drawn in fixed blocks whose generators are derived
from ``(seed, block number)``, so a given ``(seed, samples)`` pair yields the
same points no matter how blocks are distributed over workers. Two norms
computed from the same ``(num_vars, samples, seed)`` share their points
(common random numbers).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .poly import VPolynomial

BLOCK = 8192
MAX_GRID_POINTS = 10**7
DEFAULT_SAMPLES = int(os.environ.get("POLYCOTYPE_SAMPLES", "20000"))


@dataclass(frozen=True)
class NormEstimate:
    value: float
    std_error: float
    samples: int
    method: str
    p: float
    lower_bound: bool = False

    def to_json(self) -> dict:
        out = {
            "value": self.value,
            "stdError": self.std_error,
            "samples": self.samples,
            "method": self.method,
            "p": "inf" if math.isinf(self.p) else self.p,
        }
        if self.lower_bound:
            out["certifiedLowerBound"] = True
        return out


@dataclass(frozen=True)
class NormConfig:
    """How right-hand-side norms are computed.

    ``method`` is one of ``mc``, ``grid``, ``exact`` or ``auto`` (Parseval
    when it applies, Monte-Carlo otherwise).
    """

    method: str = "auto"
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    points_per_var: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.method not in ("mc", "grid", "exact", "auto"):
            raise ValueError(f"unknown norm method {self.method!r}")

    def with_seed(self, seed: int) -> "NormConfig":
        return NormConfig(self.method, self.samples, seed, self.points_per_var, self.workers)

    def to_json(self) -> dict:
        return asdict(self)


# -------------------------------------------------------------- sampling


def _block_angles(num_vars: int, seed: int, block: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(block,))
    return np.random.default_rng(ss).uniform(0.0, 2 * math.pi, size=(size, num_vars))


def sample_angles(num_vars: int, samples: int, seed: int) -> np.ndarray:
    """``samples`` uniform points of T^num_vars as an angle array."""
    nblocks = -(-samples // BLOCK)
    out = [_block_angles(num_vars, seed, b, min(BLOCK, samples - b * BLOCK)) for b in range(nblocks)]
    return np.concatenate(out) if out else np.zeros((0, num_vars))


def pointwise_norms(f: VPolynomial, theta: np.ndarray, workers: int = 1) -> np.ndarray:
    """``||f(z)||`` for every row of ``theta``, evaluated in blocks."""
    starts = range(0, len(theta), BLOCK)

    def job(s):
        return np.atleast_1d(f.space.norm(f.evaluate(theta[s : s + BLOCK])))

    if workers > 1 and len(theta) > BLOCK:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, starts))
    else:
        parts = [job(s) for s in starts]
    return np.concatenate(parts) if parts else np.zeros(0)


def mc_norm_samples(f: VPolynomial, samples: int, seed: int, num_vars: int | None = None, workers: int = 1):
    """Pointwise norms on the shared stream for ``(num_vars, samples, seed)``."""
    n = f.num_vars if num_vars is None else num_vars
    if n < f.num_vars:
        raise ValueError("stream has fewer variables than the polynomial")
    theta = sample_angles(n, samples, seed)[:, : f.num_vars]
    return pointwise_norms(f, theta, workers)


def estimate_from_norms(norms: np.ndarray, p: float, method: str = "monteCarlo") -> NormEstimate:
    """``(mean ||f||^p)^(1/p)`` with delta-method standard error."""
    if math.isinf(p):
        raise ValueError("p = inf is not a Monte-Carlo mean; use sup_norm_grid")
    n = len(norms)
    a = norms**p
    mean = float(a.mean())
    if mean <= 0:
        return NormEstimate(0.0, 0.0, n, method, p)
    se_mean = float(a.std(ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    value = mean ** (1.0 / p)
    se = se_mean / (p * mean ** (1.0 - 1.0 / p))
    return NormEstimate(value, se, n, method, p)


# ------------------------------------------------------------ estimators


def lp_norm_mc(f: VPolynomial, p: float, samples: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> NormEstimate:
    if math.isinf(p):
        raise ValueError("p = inf is not supported by Monte-Carlo; use sup_norm_grid")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    return estimate_from_norms(mc_norm_samples(f, samples, seed, workers=workers), p)


def lp_norm_exact_hilbert(f: VPolynomial) -> NormEstimate:
    if not f.space.is_hilbert:
        raise ValueError(f"Parseval needs an inner-product space, got {f.space}")
    c = f.coefficients
    value = float(np.sqrt(np.sum(np.abs(c) ** 2))) if len(f) else 0.0
    return NormEstimate(value, 0.0, 0, "exactParseval", 2.0)


def _grid_iter(num_vars: int, k: int, chunk: int = 1 << 16):
    total = k**num_vars
    step = 2 * math.pi / k
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.stack(np.unravel_index(idx, (k,) * num_vars), axis=1)
        yield digits * step


def _check_grid(f: VPolynomial, k: int):
    total = k**f.num_vars
    if total > MAX_GRID_POINTS:
        raise ValueError(f"grid of {k}^{f.num_vars} = {total} points exceeds the {MAX_GRID_POINTS} limit")
    return total


def lp_norm_grid(f: VPolynomial, p: float, points_per_var: int | None = None) -> NormEstimate:
    """Tensor-grid average of ``||f||^p``; exact for p = 2 over Hilbert spaces."""
    if p < 1 or math.isinf(p):
        raise ValueError(f"need 1 <= p < inf, got {p}")
    top = int(f.exponents.max()) if len(f) else 0
    k = points_per_var if points_per_var is not None else 2 * f.degree + 1
    if k < top + 1:
        raise ValueError(f"need more than {top} points per variable, got {k}")
    total = _check_grid(f, k)
    acc = 0.0
    for theta in _grid_iter(f.num_vars, k):
        acc += float(np.sum(np.atleast_1d(f.norm_at(theta)) ** p))
    return NormEstimate((acc / total) ** (1.0 / p), 0.0, total, "grid", p)


def sup_norm_grid(f: VPolynomial, points_per_var: int | None = None) -> NormEstimate:
    """Max of ``||f(z)||`` over the equispaced grid: a lower bound for the sup norm."""
    k = points_per_var if points_per_var is not None else 2 * f.degree + 1
    if k < 2 * f.degree + 1:
        raise ValueError(f"need at least 2*degree+1 = {2 * f.degree + 1} points per variable, got {k}")
    _check_grid(f, k)
    best = 0.0
    total = 0
    for theta in _grid_iter(f.num_vars, k):
        vals = np.atleast_1d(f.norm_at(theta))
        best = max(best, float(vals.max()))
        total += len(vals)
    return NormEstimate(best, 0.0, total, "grid", math.inf, lower_bound=True)


def lp_norm(f: VPolynomial, p: float, cfg: NormConfig = NormConfig()) -> NormEstimate:
    """Dispatch on ``cfg.method``."""
    if math.isinf(p):
        return sup_norm_grid(f, cfg.points_per_var)
    method = cfg.method
    if method == "auto":
        method = "exact" if (p == 2 and f.space.is_hilbert) else "mc"
    if method == "exact":
        if p != 2:
            raise ValueError("the exact route only covers p = 2 (Parseval)")
        return lp_norm_exact_hilbert(f)
    if method == "grid":
        return lp_norm_grid(f, p, cfg.points_per_var)
    return lp_norm_mc(f, p, cfg.samples, cfg.seed, cfg.workers)


# ------------------------------------------------- common random numbers


@dataclass
class JointMC:
    """Several ``(f, p)`` norms estimated on one shared sample stream.

    ``cov`` is the sample covariance of the per-sample integrands
    ``||f_i(z)||^{p_i}``, which feeds delta-method errors of ratios.
    """

    estimates: list[NormEstimate]
    means: np.ndarray
    cov: np.ndarray
    samples: int
    integrands: np.ndarray = field(repr=False)

    def ratio(self, i: int, j: int) -> tuple[float, float]:
        """``L_{p_i}(f_i) / L_{p_j}(f_j)`` and its delta-method standard error."""
        ei, ej = self.estimates[i], self.estimates[j]
        if ej.value == 0:
            raise ZeroDivisionError("denominator norm is zero")
        r = ei.value / ej.value
        if self.means[i] == 0:
            return 0.0, 0.0
        g = np.zeros(len(self.means))
        g[i] += r / (ei.p * self.means[i])
        g[j] -= r / (ej.p * self.means[j])
        var = float(g @ self.cov @ g) / self.samples
        return r, math.sqrt(max(var, 0.0))


def joint_mc(pairs, samples: int, seed: int, workers: int = 1) -> JointMC:
    """Estimate ``L_p(f)`` for every ``(f, p)`` in ``pairs`` on common points."""
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    n = max(f.num_vars for f, _ in pairs)
    theta = sample_angles(n, samples, seed)
    cache: dict[int, np.ndarray] = {}
    rows = []
    for f, p in pairs:
        if math.isinf(p) or p < 1:
            raise ValueError(f"need 1 <= p < inf, got {p}")
        if id(f) not in cache:
            cache[id(f)] = pointwise_norms(f, theta[:, : f.num_vars], workers)
        rows.append(cache[id(f)] ** p)
    a = np.vstack(rows)
    means = a.mean(axis=1)
    cov = np.atleast_2d(np.cov(a, ddof=1))
    ests = [estimate_from_norms(cache[id(f)], p) for f, p in pairs]
    return JointMC(ests, means, cov, samples, a)
