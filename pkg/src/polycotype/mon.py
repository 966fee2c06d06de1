"""Finite diagnostics for sets of monomial convergence.

Nothing here decides an infinite-dimensional statement. Limits and limsups
are reported as trajectories, with closed-form annotations only where the
sequence is a declared power law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cotype import SIGMAS, judge
from .index import Homogeneous, MultiIndex, enumerate_indices
from .norms import NormConfig, joint_mc, lp_norm_exact_hilbert, lp_norm
from .poly import VPolynomial
from .spaces import SequenceSpace, dual_exponent, format_exponent, _lr

EULER_GAMMA = 0.5772156649015329
HOLDER_TOL = 1e-10


@dataclass(frozen=True)
class PowerLaw:
    """``u_k = theta * k^(-beta)``, k = 1, 2, ..."""

    theta: float
    beta: float

    def terms(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=float)
        return self.theta * k ** (-self.beta)


def as_sequence(u, n: int | None = None) -> np.ndarray:
    """Finite array view of a sequence point (power laws are truncated at ``n``)."""
    if isinstance(u, PowerLaw):
        if n is None:
            raise ValueError("truncation length needed for a power law")
        return u.terms(n)
    return np.asarray(u)


# -------------------------------------------------------- monomial sums


@dataclass
class MonomialSum:
    partial: float
    product: float
    tail_bound: float
    degree: int
    by_degree: np.ndarray = field(repr=False)

    @property
    def gap(self) -> float:
        return self.product - self.partial

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "partialSum": self.partial,
            "product": self.product,
            "gap": self.gap,
            "tailBound": self.tail_bound,
            "partialByDegree": np.cumsum(self.by_degree).tolist(),
        }


def abs_monomial_sum(z, degree: int) -> MonomialSum:
    """``sum_{|alpha| <= D} |z^alpha|`` and its limit ``prod_k (1 - |z_k|)^(-1)``.

    The partial sum is built degree by degree through the complete homogeneous
    symmetric polynomials ``h_d(|z|)``. The tail bound uses
    ``sum_{d > D} h_d <= t^(-(D+1)) prod_k (1 - t|z_k|)^(-1)`` for every
    ``1 <= t < 1/max|z_k|``, minimized over a grid of t.
    """
    a = np.abs(np.asarray(z, dtype=complex)).astype(float).ravel()
    if np.any(a >= 1):
        raise ValueError("all |z_k| must be < 1")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    h = np.zeros(degree + 1)
    h[0] = 1.0
    for x in a:
        if x == 0:
            continue
        for d in range(1, degree + 1):
            h[d] += x * h[d - 1]
    product = float(np.prod(1.0 / (1.0 - a)))
    rho = float(a.max()) if a.size else 0.0
    if rho == 0:
        tail = 0.0
    else:
        ts = 1.0 + (1.0 / rho - 1.0) * np.linspace(0.0, 1.0, 4002)[1:-1]
        logs = -(degree + 1) * np.log(ts) - np.sum(np.log1p(-np.outer(ts, a)), axis=1)
        tail = float(np.exp(logs.min()))
    return MonomialSum(float(h.sum()), product, tail, degree, h)


def decreasing_rearrangement(u) -> np.ndarray:
    """Entries of ``u`` reordered by non-increasing modulus (stable)."""
    u = np.asarray(u)
    return u[np.argsort(-np.abs(u), kind="stable")]


# ----------------------------------------------------------- B criterion


@dataclass
class LimsupDiagnostic:
    checkpoints: list[tuple[int, float]]
    annotation: str

    def to_json(self) -> dict:
        return {
            "checkpoints": [{"n": n, "R": r} for n, r in self.checkpoints],
            "annotation": self.annotation,
            "note": "limsup is not computable from finitely many terms; values are a trajectory",
        }


def b_criterion(u, checkpoints) -> LimsupDiagnostic:
    """``R_n = (1/log n) sum_{k<=n} |u*_k|^2`` at each checkpoint n."""
    ns = [int(n) for n in checkpoints]
    if not ns or any(n < 2 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("checkpoints must be strictly increasing integers >= 2")
    top = ns[-1]
    if isinstance(u, PowerLaw):
        seq = np.abs(u.terms(top))
        if u.beta < 0:
            seq = decreasing_rearrangement(seq)
        annotation = _power_law_annotation(u)
    else:
        seq = np.abs(decreasing_rearrangement(np.asarray(u)))
        annotation = "finite support: R_n -> 0"
        seq = np.concatenate([seq, np.zeros(max(0, top - len(seq)))])[:top]
    cum = np.cumsum(seq**2)
    return LimsupDiagnostic([(n, float(cum[n - 1] / math.log(n))) for n in ns], annotation)


def _power_law_annotation(u: PowerLaw) -> str:
    t2 = u.theta**2
    if u.beta > 0.5:
        return "square-summable: R_n -> 0, inside B"
    if u.beta == 0.5:
        where = "inside B" if t2 < 1 else ("on the boundary: in B-bar, not in B" if t2 == 1 else "outside B-bar")
        return f"R_n = theta^2 (H_n / log n) -> theta^2 = {t2:.6g}; {where}"
    return "R_n -> infinity, outside B-bar"


def power_law_r_n(theta: float, n: int) -> float:
    """Closed form for ``u_k = theta/sqrt(k)``: ``theta^2 H_n / log n`` via the asymptotic harmonic number."""
    h = math.log(n) + EULER_GAMMA + 1 / (2 * n) - 1 / (12 * n * n)
    return theta**2 * h / math.log(n)


# -------------------------------------------------------- witnesses


def witness_weights(z: np.ndarray, q: float, weights="dual") -> np.ndarray:
    a = np.abs(z).astype(float)
    if isinstance(weights, str):
        if weights == "ones":
            return np.ones_like(a)
        if weights == "dual":
            qd = dual_exponent(q)
            return np.ones_like(a) if qd == 1 else a ** (qd - 1)
        raise ValueError(f"unknown weight rule {weights!r}")
    w = np.asarray(weights, dtype=complex)
    if w.shape != a.shape:
        raise ValueError("weights must match z in length")
    return w


def witness_polynomial(space: SequenceSpace, w) -> VPolynomial:
    """``f(u) = sum_k w_k e_k u_k`` (only for small N; it has N variables)."""
    coeffs = {MultiIndex.unit(k + 1): w[k] * space.basis(k) for k in range(len(w))}
    return VPolynomial(space, coeffs, len(w))


def divergence_witness(space: SequenceSpace, z, N: int, weights="dual") -> dict:
    """Sum ``sum_{k<=N} ||f^(e_k)|| |z_k|`` for the basis witness, against its sup norm.

    With ``x_k = e_k`` in l_q^N one has ``||sum lambda_k e_k||_q = ||lambda||_q``,
    so ``||lambda||_inf <= ||sum lambda_k x_k|| <= ||lambda||_q`` and the
    witness sup norm ``sup_u ||(w_k u_k)||_q = ||w||_q`` is exact (the norm
    is constant on the torus).
    """
    if not isinstance(space, SequenceSpace):
        raise ValueError("witnesses are built in l_q^N")
    if space.r < 2:
        raise ValueError(f"need q >= 2 for the l_q -> l_inf factorization, got {space.r}")
    if N > space.dim:
        raise ValueError(f"N={N} exceeds the space dimension {space.dim}")
    zs = as_sequence(z, N)[:N]
    if len(zs) < N:
        zs = np.concatenate([zs, np.zeros(N - len(zs))])
    w = witness_weights(zs, space.r, weights)
    coef_norms = np.abs(w)  # ||w_k e_k||_q
    total = float(np.sum(coef_norms * np.abs(zs)))
    sup = float(_lr(np.abs(w), space.r))
    return {
        "space": str(space),
        "N": N,
        "q": format_exponent(space.r),
        "weights": weights if isinstance(weights, str) else "explicit",
        "sum": total,
        "supNorm": sup,
        "supMethod": "exact (pointwise constant on the torus)",
        "ratio": total / sup if sup > 0 else math.inf,
        "factorization": {"lower": 1.0, "upper": 1.0},
    }


def witness_trajectory(q: float, z, Ns, weights="dual") -> dict:
    """Witness sums over increasing N and the slope of ``sum`` against ``log N``."""
    rows = []
    for N in Ns:
        rep = divergence_witness(SequenceSpace(q, int(N)), z, int(N), weights)
        rows.append((int(N), rep["sum"], rep["supNorm"]))
    slope = None
    if len(rows) >= 2:
        x = np.log([r[0] for r in rows])
        y = np.array([r[1] for r in rows])
        slope = float(np.polyfit(x, y, 1)[0])
    return {"rows": rows, "logSlope": slope}


# ---------------------------------------------------------- chain check


def eroica_chain_check(f: VPolynomial, y, cfg: NormConfig = NormConfig(method="mc")) -> dict:
    """Check each link of the chain bounding ``sum ||f^(alpha) y^alpha||`` by ``||f||_1``.

    For m-homogeneous f over a Hilbert space (hypercontractive constant 1):

    1. Hoelder: ``sum ||f^(alpha)|| |y^alpha| <= (sum_{|alpha|=m} |y^alpha|^2)^(1/2) (sum ||f^(alpha)||^2)^(1/2)``
    2. ``(sum ||f^(alpha)||^2)^(1/2) <= ||f||_2`` (Parseval: equality)
    3. ``||f||_2 <= sqrt(2)^m ||f||_1`` (polynomial Kahane, r=2, s=1)
    """
    space = f.space
    if not space.is_hilbert:
        raise ValueError(f"chain check needs a Hilbert space (constant 1), got {space}")
    if not len(f):
        raise ValueError("zero polynomial")
    m = f.homogeneous_degree()
    ys = np.abs(np.asarray(y, dtype=complex)).astype(float)
    if np.any(ys >= 1):
        raise ValueError("all |y_k| must be < 1")
    N = f.num_vars
    yN = np.concatenate([ys, np.zeros(max(0, N - len(ys)))])[:N]

    def mono(alpha):
        return float(np.prod(yN ** np.array(alpha.padded(N), dtype=float)))

    cn = f.coefficient_norms()
    lhs = float(sum(c * mono(a) for a, c in zip(f.support, cn)))
    y_sum = math.sqrt(sum(mono(a) ** 2 for a in enumerate_indices(N, Homogeneous(m))))
    coef_l2 = float(np.sqrt(np.sum(cn**2)))
    holder_rhs = y_sum * coef_l2
    link1 = {
        "lhs": lhs,
        "rhs": holder_rhs,
        "pass": lhs <= holder_rhs * (1 + HOLDER_TOL) + HOLDER_TOL,
        "violation": max(0.0, lhs - holder_rhs),
    }

    exact_l2 = lp_norm_exact_hilbert(f).value
    if cfg.method in ("mc", "auto"):
        jm = joint_mc([(f, 2.0), (f, 1.0)], cfg.samples, cfg.seed, cfg.workers)
        l2, l1 = jm.estimates
        ratio, se = jm.ratio(0, 1)
    else:
        l2 = lp_norm(f, 2.0, cfg)
        l1 = lp_norm(f, 1.0, cfg)
        ratio, se = l2.value / l1.value, 0.0
    p2, m2 = judge(coef_l2, l2.std_error, l2.value)
    link2 = {
        "coefficientL2": coef_l2,
        "exactL2": exact_l2,
        "estimatedL2": l2.to_json(),
        "pass": p2,
        "margin": m2,
        "parsevalGap": abs(coef_l2 - exact_l2),
    }
    bound = math.sqrt(2) ** m
    p3, m3 = judge(ratio, se, bound)
    link3 = {"l2OverL1": ratio, "stdError": se, "bound": bound, "l1": l1.to_json(), "pass": p3, "margin": m3}
    chain_rhs = bound * y_sum * l1.value
    return {
        "space": str(space),
        "m": m,
        "numVars": N,
        "sigmas": SIGMAS,
        "links": [link1, link2, link3],
        "chain": {"lhs": lhs, "rhs": chain_rhs},
        "pass": bool(link1["pass"] and p2 and p3),
    }


def homogeneous_projection_check(f: VPolynomial, m: int, cfg: NormConfig = NormConfig(method="mc")) -> dict:
    """Empirical ``||f^m||_1 <= ||f||_1`` for the degree-m part ``f^m`` of ``f``."""
    part = f.homogeneous_part(m)
    if not len(part):
        return {"m": m, "ratio": 0.0, "pass": True}
    jm = joint_mc([(part, 1.0), (f, 1.0)], cfg.samples, cfg.seed, cfg.workers)
    ratio, se = jm.ratio(0, 1)
    passed, margin = judge(ratio, se, 1.0)
    return {"m": m, "ratio": ratio, "stdError": se, "pass": passed, "margin": margin}
