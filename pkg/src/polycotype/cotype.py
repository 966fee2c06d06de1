"""Cotype-type ratios, inequality checks, and lower bounds for best constants.

Every ratio has the shape ``lhs / rhs`` where ``lhs`` is an l_q sum of
coefficient norms and ``rhs`` an L_p norm on the torus. A ratio computed for
one family is a lower bound on the corresponding best constant, never an
upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .index import (
    IndexSet,
    Linear,
    MultiIndex,
    SingleVariable,
    enumerate_indices,
)
from .norms import (
    NormConfig,
    NormEstimate,
    joint_mc,
    lp_norm,
    pointwise_norms,
    sample_angles,
    _grid_iter,
)
from .poly import VPolynomial, sample_vector
from .spaces import NormedSpace, dual_exponent, known_cotype, _lr

KAHANE_K = math.sqrt(2)
SIGMAS = 3.0
# relative slack for floating round-off when both sides are exact
FLOAT_SLACK = 1e-12


@dataclass
class RatioReport:
    kind: str
    lhs: float
    rhs: NormEstimate
    ratio: float
    std_error: float
    bound: float | None = None
    passed: bool | None = None
    margin: float | None = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs.to_json(),
            "ratio": self.ratio,
            "stdError": self.std_error,
            "bound": "none" if self.bound is None else self.bound,
            "pass": self.passed,
            "margin": self.margin,
        }
        out.update(self.extras)
        return out


def judge(ratio: float, std_error: float, bound: float | None, sigmas: float = SIGMAS):
    """``(pass, margin)`` for ``ratio <= bound + sigmas * std_error``.

    ``margin`` is ``bound - ratio`` in units of the standard error (``inf``
    when the error is zero and the ratio is inside the bound).
    """
    if bound is None:
        return None, None
    slack = FLOAT_SLACK * max(1.0, abs(bound))
    passed = ratio <= bound + sigmas * std_error + slack
    gap = bound - ratio
    if std_error > 0:
        margin = gap / std_error
    elif abs(gap) <= slack:
        margin = 0.0
    else:
        margin = math.copysign(math.inf, gap)
    return bool(passed), margin


def lq_sum(norms: np.ndarray, q: float) -> float:
    return float(_lr(np.asarray(norms, dtype=float), q)) if len(norms) else 0.0


def _ratio_with_fixed_lhs(lhs: float, rhs: NormEstimate) -> tuple[float, float]:
    if rhs.value <= 0:
        raise ZeroDivisionError("right-hand side norm is zero")
    r = lhs / rhs.value
    return r, r * rhs.std_error / rhs.value


def _check_q(q: float):
    if not q >= 2:
        raise ValueError(f"cotype exponent must be >= 2, got {q}")


def linear_polynomial(space: NormedSpace, vectors) -> VPolynomial:
    """``sum_k x_k z_k``."""
    vectors = [space.check(x) for x in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    coeffs = {MultiIndex.unit(k + 1): x for k, x in enumerate(vectors)}
    return VPolynomial(space, coeffs, len(vectors))


# -------------------------------------------------------------- ratios


def classical_cotype_ratio(space: NormedSpace, vectors, q: float, cfg: NormConfig = NormConfig()) -> RatioReport:
    """``(sum ||x_k||^q)^(1/q) / (int ||sum x_k z_k||^2 dz)^(1/2)``."""
    _check_q(q)
    f = linear_polynomial(space, vectors)
    if not len(f):
        raise ValueError("all vectors are zero")
    lhs = lq_sum(f.coefficient_norms(), q)
    rhs = lp_norm(f, 2.0, cfg)
    ratio, se = _ratio_with_fixed_lhs(lhs, rhs)
    return RatioReport("classicalCotype", lhs, rhs, ratio, se, extras={"q": q, "space": str(space)})


def lambda_cotype_ratio(
    family: VPolynomial, index_set: IndexSet, q: float, cfg: NormConfig = NormConfig()
) -> RatioReport:
    """Cotype ratio over an index set, right-hand side in L_{q'}."""
    _check_q(q)
    outside = [a for a in family.support if not index_set.contains(a)]
    if outside:
        raise ValueError(f"support {outside[:3]} lies outside {index_set}")
    if not len(family):
        raise ValueError("empty family")
    qd = dual_exponent(q)
    lhs = lq_sum(family.coefficient_norms(), q)
    rhs = lp_norm(family, qd, cfg)
    ratio, se = _ratio_with_fixed_lhs(lhs, rhs)
    extras = {"q": q, "qDual": qd, "indexSet": str(index_set), "space": str(family.space)}
    if isinstance(index_set, Linear) and qd != 2:
        # classical cotype uses L_2; report it beside the L_{q'} version
        l2 = lp_norm(family, 2.0, cfg)
        extras["l2Rhs"] = l2.to_json()
        extras["l2Ratio"] = lhs / l2.value
    return RatioReport("lambdaCotype", lhs, rhs, ratio, se, extras=extras)


def fourier_cotype_ratio(space: NormedSpace, vectors, q: float, cfg: NormConfig = NormConfig()) -> RatioReport:
    """Single-variable case ``(sum ||x_k||^q)^(1/q) / ||sum x_k z^k||_{L_{q'}}``, powers k = 1..N."""
    vectors = [space.check(x) for x in vectors]
    f = VPolynomial(space, {MultiIndex((k + 1,)): x for k, x in enumerate(vectors)}, 1)
    return lambda_cotype_ratio(f, SingleVariable(len(vectors)), q, cfg)


def homog_constant_bound(m: int, q: float, cotype_constant: float, kahane: float = KAHANE_K) -> float:
    """``(C_q K)^m m^m / m! (m!)^(1/q')``, the m-homogeneous constant implied by cotype q."""
    qd = dual_exponent(q)
    fact = math.factorial(m)
    return (cotype_constant * kahane) ** m * m**m / fact * fact ** (1.0 / qd)


def homog_cotype_ratio(
    family: VPolynomial,
    q: float,
    cfg: NormConfig = NormConfig(),
    kahane: float = KAHANE_K,
    cotype_constant: float | None = None,
) -> RatioReport:
    """m-homogeneous cotype ratio, right-hand side in L_2.

    A bound is attached when the cotype-q constant is known: passed in
    explicitly, or 1 for a Hilbert space with q = 2.
    """
    _check_q(q)
    if not len(family):
        raise ValueError("empty family")
    m = family.homogeneous_degree()
    lhs = lq_sum(family.coefficient_norms(), q)
    rhs = lp_norm(family, 2.0, cfg)
    ratio, se = _ratio_with_fixed_lhs(lhs, rhs)
    if cotype_constant is None and family.space.is_hilbert and q == 2:
        cotype_constant = 1.0
    bound = homog_constant_bound(m, q, cotype_constant, kahane) if cotype_constant is not None else None
    passed, margin = judge(ratio, se, bound)
    extras = {"q": q, "m": m, "K": kahane, "space": str(family.space)}
    if cotype_constant is not None:
        extras["cotypeConstant"] = cotype_constant
    return RatioReport("homogCotype", lhs, rhs, ratio, se, bound, passed, margin, extras)


# ------------------------------------------------------- inequality checks


def _pair_norms(f: VPolynomial, pf: float, g: VPolynomial, pg: float, cfg: NormConfig):
    """``L_pf(f) / L_pg(g)`` with a joint error estimate when both are sampled."""
    method = cfg.method
    if method in ("mc", "auto"):
        jm = joint_mc([(f, pf), (g, pg)], cfg.samples, cfg.seed, cfg.workers)
        ratio, se = jm.ratio(0, 1)
        return jm.estimates[0], jm.estimates[1], ratio, se
    a = lp_norm(f, pf, cfg)
    b = lp_norm(g, pg, cfg)
    return a, b, a.value / b.value, 0.0


def kahane_check(f: VPolynomial, r: float, s: float, cfg: NormConfig = NormConfig()) -> RatioReport:
    """``||f||_r <= (r/s)^(m/2) ||f||_s`` for m-homogeneous f, 1 <= s <= r < inf."""
    if not (1 <= s <= r < math.inf):
        raise ValueError(f"need 1 <= s <= r < inf, got r={r}, s={s}")
    if not len(f):
        raise ValueError("zero polynomial")
    m = f.homogeneous_degree()
    lhs, rhs, ratio, se = _pair_norms(f, r, f, s, cfg)
    bound = (r / s) ** (m / 2)
    passed, margin = judge(ratio, se, bound)
    return RatioReport(
        "kahane", lhs.value, rhs, ratio, se, bound, passed, margin,
        {"lhsEstimate": lhs.to_json(), "r": r, "s": s, "m": m, "space": str(f.space)},
    )


def weissler_check(f: VPolynomial, s: float, r: float, cfg: NormConfig = NormConfig()) -> RatioReport:
    """``||P_c f||_r <= ||f||_s`` with ``c = sqrt(s/r)``, 1 <= s < r < inf."""
    if not (1 <= s < r < math.inf):
        raise ValueError(f"need 1 <= s < r < inf, got s={s}, r={r}")
    if not len(f):
        raise ValueError("zero polynomial")
    c = math.sqrt(s / r)
    pf = f.poisson(c)
    lhs, rhs, ratio, se = _pair_norms(pf, r, f, s, cfg)
    passed, margin = judge(ratio, se, 1.0)
    return RatioReport(
        "weissler", lhs.value, rhs, ratio, se, 1.0, passed, margin,
        {"lhsEstimate": lhs.to_json(), "r": r, "s": s, "c": c, "space": str(f.space)},
    )


def sign_patterns(terms: int, sign_samples: int, seed: int) -> tuple[np.ndarray, bool]:
    """All ``2^terms`` patterns if that fits in ``sign_samples``, else random ones."""
    if 2**terms <= sign_samples:
        pats = np.array(list(itertools.product((1.0, -1.0), repeat=terms))).reshape(-1, terms)
        return pats, True
    rng = np.random.default_rng(seed)
    return rng.choice((1.0, -1.0), size=(sign_samples, terms)), False


def rademacher_alpha_check(
    family: VPolynomial,
    q: float | None = None,
    sign_samples: int = 64,
    cfg: NormConfig = NormConfig(),
    seed: int = 0,
) -> RatioReport:
    """Largest L_2 norm of ``sum eps_alpha x_alpha z^alpha`` over sign patterns, relative to eps = 1.

    The ``q^(m/2)`` reference line is attached when the space has local
    unconditional structure; the multiplicative constant in front of it is
    not known, so there is no pass/fail verdict.
    """
    if not len(family):
        raise ValueError("empty family")
    m = family.homogeneous_degree()
    space = family.space
    meta = known_cotype(space)
    if q is None:
        q = meta.optimal_cotype
    pats, exhaustive = sign_patterns(len(family), sign_samples, seed)
    signed = [family.with_coefficients(family.coefficients * s.reshape((-1,) + (1,) * len(space.shape))) for s in pats]

    use_exact = cfg.method in ("auto", "exact") and space.is_hilbert
    if use_exact or cfg.method == "grid":
        ests = [lp_norm(g, 2.0, cfg) for g in signed]
        base = lp_norm(family, 2.0, cfg)
        vals = np.array([e.value for e in ests])
        i = int(np.argmax(vals))
        ratio, se = vals[i] / base.value, 0.0
        ms = float(np.sqrt(np.mean(vals**2))) / base.value
    else:
        theta = sample_angles(family.num_vars, cfg.samples, cfg.seed)
        base_sq = pointwise_norms(family, theta, cfg.workers) ** 2
        best = (-1.0, 0.0, None)
        sq_sum = 0.0
        for g in signed:
            a = pointwise_norms(g, theta, cfg.workers) ** 2
            mean_a = float(a.mean())
            sq_sum += mean_a
            r = math.sqrt(mean_a / base_sq.mean())
            if r > best[0]:
                # delta method for sqrt(mean a / mean b) on shared points
                cov = np.cov(np.vstack([a, base_sq]), ddof=1)
                grad = np.array([r / (2 * mean_a), -r / (2 * base_sq.mean())])
                se_r = math.sqrt(max(float(grad @ cov @ grad), 0.0) / len(a))
                best = (r, se_r, g)
        ratio, se = best[0], best[1]
        base = lp_norm(family, 2.0, replace(cfg, method="mc"))
        ms = math.sqrt(sq_sum / len(signed) / base_sq.mean())
    reference = q ** (m / 2) if (meta.has_lust and not math.isinf(q)) else None
    extras = {
        "m": m,
        "q": q if not math.isinf(q) else "inf",
        "signPatterns": int(len(pats)),
        "exhaustive": exhaustive,
        "meanSquareRatio": ms,
        "referenceLine": reference if reference is not None else "none",
        "space": str(space),
        "note": "reference line only; the constant in front of q^(m/2) is not known",
    }
    return RatioReport("rademacher", ratio * base.value, base, ratio, se, None, None, None, extras)


# ---------------------------------------------------- constant estimation


class _RhsEvaluator:
    """``X -> L_p(sum_alpha X_alpha z^alpha)`` on a fixed set of points (common random numbers)."""

    def __init__(self, space: NormedSpace, alphas, num_vars: int, p: float, cfg: NormConfig):
        self.space, self.p = space, p
        ex = np.array([a.padded(num_vars) for a in alphas], dtype=float)
        method = cfg.method
        if method == "auto":
            method = "exact" if (p == 2 and space.is_hilbert) else "mc"
        if method == "exact" and not (p == 2 and space.is_hilbert):
            raise ValueError("exact route needs a Hilbert space and p = 2")
        self.method = method
        if method == "exact":
            self.phases = None
            return
        if method == "grid":
            top = int(ex.max()) if ex.size else 0
            k = cfg.points_per_var or max(2 * int(ex.sum(axis=1).max()) + 1, top + 1)
            total = k**num_vars
            if total > 10**6:
                raise ValueError(f"grid of {total} points too large for the search objective")
            theta = np.concatenate(list(_grid_iter(num_vars, k)))
        else:
            theta = sample_angles(num_vars, cfg.samples, cfg.seed)
        self.phases = np.exp(1j * (theta @ ex.T))

    def __call__(self, X: np.ndarray) -> float:
        if self.phases is None:
            return float(np.sqrt(np.sum(np.abs(X) ** 2)))
        vals = (self.phases @ X.reshape(len(X), -1)).reshape((len(self.phases),) + self.space.shape)
        norms = np.atleast_1d(self.space.norm(vals))
        return float(np.mean(norms**self.p) ** (1.0 / self.p))


@dataclass
class SearchResult:
    report: RatioReport
    witness: VPolynomial
    history: list[float]
    restarts: list[dict]


def _basis_family(space: NormedSpace, terms: int) -> np.ndarray | None:
    if terms > space.real_dim:
        return None
    return np.stack([space.basis(k) for k in range(terms)])


def estimate_constant(
    space: NormedSpace,
    q: float,
    index_set: IndexSet,
    num_vars: int,
    budget: int = 10,
    seed: int = 0,
    cfg: NormConfig = NormConfig(),
    steps: int = 200,
    initial_step: float = 0.5,
    min_step: float = 1e-3,
    basis_start: bool = True,
) -> SearchResult:
    """Lower bound on the best Lambda-cotype constant by multi-start perturbation ascent.

    Each restart draws one unit-sphere coefficient per index, then perturbs
    one coefficient at a time, keeping improvements; the step halves after a
    full sweep without progress. All objective calls share one sample set.
    With ``basis_start`` the first restart begins from the canonical basis
    family (when the space has room for it).
    """
    _check_q(q)
    if budget < 1:
        raise ValueError("budget must be >= 1 restart")
    alphas = enumerate_indices(num_vars, index_set)
    T = len(alphas)
    qd = dual_exponent(q)
    rhs_of = _RhsEvaluator(space, alphas, num_vars, qd, cfg)

    def objective(X):
        lhs = lq_sum(np.atleast_1d(space.norm(X)), q)
        rhs = rhs_of(X)
        return lhs / rhs if rhs > 0 else 0.0

    root = np.random.SeedSequence(int(seed))
    children = root.spawn(budget)
    results = []
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        X0 = _basis_family(space, T) if (basis_start and r == 0) else None
        if X0 is None:
            X0 = np.stack([sample_vector(space, "unitSphere", rng) for _ in range(T)])
        X, val = X0, objective(X0)
        step = initial_step
        calls = 1
        while calls < steps and step >= min_step:
            improved = False
            for t in range(T):
                d = sample_vector(space, "unitSphere", rng)
                scale = max(float(np.max(np.atleast_1d(space.norm(X)))), 1e-12)
                Y = X.copy()
                Y[t] = Y[t] + step * scale * d
                v = objective(Y)
                calls += 1
                if v > val:
                    X, val, improved = Y, v, True
                if calls >= steps:
                    break
            if not improved:
                step /= 2
        results.append({"restart": r, "ratio": val, "X": X, "calls": calls})

    # deterministic merge: highest ratio, earliest restart on ties
    history, best = [], None
    for res in results:
        if best is None or res["ratio"] > best["ratio"]:
            best = res
        history.append(best["ratio"])
    X = best["X"] / max(float(np.max(np.atleast_1d(space.norm(best["X"])))), 1e-300)
    witness = VPolynomial(space, dict(zip(alphas, X)), num_vars)
    lhs = lq_sum(np.atleast_1d(space.norm(X)), q)
    search_rhs = rhs_of(X)
    method = {"exact": "exactParseval", "grid": "grid", "mc": "monteCarlo"}[rhs_of.method]
    n = cfg.samples if rhs_of.method == "mc" else 0
    rhs = NormEstimate(search_rhs, 0.0, n, method, qd)
    ratio = lhs / search_rhs
    extras = {
        "q": q,
        "indexSet": str(index_set),
        "numVars": num_vars,
        "budget": budget,
        "seed": seed,
        "space": str(space),
        "lowerBoundOnly": True,
        "history": history,
    }
    if rhs_of.method == "mc":
        # the search stream is optimized against; re-estimate on fresh points
        check = lambda_cotype_ratio(witness, index_set, q, cfg.with_seed(cfg.seed + 1_000_003))
        extras["validation"] = {"ratio": check.ratio, "stdError": check.std_error, "seed": cfg.seed + 1_000_003}
    report = RatioReport("estimateConstant", lhs, rhs, ratio, 0.0, None, None, None, extras)
    summary = [{"restart": x["restart"], "ratio": x["ratio"], "calls": x["calls"]} for x in results]
    return SearchResult(report, witness, history, summary)
