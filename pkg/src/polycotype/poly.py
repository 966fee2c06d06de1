"""Vector-valued polynomials ``f(z) = sum_alpha x_alpha z^alpha`` on the polytorus T^N.

Points of T^N are always given as angle arrays ``theta`` with
``z_j = exp(i theta_j)``, so ``|z_j| = 1`` holds by construction.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from .index import IndexSet, MultiIndex, enumerate_indices, grlex_key
from .spaces import NormedSpace, parse_space, vector_from_json, vector_to_json

UNDERFLOW = 1e-300


class VPolynomial:
    """Finite-support map ``MultiIndex -> vector`` with values in ``space``.

    Zero coefficients are dropped on construction and terms are kept in graded
    lexicographic order. Instances are immutable.
    """

    __slots__ = ("space", "num_vars", "_alphas", "_coeffs", "_exponents")

    def __init__(self, space: NormedSpace, coeffs: Mapping, num_vars: int | None = None):
        self.space = space
        terms = {}
        for alpha, x in coeffs.items():
            alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
            x = space.check(x)
            if x.shape != space.shape:
                raise ValueError(f"coefficient at {alpha!r} has shape {x.shape}, expected {space.shape}")
            if np.any(x != 0):
                if alpha in terms:
                    terms[alpha] = terms[alpha] + x
                else:
                    terms[alpha] = x
        used = max((len(a) for a in terms), default=0)
        if num_vars is None:
            num_vars = max(used, 1)
        if num_vars < 1 or num_vars < used:
            raise ValueError(f"num_vars={num_vars} but coefficients use {used} variables")
        self.num_vars = int(num_vars)
        alphas = sorted(terms, key=grlex_key)
        self._alphas = tuple(alphas)
        arr = np.array([terms[a] for a in alphas], dtype=complex).reshape((len(alphas),) + space.shape)
        arr.setflags(write=False)
        self._coeffs = arr
        ex = np.array([a.padded(self.num_vars) for a in alphas], dtype=np.int64).reshape(len(alphas), self.num_vars)
        ex.setflags(write=False)
        self._exponents = ex

    # ------------------------------------------------------------ accessors

    @classmethod
    def zero(cls, space: NormedSpace, num_vars: int = 1) -> "VPolynomial":
        return cls(space, {}, num_vars)

    @classmethod
    def monomial(cls, space, alpha, x, num_vars: int | None = None) -> "VPolynomial":
        return cls(space, {MultiIndex(alpha): x}, num_vars)

    @property
    def support(self) -> tuple[MultiIndex, ...]:
        return self._alphas

    @property
    def coefficients(self) -> np.ndarray:
        """Read-only array of shape ``(terms,) + space.shape`` aligned with ``support``."""
        return self._coeffs

    @property
    def exponents(self) -> np.ndarray:
        """Integer matrix ``(terms, num_vars)`` of the support."""
        return self._exponents

    def items(self):
        return zip(self._alphas, self._coeffs)

    def coeff(self, alpha) -> np.ndarray:
        alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(alpha)
        try:
            return self._coeffs[self._alphas.index(alpha)]
        except ValueError:
            return self.space.zeros()

    def __len__(self):
        return len(self._alphas)

    @property
    def degree(self) -> int:
        return max((a.degree for a in self._alphas), default=0)

    def degrees(self) -> np.ndarray:
        return self._exponents.sum(axis=1)

    def is_homogeneous(self, m: int | None = None) -> bool:
        degs = set(int(d) for d in self.degrees())
        if m is None:
            return len(degs) <= 1
        return degs <= {m}

    def homogeneous_degree(self) -> int:
        """Degree of a nonzero homogeneous polynomial; raises otherwise."""
        degs = set(int(d) for d in self.degrees())
        if len(degs) != 1:
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def coefficient_norms(self) -> np.ndarray:
        if not len(self):
            return np.zeros(0)
        return np.atleast_1d(self.space.norm(self._coeffs))

    def with_coefficients(self, coeffs: np.ndarray) -> "VPolynomial":
        """Same support, new coefficient array (zeros are pruned)."""
        return VPolynomial(self.space, dict(zip(self._alphas, coeffs)), self.num_vars)

    def with_num_vars(self, num_vars: int) -> "VPolynomial":
        return VPolynomial(self.space, dict(self.items()), num_vars)

    # ----------------------------------------------------------- arithmetic

    def __add__(self, other: "VPolynomial") -> "VPolynomial":
        if other.space != self.space:
            raise ValueError("cannot add polynomials over different spaces")
        acc = dict(self.items())
        for a, x in other.items():
            acc[a] = acc[a] + x if a in acc else x
        return VPolynomial(self.space, acc, max(self.num_vars, other.num_vars))

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, lam) -> "VPolynomial":
        return VPolynomial(self.space, {a: lam * x for a, x in self.items()}, self.num_vars)

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, VPolynomial):
            return NotImplemented
        return (
            self.space == other.space
            and self.num_vars == other.num_vars
            and self._alphas == other._alphas
            and np.array_equal(self._coeffs, other._coeffs)
        )

    __hash__ = None

    def __repr__(self):
        return f"VPolynomial({self.space}, terms={len(self)}, num_vars={self.num_vars}, degree={self.degree})"

    # ------------------------------------------------------------ evaluation

    def evaluate(self, theta) -> np.ndarray:
        """Value at angle vector(s) ``theta`` of shape ``(num_vars,)`` or ``(S, num_vars)``."""
        theta = np.asarray(theta, dtype=float)
        single = theta.ndim == 1
        pts = np.atleast_2d(theta)
        if pts.shape[-1] != self.num_vars:
            raise ValueError(f"expected {self.num_vars} angles per point, got {pts.shape[-1]}")
        if not len(self):
            out = np.zeros((len(pts),) + self.space.shape, dtype=complex)
        else:
            phases = np.exp(1j * (pts @ self._exponents.T))
            out = (phases @ self._coeffs.reshape(len(self), -1)).reshape((len(pts),) + self.space.shape)
        return out[0] if single else out

    def norm_at(self, theta) -> np.ndarray | float:
        return self.space.norm(self.evaluate(theta))

    # ----------------------------------------------------------- operators

    def poisson(self, c: float) -> "VPolynomial":
        """Coefficient multiplier ``x_alpha -> c^|alpha| x_alpha`` for ``0 < c <= 1``."""
        if not 0 < c <= 1:
            raise ValueError(f"Poisson parameter must lie in (0, 1], got {c}")
        if c == 1:
            return self
        scale = float(c) ** self.degrees().astype(float)
        new = self._coeffs * scale.reshape((-1,) + (1,) * len(self.space.shape))
        keep = {}
        for a, x in zip(self._alphas, new):
            if self.space.norm(x) >= UNDERFLOW:
                keep[a] = x
        return VPolynomial(self.space, keep, self.num_vars)

    def homogeneous_part(self, m: int) -> "VPolynomial":
        if m < 0:
            raise ValueError("degree must be non-negative")
        return VPolynomial(self.space, {a: x for a, x in self.items() if a.degree == m}, self.num_vars)

    def restrict(self, index_set: IndexSet) -> "VPolynomial":
        return VPolynomial(self.space, {a: x for a, x in self.items() if index_set.contains(a)}, self.num_vars)

    # -------------------------------------------------------- serialization

    def to_json(self) -> dict:
        return {
            "space": self.space.descriptor(),
            "numVars": self.num_vars,
            "coeffs": [{"alpha": a.to_json(), "value": vector_to_json(x)} for a, x in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "VPolynomial":
        space = parse_space(data["space"])
        coeffs = {}
        for term in data["coeffs"]:
            alpha = MultiIndex(term["alpha"])
            if alpha in coeffs:
                raise ValueError(f"duplicate multi-index {term['alpha']} in polynomial JSON")
            coeffs[alpha] = vector_from_json(term["value"], space)
        return cls(space, coeffs, int(data["numVars"]))


def horner_evaluate(f: VPolynomial, theta) -> np.ndarray:
    """Evaluate one point by nested Horner schemes, one variable at a time.

    Independent of :meth:`VPolynomial.evaluate` (no exponent matrix, no
    matrix product), used as a cross-check.
    """
    z = np.exp(1j * np.asarray(theta, dtype=float))

    def nest(terms, var):
        # terms: list of (padded exponent tuple, vector); collapse variable `var`
        if var == f.num_vars:
            return sum((x for _, x in terms), f.space.zeros())
        by_power: dict[int, list] = {}
        for e, x in terms:
            by_power.setdefault(e[var], []).append((e, x))
        acc = f.space.zeros()
        for k in range(max(by_power), -1, -1):
            acc = acc * z[var]
            if k in by_power:
                acc = acc + nest(by_power[k], var + 1)
        return acc

    terms = [(a.padded(f.num_vars), x) for a, x in f.items()]
    if not terms:
        return f.space.zeros()
    return nest(terms, 0)


def sample_vector(space: NormedSpace, dist: str, rng: np.random.Generator) -> np.ndarray:
    """One draw: ``complexGaussian`` (E|v_i|^2 = 1 per coordinate) or ``unitSphere``."""
    v = (rng.standard_normal(space.shape) + 1j * rng.standard_normal(space.shape)) / math.sqrt(2)
    if dist == "complexGaussian":
        return v
    if dist == "unitSphere":
        return v / space.norm(v)
    raise ValueError(f"unknown distribution {dist!r}")


def random_polynomial(
    space: NormedSpace,
    num_vars: int,
    index_set: IndexSet | Iterable[MultiIndex],
    dist: str = "unitSphere",
    seed=None,
) -> VPolynomial:
    """One random coefficient per index; deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    if isinstance(index_set, IndexSet):
        alphas = enumerate_indices(num_vars, index_set)
    else:
        alphas = [MultiIndex(a) for a in index_set]
    coeffs = {a: sample_vector(space, dist, rng) for a in alphas}
    return VPolynomial(space, coeffs, num_vars)
