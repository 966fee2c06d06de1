"""Finite-dimensional normed spaces: l_r^n and Schatten classes S_r on d x d matrices.

Vectors are complex numpy arrays, shape ``(n,)`` for l_r^n and ``(d, d)`` for
S_r. Every norm routine also accepts a leading batch axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

INF = math.inf

Exponent = float
CotypeValue = Union[float, str]  # exponent in [2, inf] or "unknown"


def dual_exponent(q: float) -> float:
    """Conjugate exponent q' with 1/q + 1/q' = 1 (1' = inf, inf' = 1)."""
    q = float(q)
    if not q >= 1:
        raise ValueError(f"exponent must be >= 1, got {q}")
    if q == 1:
        return INF
    if math.isinf(q):
        return 1.0
    return q / (q - 1)


def parse_exponent(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    return float(text)


def format_exponent(r: float) -> str:
    if math.isinf(r):
        return "inf"
    return str(int(r)) if float(r).is_integer() else repr(float(r))


def _lr(a: np.ndarray, r: float, axis: int = -1) -> np.ndarray:
    """l_r norm of non-negative reals along ``axis``."""
    if math.isinf(r):
        return a.max(axis=axis)
    if r == 1:
        return a.sum(axis=axis)
    if r == 2:
        return np.sqrt((a * a).sum(axis=axis))
    # scale by the max entry to keep a**r finite
    top = a.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = np.squeeze(safe, axis=axis) * ((a / safe) ** r).sum(axis=axis) ** (1.0 / r)
    return np.where(np.squeeze(top, axis=axis) > 0, out, 0.0)


@dataclass(frozen=True)
class CotypeMetadata:
    optimal_cotype: float
    fourier_cotype: CotypeValue
    hypercontractive_cotype: CotypeValue
    has_lust: bool
    note: str = ""

    def to_json(self) -> dict:
        def enc(v):
            return v if isinstance(v, str) else format_exponent(v)

        return {
            "optimalCotype": enc(self.optimal_cotype),
            "fourierCotype": enc(self.fourier_cotype),
            "hypercontractiveCotype": enc(self.hypercontractive_cotype),
            "lust": self.has_lust,
            "note": self.note,
        }


class NormedSpace:
    """Base class; concrete spaces are :class:`SequenceSpace` and :class:`SchattenSpace`."""

    r: float
    shape: tuple[int, ...]

    @property
    def is_hilbert(self) -> bool:
        return self.r == 2

    @property
    def real_dim(self) -> int:
        return int(np.prod(self.shape))

    def check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.shape[v.ndim - len(self.shape):] != self.shape or v.ndim < len(self.shape):
            raise ValueError(f"vector of shape {v.shape} does not live in {self}")
        return v

    def norm(self, v) -> np.ndarray | float:
        raise NotImplementedError

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def basis(self, k: int) -> np.ndarray:
        """k-th canonical basis vector (0-based, row-major for matrices)."""
        e = np.zeros(self.real_dim, dtype=complex)
        e[k] = 1.0
        return e.reshape(self.shape)

    def descriptor(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.descriptor()


@dataclass(frozen=True, eq=True)
class SequenceSpace(NormedSpace):
    r: float
    dim: int

    def __post_init__(self):
        if not (self.r >= 1):
            raise ValueError(f"l_r needs r >= 1, got {self.r}")
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")

    @property
    def shape(self):
        return (self.dim,)

    def norm(self, v):
        v = self.check(v)
        out = _lr(np.abs(v), self.r)
        return float(out) if out.ndim == 0 else out

    def descriptor(self):
        return f"lp:{format_exponent(self.r)}:{self.dim}"


@dataclass(frozen=True, eq=True)
class SchattenSpace(NormedSpace):
    r: float
    mat_dim: int

    def __post_init__(self):
        if not (self.r >= 1):
            raise ValueError(f"S_r needs r >= 1, got {self.r}")
        if self.mat_dim < 1:
            raise ValueError(f"matrix size must be >= 1, got {self.mat_dim}")

    @property
    def shape(self):
        return (self.mat_dim, self.mat_dim)

    def singular_values(self, v) -> np.ndarray:
        return np.linalg.svd(self.check(v), compute_uv=False)

    def norm(self, v):
        out = _lr(self.singular_values(v), self.r)
        return float(out) if out.ndim == 0 else out

    def descriptor(self):
        return f"schatten:{format_exponent(self.r)}:{self.mat_dim}"


def parse_space(text: str) -> NormedSpace:
    """Parse ``lp:r:dim`` or ``schatten:r:d`` (``r`` may be ``inf``)."""
    parts = text.strip().lower().split(":")
    if len(parts) != 3:
        raise ValueError(f"malformed space descriptor {text!r}; expected 'lp:r:dim' or 'schatten:r:d'")
    kind, r, n = parts
    try:
        r_val, n_val = parse_exponent(r), int(n)
    except ValueError:
        raise ValueError(f"malformed space descriptor {text!r}") from None
    if kind in ("lp", "l"):
        return SequenceSpace(r_val, n_val)
    if kind in ("schatten", "s"):
        return SchattenSpace(r_val, n_val)
    raise ValueError(f"unknown space kind {kind!r} in {text!r}")


def known_cotype(space: NormedSpace) -> CotypeMetadata:
    """Cotype exponents of ``space`` as established for its infinite-dimensional family.

    l_r: cotype max{2, r}, and the same hypercontractive homogeneous cotype
    (these spaces have local unconditional structure); Fourier cotype
    max{r, r'}. S_r: cotype max{2, r} and Fourier cotype max{r, r'};
    hypercontractive homogeneous cotype equals r only for r >= 2, and for
    r < 2 it is bracketed by [2, r'] with the exact value open.
    """
    r = space.r
    ct = max(2.0, r)
    fct = max(r, dual_exponent(r))
    if isinstance(space, SequenceSpace):
        return CotypeMetadata(ct, fct, ct, has_lust=True)
    if r >= 2:
        return CotypeMetadata(ct, fct, ct, has_lust=(r == 2))
    return CotypeMetadata(
        ct,
        fct,
        "unknown",
        has_lust=False,
        note=f"hypercontractive cotype between 2 and {format_exponent(fct)}",
    )


# ------------------------------------------------------------ serialization


def vector_to_json(v: np.ndarray):
    """Complex array -> nested lists of ``[re, im]`` pairs."""
    v = np.asarray(v, dtype=complex)
    if v.ndim == 0:
        return [float(v.real), float(v.imag)]
    return [vector_to_json(x) for x in v]


def vector_from_json(data, space: NormedSpace | None = None) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.shape[-1] != 2:
        raise ValueError("vectors serialize as arrays of [re, im] pairs")
    v = a[..., 0] + 1j * a[..., 1]
    return space.check(v) if space is not None else v


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph
