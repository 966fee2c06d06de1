"""Multi-indices, the index sets they are drawn from, and prime machinery.

Two integer encodings live here: the Bohr correspondence ``n = p^alpha``
between positive integers and multi-indices, and the base-``(m+1)``
flattening ``alpha_1 + (m+1) alpha_2 + ... + (m+1)^(N-1) alpha_N`` that turns
a multi-variable polynomial with bounded exponents into a one-variable one.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

INT64_MAX = 2**63 - 1


class MultiIndex:
    """Exponent vector ``alpha = (alpha_1, ..., alpha_N)`` in canonical form.

    Behaves like the dense integer sequence with trailing zeros trimmed
    (``len``, iteration, indexing, JSON as ``[2, 1]``), but only the nonzero
    ``(variable, exponent)`` pairs are stored: the Bohr index of a large prime
    is a very long sequence with a single nonzero entry.
    """

    __slots__ = ("_items", "_len", "_hash")

    def __init__(self, entries: Iterable[int] = ()):
        items = []
        for k, a in enumerate(entries, start=1):
            a = int(a)
            if a < 0:
                raise ValueError(f"multi-index entries must be non-negative, got {a}")
            if a:
                items.append((k, a))
        self._set(tuple(items))

    def _set(self, items):
        self._items = items
        self._len = items[-1][0] if items else 0
        self._hash = hash(items)

    @classmethod
    def from_items(cls, items) -> "MultiIndex":
        """Build from ``{variable: exponent}`` (variables numbered from 1)."""
        pairs = sorted((int(k), int(a)) for k, a in dict(items).items() if a)
        if pairs and (pairs[0][0] < 1 or any(a < 0 for _, a in pairs)):
            raise ValueError(f"bad multi-index items {items!r}")
        obj = cls.__new__(cls)
        obj._set(tuple(pairs))
        return obj

    @classmethod
    def unit(cls, k: int) -> "MultiIndex":
        """The multi-index e_k (variables numbered from 1)."""
        if k < 1:
            raise ValueError("variables are numbered from 1")
        return cls.from_items({k: 1})

    @property
    def items(self) -> tuple[tuple[int, int], ...]:
        """Nonzero ``(variable, exponent)`` pairs, variables ascending."""
        return self._items

    @property
    def degree(self) -> int:
        return sum(a for _, a in self._items)

    @property
    def entries(self) -> tuple[int, ...]:
        return self.padded(self._len)

    def padded(self, num_vars: int) -> tuple[int, ...]:
        if self._len > num_vars:
            raise ValueError(f"{self!r} uses {self._len} variables, only {num_vars} available")
        out = [0] * num_vars
        for k, a in self._items:
            out[k - 1] = a
        return tuple(out)

    def __len__(self):
        return self._len

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError(i)
        for k, a in self._items:
            if k == i + 1:
                return a
        return 0

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        if isinstance(other, MultiIndex):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self._items)
        for k, a in other._items:
            acc[k] = acc.get(k, 0) + a
        return MultiIndex.from_items(acc)

    def __repr__(self) -> str:
        return f"MultiIndex({self.entries!r})"

    def to_json(self) -> list[int]:
        return list(self.entries)

    @classmethod
    def from_json(cls, data) -> "MultiIndex":
        return cls(data)


def grlex_key(alpha: MultiIndex):
    """Sort key for graded lexicographic order.

    Degree first; within a degree, larger leading exponents come first, so
    ``(2,0) < (1,1) < (0,2)``.
    """
    return (alpha.degree, tuple(-a for a in alpha.entries))


# ---------------------------------------------------------------- index sets


class IndexSet:
    """A (possibly infinite) set of multi-indices, enumerable on N variables."""

    def contains(self, alpha: MultiIndex) -> bool:
        raise NotImplementedError

    def enumerate(self, num_vars: int) -> list[MultiIndex]:
        return enumerate_indices(num_vars, self)

    def _generate(self, num_vars: int) -> Iterator[MultiIndex]:
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(IndexSet):
    def contains(self, alpha):
        return sum(alpha) == 1

    def _generate(self, num_vars):
        for k in range(1, num_vars + 1):
            yield MultiIndex.unit(k)

    def __str__(self):
        return "linear"


@dataclass(frozen=True)
class Homogeneous(IndexSet):
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"homogeneous degree must be >= 1, got {self.m}")

    def contains(self, alpha):
        return sum(alpha) == self.m

    def _generate(self, num_vars):
        for c in _compositions(self.m, num_vars):
            yield MultiIndex(c)

    def __str__(self):
        return f"homogeneous:{self.m}"


@dataclass(frozen=True)
class SingleVariable(IndexSet):
    max_power: int

    def __post_init__(self):
        if self.max_power < 1:
            raise ValueError(f"max_power must be >= 1, got {self.max_power}")

    def contains(self, alpha):
        return len(alpha) <= 1 and sum(alpha) <= self.max_power

    def _generate(self, num_vars):
        for k in range(self.max_power + 1):
            yield MultiIndex((k,))

    def __str__(self):
        return f"single:{self.max_power}"


@dataclass(frozen=True)
class AllUpToDegree(IndexSet):
    D: int

    def __post_init__(self):
        if self.D < 0:
            raise ValueError(f"degree bound must be >= 0, got {self.D}")

    def contains(self, alpha):
        return sum(alpha) <= self.D

    def _generate(self, num_vars):
        yield MultiIndex()
        for d in range(1, self.D + 1):
            for c in _compositions(d, num_vars):
                yield MultiIndex(c)

    def __str__(self):
        return f"upto:{self.D}"


def parse_index_set(text: str) -> IndexSet:
    """Parse ``linear``, ``homogeneous:m``, ``single:k`` or ``upto:D``."""
    name, _, arg = text.strip().lower().partition(":")
    try:
        if name == "linear" and not arg:
            return Linear()
        if name in ("homogeneous", "hom"):
            return Homogeneous(int(arg))
        if name in ("single", "fourier"):
            return SingleVariable(int(arg))
        if name == "upto":
            return AllUpToDegree(int(arg))
    except ValueError as exc:
        raise ValueError(f"bad index set {text!r}: {exc}") from None
    raise ValueError(f"unknown index set {text!r}")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # descending first entry gives graded-lex order inside one degree
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_indices(num_vars: int, index_set: IndexSet) -> list[MultiIndex]:
    """All multi-indices of ``index_set`` supported on the first ``num_vars`` variables."""
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    return list(index_set._generate(num_vars))


# ----------------------------------------------------------- base encoding


def encode_base(alpha: MultiIndex, m: int) -> int:
    """``alpha_1 + (m+1) alpha_2 + ... + (m+1)^(N-1) alpha_N``.

    Injective on multi-indices whose entries are all <= m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if any(a > m for a in alpha):
        raise ValueError(f"entry of {tuple(alpha)} exceeds m={m}; encoding would not be injective")
    return sum(a * (m + 1) ** (k - 1) for k, a in MultiIndex(alpha).items)


# -------------------------------------------------------------------- primes


class _PrimeTables:
    """Smallest-prime-factor sieve that grows on demand."""

    def __init__(self):
        self._lock = threading.Lock()
        self.limit = 0
        self.spf = np.zeros(0, dtype=np.int64)
        self.primes = np.zeros(0, dtype=np.int64)
        self.prime_pos = np.zeros(0, dtype=np.int64)
        self.ensure(1 << 12)

    def ensure(self, limit: int) -> None:
        if limit <= self.limit:
            return
        with self._lock:
            if limit <= self.limit:
                return
            limit = max(limit, 2 * self.limit)
            spf = np.zeros(limit + 1, dtype=np.int32)
            for p in range(2, math.isqrt(limit) + 1):
                if spf[p] == 0:
                    block = spf[p * p :: p]
                    block[block == 0] = p
            rest = np.nonzero(spf == 0)[0]
            rest = rest[rest >= 2]
            spf[rest] = rest
            primes = rest.astype(np.int64)
            pos = np.zeros(limit + 1, dtype=np.int32)
            pos[primes] = np.arange(1, len(primes) + 1)
            self.spf, self.primes, self.prime_pos = spf, primes, pos
            self.limit = limit

    def ensure_count(self, k: int) -> None:
        """Make sure at least ``k`` primes are tabulated."""
        if k > len(self.primes):
            # Rosser's bound p_k < k (ln k + ln ln k) for k >= 6
            self.ensure(16 if k < 6 else int(k * (math.log(k) + math.log(math.log(k)))) + 3)


_TABLES = _PrimeTables()

SIEVE_CEILING = 2 * 10**7


def prime_table(limit: int) -> np.ndarray:
    """All primes <= limit, ascending."""
    _TABLES.ensure(max(limit, 2))
    return _TABLES.primes[: np.searchsorted(_TABLES.primes, limit, side="right")]


def primes(k: int) -> list[int]:
    """The first ``k`` primes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _TABLES.ensure_count(k)
    return [int(p) for p in _TABLES.primes[:k]]


def nth_prime(k: int) -> int:
    return primes(k)[-1]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as ``{prime: exponent}``."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    out: dict[int, int] = {}
    if n <= SIEVE_CEILING:
        _TABLES.ensure(n)
        spf = _TABLES.spf
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_position(p: int) -> int:
    """1-based position of the prime ``p`` in the sequence of primes."""
    _TABLES.ensure(p)
    k = int(_TABLES.prime_pos[p])
    if k == 0:
        raise ValueError(f"{p} is not prime")
    return k


def bohr_index(n: int) -> MultiIndex:
    """Exponents of ``n = p_1^a_1 ... p_k^a_k``, the k-th prime's exponent in entry k."""
    return MultiIndex.from_items({prime_position(p): e for p, e in factorize(n).items()})


def bohr_integer(alpha: MultiIndex) -> int:
    """``prod_k p_k ** alpha_k``; raises OverflowError beyond the int64 range."""
    if not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(alpha)
    if not alpha:
        return 1
    _TABLES.ensure_count(len(alpha))
    table = _TABLES.primes
    out = 1
    for k, a in alpha.items:
        out *= int(table[k - 1]) ** a
        if out > INT64_MAX:
                raise OverflowError(f"p^alpha for alpha={tuple(alpha)} exceeds the int64 range")
    return out
