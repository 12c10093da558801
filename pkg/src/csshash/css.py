"""
CSS codes from a random invertible matrix, syndromes and ball decoding.

Given an invertible ``n x n`` matrix ``L`` over GF(2) and a syndrome length
``k``, the bit-flip parity check is rows ``0..k`` of ``L``, the phase-flip
parity check is rows ``k..2k`` of ``(L^-1)^T`` and the key extractor is rows
``2k..n`` of ``(L^-1)^T``.  Because ``L (L^-1) = I``, row ``i`` of ``L`` is
orthogonal to row ``j`` of ``(L^-1)^T`` whenever ``i != j``, so the three
blocks satisfy the CSS orthogonality relations by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Container, Iterator

from .errors import CapacityError, DimensionError, DomainError, ParameterError
from .gf2 import BitMatrix, BitVector, gf2_inverse, row_slice

BALL_CAP = 1 << 24


@dataclass(frozen=True)
class ProtocolParams:
    """Block length ``n``, syndrome length ``k`` and error radius ``r``.

    Construction only checks structural sanity (``n >= 1``, ``k >= 0``,
    ``0 <= r <= n``).  Whether a key can be extracted (``2k < n``) and
    whether the triple lies in the security window
    ``2 n h(r/n) < 2k < n`` are exposed as properties, because several
    diagnostics are meaningful outside that window.
    """

    n: int
    k: int
    r: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.k < 0:
            raise ParameterError(f"k must be >= 0, got {self.k}")
        if not 0 <= self.r <= self.n:
            raise ParameterError(f"r must lie in [0, n], got r={self.r}, n={self.n}")

    @property
    def key_length(self) -> int:
        return self.n - 2 * self.k

    @property
    def has_key(self) -> bool:
        return 2 * self.k < self.n

    @property
    def admissible(self) -> bool:
        """True when ``2 n h(r/n) < 2k < n`` (the window is vacuous at r=0)."""
        if not self.has_key:
            return False
        if self.r == 0:
            return True
        return 2 * self.n * binary_entropy(self.r / self.n) < 2 * self.k

    def require_key(self) -> None:
        if not self.has_key:
            raise ParameterError(
                f"need 2k < n to extract a key, got n={self.n}, k={self.k}"
            )


@dataclass(frozen=True)
class ErrorPattern:
    """Bit flips ``alpha`` and phase flips ``beta`` on n qubit pairs."""

    alpha: BitVector
    beta: BitVector

    def __post_init__(self):
        if self.alpha.length != self.beta.length:
            raise DimensionError("alpha and beta must have equal length")

    @classmethod
    def zero(cls, n: int) -> ErrorPattern:
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @property
    def n(self) -> int:
        return self.alpha.length


@dataclass(frozen=True)
class CssCode:
    L: BitMatrix
    L_inv_T: BitMatrix
    P1: BitMatrix
    P2: BitMatrix
    key_extractor: BitMatrix
    params: ProtocolParams

    @property
    def n(self) -> int:
        return self.params.n


def parity_checks(L: BitMatrix, k: int) -> tuple[BitMatrix, BitMatrix]:
    """The two parity checks ``(P1, P2)`` of ``L`` without a key block.

    Only needs ``2k <= n``; useful at tiny ``n`` where no key row is left.
    """
    n = L.n_rows
    if L.shape != (n, n):
        raise DimensionError(f"L must be square, got {L.shape}")
    if not 1 <= k or 2 * k > n:
        raise ParameterError(f"need 1 <= k and 2k <= n, got n={n}, k={k}")
    inv_t = gf2_inverse(L).T
    return row_slice(L, 0, k), row_slice(inv_t, k, 2 * k)


def build_css(L: BitMatrix, params: ProtocolParams) -> CssCode:
    """Assemble the CSS code of ``L``.

    Raises:
        SingularError: ``L`` is not invertible.
        ParameterError: ``L`` does not match ``params`` or ``2k >= n``.
    """
    n, k = params.n, params.k
    if L.shape != (n, n):
        raise ParameterError(f"L has shape {L.shape}, expected ({n}, {n})")
    params.require_key()
    if k == 0:
        raise ParameterError("k must be >= 1 to build parity checks")
    inv_t = gf2_inverse(L).T
    return CssCode(
        L=L,
        L_inv_T=inv_t,
        P1=row_slice(L, 0, k),
        P2=row_slice(inv_t, k, 2 * k),
        key_extractor=row_slice(inv_t, 2 * k, n),
        params=params,
    )


def binary_entropy(p: float) -> float:
    """``-p log2 p - (1-p) log2 (1-p)`` with ``h(0) = h(1) = 0``."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def hamming_ball_volume(n: int, r: int) -> int:
    if not 0 <= r <= n:
        raise ParameterError(f"need 0 <= r <= n, got n={n}, r={r}")
    return sum(math.comb(n, i) for i in range(r + 1))


@lru_cache(maxsize=64)
def _ball_ints(n: int, r: int) -> tuple[int, ...]:
    out = []
    for w in range(r + 1):
        for support in combinations(range(n), w):
            out.append(sum(1 << j for j in support))
    return tuple(out)


def ball_members(n: int, r: int, cap: int = BALL_CAP) -> tuple[int, ...]:
    """Packed members of ``B_n(0, r)`` in weight-then-support order."""
    volume = hamming_ball_volume(n, r)
    if volume > cap:
        raise CapacityError(f"ball volume {volume} exceeds cap {cap}")
    return _ball_ints(n, r)


def enumerate_ball(n: int, r: int, cap: int = BALL_CAP) -> Iterator[BitVector]:
    """Yield each vector of weight <= r once.

    Order: by weight, then lexicographically by the sorted tuple of set
    positions, so ``B_3(0, 1)`` comes out as ``000, 100, 010, 001``.
    """
    for value in ball_members(n, r, cap):
        yield BitVector(n, value)


@dataclass(frozen=True)
class HammingBall:
    """The set ``B_n(0, r)``, usable as an error-set descriptor."""

    n: int
    r: int

    def __contains__(self, x) -> bool:
        return isinstance(x, BitVector) and x.length == self.n and x.weight <= self.r

    def __len__(self) -> int:
        return hamming_ball_volume(self.n, self.r)

    def __iter__(self) -> Iterator[BitVector]:
        return enumerate_ball(self.n, self.r)


def error_filter(x: BitVector, S: Container[BitVector]) -> BitVector | None:
    """Return ``x`` if it belongs to ``S``, else ``None`` (the abort symbol)."""
    return x if x in S else None


def syndrome(P: BitMatrix, e: BitVector) -> BitVector:
    if e.length != P.n_cols:
        raise DimensionError(f"error length {e.length} does not match {P.n_cols} columns")
    return P @ e


_AMBIGUOUS = -1


class BallDecoder:
    """Unique-decoding lookup table for one parity check and radius.

    Each syndrome maps to the single ball member producing it; syndromes
    reached by no member or by two or more members decode to ``None``.
    """

    def __init__(self, P: BitMatrix, r: int, cap: int = BALL_CAP):
        self.P = P
        self.n = P.n_cols
        self.r = r
        table: dict[int, int] = {}
        for e in ball_members(self.n, r, cap):
            s = P.apply_int(e)
            table[s] = e if s not in table else _AMBIGUOUS
        self._table = table

    def decode_int(self, s: int) -> int | None:
        e = self._table.get(s)
        return None if e is None or e == _AMBIGUOUS else e

    def decode(self, s: BitVector) -> BitVector | None:
        if s.length != self.P.n_rows:
            raise DimensionError(f"syndrome length {s.length} != {self.P.n_rows}")
        e = self.decode_int(s.value)
        return None if e is None else BitVector(self.n, e)

    def is_uniquely_decodable(self, e: int) -> bool:
        return self.decode_int(self.P.apply_int(e)) == e


def decode_in_ball(P: BitMatrix, s: BitVector, n: int, r: int, cap: int = BALL_CAP) -> BitVector | None:
    """The unique ``e`` with ``|e| <= r`` and ``P e = s``, else ``None``."""
    if P.n_cols != n:
        raise DimensionError(f"P has {P.n_cols} columns, expected {n}")
    return BallDecoder(P, r, cap).decode(s)
