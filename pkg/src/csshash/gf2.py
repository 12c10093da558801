"""
Bit-packed linear algebra over GF(2).

Vectors and matrix rows are stored as Python integers: bit ``j`` of the
integer is entry ``j``.  Arbitrary widths are supported; XOR and popcount
do the arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, SingularError

__all__ = [
    "BitVector",
    "BitMatrix",
    "gf2_matmul",
    "gf2_inverse",
    "gf2_rank",
    "sample_matrix",
    "row_slice",
    "invertible_fraction",
    "enumerate_matrices",
    "random_rows",
]


def _pack(bits) -> int:
    arr = np.asarray(bits, dtype=np.uint8).ravel() & 1
    if arr.size == 0:
        return 0
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


def _unpack(value: int, length: int) -> np.ndarray:
    nbytes = max(1, (length + 7) // 8)
    raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:length].copy()


@dataclass(frozen=True)
class BitVector:
    """An element of GF(2)^length.

    ``value`` holds the entries packed little-endian: entry ``j`` is
    ``(value >> j) & 1``.
    """

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 1:
            raise DimensionError(f"BitVector length must be >= 1, got {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise DimensionError(
                f"value {self.value:#x} does not fit in {self.length} bits"
            )

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        bits = list(bits)
        return cls(len(bits), _pack(bits))

    @classmethod
    def from_string(cls, text: str) -> BitVector:
        """Parse ``"0100"`` (entry 0 first)."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def unit(cls, length: int, index: int) -> BitVector:
        if not 0 <= index < length:
            raise IndexError(index)
        return cls(length, 1 << index)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not -self.length <= j < self.length:
            raise IndexError(j)
        return (self.value >> (j % self.length)) & 1

    def __iter__(self) -> Iterator[int]:
        return (int(b) for b in self.to_array())

    def __add__(self, other: BitVector) -> BitVector:
        if not isinstance(other, BitVector):
            return NotImplemented
        if other.length != self.length:
            raise DimensionError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.length, self.value ^ other.value)

    __xor__ = __add__
    __sub__ = __add__

    def dot(self, other: BitVector) -> int:
        """Inner product mod 2."""
        if other.length != self.length:
            raise DimensionError(f"length mismatch: {self.length} vs {other.length}")
        return (self.value & other.value).bit_count() & 1

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    def concat(self, other: BitVector) -> BitVector:
        return BitVector(self.length + other.length, self.value | (other.value << self.length))

    def to_array(self) -> np.ndarray:
        return _unpack(self.value, self.length)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.to_array())

    def __repr__(self) -> str:
        return f"BitVector('{self.to_string()}')"


class BitMatrix:
    """A rows x cols matrix over GF(2), rows packed into integers.

    Instances are immutable.  ``A @ B`` multiplies matrices and ``A @ v``
    applies ``A`` to a :class:`BitVector`.
    """

    __slots__ = ("_rows", "_n_cols")

    def __init__(self, rows: Sequence[int], n_cols: int):
        rows = tuple(int(r) for r in rows)
        if len(rows) < 1 or n_cols < 1:
            raise DimensionError(f"matrix must be at least 1x1, got {len(rows)}x{n_cols}")
        for r in rows:
            if r < 0 or r >> n_cols:
                raise DimensionError(f"row {r:#x} does not fit in {n_cols} columns")
        self._rows = rows
        self._n_cols = n_cols

    @classmethod
    def from_array(cls, array) -> BitMatrix:
        arr = np.asarray(array, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got ndim={arr.ndim}")
        return cls([_pack(row & 1) for row in arr], arr.shape[1])

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> BitMatrix:
        return cls([0] * n_rows, n_cols)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector]) -> BitMatrix:
        if not vectors:
            raise DimensionError("need at least one row")
        width = vectors[0].length
        if any(v.length != width for v in vectors):
            raise DimensionError("rows have different lengths")
        return cls([v.value for v in vectors], width)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._n_cols

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    @property
    def n_cols(self) -> int:
        return self._n_cols

    @property
    def rows(self) -> tuple[int, ...]:
        """Packed row integers."""
        return self._rows

    def row(self, i: int) -> BitVector:
        return BitVector(self._n_cols, self._rows[i])

    def row_vectors(self) -> list[BitVector]:
        return [BitVector(self._n_cols, r) for r in self._rows]

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.n_rows and 0 <= j < self._n_cols):
            raise IndexError(index)
        return (self._rows[i] >> j) & 1

    def to_array(self) -> np.ndarray:
        return np.array([_unpack(r, self._n_cols) for r in self._rows], dtype=np.uint8)

    @property
    def T(self) -> BitMatrix:
        return self.transpose()

    def transpose(self) -> BitMatrix:
        out = [0] * self._n_cols
        for i, r in enumerate(self._rows):
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(out, self.n_rows)

    def apply_int(self, x: int) -> int:
        """Packed product ``A x`` for a packed column vector ``x``."""
        out = 0
        for i, r in enumerate(self._rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            if other.length != self._n_cols:
                raise DimensionError(
                    f"cannot apply {self.n_rows}x{self._n_cols} matrix to length {other.length}"
                )
            return BitVector(self.n_rows, self.apply_int(other.value))
        if isinstance(other, BitMatrix):
            return gf2_matmul(self, other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._n_cols == other._n_cols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._rows, self._n_cols))

    def is_zero(self) -> bool:
        return not any(self._rows)

    def rank(self) -> int:
        return gf2_rank(self)

    def inverse(self) -> BitMatrix:
        return gf2_inverse(self)

    def vstack(self, other: BitMatrix) -> BitMatrix:
        if other.n_cols != self._n_cols:
            raise DimensionError("column counts differ")
        return BitMatrix(self._rows + other._rows, self._n_cols)

    def __repr__(self) -> str:
        body = ", ".join("[" + ",".join(str(b) for b in _unpack(r, self._n_cols)) + "]" for r in self._rows)
        return f"BitMatrix([{body}])"


def gf2_matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2)."""
    if a.n_cols != b.n_rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    b_rows = b.rows
    out = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= b_rows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BitMatrix(out, b.n_cols)


def _eliminate(rows: list[int], n_cols: int, companion: list[int] | None = None) -> int:
    """In-place Gauss-Jordan; returns the rank.

    Pivot for each column is the lowest-index row at or below the current
    pivot row.  ``companion`` receives the same row operations.
    """
    pivot_row = 0
    for col in range(n_cols):
        bit = 1 << col
        found = next((i for i in range(pivot_row, len(rows)) if rows[i] & bit), None)
        if found is None:
            continue
        if found != pivot_row:
            rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
            if companion is not None:
                companion[pivot_row], companion[found] = companion[found], companion[pivot_row]
        prow = rows[pivot_row]
        for i in range(len(rows)):
            if i != pivot_row and rows[i] & bit:
                rows[i] ^= prow
                if companion is not None:
                    companion[i] ^= companion[pivot_row]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return pivot_row


def gf2_rank(a: BitMatrix) -> int:
    return _eliminate(list(a.rows), a.n_cols)


def gf2_inverse(a: BitMatrix) -> BitMatrix:
    """Inverse by Gauss-Jordan elimination.

    Raises:
        DimensionError: ``a`` is not square.
        SingularError: ``a`` has rank below its size.
    """
    n, m = a.shape
    if n != m:
        raise DimensionError(f"inverse needs a square matrix, got {a.shape}")
    rows = list(a.rows)
    inv = [1 << i for i in range(n)]
    if _eliminate(rows, n, inv) < n:
        raise SingularError("matrix is singular over GF(2)")
    return BitMatrix(inv, n)


def row_slice(a: BitMatrix, start: int, stop: int) -> BitMatrix:
    """Rows ``start..stop`` (exclusive) of ``a``."""
    if not 0 <= start < stop <= a.n_rows:
        raise IndexError(f"row slice [{start}, {stop}) out of range for {a.n_rows} rows")
    return BitMatrix(a.rows[start:stop], a.n_cols)


def random_rows(rng: np.random.Generator, n_rows: int, n_cols: int) -> list[int]:
    """``n_rows`` packed rows with i.i.d. uniform bits."""
    if n_cols <= 62:
        return [int(v) for v in rng.integers(0, 1 << n_cols, size=n_rows, dtype=np.int64)]
    bits = rng.integers(0, 2, size=(n_rows, n_cols), dtype=np.uint8)
    return [_pack(row) for row in bits]


def sample_matrix(
    n: int,
    invertible: bool = False,
    rng: np.random.Generator | int | None = None,
    *,
    n_cols: int | None = None,
) -> BitMatrix:
    """Draw an ``n x n_cols`` matrix with i.i.d. uniform entries.

    With ``invertible=True`` (square only) draws are rejected until the
    matrix has full rank, which yields the uniform distribution on GL(n, 2).
    """
    if n < 1:
        raise DimensionError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(rng)
    n_cols = n if n_cols is None else n_cols
    if invertible and n_cols != n:
        raise DimensionError("invertible sampling requires a square shape")
    while True:
        rows = random_rows(rng, n, n_cols)
        if not invertible or _eliminate(list(rows), n_cols) == n:
            return BitMatrix(rows, n_cols)


def invertible_fraction(n: int) -> float:
    """Probability that a uniform n x n GF(2) matrix is invertible."""
    p = 1.0
    for i in range(1, n + 1):
        p *= 1.0 - 2.0 ** (-i)
    return p


def enumerate_matrices(n_rows: int, n_cols: int, cap: int = 1 << 20) -> Iterator[BitMatrix]:
    """Every ``n_rows x n_cols`` matrix, in increasing packed order."""
    count = 1 << (n_rows * n_cols)
    if count > cap:
        raise CapacityError(f"{count} matrices exceeds enumeration cap {cap}")
    for rows in itertools.product(range(1 << n_cols), repeat=n_rows):
        yield BitMatrix(rows, n_cols)
