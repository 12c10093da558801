"""Binary symplectic representation of the n-qubit Pauli group."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import CapacityError, DimensionError
from .gf2 import BitMatrix, BitVector

DENSE_LIMIT = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PHASES = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class PauliElement:
    """The operator ``i**phase_exp * X^x_mask * Z^z_mask``.

    ``X^u`` is the tensor product of ``X`` on every qubit ``j`` with
    ``u[j] = 1``; qubit 0 is the leftmost tensor factor.  ``Y`` is not a
    primitive: it is ``PauliElement(1, [1], [1])``.
    """

    phase_exp: int
    x_mask: BitVector
    z_mask: BitVector

    def __post_init__(self):
        if self.x_mask.length != self.z_mask.length:
            raise DimensionError("x and z masks must have equal length")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n: int) -> PauliElement:
        return cls(0, BitVector.zeros(n), BitVector.zeros(n))

    @classmethod
    def from_masks(cls, u: BitVector, v: BitVector, phase_exp: int = 0) -> PauliElement:
        return cls(phase_exp, u, v)

    @classmethod
    def hermitian(cls, u: BitVector, v: BitVector, sign: int = 1) -> PauliElement:
        """Hermitian Pauli with masks ``(u, v)`` and overall sign ``+-1``.

        ``X^u Z^v`` is Hermitian up to ``i^(u.v)``; this fixes that phase.
        """
        return cls(u.dot(v) + (0 if sign > 0 else 2), u, v)

    @classmethod
    def from_label(cls, label: str) -> PauliElement:
        """Build from a string such as ``"XIZY"`` or ``"-iXZ"``."""
        phase = 0
        body = label.strip()
        for prefix, p in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if body.startswith(prefix):
                phase, body = p, body[len(prefix):]
                break
        xs, zs = [], []
        for c in body:
            if c not in "IXYZ":
                raise ValueError(f"bad Pauli label {label!r}")
            xs.append(int(c in "XY"))
            zs.append(int(c in "ZY"))
            phase += int(c == "Y")
        return cls(phase, BitVector.from_bits(xs), BitVector.from_bits(zs))

    @property
    def n(self) -> int:
        return self.x_mask.length

    def flatten(self) -> BitVector:
        """The image ``[u v]`` in GF(2)^(2n); the phase is dropped."""
        return self.x_mask.concat(self.z_mask)

    def commutes_with(self, other: PauliElement) -> bool:
        return symplectic_product(self, other) == 0

    def __mul__(self, other: PauliElement) -> PauliElement:
        return multiply(self, other)

    def to_dense(self, limit: int = DENSE_LIMIT) -> np.ndarray:
        return to_dense(self, limit)

    def __repr__(self) -> str:
        letters = []
        for x, z in zip(self.x_mask, self.z_mask):
            letters.append("IZXY"[2 * x + z] if (x, z) != (1, 1) else "(XZ)")
        prefix = ("", "i", "-", "-i")[self.phase_exp]
        return f"PauliElement({prefix}{''.join(letters)})"


def flatten(g: PauliElement) -> BitVector:
    return g.flatten()


def symplectic_product(g: PauliElement, h: PauliElement) -> int:
    """``u_g . v_h + v_g . u_h`` mod 2; zero exactly when g and h commute."""
    if g.n != h.n:
        raise DimensionError(f"qubit counts differ: {g.n} vs {h.n}")
    return g.x_mask.dot(h.z_mask) ^ g.z_mask.dot(h.x_mask)


def multiply(g: PauliElement, h: PauliElement) -> PauliElement:
    # (X^u1 Z^v1)(X^u2 Z^v2) = (-1)^(v1.u2) X^(u1+u2) Z^(v1+v2)
    if g.n != h.n:
        raise DimensionError(f"qubit counts differ: {g.n} vs {h.n}")
    phase = g.phase_exp + h.phase_exp + 2 * g.z_mask.dot(h.x_mask)
    return PauliElement(phase, g.x_mask + h.x_mask, g.z_mask + h.z_mask)


def to_dense(g: PauliElement, limit: int = DENSE_LIMIT) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of ``g``."""
    if g.n > limit:
        raise CapacityError(f"{g.n} qubits exceeds dense limit {limit}")
    factors = []
    for x, z in zip(g.x_mask, g.z_mask):
        factors.append((_X if x else _I2) @ (_Z if z else _I2))
    return _PHASES[g.phase_exp] * reduce(np.kron, factors)


class SymplecticForm:
    """The block form ``[[0, I_n], [I_n, 0]]`` on GF(2)^(2n)."""

    def __init__(self, n: int):
        if n < 1:
            raise DimensionError(f"n must be >= 1, got {n}")
        self.n = n

    def matrix(self) -> BitMatrix:
        n = self.n
        rows = [1 << (n + i) for i in range(n)] + [1 << i for i in range(n)]
        return BitMatrix(rows, 2 * n)

    def __call__(self, a: BitVector, b: BitVector) -> int:
        """``a S b^T`` for flattened vectors of length 2n."""
        n = self.n
        if a.length != 2 * n or b.length != 2 * n:
            raise DimensionError(f"expected vectors of length {2 * n}")
        mask = (1 << n) - 1
        au, av = a.value & mask, a.value >> n
        bu, bv = b.value & mask, b.value >> n
        return ((au & bv).bit_count() + (av & bu).bit_count()) & 1


def pauli_x(mask: BitVector) -> PauliElement:
    return PauliElement(0, mask, BitVector.zeros(mask.length))


def pauli_z(mask: BitVector) -> PauliElement:
    return PauliElement(0, BitVector.zeros(mask.length), mask)
