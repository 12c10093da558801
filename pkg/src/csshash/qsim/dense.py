"""
Dense states and operators for desk-scale checks.

Basis convention: qubit 0 is the leftmost tensor factor, so in a register of
``n`` qubits the computational basis index of a bit string ``z`` has ``z[0]``
as its most significant bit.  Bit ``j`` of a packed :class:`BitVector` is
qubit ``j``; :func:`basis_index` converts between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import hadamard

from ..css import ball_members
from ..errors import CapacityError, DimensionError, PreconditionError
from ..gf2 import BitMatrix, BitVector, gf2_rank
from ..pauli import DENSE_LIMIT, PauliElement, symplectic_product, to_dense

DenseOperator = np.ndarray
TOL = 1e-12


def _check_qubits(total: int, what: str = "state") -> None:
    if total > DENSE_LIMIT:
        raise CapacityError(f"{what} on {total} qubits exceeds dense limit {DENSE_LIMIT}")


@lru_cache(maxsize=32)
def _reverse_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    out = np.zeros_like(idx)
    for j in range(n):
        out |= ((idx >> j) & 1) << (n - 1 - j)
    return out


def basis_index(z: BitVector) -> int:
    """Computational basis index of the bit string ``z``."""
    return int(_reverse_table(z.length)[z.value])


class DenseState:
    """A normalized state vector over a register with factor dimensions ``dims``.

    Use :meth:`unnormalized` for intermediate vectors that need not have
    unit norm.
    """

    __slots__ = ("amplitudes", "dims", "normalized")

    def __init__(self, amplitudes, dims: Sequence[int] | None = None, *, _check: bool = True):
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        amp.setflags(write=False)
        dims = (amp.size,) if dims is None else tuple(int(d) for d in dims)
        if math.prod(dims) != amp.size:
            raise DimensionError(f"dims {dims} do not multiply to {amp.size}")
        if not np.all(np.isfinite(amp)):
            raise ValueError("amplitudes must be finite")
        if _check and abs(np.linalg.norm(amp) - 1.0) > TOL:
            raise ValueError(f"state norm {np.linalg.norm(amp)} differs from 1")
        self.amplitudes = amp
        self.dims = dims
        self.normalized = _check

    @classmethod
    def unnormalized(cls, amplitudes, dims: Sequence[int] | None = None) -> DenseState:
        return cls(amplitudes, dims, _check=False)

    @classmethod
    def basis(cls, index: int, dim: int) -> DenseState:
        amp = np.zeros(dim, dtype=complex)
        amp[index] = 1.0
        return cls(amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> DenseOperator:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def inner(self, other: DenseState) -> complex:
        """``<self|other>``."""
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: DenseState) -> DenseState:
        return DenseState(
            np.kron(self.amplitudes, other.amplitudes),
            self.dims + other.dims,
            _check=self.normalized and other.normalized,
        )

    def __repr__(self) -> str:
        return f"DenseState(dims={self.dims}, norm={self.norm():.6g})"


@dataclass(frozen=True)
class MatrixEnsemble:
    """A finite distribution ``{(p_L, L)}`` over GF(2) matrices."""

    members: tuple[tuple[float, BitMatrix], ...]
    _masses: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        members = tuple((float(p), L) for p, L in self.members)
        if not members:
            raise ValueError("ensemble needs at least one member")
        if any(p <= 0 for p, _ in members):
            raise ValueError("masses must be positive")
        if abs(sum(p for p, _ in members) - 1.0) > TOL:
            raise ValueError("masses must sum to 1")
        if len({L for _, L in members}) != len(members):
            raise ValueError("ensemble members must be distinct")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_masses", tuple(p for p, _ in members))

    @classmethod
    def uniform(cls, matrices: Sequence[BitMatrix]) -> MatrixEnsemble:
        p = 1.0 / len(matrices)
        return cls(tuple((p, L) for L in matrices))

    @property
    def masses(self) -> tuple[float, ...]:
        return self._masses

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


# -- states ------------------------------------------------------------------


def max_entangled(n: int) -> DenseState:
    """``2^(-n/2) sum_z |z>|z>`` on ``2n`` qubits."""
    _check_qubits(2 * n)
    d = 1 << n
    amp = np.zeros(d * d, dtype=complex)
    amp[np.arange(d) * (d + 1)] = d ** -0.5
    return DenseState(amp, (d, d))


def bell_amplitudes(n: int, alpha: int, beta: int) -> np.ndarray:
    """Amplitudes of ``(I x X^alpha Z^beta)|psi>``; alpha, beta are packed masks."""
    d = 1 << n
    rev = _reverse_table(n)
    # basis index i holds the bit string whose packed value is rev[i]
    signs = np.array([1.0 - 2.0 * ((int(m) & beta).bit_count() & 1) for m in rev])
    amp = np.zeros(d * d, dtype=complex)
    shift = int(rev[alpha])
    cols = np.arange(d) ^ shift
    amp[np.arange(d) * d + cols] = signs * d ** -0.5
    return amp


def bell_state(n: int, alpha: BitVector, beta: BitVector) -> DenseState:
    if alpha.length != n or beta.length != n:
        raise DimensionError(f"alpha and beta must have length {n}")
    _check_qubits(2 * n)
    d = 1 << n
    return DenseState(bell_amplitudes(n, alpha.value, beta.value), (d, d))


def bell_basis(n: int) -> np.ndarray:
    """Matrix whose column ``alpha * 2^n + beta`` is ``|psi_{alpha beta}>``."""
    _check_qubits(2 * n)
    d = 1 << n
    cols = [bell_amplitudes(n, a, b) for a in range(d) for b in range(d)]
    return np.stack(cols, axis=1)


def bell_projector(n: int, alpha: int, beta: int) -> DenseOperator:
    v = bell_amplitudes(n, alpha, beta)
    return np.outer(v, v.conj())


def purification_state(ensemble: MatrixEnsemble, cap: int = 1 << 10) -> DenseState:
    """``sum_L sqrt(p_L) |L>|L>`` with members indexed in ensemble order."""
    m = len(ensemble)
    if m * m > cap:
        raise CapacityError(f"purification register {m}^2 exceeds cap {cap}")
    amp = np.zeros(m * m, dtype=complex)
    amp[np.arange(m) * (m + 1)] = np.sqrt(ensemble.masses)
    return DenseState(amp, (m, m))


# -- operators ---------------------------------------------------------------


def hadamard_layer(qubits: int) -> DenseOperator:
    """``H`` on every one of ``qubits`` qubits."""
    _check_qubits(qubits, "operator")
    d = 1 << qubits
    return hadamard(d).astype(complex) / math.sqrt(d)


def pauli_projector(
    gs: Sequence[PauliElement], x: BitVector | Sequence[int], n: int | None = None
) -> DenseOperator:
    """``2^-m prod_j (I + (-1)^x_j g_j)`` for ``m`` commuting independent generators."""
    xs = [int(b) for b in x]
    if len(xs) != len(gs):
        raise DimensionError(f"{len(gs)} generators but {len(xs)} outcome bits")
    if not gs:
        if n is None:
            raise DimensionError("qubit count needed for an empty generator list")
        _check_qubits(n, "operator")
        return np.eye(1 << n, dtype=complex)
    n = gs[0].n
    if any(g.n != n for g in gs):
        raise DimensionError("generators act on different qubit counts")
    for i, g in enumerate(gs):
        if g.phase_exp % 2 != g.x_mask.dot(g.z_mask):
            raise PreconditionError(f"generator {i} is not Hermitian")
        for h in gs[i + 1:]:
            if symplectic_product(g, h):
                raise PreconditionError("generators do not commute")
    images = BitMatrix([g.flatten().value for g in gs], 2 * n)
    if gf2_rank(images) < len(gs):
        raise PreconditionError("generators are not independent")
    d = 1 << n
    eye = np.eye(d, dtype=complex)
    out = eye
    for g, xj in zip(gs, xs):
        out = out @ (eye + (-1) ** xj * to_dense(g)) / 2
    return out


def nested_projector(
    outer: Sequence[PauliElement],
    inner: Sequence[PauliElement],
    x_outer,
    x_inner,
    n: int | None = None,
) -> DenseOperator:
    """``Q P(outer, x_outer) Q`` with ``Q = P(inner, x_inner)``.

    This is the outer projector restricted to the range of the inner one; it
    equals the product ``P(outer) Q`` whenever the two layers commute.
    """
    if n is None:
        n = (outer or inner)[0].n if (outer or inner) else None
    Q = pauli_projector(inner, x_inner, n)
    P = pauli_projector(outer, x_outer, n)
    return Q @ P @ Q


def ball_projector(n: int, r: int) -> DenseOperator:
    """Sum of Bell projectors with both labels of weight at most ``r``."""
    if n > DENSE_LIMIT // 2:
        raise CapacityError(f"n={n} exceeds ball projector limit {DENSE_LIMIT // 2}")
    labels = ball_members(n, r)
    vecs = np.stack([bell_amplitudes(n, a, b) for a in labels for b in labels], axis=1)
    return vecs @ vecs.conj().T


def partial_trace(op: DenseOperator, dims: Sequence[int], keep: Sequence[int]) -> DenseOperator:
    """Trace out every factor not listed in ``keep`` (kept factors stay in order)."""
    dims = [int(d) for d in dims]
    D = math.prod(dims)
    op = np.asarray(op)
    if op.shape != (D, D):
        raise DimensionError(f"operator shape {op.shape} does not match dims {dims}")
    keep = sorted(set(keep))
    if any(not 0 <= i < len(dims) for i in keep):
        raise DimensionError(f"keep indices {keep} out of range")
    t = op.reshape(dims + dims)
    f = len(dims)
    for i in reversed(range(len(dims))):
        if i not in keep:
            t = np.trace(t, axis1=i, axis2=i + f)
            f -= 1
    dk = math.prod(dims[i] for i in keep) if keep else 1
    return t.reshape(dk, dk)


def trace_distance(rho: DenseOperator, sigma: DenseOperator, atol: float = 1e-10) -> float:
    """``||rho - sigma||_1 / 2`` of two Hermitian operators."""
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    delta = rho - sigma
    if not np.allclose(delta, delta.conj().T, atol=atol):
        raise PreconditionError("trace distance needs Hermitian inputs")
    return 0.5 * float(np.abs(np.linalg.eigvalsh((delta + delta.conj().T) / 2)).sum())


def fidelity(a: DenseState, b: DenseState) -> float:
    """Squared overlap ``|<a|b>|^2``."""
    return abs(a.inner(b)) ** 2


def bell_expand(state: DenseState, n: int) -> dict[tuple[int, int], np.ndarray]:
    """Environment vectors ``gamma_{alpha beta} = (<psi_{alpha beta}| x I_E)|state>``.

    Keys are packed ``(alpha, beta)`` masks; the environment is whatever
    factor is left after the ``4^n``-dimensional AB block.
    """
    d2 = 1 << (2 * n)
    if state.dim % d2:
        raise DimensionError(f"state dimension {state.dim} is not a multiple of 4^{n}")
    dE = state.dim // d2
    psi = state.amplitudes.reshape(d2, dE)
    basis = bell_basis(n)
    gammas = basis.conj().T @ psi
    d = 1 << n
    return {(a, b): gammas[a * d + b] for a in range(d) for b in range(d)}


def bell_reconstruct(gammas: dict[tuple[int, int], np.ndarray], n: int) -> np.ndarray:
    d = 1 << n
    basis = bell_basis(n)
    G = np.stack([gammas[(a, b)] for a in range(d) for b in range(d)], axis=0)
    return (basis @ G).reshape(-1)
