"""
Report-only numeric validators for the prefactor identity and the
lower-bound statements on the real, simulator and ideal isometries.

Nothing here asserts.  Each validator builds the operators involved at
``n <= 2``, evaluates both sides and returns the numbers, so that a claim
which fails shows up as a residual instead of an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..css import BallDecoder, binary_entropy, parity_checks
from ..errors import CapacityError, ParameterError
from ..gf2 import BitMatrix, BitVector, enumerate_matrices, gf2_inverse, gf2_rank, row_slice
from ..pauli import PauliElement, pauli_x, pauli_z, to_dense
from .dense import MatrixEnsemble, _reverse_table, bell_amplitudes, hadamard_layer, nested_projector

CLAIM_LIMIT = 2
SINGULAR_TOL = 1e-10


def _finite(x: float) -> float | None:
    return float(x) if x is not None and math.isfinite(x) else None


# -- prefactor and its closed form -----------------------------------------


def corollary_terms(t_primes: Sequence[float]) -> list[float]:
    """Closed forms ``T_k = 1 / (1 + sum_{j != k} 1/T'_j)`` for eight inputs.

    Zero inputs contribute an infinite reciprocal and force the other terms
    to zero; a vanishing denominator gives ``inf`` or ``nan``.
    """
    if len(t_primes) != 8:
        raise ParameterError(f"expected 8 product terms, got {len(t_primes)}")
    recips = []
    for t in t_primes:
        t = float(t)
        recips.append(math.inf if t == 0.0 else 1.0 / t)
    out = []
    for k in range(8):
        s = 1.0 + math.fsum(r for j, r in enumerate(recips) if j != k and math.isfinite(r))
        if any(not math.isfinite(r) for j, r in enumerate(recips) if j != k):
            out.append(0.0)
        elif s == 0.0:
            out.append(math.inf)
        else:
            out.append(1.0 / s)
    return out


def _signed_product(gens: Sequence[PauliElement], bits: Sequence[int], d: int) -> np.ndarray:
    out = np.eye(d, dtype=complex)
    for g, b in zip(gens, bits):
        out = out @ ((-1) ** int(b) * to_dense(g))
    return out


@dataclass
class PrefactorReport:
    n: int
    m: int
    u: str
    u_prime: str
    v: str
    v_prime: str
    prefactor: float | None
    t_primes: list
    t_closed: list
    closed_sum: float | None
    residual: float | None
    singular: bool
    numerator_norm: float
    denominator_norm: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "u": self.u,
            "u_prime": self.u_prime,
            "v": self.v,
            "v_prime": self.v_prime,
            "prefactor": self.prefactor,
            "t_primes": self.t_primes,
            "t_closed": self.t_closed,
            "closed_sum": self.closed_sum,
            "residual": self.residual,
            "singular": self.singular,
            "numerator_norm": self.numerator_norm,
            "denominator_norm": self.denominator_norm,
        }


def _bits(x, m: int) -> list[int]:
    if isinstance(x, BitVector):
        if x.length != m:
            raise ParameterError(f"label length {x.length} != {m}")
        return list(x)
    x = [int(b) for b in x]
    if len(x) != m:
        raise ParameterError(f"label length {len(x)} != {m}")
    return x


def prefactor_validator(P1: BitMatrix, P2: BitMatrix, u, u_prime, v, v_prime) -> PrefactorReport:
    """Evaluate the prefactor ratio and the eight closed-form terms.

    Operators are scalarised by ``tau(T) = Tr(T D^+) / rank D`` where ``D`` is
    the denominator projector product; the ratio itself is ``tau(N)`` for
    the numerator product ``N``.  When ``D`` vanishes the singular flag is
    set and the scalars are reported as ``None``.
    """
    n = P1.n_cols
    m = P1.n_rows
    if n > CLAIM_LIMIT:
        raise CapacityError(f"prefactor validator supports n <= {CLAIM_LIMIT}")
    if P2.shape != P1.shape:
        raise ParameterError("parity checks must have equal shapes")
    ub, upb, vb, vpb = (_bits(x, m) for x in (u, u_prime, v, v_prime))
    d = 1 << n
    gx = [pauli_x(r) for r in P1.row_vectors()]
    gz = [pauli_z(r) for r in P2.row_vectors()]

    N = nested_projector(gx, gx, ub, upb) @ nested_projector(gz, gz, vb, vpb)
    D = nested_projector(gz, gz, ub, upb) @ nested_projector(gx, gx, vb, vpb)
    n_norm = float(np.linalg.norm(N))
    d_norm = float(np.linalg.norm(D))

    A = _signed_product(gx, ub, d)
    Ap = _signed_product(gx, upb, d)
    B = _signed_product(gz, vb, d)
    Bp = _signed_product(gz, vpb, d)
    s = 2.0 ** (-m)
    terms = [
        s**3 * B,
        s**2 * Bp @ B,
        s**3 * A,
        s**2 * Ap @ A,
        s**4 * A @ B,
        s**4 * A @ Bp @ B,
        s**4 * Ap @ A @ B,
        s**4 * Ap @ A @ Bp @ B,
    ]

    labels = [BitVector.from_bits(x).to_string() for x in (ub, upb, vb, vpb)]
    if d_norm < SINGULAR_TOL:
        return PrefactorReport(n, m, *labels, None, [None] * 8, [None] * 8, None, None, True, n_norm, d_norm)

    Dp = np.linalg.pinv(D, rcond=1e-10)
    rank = int(np.linalg.matrix_rank(D, tol=1e-10))

    def tau(T):
        return float(np.trace(T @ Dp).real) / rank

    prefactor = tau(N)
    t_primes = [tau(T) for T in terms]
    t_closed = corollary_terms(t_primes)
    closed_sum = math.fsum(t_closed)
    residual = abs(prefactor - closed_sum) if math.isfinite(closed_sum) else math.inf
    return PrefactorReport(
        n, m, *labels,
        _finite(prefactor),
        [_finite(t) for t in t_primes],
        [_finite(t) for t in t_closed],
        _finite(closed_sum),
        _finite(residual),
        False,
        n_norm,
        d_norm,
    )


def validator_checks(L: BitMatrix, k: int = 1) -> tuple[BitMatrix, BitMatrix]:
    """Parity checks for the prefactor validator.

    When ``2k <= n`` these are the usual two blocks.  At ``n = 1`` there is
    no second block, so both checks are the single row of ``L`` and
    ``(L^-1)^T`` respectively, which makes the two layers anticommute.
    """
    if 2 * k <= L.n_rows:
        return parity_checks(L, k)
    if L.n_rows != 1 or k != 1:
        raise ParameterError(f"need 2k <= n, got n={L.n_rows}, k={k}")
    return L, gf2_inverse(L).T


def prefactor_sweep(L: BitMatrix, k: int = 1) -> list[PrefactorReport]:
    """Every label quadruple ``(u, u', v, v')`` for the code of ``L``."""
    P1, P2 = validator_checks(L, k)
    labels = [BitVector(k, i) for i in range(1 << k)]
    return [
        prefactor_validator(P1, P2, u, up, v, vp)
        for u in labels for up in labels for v in labels for vp in labels
    ]


# -- lower-bound constant on the three isometries ---------------------------


def props23_bound_constant(n: int, k: int, r: int) -> float:
    """``2^3.5 - 2^(-k + n h(r/n) + 3.5)``."""
    return 2.0**3.5 - 2.0 ** (-k + n * binary_entropy(r / n) + 3.5)


def default_ensemble(n: int) -> MatrixEnsemble:
    """``{[1]}`` at ``n = 1``; otherwise the first four invertible matrices."""
    if n == 1:
        return MatrixEnsemble.uniform([BitMatrix.identity(1)])
    members = [L for L in enumerate_matrices(n, n) if gf2_rank(L) == n][:4]
    return MatrixEnsemble.uniform(members)


def _adder_pair(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Permutations ``|a,b> -> |a, a+b>`` and ``|a,b> -> |a+b, b>`` on AB."""
    d = 1 << n
    idx = np.arange(d * d)
    a, b = idx // d, idx % d
    C1 = np.zeros((d * d, d * d))
    C2 = np.zeros((d * d, d * d))
    C1[a * d + (a ^ b), idx] = 1.0
    C2[(a ^ b) * d + b, idx] = 1.0
    return C1, C2


_ABORT = -1


def _register_overlap(n: int, P: BitMatrix, r: int) -> np.ndarray:
    """``Ov[z', z]`` = number of equal (simulator, real) register tuples.

    Tuples are compared position by position; an aborted decode never
    matches a syndrome value.
    """
    d = 1 << n
    rev = _reverse_table(n)
    dec = BallDecoder(P, r)
    Ov = np.zeros((d * d, d * d))
    real = []
    sim = []
    for i in range(d * d):
        za, zb = int(rev[i // d]), int(rev[i % d])
        sa, sb = P.apply_int(za), P.apply_int(zb)
        g = dec.decode_int(P.apply_int(za ^ zb))
        g = _ABORT if g is None else g
        head = (sa, sa, sb, sb)
        real.append((head + (g, sb), head + (sb, g)))
        sim.append((head + (sa, sb), head + (sb, sa)))
    for ip in range(d * d):
        for i in range(d * d):
            Ov[ip, i] = sum(s == t for s in sim[ip] for t in real[i])
    return Ov


def _constrained_projector(n: int) -> np.ndarray:
    d = 1 << n
    out = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            if a != b:
                v = bell_amplitudes(n, a, b)
                out += np.outer(v, v.conj())
    return out


@dataclass
class BoundReport:
    family: str
    n: int
    k: int
    r: int
    members: int
    min_eigenvalue: float
    trace_value: float
    constant: float
    operator_holds: bool
    trace_holds: bool
    skipped: str | None = None
    spectrum: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "members": self.members,
            "min_eigenvalue": self.min_eigenvalue,
            "trace_value": self.trace_value,
            "constant": self.constant,
            "operator_holds": self.operator_holds,
            "trace_holds": self.trace_holds,
            "skipped": self.skipped,
            "spectrum": self.spectrum,
        }


def _braket_operator(n: int, ensemble: MatrixEnsemble, k: int, r: int, family: str) -> np.ndarray:
    C1, C2 = _adder_pair(n)
    M = (C1 + C2).T @ (C1 + C2) / 2.0
    Pi = _constrained_projector(n)
    H = hadamard_layer(2 * n)
    d2 = 1 << (2 * n)
    total = np.zeros((d2, d2), dtype=complex)
    for p, L in ensemble:
        if family == "U":
            K = M * _register_overlap(n, row_slice(L, 0, k), r)
        else:
            P2 = parity_checks(L, k)[1]
            K = H @ (M * _register_overlap(n, P2, r)) @ H
        total += p * (Pi @ K)
    return total


def bound_validator_props23(
    n: int,
    k: int = 1,
    r: int = 0,
    ensemble: MatrixEnsemble | None = None,
) -> list[BoundReport]:
    """Build ``<L| sum Ideal^+ Simulator^+ Real' |L>`` as an operator on AB.

    The purification contracts the matrix registers to the masses ``p_L``.
    The AB part of the simulator and real maps is the adder superposition
    ``(C1 + C2)/sqrt(2)`` (Hadamard-conjugated for the phase family); the
    syndrome registers contribute the tuple overlap counts; the ideal map
    contributes the constrained Bell projector with unit-norm labels.

    Two readings are reported: the minimum eigenvalue of the Hermitian part
    (operator inequality) and ``Tr / dim`` (scalar inequality).
    """
    if not 1 <= n <= CLAIM_LIMIT:
        raise CapacityError(f"bound validator supports 1 <= n <= {CLAIM_LIMIT}")
    if k != 1:
        raise ParameterError("bound validator is defined for k = 1")
    ensemble = default_ensemble(n) if ensemble is None else ensemble
    if len(ensemble) > 4:
        raise CapacityError("bound validator supports at most 4 ensemble members")
    const = props23_bound_constant(n, k, r)
    reports = []
    for family in ("U", "V"):
        if family == "V" and 2 * k > n:
            reports.append(BoundReport(family, n, k, r, len(ensemble), math.nan, math.nan, const,
                                       False, False, skipped="2k > n leaves no second parity check"))
            continue
        X = _braket_operator(n, ensemble, k, r, family)
        herm = (X + X.conj().T) / 2
        spec = np.linalg.eigvalsh(herm)
        tr = float(np.trace(X).real) / X.shape[0]
        reports.append(BoundReport(
            family, n, k, r, len(ensemble),
            float(spec[0]), tr, const,
            bool(spec[0] >= const), bool(tr >= const),
            spectrum=[float(x) for x in spec],
        ))
    return reports
