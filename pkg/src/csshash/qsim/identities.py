"""
Dense checks of Bell-basis identities and projector algebra.

Two kinds of result live here.  Standard identities (Bell completeness, the
single-label outer product sums, projector algebra) are expected to hold to
machine precision.  The constrained-sum decomposition is evaluated under its
literal reading and reported, together with the exact form it should take.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from ..errors import CapacityError
from ..gf2 import BitMatrix, BitVector, gf2_rank
from ..pauli import PauliElement, symplectic_product
from .dense import bell_amplitudes, bell_basis, hadamard_layer, pauli_projector, _reverse_table

IDENTITY_LIMIT = 4


def _check_n(n: int) -> None:
    if not 1 <= n <= IDENTITY_LIMIT:
        raise CapacityError(f"identity checks support 1 <= n <= {IDENTITY_LIMIT}, got n={n}")


def _sum_bell(n: int, pairs) -> np.ndarray:
    d = 1 << n
    out = np.zeros((d * d, d * d), dtype=complex)
    for a, b in pairs:
        v = bell_amplitudes(n, a, b)
        out += np.outer(v, v.conj())
    return out


def z_shift_projector(n: int, alpha: int) -> np.ndarray:
    """``sum_z |z, z + alpha><z, z + alpha|`` (alpha packed)."""
    d = 1 << n
    shift = int(_reverse_table(n)[alpha])
    diag = np.zeros(d * d)
    diag[np.arange(d) * d + (np.arange(d) ^ shift)] = 1.0
    return np.diag(diag).astype(complex)


def x_shift_projector(n: int, beta: int) -> np.ndarray:
    """``H^(2n) [sum_x |x, x + beta><x, x + beta|] H^(2n)``."""
    H = hadamard_layer(2 * n)
    return H @ z_shift_projector(n, beta) @ H


def completeness_residual(n: int) -> float:
    """Max entrywise deviation of ``sum_{alpha,beta} |psi><psi|`` from ``I``."""
    _check_n(n)
    B = bell_basis(n)
    return float(np.abs(B @ B.conj().T - np.eye(B.shape[0])).max())


def orthonormality_residual(n: int) -> float:
    _check_n(n)
    B = bell_basis(n)
    return float(np.abs(B.conj().T @ B - np.eye(B.shape[0])).max())


def lemma7_residual(n: int, *, alpha: int | None = None, beta: int | None = None) -> float:
    """Deviation in the single-label outer product identities.

    With ``alpha`` given, checks ``sum_b' |psi_{alpha b'}><.| = sum_z |z, z+alpha><.|``.
    With ``beta`` given, checks the Hadamard-conjugated version with fixed
    second label.  With neither, returns the maximum over every label of
    both versions.
    """
    _check_n(n)
    d = 1 << n
    if alpha is not None and beta is not None:
        raise ValueError("fix alpha or beta, not both")
    res = 0.0
    alphas = [alpha] if alpha is not None else ([] if beta is not None else range(d))
    betas = [beta] if beta is not None else ([] if alpha is not None else range(d))
    for a in alphas:
        lhs = _sum_bell(n, ((a, b) for b in range(d)))
        res = max(res, float(np.abs(lhs - z_shift_projector(n, a)).max()))
    for b in betas:
        lhs = _sum_bell(n, ((a, b) for a in range(d)))
        res = max(res, float(np.abs(lhs - x_shift_projector(n, b)).max()))
    return res


@dataclass(frozen=True)
class DecompositionReport:
    """Residuals of the constrained-sum decomposition at one ``n``.

    ``residual_*`` compare the constrained Bell sum with the right-hand side
    read literally (the ``B`` ket and bra contract to a unit scalar, so each
    admissible second label contributes one copy of the shift projector).
    ``corrected_*`` compare it with the shift projector with the excluded
    diagonal Bell term removed, which is the exact form.
    """

    n: int
    residual_z: float
    residual_x: float
    corrected_z: float
    corrected_x: float
    per_label: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "residual_z": self.residual_z,
            "residual_x": self.residual_x,
            "corrected_z": self.corrected_z,
            "corrected_x": self.corrected_x,
            "per_label": self.per_label,
        }


def lemma_decomposition_residual(n: int) -> DecompositionReport:
    _check_n(n)
    d = 1 << n
    rz = rx = cz = cx = 0.0
    rows = []
    for a in range(d):
        lhs_z = _sum_bell(n, ((a, b) for b in range(d) if b != a))
        Z = z_shift_projector(n, a)
        X = x_shift_projector(n, a)
        lit_z = float(np.abs(lhs_z - (d - 1) * Z).max())
        cor_z = float(np.abs(lhs_z - Z @ (np.eye(d * d) - X)).max())
        # second identity, second label fixed to the same value
        lhs_x = _sum_bell(n, ((b, a) for b in range(d) if b != a))
        lit_x = float(np.abs(lhs_x - (d - 1) * X).max())
        cor_x = float(np.abs(lhs_x - X @ (np.eye(d * d) - Z)).max())
        label = BitVector(n, a).to_string()
        rows.append({"label": label, "residual_z": lit_z, "residual_x": lit_x,
                     "corrected_z": cor_z, "corrected_x": cor_x})
        rz, rx = max(rz, lit_z), max(rx, lit_x)
        cz, cx = max(cz, cor_z), max(cx, cor_x)
    return DecompositionReport(n, rz, rx, cz, cx, rows)


# -- projector algebra --------------------------------------------------------


def hermitian_paulis(n: int) -> list[PauliElement]:
    """Every non-identity Hermitian Pauli with sign +1, ordered by (x, z) mask."""
    out = []
    for u, v in product(range(1 << n), repeat=2):
        if u or v:
            out.append(PauliElement.hermitian(BitVector(n, u), BitVector(n, v)))
    return out


def commuting_generator_sets(n: int, m: int):
    """Yield every unordered set of ``m`` pairwise commuting, independent
    non-identity Hermitian Paulis (sign +1; signs are covered by ``x``)."""
    paulis = hermitian_paulis(n)
    for combo in combinations(range(len(paulis)), m):
        gs = [paulis[i] for i in combo]
        if any(symplectic_product(g, h) for g, h in combinations(gs, 2)):
            continue
        if gf2_rank(BitMatrix([g.flatten().value for g in gs], 2 * n)) < m:
            continue
        yield tuple(gs)


@dataclass(frozen=True)
class ProjectorAlgebraReport:
    n: int
    sets_checked: int
    idempotence: float
    hermiticity: float
    trace: float
    resolution: float

    @property
    def max_residual(self) -> float:
        return max(self.idempotence, self.hermiticity, self.trace, self.resolution)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sets_checked": self.sets_checked,
            "idempotence": self.idempotence,
            "hermiticity": self.hermiticity,
            "trace": self.trace,
            "resolution": self.resolution,
        }


def projector_algebra(n: int) -> ProjectorAlgebraReport:
    """Exhaustive projector checks over all commuting independent sets with
    ``1 <= m <= n`` generators."""
    _check_n(n)
    d = 1 << n
    eye = np.eye(d)
    idem = herm = tr = res = 0.0
    count = 0
    for m in range(1, n + 1):
        for gs in commuting_generator_sets(n, m):
            count += 1
            total = np.zeros((d, d), dtype=complex)
            for x in product((0, 1), repeat=m):
                P = pauli_projector(gs, x)
                idem = max(idem, float(np.abs(P @ P - P).max()))
                herm = max(herm, float(np.abs(P - P.conj().T).max()))
                tr = max(tr, abs(np.trace(P).real - 2 ** (n - m)))
                total += P
            res = max(res, float(np.abs(total - eye).max()))
    return ProjectorAlgebraReport(n, count, idem, herm, tr, res)
