import math
from itertools import product

import numpy as np
import pytest

from csshash.errors import CapacityError, DimensionError, PreconditionError
from csshash.gf2 import BitMatrix, BitVector
from csshash.pauli import PauliElement
from csshash.qsim import (
    DenseState,
    MatrixEnsemble,
    ball_projector,
    bell_expand,
    bell_state,
    bound_validator_props23,
    completeness_residual,
    corollary_terms,
    default_ensemble,
    fidelity,
    hadamard_layer,
    lemma7_residual,
    lemma_decomposition_residual,
    max_entangled,
    nested_projector,
    partial_trace,
    pauli_projector,
    prefactor_sweep,
    prefactor_validator,
    projector_algebra,
    purification_state,
    trace_distance,
)
from csshash.qsim.claims import props23_bound_constant
from csshash.qsim.dense import bell_reconstruct
from csshash.qsim.identities import commuting_generator_sets, orthonormality_residual

S2 = 1 / math.sqrt(2)
SX = np.array([[0, 1], [1, 0]])
SZ = np.array([[1, 0], [0, -1]])
Zg = PauliElement.from_label("Z")


def bv(s):
    return BitVector.from_string(s)


def oracle_bell(n, alpha, beta):
    """Kron-built ``(I x X^alpha Z^beta)|psi>`` with alpha, beta bit strings."""
    d = 1 << n
    psi = np.zeros(d * d)
    for z in range(d):
        psi[z * d + z] = d ** -0.5
    op = np.eye(1)
    for a, b in zip(alpha, beta):
        op = np.kron(op, np.linalg.matrix_power(SX, int(a)) @ np.linalg.matrix_power(SZ, int(b)))
    return np.kron(np.eye(d), op) @ psi


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return DenseState(v / np.linalg.norm(v))


class TestStates:
    def test_max_entangled_n1(self):
        assert np.allclose(max_entangled(1).amplitudes, [S2, 0, 0, S2])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_norm(self, n):
        assert max_entangled(n).norm() == pytest.approx(1.0, abs=1e-12)

    def test_reduced_state(self):
        for n in (1, 2, 3):
            rho = partial_trace(max_entangled(n).density(), (1 << n, 1 << n), [0])
            assert np.abs(rho - np.eye(1 << n) / (1 << n)).max() < 1e-12

    def test_bell_examples(self):
        assert np.allclose(bell_state(2, bv("00"), bv("00")).amplitudes, max_entangled(2).amplitudes)
        assert np.allclose(bell_state(1, bv("1"), bv("0")).amplitudes, [0, S2, S2, 0])

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_bell_matches_oracle(self, n):
        for a, b in product(range(1 << n), repeat=2):
            A, B = BitVector(n, a), BitVector(n, b)
            assert np.allclose(bell_state(n, A, B).amplitudes, oracle_bell(n, A.to_string(), B.to_string()))

    @pytest.mark.parametrize("n", [1, 2])
    def test_bell_orthonormal_exhaustive(self, n):
        d = 1 << n
        states = [bell_state(n, BitVector(n, a), BitVector(n, b)) for a in range(d) for b in range(d)]
        for i, s in enumerate(states):
            for j, t in enumerate(states):
                assert abs(s.inner(t) - (i == j)) < 1e-12

    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            DenseState([1.0, 1.0])
        assert DenseState.unnormalized([1.0, 1.0]).norm() == pytest.approx(math.sqrt(2))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            max_entangled(7)

    def test_fidelity(self):
        psi = max_entangled(1)
        assert fidelity(psi, psi) == pytest.approx(1.0)
        for a, b in [(0, 1), (1, 0), (1, 1)]:
            assert fidelity(psi, bell_state(1, BitVector(1, a), BitVector(1, b))) < 1e-24


class TestProjectors:
    def test_single_generator(self):
        assert np.allclose(pauli_projector([Zg], [0]), [[1, 0], [0, 0]])
        assert np.allclose(pauli_projector([Zg], [1]), [[0, 0], [0, 1]])

    def test_empty(self):
        assert np.array_equal(pauli_projector([], [], n=2), np.eye(4))

    def test_prefactor_per_constraint(self):
        gs = [PauliElement.from_label("ZI"), PauliElement.from_label("IZ")]
        P = pauli_projector(gs, [0, 1])
        assert np.allclose(P, np.diag([0, 1, 0, 0]))

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            pauli_projector([PauliElement.from_label("X"), Zg], [0, 0])
        with pytest.raises(PreconditionError):
            pauli_projector([Zg, Zg], [0, 0])
        with pytest.raises(PreconditionError):
            pauli_projector([PauliElement(1, bv("0"), bv("1"))], [0])
        with pytest.raises(DimensionError):
            pauli_projector([Zg], [0, 1])

    def test_nested(self):
        assert np.allclose(nested_projector([Zg], [], [0], [], n=1), pauli_projector([Zg], [0]))
        assert np.allclose(nested_projector([Zg], [Zg], [0], [0]), [[1, 0], [0, 0]])
        X = PauliElement.from_label("X")
        N = nested_projector([X], [Zg], [0], [0])
        assert np.abs(N @ N - N).max() > 0.1  # anticommuting layers do not compose to a projector
        for outer, inner in [(["ZI"], ["IZ"]), (["XX"], ["ZZ"])]:
            o = [PauliElement.from_label(s) for s in outer]
            i = [PauliElement.from_label(s) for s in inner]
            for xo, xi in product((0, 1), repeat=2):
                M = nested_projector(o, i, [xo], [xi])
                assert np.abs(M @ M - M).max() < 1e-12
                assert np.abs(M - pauli_projector(o, [xo]) @ pauli_projector(i, [xi])).max() < 1e-12

    def test_ball_projector(self):
        assert np.allclose(ball_projector(2, 2), np.eye(16))
        P = ball_projector(1, 0)
        psi = max_entangled(1).amplitudes
        assert np.allclose(P, np.outer(psi, psi.conj()))
        assert np.linalg.matrix_rank(P) == 1
        for n, r in [(2, 1), (3, 1)]:
            P = ball_projector(n, r)
            assert np.abs(P @ P - P).max() < 1e-12
            assert round(np.trace(P).real) == (1 + n) ** 2
        with pytest.raises(CapacityError):
            ball_projector(7, 1)

    def test_hadamard_involution(self):
        for q in (1, 2, 4, 6):
            H = hadamard_layer(q)
            assert np.abs(H @ H - np.eye(1 << q)).max() < 1e-12


class TestPartialTrace:
    def test_nothing_traced(self):
        rho = random_state(8, 1).density()
        assert np.allclose(partial_trace(rho, (2, 4), [0, 1]), rho)

    def test_bell_half(self):
        assert np.allclose(partial_trace(max_entangled(1).density(), (2, 2), [1]), np.eye(2) / 2)

    def test_product(self):
        a, b = random_state(2, 1).density(), random_state(3, 2).density()
        assert np.allclose(partial_trace(np.kron(a, b), (2, 3), [0]), a)
        assert np.allclose(partial_trace(np.kron(a, b), (2, 3), [1]), b)

    def test_trace_preserved(self):
        rho = random_state(24, 3).density()
        for keep in ([0], [1], [2], [0, 2], []):
            assert np.trace(partial_trace(rho, (2, 3, 4), keep)) == pytest.approx(1.0)

    def test_dims_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4), (2, 3), [0])


class TestDistance:
    def test_examples(self):
        rho = random_state(4, 0).density()
        assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-15)
        p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        assert trace_distance(p0, p1) == pytest.approx(1.0)

    def test_pure_state_formula(self):
        a, b = random_state(4, 5), random_state(4, 6)
        expect = math.sqrt(1 - fidelity(a, b))
        assert trace_distance(a.density(), b.density()) == pytest.approx(expect, abs=1e-12)

    def test_hermitian_required(self):
        with pytest.raises(PreconditionError):
            trace_distance(np.array([[0, 1], [0, 0]]), np.zeros((2, 2)))


class TestEnsemble:
    L1, L2 = BitMatrix.identity(2), BitMatrix.from_array([[1, 1], [0, 1]])

    def test_single(self):
        s = purification_state(MatrixEnsemble.uniform([self.L1]))
        assert np.allclose(s.amplitudes, [1.0])

    def test_two_point(self):
        s = purification_state(MatrixEnsemble.uniform([self.L1, self.L2]))
        assert np.allclose(s.amplitudes, [S2, 0, 0, S2])

    def test_marginal(self):
        ens = MatrixEnsemble(((0.2, self.L1), (0.3, self.L2), (0.5, BitMatrix.from_array([[0, 1], [1, 0]]))))
        rho = partial_trace(purification_state(ens).density(), (3, 3), [0])
        assert np.allclose(rho, np.diag(ens.masses), atol=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            MatrixEnsemble(((0.5, self.L1), (0.5, self.L1)))
        with pytest.raises(ValueError):
            MatrixEnsemble(((0.5, self.L1),))
        with pytest.raises(ValueError):
            MatrixEnsemble(((1.0, self.L1), (0.0, self.L2)))


class TestBellExpand:
    def test_basis_inputs(self):
        e0 = DenseState([1.0, 0.0])
        g = bell_expand(max_entangled(1).tensor(e0), 1)
        assert np.allclose(g[(0, 0)], [1, 0])
        assert all(np.allclose(v, 0) for k, v in g.items() if k != (0, 0))
        g = bell_expand(bell_state(1, bv("1"), bv("0")).tensor(e0), 1)
        assert [k for k, v in g.items() if np.linalg.norm(v) > 1e-12] == [(1, 0)]

    @pytest.mark.parametrize("n,dE,seed", [(1, 1, 0), (1, 3, 1), (2, 2, 2)])
    def test_round_trip(self, n, dE, seed):
        s = random_state((1 << 2 * n) * dE, seed)
        g = bell_expand(s, n)
        assert np.abs(bell_reconstruct(g, n) - s.amplitudes).max() < 1e-12
        assert sum(np.vdot(v, v).real for v in g.values()) == pytest.approx(1.0, abs=1e-12)

    def test_bad_dim(self):
        with pytest.raises(DimensionError):
            bell_expand(DenseState([1, 0, 0, 0, 0, 0]), 1)


class TestIdentities:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_completeness(self, n):
        assert completeness_residual(n) < 1e-12
        assert orthonormality_residual(n) < 1e-12

    def test_lemma7_examples(self):
        assert lemma7_residual(1, alpha=0) < 1e-12
        assert lemma7_residual(1, beta=1) < 1e-12
        assert max(lemma7_residual(2, alpha=a) for a in range(4)) < 1e-12
        with pytest.raises(ValueError):
            lemma7_residual(1, alpha=0, beta=0)

    def test_lemma7_capacity(self):
        with pytest.raises(CapacityError):
            lemma7_residual(5)

    def test_decomposition_reported(self):
        # frozen from a dense evaluation: literal residuals are nonzero, the
        # corrected form with the diagonal term removed is exact
        r1 = lemma_decomposition_residual(1)
        assert r1.residual_z == pytest.approx(0.5) and r1.residual_x == pytest.approx(0.5)
        r2 = lemma_decomposition_residual(2)
        assert r2.residual_z == pytest.approx(2.25) and r2.residual_x == pytest.approx(0.75)
        for r in (r1, r2):
            assert r.corrected_z < 1e-12 and r.corrected_x < 1e-12
            assert len(r.per_label) == 1 << r.n

    def test_generator_set_counts(self):
        assert sum(1 for _ in commuting_generator_sets(1, 1)) == 3
        # each of the 15 non-identity Paulis commutes with 6 others
        assert sum(1 for _ in commuting_generator_sets(2, 2)) == 15 * 6 // 2

    @pytest.mark.parametrize("n", [1, 2])
    def test_projector_algebra(self, n):
        rep = projector_algebra(n)
        assert rep.max_residual < 1e-12 and rep.sets_checked > 0


class TestClaims:
    def test_corollary_uniform(self):
        for t in (0.5, 2.0, 7.0, 100.0):
            terms = corollary_terms([t] * 8)
            assert all(x == pytest.approx(1 / (1 + 7 / t)) for x in terms)
            assert sum(terms) == pytest.approx(8 * t / (t + 7))

    def test_prefactor_identity_n1(self):
        rep = prefactor_validator(BitMatrix.identity(1), BitMatrix.identity(1), [0], [0], [0], [0])
        assert not rep.singular
        # regression values from the dense evaluation
        assert rep.prefactor == pytest.approx(0.5)
        assert rep.closed_sum == pytest.approx(0.165, abs=1e-3)
        assert rep.residual == pytest.approx(rep.prefactor - rep.closed_sum)

    def test_prefactor_singular_flag(self):
        reps = prefactor_sweep(BitMatrix.identity(1))
        assert len(reps) == 16
        singular = [r for r in reps if r.singular]
        assert singular and all(r.prefactor is None and r.residual is None for r in singular)

    def test_prefactor_capacity(self):
        with pytest.raises(CapacityError):
            prefactor_validator(BitMatrix.identity(3), BitMatrix.identity(3), [0] * 3, [0] * 3, [0] * 3, [0] * 3)

    def test_bound_constant(self):
        assert props23_bound_constant(2, 1, 0) == pytest.approx(2**3.5 * 0.5)
        assert props23_bound_constant(2, 1, 0) == pytest.approx(5.657, abs=1e-3)
        assert props23_bound_constant(2, 60, 0) == pytest.approx(2**3.5)

    def test_bound_validator_n1(self):
        U, V = bound_validator_props23(1)
        assert U.skipped is None and V.skipped is not None
        assert U.min_eigenvalue == pytest.approx(-0.8284271247, abs=1e-8)
        assert U.trace_value == pytest.approx(1.0)
        assert not U.operator_holds and not U.trace_holds

    def test_bound_validator_n2(self):
        reports = bound_validator_props23(2, ensemble=default_ensemble(2))
        assert [r.family for r in reports] == ["U", "V"]
        for r in reports:
            assert r.members == 4
            assert r.min_eigenvalue == pytest.approx(-0.547986849, abs=1e-8)
        with pytest.raises(CapacityError):
            bound_validator_props23(3)
