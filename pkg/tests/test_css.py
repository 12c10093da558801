import math
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csshash.css import (
    BallDecoder,
    ErrorPattern,
    HammingBall,
    ProtocolParams,
    ball_members,
    binary_entropy,
    build_css,
    decode_in_ball,
    enumerate_ball,
    error_filter,
    hamming_ball_volume,
    parity_checks,
    syndrome,
)
from csshash.errors import CapacityError, DimensionError, DomainError, ParameterError, SingularError
from csshash.gf2 import BitMatrix, BitVector, gf2_matmul, sample_matrix


def bv(s):
    return BitVector.from_string(s)


def brute_decode(P, s, n, r):
    hits = [e for e in range(1 << n) if bin(e).count("1") <= r and P.apply_int(e) == s]
    return hits[0] if len(hits) == 1 else None


class TestParams:
    def test_structural(self):
        with pytest.raises(ParameterError):
            ProtocolParams(0, 0, 0)
        with pytest.raises(ParameterError):
            ProtocolParams(4, -1, 0)
        with pytest.raises(ParameterError):
            ProtocolParams(4, 1, 5)

    def test_window(self):
        assert ProtocolParams(3, 1, 0).admissible
        assert not ProtocolParams(4, 2, 0).admissible
        # 2 * 12 * h(1/12) = 9.8 < 10 < 12
        assert ProtocolParams(12, 5, 1).admissible
        assert not ProtocolParams(10, 4, 1).admissible
        assert ProtocolParams(10, 4, 1).has_key


class TestBuild:
    def test_identity_code(self):
        c = build_css(BitMatrix.identity(3), ProtocolParams(3, 1, 0))
        assert c.P1 == BitMatrix.from_array([[1, 0, 0]])
        assert c.P2 == BitMatrix.from_array([[0, 1, 0]])
        assert c.key_extractor == BitMatrix.from_array([[0, 0, 1]])
        assert gf2_matmul(c.P1, c.P2.T).is_zero()

    def test_orthogonality_sampled(self):
        rng = np.random.default_rng(1)
        p = ProtocolParams(6, 2, 1)
        for _ in range(10_000):
            c = build_css(sample_matrix(6, True, rng), p)
            assert gf2_matmul(c.P1, c.P2.T).is_zero()
            assert gf2_matmul(c.P1, c.key_extractor.T).is_zero()
        assert gf2_matmul(c.L, c.L_inv_T.T) == BitMatrix.identity(6)

    def test_full_rank_blocks(self):
        c = build_css(sample_matrix(9, True, 3), ProtocolParams(9, 3, 1))
        for block in (c.P1, c.P2, c.key_extractor):
            assert block.rank() == block.n_rows

    def test_errors(self):
        with pytest.raises(ParameterError):
            build_css(BitMatrix.identity(4), ProtocolParams(4, 2, 0))
        with pytest.raises(ParameterError):
            build_css(BitMatrix.identity(3), ProtocolParams(4, 1, 0))
        with pytest.raises(SingularError):
            build_css(BitMatrix.from_array([[1, 1, 0], [1, 1, 0], [0, 0, 1]]), ProtocolParams(3, 1, 0))

    def test_parity_checks_tight(self):
        P1, P2 = parity_checks(BitMatrix.identity(2), 1)
        assert P1.rows == (1,) and P2.rows == (2,)


class TestEntropy:
    def test_examples(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0

    def test_eighth_against_mpmath(self):
        mpmath.mp.dps = 40
        p = mpmath.mpf(1) / 8
        ref = -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)
        assert abs(binary_entropy(1 / 8) - float(ref)) < 1e-15
        assert f"{binary_entropy(1 / 8):.6f}" == "0.543564"

    @pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            binary_entropy(p)

    @given(st.floats(0, 1))
    def test_symmetric_and_bounded(self, p):
        assert 0.0 <= binary_entropy(p) <= 1.0
        assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)


class TestBall:
    def test_volumes(self):
        assert hamming_ball_volume(4, 1) == 5
        assert hamming_ball_volume(7, 0) == 1
        assert hamming_ball_volume(3, 3) == 8

    @pytest.mark.parametrize("n", range(1, 9))
    def test_volume_by_enumeration(self, n):
        for r in range(n + 1):
            count = sum(bin(x).count("1") <= r for x in range(1 << n))
            assert hamming_ball_volume(n, r) == count
            members = list(enumerate_ball(n, r))
            assert len(members) == count == len(set(members))

    def test_volume_entropy_bound(self):
        for n in range(1, 21):
            for r in range(1, n // 2 + 1):
                assert hamming_ball_volume(n, r) <= 2 ** (n * binary_entropy(r / n)) * (1 + 1e-12)

    def test_order(self):
        assert [v.to_string() for v in enumerate_ball(3, 1)] == ["000", "100", "010", "001"]
        weights = [v.weight for v in enumerate_ball(5, 3)]
        assert weights == sorted(weights)

    def test_cap(self):
        with pytest.raises(CapacityError):
            ball_members(30, 15, cap=1000)

    def test_container(self):
        B = HammingBall(4, 1)
        assert bv("0100") in B and bv("0110") not in B
        assert len(B) == 5 and len(list(B)) == 5


class TestFilterAndSyndrome:
    def test_filter(self):
        B = HammingBall(4, 1)
        assert error_filter(bv("0100"), B) == bv("0100")
        assert error_filter(bv("1100"), B) is None
        assert error_filter(bv("01"), {bv("01")}) == bv("01")

    def test_syndromes(self):
        P = BitMatrix.from_array([[1, 0, 0], [0, 1, 0]])
        assert syndrome(P, bv("100")).to_string() == "10"
        assert syndrome(P, bv("000")).is_zero()
        assert syndrome(BitMatrix.from_array([[1, 1, 0]]), bv("110")).to_string() == "0"
        with pytest.raises(DimensionError):
            syndrome(P, bv("10"))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(0, 255), st.integers(0, 255))
    def test_linear(self, seed, a, b):
        P = sample_matrix(3, False, seed, n_cols=8)
        e, f = BitVector(8, a), BitVector(8, b)
        assert syndrome(P, e + f) == syndrome(P, e) + syndrome(P, f)


class TestDecode:
    P = BitMatrix.from_array([[1, 0, 0], [0, 1, 0]])

    def test_examples(self):
        assert decode_in_ball(self.P, bv("00"), 3, 0) == bv("000")
        assert decode_in_ball(self.P, bv("10"), 3, 1) == bv("100")
        assert decode_in_ball(self.P, bv("00"), 3, 1) is None
        assert decode_in_ball(self.P, bv("11"), 3, 1) is None

    @pytest.mark.parametrize("n,k,r", [(4, 2, 1), (6, 3, 1), (8, 4, 2), (10, 5, 1)])
    def test_matches_brute_force(self, n, k, r):
        rng = np.random.default_rng(n)
        for _ in range(5):
            P = sample_matrix(k, False, rng, n_cols=n)
            dec = BallDecoder(P, r)
            for s in range(1 << k):
                assert dec.decode_int(s) == brute_decode(P, s, n, r)

    @pytest.mark.parametrize("n", [6, 8, 10])
    def test_unique_members_round_trip(self, n):
        rng = np.random.default_rng(n + 100)
        P = sample_matrix(n // 2, False, rng, n_cols=n)
        dec = BallDecoder(P, 1)
        table = {}
        for e in ball_members(n, 1):
            table.setdefault(P.apply_int(e), []).append(e)
        for e in ball_members(n, 1):
            unique = len(table[P.apply_int(e)]) == 1
            assert (dec.decode(syndrome(P, BitVector(n, e))) == BitVector(n, e)) == unique

    def test_shape_errors(self):
        with pytest.raises(DimensionError):
            decode_in_ball(self.P, bv("00"), 4, 1)
        with pytest.raises(DimensionError):
            BallDecoder(self.P, 1).decode(bv("000"))


def test_error_pattern():
    z = ErrorPattern.zero(3)
    assert z.n == 3 and z.alpha.is_zero() and z.beta.is_zero()
    with pytest.raises(Exception):
        ErrorPattern(bv("01"), bv("011"))
