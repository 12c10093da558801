import math
from types import SimpleNamespace

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csshash.css import ProtocolParams
from csshash.errors import DomainError, ParameterError
from csshash.qsim import bound_validator_props23
from csshash.security import (
    GAP_FLAG,
    consistency_check,
    diamond_bound,
    estimate_C,
    gap_factor,
    parameter_sweep,
    props23_constant,
    security_level,
    security_report,
)

mpmath.mp.dps = 50


def mp_h(n, r):
    if r == 0 or r == n:
        return mpmath.mpf(0)
    p = mpmath.mpf(r) / n
    return -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)


def rel(a, b):
    return abs(mpmath.mpf(a) - b) / abs(b)


class TestLevels:
    def test_r0_claimed(self):
        for k in range(0, 8):
            assert security_level(ProtocolParams(20, k, 0)) == pytest.approx(2 ** (-k / 2 + 35 / 4), rel=1e-15)

    def test_claimed_k0(self):
        assert security_level(ProtocolParams(5, 0, 0), 1.0) == 2**8.75

    def test_baseline_example(self):
        h = float(mp_h(8, 1))
        assert f"{h:.6f}" == "0.543564"
        lvl = security_level(ProtocolParams(8, 4, 1), variant="baseline")
        assert math.log2(lvl) == pytest.approx(0.5 + 8 * h, rel=1e-14)
        assert math.log2(lvl) == pytest.approx(4.8485, abs=1e-4)

    def test_proof_variant(self):
        p = ProtocolParams(8, 2, 1)
        ratio = security_level(p, 1.0, "paper") / security_level(p, 1.0, "paper-proof")
        assert ratio == pytest.approx(2**3.5)

    def test_C_dependence(self):
        p = ProtocolParams(8, 2, 1)
        assert security_level(p, 4.0) == pytest.approx(2 * security_level(p, 1.0))
        assert security_level(p, 4.0, "baseline") == security_level(p, 1.0, "baseline")

    @pytest.mark.parametrize("C", [0.0, -1.0, float("inf"), float("nan")])
    def test_domain(self, C):
        with pytest.raises(DomainError):
            security_level(ProtocolParams(4, 1, 0), C)
        with pytest.raises(DomainError):
            diamond_bound(ProtocolParams(4, 1, 0), C)
        with pytest.raises(DomainError):
            gap_factor(C)

    def test_unknown_variant(self):
        with pytest.raises(ParameterError):
            security_level(ProtocolParams(4, 1, 0), 1.0, "other")

    @given(st.integers(2, 40), st.data())
    def test_monotone(self, n, data):
        r = data.draw(st.integers(0, n // 2))
        k = data.draw(st.integers(0, n - 1))
        for v in ("paper", "baseline"):
            lo = security_level(ProtocolParams(n, k, r), 1.0, v)
            assert security_level(ProtocolParams(n, k + 1, r), 1.0, v) < lo
            if r + 1 <= n // 2:
                assert security_level(ProtocolParams(n, k, r + 1), 1.0, v) >= lo


class TestDiamond:
    def test_examples(self):
        assert diamond_bound(ProtocolParams(8, 4, 0)) == pytest.approx(2**-0.25, rel=1e-15)
        p = ProtocolParams(8, 4, 1)
        assert diamond_bound(p, 4.0) == pytest.approx(2 * diamond_bound(p, 1.0), rel=1e-15)
        h = float(mp_h(8, 1))
        assert diamond_bound(ProtocolParams(8, 6, 1)) == pytest.approx(2 ** ((-2.5 + 8 * h) / 2), rel=1e-14)
        assert -2.5 + 8 * h == pytest.approx(1.8485, abs=1e-4)

    def test_square_recovers_C(self):
        for C in (0.5, 1.0, 3.0):
            p = ProtocolParams(12, 5, 2)
            base = 2 ** (-5 + 12 * float(mp_h(12, 2)) + 3.5)
            assert diamond_bound(p, C) ** 2 / base == pytest.approx(C, rel=1e-13)


class TestGap:
    def test_gap_factor(self):
        assert gap_factor(1.0) == pytest.approx(430.54, abs=0.01)
        assert gap_factor(16.0) == pytest.approx(4 * gap_factor(1.0))

    def test_flag_at_r0(self):
        p = ProtocolParams(8, 3, 0)
        rep = security_report(p)
        assert rep.gap_from_formulas == pytest.approx(2**6.25)
        assert rep.gap_from_formulas == pytest.approx(76.11, abs=0.01)
        flags = consistency_check(p)
        gap = next(f for f in flags if f["flag"] == GAP_FLAG)
        assert gap["discrepancy_exponent"] == pytest.approx(2.5)

    def test_ratio_identity(self):
        for n, k, r in [(8, 4, 1), (12, 5, 2), (30, 10, 3)]:
            p = ProtocolParams(n, k, r)
            ratio = security_level(p) / security_level(p, variant="baseline")
            h = float(mp_h(n, r))
            assert ratio == pytest.approx(2 ** (-(n / 2) * h + 25 / 4), rel=1e-13)


class TestProps23:
    def test_examples(self):
        assert props23_constant(ProtocolParams(2, 1, 0)) == pytest.approx(2**3.5 * 0.5, rel=1e-15)
        assert props23_constant(ProtocolParams(2, 1, 0)) == pytest.approx(5.6569, abs=1e-4)
        assert props23_constant(ProtocolParams(80, 70, 0)) == pytest.approx(2**3.5, rel=1e-15)
        # k = n h(r/n) exactly: n = 2, r = 1 gives h = 1 and n h = 2
        assert props23_constant(ProtocolParams(2, 2, 1)) == 0.0

    def test_sign(self):
        for n, k, r in [(10, 6, 1), (10, 4, 1), (12, 5, 1)]:
            p = ProtocolParams(n, k, r)
            assert (props23_constant(p) > 0) == (k > n * float(mp_h(n, r)))


class TestEstimateC:
    def rep(self, trace, const, eig=None, skipped=None):
        return SimpleNamespace(trace_value=trace, min_eigenvalue=trace if eig is None else eig,
                               constant=const, skipped=skipped)

    def test_examples(self):
        assert estimate_C([self.rep(5.0, 5.0), self.rep(5.0, 5.0)]) == 1.0
        assert estimate_C([self.rep(10.0, 5.0)]) == 2.0
        assert estimate_C([self.rep(10.0, 5.0, eig=-1.0)], "operator") == -0.2

    def test_empty(self):
        with pytest.raises(ParameterError):
            estimate_C([])
        with pytest.raises(ParameterError):
            estimate_C([self.rep(1.0, -2.0)])
        with pytest.raises(ParameterError):
            estimate_C([self.rep(1.0, 1.0)], "other")

    def test_archived_n1(self):
        C = estimate_C(bound_validator_props23(1))
        assert C == pytest.approx(1.0 / (2**3.5 * 0.5), rel=1e-12)


class TestSweep:
    def test_empty(self):
        assert parameter_sweep([], [1], [0]) == []

    def test_single(self):
        (row,) = parameter_sweep([8], [4], [1], 2.0)
        assert row.report == security_report(ProtocolParams(8, 4, 1), 2.0)

    def test_four_rows(self):
        rows = parameter_sweep([12, 8], [5, 4], [1])
        assert [(r.n, r.k, r.r) for r in rows] == [(8, 4, 1), (8, 5, 1), (12, 4, 1), (12, 5, 1)]
        for row in rows:
            p = ProtocolParams(row.n, row.k, row.r)
            assert row.report.level_paper == security_level(p)
            assert row.report.level_baseline == security_level(p, variant="baseline")

    def test_skip_marker(self):
        rows = parameter_sweep([3], [1], [0, 5])
        assert rows[0].skipped is None and rows[1].skipped
        assert rows[1].to_dict()["skipped"]

    def test_window_flag(self):
        rows = parameter_sweep([12], [4, 5], [1])
        assert [r.report.admissible for r in rows] == [False, True]


def test_high_precision_agreement():
    for n in (8, 12, 16, 24, 40):
        for k in (1, 3, 5):
            for r in (0, 1, 2):
                p = ProtocolParams(n, k, r)
                h = mp_h(n, r)
                claimed = mpmath.power(2, -mpmath.mpf(k) / 2 + n * h / 2 + mpmath.mpf(35) / 4)
                assert rel(security_level(p), claimed) < 1e-12
                diamond = mpmath.sqrt(mpmath.power(2, -k + n * h + mpmath.mpf(7) / 2))
                assert rel(diamond_bound(p), diamond) < 1e-12
