"""
Closed-form security levels and the cross-checks between them.

All levels are powers of two, so each is evaluated from its exponent.  The
claimed and baseline levels disagree with the claimed gap factor; that
disagreement is reported as a named flag rather than reconciled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .css import ProtocolParams, binary_entropy
from .errors import DomainError, ParameterError

VARIANTS = ("paper", "paper-proof", "baseline")
GAP_FLAG = "abstract-vs-theorem-gap"
PROPS23_FLAG = "props23-constant-nonpositive"

# 5/2 (5 - 3/2) in the statement, 3/2 (5 - 3/2) in the proof
PAPER_OFFSET = 2.5 * 3.5
PROOF_OFFSET = 1.5 * 3.5
BASELINE_OFFSET = 2.5
DIAMOND_OFFSET = 3.5


def _check_C(C: float) -> None:
    if not (C > 0 and math.isfinite(C)):
        raise DomainError(f"C must be a positive finite real, got {C}")


def _nh(params: ProtocolParams) -> float:
    return params.n * binary_entropy(params.r / params.n)


def security_exponent(params: ProtocolParams, C: float = 1.0, variant: str = "paper") -> float:
    """``log2`` of :func:`security_level`."""
    if variant == "baseline":
        return -params.k / 2 + _nh(params) + BASELINE_OFFSET
    _check_C(C)
    if variant == "paper":
        offset = PAPER_OFFSET
    elif variant == "paper-proof":
        offset = PROOF_OFFSET
    else:
        raise ParameterError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return -params.k / 2 + _nh(params) / 2 + offset + 0.5 * math.log2(C)


def security_level(params: ProtocolParams, C: float = 1.0, variant: str = "paper") -> float:
    """The claimed level, its proof-intermediate variant, or the baseline level.

    >>> security_level(ProtocolParams(8, 0, 0)) == 2 ** 8.75
    True
    """
    return 2.0 ** security_exponent(params, C, variant)


def diamond_bound(params: ProtocolParams, C: float = 1.0) -> float:
    """``sqrt(C 2^(-k + n h(r/n) + 7/2))``."""
    _check_C(C)
    return math.sqrt(C) * 2.0 ** ((-params.k + _nh(params) + DIAMOND_OFFSET) / 2)


def gap_factor(C: float = 1.0) -> float:
    """The claimed gap ``2^(35/4) sqrt(C)``."""
    _check_C(C)
    return 2.0**PAPER_OFFSET * math.sqrt(C)


def gap_from_formulas_exponent(params: ProtocolParams, C: float = 1.0) -> float:
    """``log2`` of the claimed level over the baseline level: ``-(n/2) h + 25/4 + log2 sqrt(C)``."""
    _check_C(C)
    return -_nh(params) / 2 + PAPER_OFFSET - BASELINE_OFFSET + 0.5 * math.log2(C)


def props23_constant(params: ProtocolParams) -> float:
    """``2^3.5 - 2^(-k + n h + 3.5)``, written to stay accurate near zero."""
    return -(2.0**3.5) * math.expm1((-params.k + _nh(params)) * math.log(2.0))


def consistency_check(params: ProtocolParams, C: float = 1.0) -> list[dict]:
    """Named flags for self-inconsistencies among the formulas."""
    _check_C(C)
    flags = []
    claimed = PAPER_OFFSET + 0.5 * math.log2(C)
    derived = gap_from_formulas_exponent(params, C)
    discrepancy = claimed - derived
    if discrepancy != 0:
        flags.append(
            {
                "flag": GAP_FLAG,
                "claimed_exponent": claimed,
                "formula_exponent": derived,
                "discrepancy_exponent": discrepancy,
            }
        )
    const = props23_constant(params)
    if const <= 0:
        flags.append({"flag": PROPS23_FLAG, "constant": const})
    return flags


@dataclass(frozen=True)
class SecurityReport:
    n: int
    k: int
    r: int
    C: float
    level_paper: float
    level_paper_proof: float
    level_baseline: float
    gap_claimed: float
    gap_from_formulas: float
    diamond_bound: float
    props23_constant: float
    admissible: bool
    consistency_flags: list = field(default_factory=list)

    @property
    def flag_names(self) -> list[str]:
        return [f["flag"] for f in self.consistency_flags]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "r": self.r,
            "C": self.C,
            "level_paper": self.level_paper,
            "level_paper_proof": self.level_paper_proof,
            "level_baseline": self.level_baseline,
            "gap_claimed": self.gap_claimed,
            "gap_from_formulas": self.gap_from_formulas,
            "diamond_bound": self.diamond_bound,
            "props23_constant": self.props23_constant,
            "admissible": self.admissible,
            "consistency_flags": self.consistency_flags,
        }


def security_report(params: ProtocolParams, C: float = 1.0) -> SecurityReport:
    return SecurityReport(
        params.n,
        params.k,
        params.r,
        float(C),
        security_level(params, C, "paper"),
        security_level(params, C, "paper-proof"),
        security_level(params, C, "baseline"),
        gap_factor(C),
        2.0 ** gap_from_formulas_exponent(params, C),
        diamond_bound(params, C),
        props23_constant(params),
        params.admissible,
        consistency_check(params, C),
    )


def estimate_C(reports: Sequence, reading: str = "trace") -> float:
    """Smallest ratio of braket value to the bound constant over the reports.

    ``reading="trace"`` uses each report's ``trace_value``;
    ``reading="operator"`` its ``min_eigenvalue``.  Skipped reports and
    reports with a nonpositive constant are ignored.
    """
    if reading not in ("trace", "operator"):
        raise ParameterError(f"unknown reading {reading!r}")
    attr = "trace_value" if reading == "trace" else "min_eigenvalue"
    ratios = [
        getattr(rep, attr) / rep.constant
        for rep in reports
        if getattr(rep, "skipped", None) is None and rep.constant > 0
    ]
    if not ratios:
        raise ParameterError("no usable validator reports")
    return min(ratios)


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    r: int
    report: SecurityReport | None
    skipped: str | None = None

    def to_dict(self) -> dict:
        if self.report is None:
            return {"n": self.n, "k": self.k, "r": self.r, "skipped": self.skipped}
        return {**self.report.to_dict(), "skipped": None}


def parameter_sweep(
    ns: Iterable[int], ks: Iterable[int], rs: Iterable[int], C: float = 1.0
) -> list[SweepRow]:
    """One row per ``(n, k, r)`` in lexicographic order.

    Triples that are not valid parameters at all get a skip marker.  Valid
    triples outside the admissibility window are still evaluated and carry
    ``admissible=False``.
    """
    _check_C(C)
    rows = []
    for n in sorted(set(ns)):
        for k in sorted(set(ks)):
            for r in sorted(set(rs)):
                try:
                    params = ProtocolParams(n, k, r)
                except ParameterError as exc:
                    rows.append(SweepRow(n, k, r, None, str(exc)))
                    continue
                rows.append(SweepRow(n, k, r, security_report(params, C)))
    return rows
