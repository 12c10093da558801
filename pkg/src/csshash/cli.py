"""
Command-line entry point.

Every command prints (or writes to ``--out``) one report envelope in JSON,
or a CSV rendering of its payload.  Outputs carry no timestamps and do not
echo ``--threads``, so a fixed seed and config give byte-identical files.

Exit codes: 0 on pass or report-only, 1 on a failed check, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .css import ErrorPattern, ProtocolParams
from .errors import CapacityError, CsshashError, DomainError, ParameterError
from .gf2 import BitVector
from .montecarlo import DEFAULT_SEED
from .protocol import (
    SECRECY_LIMIT,
    DiscreteChannel,
    FixedChannel,
    IidChannel,
    correctness_probability,
    entangled_eve_input,
    sample_codes,
    secrecy_details,
)
from .qsim import (
    bound_validator_props23,
    completeness_residual,
    corollary_terms,
    default_ensemble,
    lemma7_residual,
    lemma_decomposition_residual,
    prefactor_sweep,
    projector_algebra,
)
from .qsim.identities import orthonormality_residual
from .security import estimate_C, parameter_sweep, security_exponent, security_level

TOLERANCE = 1e-10
ALGEBRA_LIMIT = 3
COMMANDS = ("verify-identities", "protocol", "security-table", "claim-validators")
# --n, --k, --r when not given
DEFAULTS = {
    "verify-identities": ("1", "1", "0"),
    "protocol": ("6", "2", "1"),
    "security-table": ("8,12", "4,5", "1"),
    "claim-validators": ("1", "1", "0"),
}

SECURITY_COLUMNS = (
    "n", "k", "r", "C", "skipped", "admissible",
    "level_paper_exponent", "level_paper", "level_paper_proof",
    "level_baseline_exponent", "level_baseline",
    "gap_claimed", "gap_from_formulas", "diamond_bound", "props23_constant",
    "flags", "discrepancy_exponent",
)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: tuple[int, ...]
    k: tuple[int, ...]
    r: tuple[int, ...]
    trials: int
    seed: int
    channel: str
    C: float
    exhaustive: bool
    codes: int
    t: float
    # not echoed: output must not depend on the worker count
    threads: int = field(default=1, compare=False)

    def single(self, name: str) -> int:
        values = getattr(self, name)
        if len(values) != 1:
            raise UsageError(f"{self.command} takes a single --{name}, got {list(values)}")
        return values[0]

    def params(self) -> ProtocolParams:
        try:
            return ProtocolParams(self.single("n"), self.single("k"), self.single("r"))
        except ParameterError as exc:
            raise UsageError(str(exc)) from exc

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("threads")
        for key in ("n", "k", "r"):
            out[key] = list(out[key])
        return out


def parse_ints(spec: str) -> tuple[int, ...]:
    """``"1,3,5-7"`` -> ``(1, 3, 5, 6, 7)``; the empty string is the empty range."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in spec.split(","))):
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"bad integer list {spec!r}") from None
    return tuple(out)


def parse_channel(spec: str, n: int, r: int):
    """``fixed:<hex alpha>:<hex beta>``, ``iid:<p_x>:<p_z>`` or ``ball``.

    Hex masks are packed with bit ``j`` for qubit ``j``.
    """
    kind, _, rest = spec.partition(":")
    try:
        if kind == "fixed":
            a, b = (int(x, 16) for x in rest.split(":"))
            if a >> n or b >> n:
                raise UsageError(f"fixed error {spec!r} does not fit in {n} bits")
            return FixedChannel(ErrorPattern(BitVector(n, a), BitVector(n, b)))
        if kind == "iid":
            px, pz = (float(x) for x in rest.split(":"))
            return IidChannel(px, pz)
        if kind == "ball" and not rest:
            return DiscreteChannel.uniform_ball(n, r)
    except (ValueError, ParameterError) as exc:
        raise UsageError(f"bad channel {spec!r}: {exc}") from None
    raise UsageError(f"bad channel {spec!r}; use fixed:A:B, iid:PX:PZ or ball")


def sanitize(obj):
    """Replace non-finite floats by ``None`` and numpy scalars by Python ones."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def envelope(cfg: RunConfig, status: str, payload: dict) -> dict:
    return sanitize(
        {
            "version": __version__,
            "command": cfg.command,
            "config": cfg.echo(),
            "status": status,
            "payload": payload,
        }
    )


def load_schema() -> dict:
    text = resources.files("csshash").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate_envelope(env: dict) -> None:
    jsonschema.validate(env, load_schema())


# -- commands ----------------------------------------------------------------


def _fail(cfg: RunConfig, exc: Exception) -> dict:
    return envelope(cfg, "fail", {"reason": f"{type(exc).__name__}: {exc}"})


def cmd_verify_identities(cfg: RunConfig) -> dict:
    results = []
    ok = True
    try:
        for n in cfg.n:
            comp = completeness_residual(n)
            orth = orthonormality_residual(n)
            d = 1 << n
            l7 = {
                "z_version": {BitVector(n, a).to_string(): lemma7_residual(n, alpha=a) for a in range(d)},
                "x_version": {BitVector(n, b).to_string(): lemma7_residual(n, beta=b) for b in range(d)},
            }
            l7["max"] = max(max(l7["z_version"].values()), max(l7["x_version"].values()))
            algebra = projector_algebra(n).to_dict() if n <= ALGEBRA_LIMIT else None
            checks = [comp, orth, l7["max"]]
            if algebra is not None:
                checks.append(max(algebra[k] for k in ("idempotence", "hermiticity", "trace", "resolution")))
            passed = all(c < TOLERANCE for c in checks)
            ok = ok and passed
            decomposition = lemma_decomposition_residual(n).to_dict()
            decomposition.pop("n")
            results.append(
                {
                    "n": n,
                    "pass": passed,
                    "completeness": comp,
                    "orthonormality": orth,
                    "lemma7": l7,
                    "projector_algebra": algebra,
                    # report-only: the literal decomposition is the claim under test
                    "decomposition": decomposition,
                }
            )
    except CapacityError as exc:
        return _fail(cfg, exc)
    return envelope(cfg, "pass" if ok else "fail", {"results": results, "tolerance": TOLERANCE})


def cmd_protocol(cfg: RunConfig) -> dict:
    params = cfg.params()
    if not params.has_key:
        raise UsageError(f"need 2k < n to extract a key, got n={params.n}, k={params.k}")
    channel = parse_channel(cfg.channel, params.n, params.r)
    try:
        stats = correctness_probability(
            params,
            channel,
            cfg.trials,
            exhaustive=cfg.exhaustive,
            seed=cfg.seed,
            threads=cfg.threads,
            n_codes=cfg.codes,
        )
        secrecy = None
        if params.n <= SECRECY_LIMIT:
            (code,) = sample_codes(params, 1, cfg.seed)
            rep = secrecy_details(params, code, entangled_eve_input(params.n, channel))
            secrecy = {
                **rep.to_dict(),
                "code_L": [r.to_string() for r in code.L.row_vectors()],
                "security_level_paper": security_level(params, cfg.C, "paper"),
                "security_level_baseline": security_level(params, cfg.C, "baseline"),
            }
    except CapacityError as exc:
        return _fail(cfg, exc)
    status = "report-only"
    if cfg.exhaustive:
        in_ball = all(
            e.alpha.weight <= params.r and e.beta.weight <= params.r
            for _, e in channel.support(params.n)
        )
        if in_ball:
            status = "pass" if stats.exact_joint == 0 else "fail"
    payload = {
        "params": {**asdict(params), "key_length": params.key_length, "admissible": params.admissible},
        "channel": channel.describe(),
        "correctness": stats.to_dict(),
        "secrecy": secrecy,
    }
    return envelope(cfg, status, payload)


def _security_row(row) -> dict:
    d = row.to_dict()
    if row.report is not None:
        params = ProtocolParams(row.n, row.k, row.r)
        d["level_paper_exponent"] = security_exponent(params, row.report.C, "paper")
        d["level_baseline_exponent"] = security_exponent(params, row.report.C, "baseline")
        d["flags"] = row.report.flag_names
        gap = [f for f in row.report.consistency_flags if "discrepancy_exponent" in f]
        d["discrepancy_exponent"] = gap[0]["discrepancy_exponent"] if gap else None
    return d


def cmd_security_table(cfg: RunConfig) -> dict:
    try:
        rows = parameter_sweep(cfg.n, cfg.k, cfg.r, cfg.C)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    return envelope(cfg, "pass", {"rows": [_security_row(r) for r in rows]})


def cmd_claim_validators(cfg: RunConfig) -> dict:
    from .gf2 import BitMatrix

    try:
        n, k, r = cfg.single("n"), cfg.single("k"), cfg.single("r")
        if not 0 <= r <= n:
            raise UsageError(f"r must lie in [0, n], got r={r}, n={n}")
        bounds = bound_validator_props23(n, k, r, default_ensemble(n) if n <= 2 else None)
        sweep = prefactor_sweep(BitMatrix.identity(n), k)
    except (CapacityError, ParameterError) as exc:
        return _fail(cfg, exc)
    terms = corollary_terms([cfg.t] * 8)
    estimated = {}
    for reading in ("trace", "operator"):
        try:
            estimated[reading] = estimate_C(bounds, reading)
        except ParameterError:
            estimated[reading] = None
    payload = {
        "prefactor": {
            "code": "identity",
            "reports": [p.to_dict() for p in sweep],
            "singular_count": sum(p.singular for p in sweep),
        },
        "corollary": {
            "t": cfg.t,
            "terms": terms,
            "sum": math.fsum(terms),
            "closed_form": 8 * cfg.t / (cfg.t + 7),
        },
        "bounds": [b.to_dict() for b in bounds],
        "estimated_C": estimated,
    }
    return envelope(cfg, "report-only", payload)


# -- rendering ---------------------------------------------------------------


def render_json(env: dict) -> str:
    return json.dumps(env, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ";".join(_cell(x) for x in v)
    return str(v)


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for key, v in obj.items():
            yield from _flatten(v, f"{prefix}.{key}" if prefix else key)
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render_csv(env: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    payload = env["payload"]
    if env["command"] == "security-table" and "rows" in payload:
        w.writerow(SECURITY_COLUMNS)
        for row in payload["rows"]:
            w.writerow([_cell(row.get(c)) for c in SECURITY_COLUMNS])
    else:
        w.writerow(("key", "value"))
        for key, v in sorted(_flatten({"status": env["status"], **payload})):
            w.writerow((key, _cell(v)))
    return buf.getvalue()


# -- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="csshash", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="block length, or a list like 8,12 or 4-6")
    common.add_argument("--k", help="syndrome length (list allowed for security-table)")
    common.add_argument("--r", help="error radius (list allowed for security-table)")
    common.add_argument("--trials", type=int, default=10_000)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    common.add_argument("--channel", default="fixed:0:0", help="fixed:A:B, iid:PX:PZ or ball")
    common.add_argument("--C", type=float, default=1.0)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--exhaustive", action="store_true")
    common.add_argument("--codes", type=int, default=100, help="sampled codes for --exhaustive")
    common.add_argument("--t", type=float, default=2.0, help="uniform T' input for the corollary check")

    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    if not 0 <= args.seed < 1 << 64:
        raise UsageError("--seed must fit in 64 bits")
    n, k, r = (
        given if given is not None else default
        for given, default in zip((args.n, args.k, args.r), DEFAULTS[args.command])
    )
    cfg = RunConfig(
        args.command,
        parse_ints(n),
        parse_ints(k),
        parse_ints(r),
        args.trials,
        args.seed,
        args.channel,
        args.C,
        args.exhaustive,
        args.codes,
        args.t,
        args.threads,
    )
    return cfg


HANDLERS = {
    "verify-identities": cmd_verify_identities,
    "protocol": cmd_protocol,
    "security-table": cmd_security_table,
    "claim-validators": cmd_claim_validators,
}


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Parse ``argv``; return the exit code, the rendered output and ``--out``."""
    args = build_parser().parse_args(argv)
    cfg = make_config(args)
    env = HANDLERS[cfg.command](cfg)
    validate_envelope(env)
    text = render_csv(env) if args.format == "csv" else render_json(env)
    return (1 if env["status"] == "fail" else 0), text, args.out


def main(argv: list[str] | None = None) -> int:
    try:
        code, text, out = run(argv)
    except UsageError as exc:
        print(f"csshash: usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except CsshashError as exc:
        print(f"csshash: error: {exc}", file=sys.stderr)
        return 2
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
