"""
The hashing QKD protocol in the error-vector picture.

Eve's action is a Pauli error ``(alpha, beta)`` on the shared Bell pairs.
Alice's raw bit and phase outcomes are uniform; Bob's differ from them by
``alpha`` and ``beta``.  Both publish syndromes, decode the differences in
the Hamming ball and, unless a decode aborts, extract keys with the key
extractor rows, Bob correcting his with the phase decode.

:func:`secrecy_check_tiny` runs the same protocol coherently on an explicit
purified input and measures the distance of the output from the ideal
uniform-key state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Protocol, Sequence

import numpy as np

from .css import BallDecoder, CssCode, ErrorPattern, ProtocolParams, ball_members, build_css
from .errors import CapacityError, ParameterError
from .gf2 import BitVector, random_rows, sample_matrix
from .montecarlo import DEFAULT_SEED, Estimate, run_blocks
from .pauli import DENSE_LIMIT, pauli_x, pauli_z
from .qsim.dense import DenseState, bell_amplitudes, pauli_projector, trace_distance

SUPPORT_CAP = 1 << 20
SECRECY_LIMIT = 3


# -- channels ----------------------------------------------------------------


class EveChannel(Protocol):
    def sample(self, n: int, rng: np.random.Generator) -> ErrorPattern: ...

    def support(self, n: int) -> list[tuple[float, ErrorPattern]]: ...

    def describe(self) -> str: ...


@dataclass(frozen=True)
class FixedChannel:
    """Always applies the same error."""

    pattern: ErrorPattern

    def _check(self, n: int) -> None:
        if self.pattern.n != n:
            raise ParameterError(f"fixed error has length {self.pattern.n}, expected {n}")

    def sample(self, n: int, rng: np.random.Generator) -> ErrorPattern:
        self._check(n)
        return self.pattern

    def support(self, n: int) -> list[tuple[float, ErrorPattern]]:
        self._check(n)
        return [(1.0, self.pattern)]

    def describe(self) -> str:
        return f"fixed:{self.pattern.alpha.value:x}:{self.pattern.beta.value:x}"


def zero_channel(n: int) -> FixedChannel:
    return FixedChannel(ErrorPattern.zero(n))


@dataclass(frozen=True)
class IidChannel:
    """Independent bit flips with rate ``p_x`` and phase flips with rate ``p_z``."""

    p_x: float
    p_z: float

    def __post_init__(self):
        for p in (self.p_x, self.p_z):
            if not 0.0 <= p <= 1.0:
                raise ParameterError(f"flip probabilities must lie in [0, 1], got {p}")

    def sample(self, n: int, rng: np.random.Generator) -> ErrorPattern:
        flips = rng.random((2, n))
        a = BitVector.from_bits(flips[0] < self.p_x)
        b = BitVector.from_bits(flips[1] < self.p_z)
        return ErrorPattern(a, b)

    def support(self, n: int) -> list[tuple[float, ErrorPattern]]:
        if 4**n > SUPPORT_CAP:
            raise CapacityError(f"iid support 4^{n} exceeds cap {SUPPORT_CAP}")

        def mass(w: int, p: float) -> float:
            return p**w * (1.0 - p) ** (n - w)

        out = []
        for a, b in product(range(1 << n), repeat=2):
            m = mass(a.bit_count(), self.p_x) * mass(b.bit_count(), self.p_z)
            if m > 0:
                out.append((m, ErrorPattern(BitVector(n, a), BitVector(n, b))))
        return out

    def describe(self) -> str:
        return f"iid:{self.p_x!r}:{self.p_z!r}"


@dataclass(frozen=True)
class DiscreteChannel:
    """An explicit finite distribution over error patterns."""

    members: tuple[tuple[float, ErrorPattern], ...]
    name: str = "discrete"

    def __post_init__(self):
        if not self.members:
            raise ParameterError("channel needs at least one error")
        if any(m < 0 for m, _ in self.members):
            raise ParameterError("masses must be nonnegative")
        if not math.isclose(sum(m for m, _ in self.members), 1.0, abs_tol=1e-12):
            raise ParameterError("masses must sum to 1")

    @classmethod
    def uniform_ball(cls, n: int, r: int) -> DiscreteChannel:
        """Uniform over ``(alpha, beta)`` with both weights at most ``r``."""
        ball = ball_members(n, r)
        m = 1.0 / (len(ball) ** 2)
        members = tuple(
            (m, ErrorPattern(BitVector(n, a), BitVector(n, b))) for a in ball for b in ball
        )
        return cls(members, "ball")

    def sample(self, n: int, rng: np.random.Generator) -> ErrorPattern:
        masses = np.array([m for m, _ in self.members])
        pattern = self.members[rng.choice(len(self.members), p=masses / masses.sum())][1]
        if pattern.n != n:
            raise ParameterError(f"channel errors have length {pattern.n}, expected {n}")
        return pattern

    def support(self, n: int) -> list[tuple[float, ErrorPattern]]:
        return list(self.members)

    def describe(self) -> str:
        return self.name


# -- transcripts -------------------------------------------------------------


@dataclass(frozen=True)
class Accept:
    w_A: BitVector
    w_B: BitVector


class _Abort:
    __slots__ = ()

    def __repr__(self) -> str:
        return "Abort"


ABORT = _Abort()
KeyOutcome = Accept | _Abort


def _bits_or_none(v: BitVector | None) -> str | None:
    return None if v is None else v.to_string()


@dataclass(frozen=True)
class Transcript:
    code: CssCode
    alpha: BitVector
    beta: BitVector
    u_A: BitVector
    u_B: BitVector
    v_A: BitVector
    v_B: BitVector
    t_z: BitVector | None
    t_x: BitVector | None
    w_A: BitVector | None
    w_B: BitVector | None

    @property
    def accepted(self) -> bool:
        return self.t_z is not None and self.t_x is not None

    @property
    def outcome(self) -> KeyOutcome:
        return Accept(self.w_A, self.w_B) if self.accepted else ABORT

    @property
    def keys_match(self) -> bool:
        return self.accepted and self.w_A == self.w_B

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.to_string(),
            "beta": self.beta.to_string(),
            "u_A": self.u_A.to_string(),
            "u_B": self.u_B.to_string(),
            "v_A": self.v_A.to_string(),
            "v_B": self.v_B.to_string(),
            "t_z": _bits_or_none(self.t_z),
            "t_x": _bits_or_none(self.t_x),
            "w_A": _bits_or_none(self.w_A),
            "w_B": _bits_or_none(self.w_B),
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class Decoders:
    z: BallDecoder
    x: BallDecoder

    @classmethod
    def for_code(cls, code: CssCode) -> Decoders:
        r = code.params.r
        return cls(BallDecoder(code.P1, r), BallDecoder(code.P2, r))


def run_with_error(
    code: CssCode,
    error: ErrorPattern,
    z_A: BitVector,
    x_A: BitVector,
    decoders: Decoders | None = None,
) -> Transcript:
    """One protocol run for a given error and Alice's raw outcomes."""
    n, k = code.n, code.params.k
    if error.n != n or z_A.length != n or x_A.length != n:
        raise ParameterError(f"error and raw outcomes must have length {n}")
    dec = decoders or Decoders.for_code(code)
    z_B, x_B = z_A + error.alpha, x_A + error.beta
    P1, P2, M = code.P1, code.P2, code.key_extractor
    u_A, u_B = P1.apply_int(z_A.value), P1.apply_int(z_B.value)
    v_A, v_B = P2.apply_int(x_A.value), P2.apply_int(x_B.value)
    t_z = dec.z.decode_int(u_A ^ u_B)
    t_x = dec.x.decode_int(v_A ^ v_B)
    w_A = w_B = None
    if t_z is not None and t_x is not None:
        klen = n - 2 * k
        w_A = BitVector(klen, M.apply_int(x_A.value))
        # Bob's correction: w_B + M t_x
        w_B = BitVector(klen, M.apply_int(x_B.value) ^ M.apply_int(t_x))
    return Transcript(
        code,
        error.alpha,
        error.beta,
        BitVector(k, u_A),
        BitVector(k, u_B),
        BitVector(k, v_A),
        BitVector(k, v_B),
        None if t_z is None else BitVector(n, t_z),
        None if t_x is None else BitVector(n, t_x),
        w_A,
        w_B,
    )


def run_protocol(
    params: ProtocolParams,
    code: CssCode,
    channel: EveChannel,
    rng: np.random.Generator | int | None = None,
    decoders: Decoders | None = None,
) -> Transcript:
    """Draw an error from ``channel`` and Alice's outcomes from ``rng``, then run."""
    if code.params != params:
        raise ParameterError(f"code was built for {code.params}, not {params}")
    rng = np.random.default_rng(rng)
    n = params.n
    error = channel.sample(n, rng)
    z_A, x_A = (BitVector(n, v) for v in random_rows(rng, 2, n))
    return run_with_error(code, error, z_A, x_A, decoders)


def random_code(params: ProtocolParams, rng: np.random.Generator) -> CssCode:
    return build_css(sample_matrix(params.n, True, rng), params)


# -- estimates ---------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolStats:
    """Counts over many runs: acceptances and accepted runs with unequal keys."""

    trials: int
    accepted: int
    mismatched: int
    mode: str = "monte-carlo"
    exact_joint: float | None = None
    exact_accept: float | None = None

    @property
    def abort(self) -> Estimate:
        return Estimate(self.trials - self.accepted, self.trials)

    @property
    def joint_mismatch(self) -> Estimate:
        """``P[accept and w_A != w_B]``."""
        return Estimate(self.mismatched, self.trials)

    @property
    def conditional_mismatch(self) -> Estimate:
        """``P[w_A != w_B | accept]``."""
        return Estimate(self.mismatched, self.accepted)

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "trials": self.trials,
            "accepted": self.accepted,
            "mismatched": self.mismatched,
            "abort": self.abort.to_dict(),
            "joint_mismatch": self.joint_mismatch.to_dict(),
            "conditional_mismatch": self.conditional_mismatch.to_dict(),
        }
        if self.mode == "exhaustive":
            out["exact_joint_mismatch"] = self.exact_joint
            out["exact_accept"] = self.exact_accept
            out["exact_conditional_mismatch"] = (
                self.exact_joint / self.exact_accept if self.exact_accept else 0.0
            )
        return out


def simulate(
    params: ProtocolParams,
    channel: EveChannel,
    trials: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    code: CssCode | None = None,
) -> ProtocolStats:
    """Monte Carlo runs, each with a fresh random code unless ``code`` is fixed."""
    params.require_key()
    fixed = None if code is None else Decoders.for_code(code)

    def block(rng: np.random.Generator, size: int):
        acc = bad = 0
        for _ in range(size):
            c = code if code is not None else random_code(params, rng)
            t = run_protocol(params, c, channel, rng, fixed or Decoders.for_code(c))
            if t.accepted:
                acc += 1
                bad += t.w_A != t.w_B
        return acc, bad

    accepted, mismatched = run_blocks(block, trials, seed, threads)
    return ProtocolStats(trials, accepted, mismatched)


def exhaustive_stats(
    params: ProtocolParams,
    channel: EveChannel,
    codes: Sequence[CssCode],
    seed: int = DEFAULT_SEED,
) -> ProtocolStats:
    """Enumerate the whole channel support against each code.

    Codes are weighted equally and support points by their masses.  Alice's
    raw outcomes are drawn once per run from ``seed``; key agreement does not
    depend on them.
    """
    params.require_key()
    support = channel.support(params.n)
    rng = np.random.default_rng(seed)
    runs = accepted = mismatched = 0
    joint = acc_mass = 0.0
    for code in codes:
        dec = Decoders.for_code(code)
        for mass, error in support:
            z_A, x_A = (BitVector(params.n, v) for v in random_rows(rng, 2, params.n))
            t = run_with_error(code, error, z_A, x_A, dec)
            runs += 1
            if t.accepted:
                accepted += 1
                acc_mass += mass
                if t.w_A != t.w_B:
                    mismatched += 1
                    joint += mass
    nc = len(codes)
    return ProtocolStats(runs, accepted, mismatched, "exhaustive", joint / nc, acc_mass / nc)


def sample_codes(params: ProtocolParams, count: int, seed: int = DEFAULT_SEED) -> list[CssCode]:
    rng = np.random.default_rng(seed)
    return [random_code(params, rng) for _ in range(count)]


def correctness_probability(
    params: ProtocolParams,
    channel: EveChannel,
    trials: int = 10_000,
    *,
    exhaustive: bool = False,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    code: CssCode | None = None,
    n_codes: int = 100,
) -> ProtocolStats:
    """Key mismatch statistics, either sampled or by full support enumeration."""
    if exhaustive:
        codes = [code] if code is not None else sample_codes(params, n_codes, seed)
        return exhaustive_stats(params, channel, codes, seed)
    return simulate(params, channel, trials, seed, threads, code)


def abort_probability(
    params: ProtocolParams,
    channel: EveChannel,
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    code: CssCode | None = None,
) -> Estimate:
    return simulate(params, channel, trials, seed, threads, code).abort


# -- coherent secrecy check --------------------------------------------------


def measurement_basis(code: CssCode) -> np.ndarray:
    """Rows ``<phi_a|`` of the joint eigenbasis of ``Z^P1``, ``X^P2``, ``X^M``.

    Outcome ``a`` packs the eigenvalue bits in generator order, so its low
    ``k`` bits are the bit syndrome, the next ``k`` the phase syndrome and
    the rest the key.
    """
    n = code.n
    gens = (
        [pauli_z(r) for r in code.P1.row_vectors()]
        + [pauli_x(r) for r in code.P2.row_vectors()]
        + [pauli_x(r) for r in code.key_extractor.row_vectors()]
    )
    rows = []
    for a in range(1 << n):
        P = pauli_projector(gens, [(a >> j) & 1 for j in range(n)])
        col = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
        rows.append(col.conj() / np.linalg.norm(col))
    return np.array(rows)


@dataclass(frozen=True)
class SecrecyReport:
    distance: float
    abort_probability: float
    key_bits: int
    env_dim: int

    def to_dict(self) -> dict:
        return {
            "distance": self.distance,
            "abort_probability": self.abort_probability,
            "key_bits": self.key_bits,
            "env_dim": self.env_dim,
        }


def secrecy_details(params: ProtocolParams, code: CssCode, eve_state: DenseState) -> SecrecyReport:
    """Distance between the real ``(W_A, C, E)`` output and the ideal one.

    The ideal state keeps the abort branch and replaces the accepted key by a
    uniform one independent of ``C`` and ``E``.
    """
    n, k = params.n, params.k
    params.require_key()
    if n > SECRECY_LIMIT:
        raise CapacityError(f"secrecy check supports n <= {SECRECY_LIMIT}")
    d = 1 << n
    if eve_state.dim % (d * d):
        raise ParameterError(f"state dimension {eve_state.dim} is not a multiple of 4^{n}")
    dE = eve_state.dim // (d * d)
    if (d * d * dE).bit_length() - 1 > DENSE_LIMIT:
        raise CapacityError("composite register exceeds dense limit")
    psi = eve_state.amplitudes.reshape(d, d, dE)
    Phi = measurement_basis(code)
    G = np.einsum("ai,bj,ije->abe", Phi, Phi, psi, optimize=True)

    dec = Decoders.for_code(code)
    mask = (1 << k) - 1
    klen = n - 2 * k
    blocks: dict[tuple[int, int, int], np.ndarray] = {}
    abort_mass = 0.0
    for a in range(d):
        for b in range(d):
            g = G[a, b]
            sz, sx = (a ^ b) & mask, ((a ^ b) >> k) & mask
            ok = dec.z.decode_int(sz) is not None and dec.x.decode_int(sx) is not None
            w = a >> (2 * k) if ok else -1
            key = (w, sz, sx)
            rho = np.outer(g, g.conj())
            blocks[key] = blocks.get(key, 0) + rho
            if not ok:
                abort_mass += float(np.vdot(g, g).real)

    dist = 0.0
    transcripts = {(sz, sx) for _, sz, sx in blocks}
    zero = np.zeros((dE, dE), dtype=complex)
    for sz, sx in transcripts:
        accepted = [blocks.get((w, sz, sx), zero) for w in range(1 << klen)]
        avg = sum(accepted) / (1 << klen)
        for rho in accepted:
            dist += trace_distance(rho, avg)
    return SecrecyReport(dist, abort_mass, klen, dE)


def secrecy_check_tiny(params: ProtocolParams, code: CssCode, eve_state: DenseState) -> float:
    return secrecy_details(params, code, eve_state).distance


def bell_input(pattern: ErrorPattern) -> DenseState:
    """``|psi_{alpha beta}>`` with a trivial one-dimensional environment."""
    n = pattern.n
    d = 1 << n
    return DenseState(bell_amplitudes(n, pattern.alpha.value, pattern.beta.value), (d, d, 1))


def entangled_eve_input(n: int, channel: EveChannel) -> DenseState:
    """``sum sqrt(p) |psi_{alpha beta}> |alpha beta>_E`` over the channel support."""
    d = 1 << n
    if (4 * d * d).bit_length() > DENSE_LIMIT + 2 and n > SECRECY_LIMIT:
        raise CapacityError("entangled input exceeds dense limit")
    amp = np.zeros((d * d, d * d), dtype=complex)
    for mass, e in channel.support(n):
        col = e.alpha.value * d + e.beta.value
        amp[:, col] += math.sqrt(mass) * bell_amplitudes(n, e.alpha.value, e.beta.value)
    return DenseState(amp.reshape(-1), (d, d, d * d))
