"""
Linear two-universal hashing over GF(2) and the decoding-failure bounds it
implies.

For the uniform family of ``k x n`` matrices and any ``d != 0`` exactly a
``2^-k`` fraction of the matrices annihilate ``d``, so ``Theta = 2^-k`` is
the collision bound.  Summing it over the other members of an error set
gives the ``Theta |S|`` union bound on decoding failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .css import BallDecoder, ProtocolParams, ball_members, binary_entropy, hamming_ball_volume, parity_checks
from .errors import ParameterError
from .gf2 import BitMatrix, BitVector, random_rows, enumerate_matrices, sample_matrix
from .montecarlo import DEFAULT_SEED, Estimate, estimate

EXACT_CAP = 1 << 20


class LinearHashFamily:
    """A distribution over ``k x n`` GF(2) matrices used as hash functions.

    ``members=None`` means the uniform distribution over all ``2^(kn)``
    matrices (mass ``2^-(kn)`` each).  Otherwise ``members`` lists
    ``(mass, matrix)`` pairs whose masses sum to one.
    """

    def __init__(self, n: int, k: int, members: Sequence[tuple[float, BitMatrix]] | None = None):
        if n < 1 or k < 1:
            raise ParameterError(f"need n, k >= 1, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.members = None
        if members is not None:
            members = [(float(m), A) for m, A in members]
            if not members:
                raise ParameterError("explicit family needs at least one member")
            if any(m < 0 for m, _ in members):
                raise ParameterError("masses must be nonnegative")
            if not math.isclose(sum(m for m, _ in members), 1.0, abs_tol=1e-12):
                raise ParameterError("masses must sum to 1")
            if any(A.shape != (k, n) for _, A in members):
                raise ParameterError(f"every member must be {k} x {n}")
            self.members = members

    @classmethod
    def uniform(cls, n: int, k: int) -> LinearHashFamily:
        return cls(n, k)

    @property
    def is_uniform(self) -> bool:
        return self.members is None

    @property
    def theta(self) -> float:
        """The two-universal collision bound ``2^-k``."""
        return 2.0 ** (-self.k)

    def support(self, cap: int = EXACT_CAP):
        """Yield ``(mass, matrix)`` over the whole support."""
        if self.members is not None:
            yield from self.members
            return
        mass = 2.0 ** (-self.k * self.n)
        for A in enumerate_matrices(self.k, self.n, cap):
            yield mass, A

    def sample(self, rng: np.random.Generator) -> BitMatrix:
        if self.members is None:
            return BitMatrix(random_rows(rng, self.k, self.n), self.n)
        masses = np.array([m for m, _ in self.members])
        return self.members[rng.choice(len(self.members), p=masses / masses.sum())][1]


@dataclass(frozen=True)
class CollisionReport:
    epsilon_hat: float
    bound: float
    trials: int
    mode: str

    def to_dict(self) -> dict:
        return {"epsilon_hat": self.epsilon_hat, "bound": self.bound, "trials": self.trials, "mode": self.mode}


def collision_probability(
    family: LinearHashFamily,
    x: BitVector,
    x_prime: BitVector,
    mode: str = "exact",
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> CollisionReport:
    """Probability over the family that ``A x = A x'``."""
    if x.length != family.n or x_prime.length != family.n:
        raise ParameterError(f"inputs must have length {family.n}")
    if x == x_prime:
        raise ParameterError("x and x' must differ")
    d = (x + x_prime).value
    if mode == "exact":
        total, count = 0.0, 0
        for mass, A in family.support():
            count += 1
            if A.apply_int(d) == 0:
                total += mass
        return CollisionReport(total, family.theta, count, "exact")
    if mode == "monte-carlo":

        def block(rng, size):
            return (sum(family.sample(rng).apply_int(d) == 0 for _ in range(size)),)

        (est,) = estimate(block, trials, seed, threads)
        return CollisionReport(est.p, family.theta, trials, "monte-carlo")
    raise ParameterError(f"unknown mode {mode!r}")


def union_bound_failure(theta: float, error_set_size: int) -> float:
    """``min(1, Theta |S|)``."""
    if not 0.0 <= theta <= 1.0:
        raise ParameterError(f"theta must lie in [0, 1], got {theta}")
    if error_set_size < 0:
        raise ParameterError("error set size must be >= 0")
    return min(1.0, theta * error_set_size)


def decoding_failure_bound(n: int, k: int, r: int) -> float:
    """``2^(-k + n h(r/n))``, the ball-volume form of the syndrome collision bound."""
    return 2.0 ** (-k + n * binary_entropy(r / n))


@dataclass(frozen=True)
class JointFailureReport:
    """Disagreement rates of the two ball decoders with the error filter.

    ``joint`` is the rate at which both decoders disagree; ``union`` the rate
    at which at least one does.
    """

    params: ProtocolParams
    joint: Estimate
    union: Estimate
    z_only: Estimate
    x_only: Estimate
    theta: float
    ball_volume: int

    @property
    def bound(self) -> float:
        return union_bound_failure(self.theta, self.ball_volume)

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "k": self.params.k,
            "r": self.params.r,
            "theta": self.theta,
            "ball_volume": self.ball_volume,
            "bound": self.bound,
            "joint": self.joint.to_dict(),
            "union": self.union.to_dict(),
            "z_disagree": self.z_only.to_dict(),
            "x_disagree": self.x_only.to_dict(),
        }


def _failure_block(n: int, k: int, r: int):
    ball = ball_members(n, r)

    def block(rng: np.random.Generator, size: int):
        both = either = fz = fx = 0
        for _ in range(size):
            P1, P2 = parity_checks(sample_matrix(n, True, rng), k)
            i, j = rng.integers(0, len(ball), size=2)
            alpha, beta = ball[i], ball[j]
            # alpha and beta lie in the ball, so the filter returns them unchanged
            bad_z = BallDecoder(P1, r).decode_int(P1.apply_int(alpha)) != alpha
            bad_x = BallDecoder(P2, r).decode_int(P2.apply_int(beta)) != beta
            both += bad_z and bad_x
            either += bad_z or bad_x
            fz += bad_z
            fx += bad_x
        return both, either, fz, fx

    return block


def empirical_joint_failure(
    params: ProtocolParams,
    trials: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> JointFailureReport:
    """Sample ``L`` and ``(alpha, beta)`` uniform on the ball; count disagreements."""
    n, k, r = params.n, params.k, params.r
    joint, union, z_only, x_only = estimate(_failure_block(n, k, r), trials, seed, threads)
    return JointFailureReport(
        params, joint, union, z_only, x_only, 2.0 ** (-k), hamming_ball_volume(n, r)
    )


def per_code_failure(P: BitMatrix, r: int) -> float:
    """Exact fraction of ball members that ``P`` does not decode uniquely."""
    decoder = BallDecoder(P, r)
    members = ball_members(P.n_cols, r)
    bad = sum(not decoder.is_uniquely_decodable(e) for e in members)
    return bad / len(members)


@dataclass(frozen=True)
class SyndromeFailureReport:
    n: int
    k: int
    r: int
    failure: Estimate
    bound: float

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "r": self.r, "bound": self.bound, "failure": self.failure.to_dict()}


def syndrome_decode_failure(
    n: int,
    k: int,
    r: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> SyndromeFailureReport:
    """Rate at which ball decoding with the first ``k`` rows of a random
    invertible ``L`` misses a uniform ball error (ambiguous or wrong)."""
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got n={n}, k={k}")
    ball = ball_members(n, r)

    def block(rng, size):
        bad = 0
        for _ in range(size):
            L = sample_matrix(n, True, rng)
            P = BitMatrix(L.rows[:k], n)
            e = ball[rng.integers(0, len(ball))]
            bad += BallDecoder(P, r).decode_int(P.apply_int(e)) != e
        return (bad,)

    (est,) = estimate(block, trials, seed, threads)
    return SyndromeFailureReport(n, k, r, est, decoding_failure_bound(n, k, r))
