"""
Deterministic block-parallel Monte Carlo.

Trials are cut into fixed-size blocks.  Block ``b`` draws from the ``b``-th
child of ``SeedSequence(seed)``, so the merged counts depend only on the
seed and the trial count, never on how many worker threads ran the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_SEED = 0xC55C0DE
BLOCK_SIZE = 500

# A block function receives its own generator and the number of trials in
# the block and returns a tuple of counters for those trials.
BlockFn = Callable[[np.random.Generator, int], Sequence[int]]


@dataclass(frozen=True)
class Estimate:
    """A binomial proportion ``successes / trials`` with its standard error."""

    successes: int
    trials: int

    @property
    def p(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def sigma(self) -> float:
        if not self.trials:
            return 0.0
        p = self.p
        return math.sqrt(p * (1.0 - p) / self.trials)

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        half = z * self.sigma
        return max(0.0, self.p - half), min(1.0, self.p + half)

    def width(self, z: float = 3.0) -> float:
        return 2.0 * z * self.sigma

    def to_dict(self) -> dict:
        lo, hi = self.interval()
        return {
            "estimate": self.p,
            "successes": self.successes,
            "trials": self.trials,
            "sigma": self.sigma,
            "ci3_low": lo,
            "ci3_high": hi,
        }


def block_sizes(trials: int, block: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(trials, block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(
    fn: BlockFn,
    trials: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    block: int = BLOCK_SIZE,
) -> tuple[int, ...]:
    """Run ``fn`` over all blocks and sum the counters elementwise."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    sizes = block_sizes(trials, block)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def one(i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in fn(np.random.default_rng(children[i]), sizes[i]))

    if threads == 1 or len(sizes) == 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    return tuple(int(sum(col)) for col in zip(*parts))


def estimate(
    fn: BlockFn,
    trials: int,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    block: int = BLOCK_SIZE,
) -> list[Estimate]:
    """One :class:`Estimate` per counter returned by ``fn``."""
    counts = run_blocks(fn, trials, seed, threads, block)
    return [Estimate(c, trials) for c in counts]
