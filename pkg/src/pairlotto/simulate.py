"""Monte Carlo engine: drive the generators and count distinct tickets sold.

Trial ``t`` of a run seeded with ``seed`` uses
``SeedSequence(seed, spawn_key=(t,))``, whose two children seed customer
routing and the generator respectively. Trials are therefore independent of
each other and of how many trials are run, and results are assembled in trial
order no matter how many workers execute them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from pairlotto.generators import STRATEGIES, UniformStream, make_generator

MAX_SIM_SPACE = 2**32


@numba.njit(cache=True, nogil=True)
def _prefix_distinct(ranks, grid, seen):
    # distinct count among ranks[:g] for each g in ascending grid; seen is a zeroed bit array
    out = np.zeros(grid.shape[0], dtype=np.int64)
    distinct = 0
    g = 0
    while g < grid.shape[0] and grid[g] == 0:
        g += 1
    for j in range(ranks.shape[0]):
        r = ranks[j]
        byte = r >> 3
        bit = np.uint8(1 << (r & 7))
        if (seen[byte] & bit) == 0:
            seen[byte] |= bit
            distinct += 1
        while g < grid.shape[0] and grid[g] == j + 1:
            out[g] = distinct
            g += 1
    return out


@numba.njit(cache=True, nogil=True)
def _first_repeat(draws, seen):
    # 1-based index of the first draw equal to an earlier one, or -1
    for j in range(draws.shape[0]):
        r = draws[j]
        byte = r >> 3
        bit = np.uint8(1 << (r & 7))
        if (seen[byte] & bit) != 0:
            return j + 1
        seen[byte] |= bit
    return -1


@dataclass(frozen=True)
class SimConfig:
    N: int
    m: int
    strategy: str
    k_grid: tuple[int, ...]
    trials: int = 200
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "k_grid", tuple(int(k) for k in self.k_grid))
        if not 1 <= self.N <= MAX_SIM_SPACE:
            raise ValueError(f"simulation needs 1 <= N <= 2**32, got {self.N}")
        if self.m < 1:
            raise ValueError(f"need at least one store, got m={self.m}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        if not self.k_grid or min(self.k_grid) < 0:
            raise ValueError("k_grid must be a non-empty list of counts >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.strategy == "pairing" and self.N < -(-self.m // 2):
            raise ValueError("pairing needs at least one rank per pair")


@dataclass(frozen=True, eq=False)
class SimResult:
    """Distinct-ticket counts, one row per trial and one column per grid point."""

    config: SimConfig
    counts: np.ndarray = field(repr=False)

    @property
    def k_grid(self) -> np.ndarray:
        return np.asarray(self.config.k_grid, dtype=np.int64)

    @property
    def trials(self) -> int:
        return self.counts.shape[0]

    @property
    def mean_distinct(self) -> np.ndarray:
        return self.counts.mean(axis=0)

    @property
    def stderr(self) -> np.ndarray:
        if self.trials < 2:
            return np.full(self.counts.shape[1], np.nan)
        return self.counts.std(axis=0, ddof=1) / math.sqrt(self.trials)

    @property
    def pool_fraction(self) -> np.ndarray:
        return self.mean_distinct / self.config.N

    def __eq__(self, other):
        if not isinstance(other, SimResult):
            return NotImplemented
        return self.config == other.config and np.array_equal(self.counts, other.counts)


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(trial,))


def run_trial(config: SimConfig, trial: int) -> np.ndarray:
    """Distinct counts at each grid point for one trial."""
    routing_seed, generator_seed = trial_seed(config.seed, trial).spawn(2)
    k_max = max(config.k_grid)
    routing = np.random.Generator(np.random.PCG64(routing_seed))
    stores = routing.integers(0, config.m, size=k_max, dtype=np.int64)
    gen = make_generator(config.strategy, config.N, config.m, generator_seed)
    ranks = gen.issue(stores)
    grid = np.asarray(config.k_grid, dtype=np.int64)
    order = np.argsort(grid, kind="stable")
    seen = np.zeros((config.N + 7) // 8, dtype=np.uint8)
    counts = np.empty(grid.size, dtype=np.int64)
    counts[order] = _prefix_distinct(ranks, grid[order], seen)
    return counts


def run_sim(config: SimConfig) -> SimResult:
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            rows = list(pool.map(lambda t: run_trial(config, t), range(config.trials)))
    else:
        rows = [run_trial(config, t) for t in range(config.trials)]
    return SimResult(config, np.vstack(rows))


def k_grid(k_max: int, steps: int) -> tuple[int, ...]:
    """``steps + 1`` integer sale counts evenly spaced from 0 to ``k_max``."""
    if not 1 <= steps <= k_max:
        raise ValueError(f"need 1 <= steps <= k_max, got steps={steps}, k_max={k_max}")
    return tuple(int(round(i * k_max / steps)) for i in range(steps + 1))


def figure1_curves(
    N: int = 100_000,
    m: int = 2,
    k_max: int | None = None,
    steps: int = 60,
    trials: int = 200,
    seed: int = 0,
    strategies: Sequence[str] = STRATEGIES,
    workers: int = 1,
) -> dict[str, SimResult]:
    """Pool fraction claimed versus tickets sold for each strategy.

    Every strategy is run with the same seed over the same grid, which defaults
    to 0..3N in 60 steps.
    """
    grid = k_grid(3 * N if k_max is None else k_max, steps)
    return {
        s: run_sim(SimConfig(N, m, s, grid, trials, seed, workers))
        for s in strategies
    }


def curve_rows(results: dict[str, SimResult]):
    """Yield ``(strategy, k, mean_distinct, stderr, pool_fraction)`` tuples."""
    for strategy, res in results.items():
        for k, mean, se, frac in zip(res.k_grid, res.mean_distinct, res.stderr, res.pool_fraction):
            yield strategy, int(k), float(mean), float(se), float(frac)


def first_collision_trials(N: int, trials: int, seed: int = 0) -> np.ndarray:
    """Number of uniform draws up to and including the first repeat, per trial."""
    if not 1 <= N <= MAX_SIM_SPACE:
        raise ValueError(f"simulation needs 1 <= N <= 2**32, got {N}")
    chunk = 4 * math.isqrt(N) + 16
    seen = np.zeros((N + 7) // 8, dtype=np.uint8)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        stream = UniformStream(N, trial_seed(seed, t), block=chunk)
        seen[:] = 0
        offset = 0
        while (hit := _first_repeat(stream.take(chunk), seen)) < 0:
            offset += chunk
        out[t] = offset + hit
    return out
