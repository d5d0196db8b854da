"""Quick Pick issuers for ``m`` stores selling from a ticket space of size ``N``.

Three strategies share one interface::

    gen = make_generator("pairing", N, m, seed)
    r = gen.next_ticket(store)          # one rank in [0, N)
    rs = gen.issue(stores)              # same as calling next_ticket in order

``issue`` is the bulk path used by the simulator; ``next_ticket`` is defined
in terms of it, so the two can never disagree.

Randomness is drawn from numpy ``Generator`` streams in fixed-size blocks
(see :class:`UniformStream`), which makes the issued sequence depend only on
the seed and the request order, never on how requests were batched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numba
import numpy as np

SeedLike = Union[int, np.random.SeedSequence, None]

STRATEGIES = ("independent", "central", "pairing")

ASCENDING = 1
DESCENDING = -1


class UnknownStoreError(ValueError):
    pass


def _as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


class UniformStream:
    """Uniform integers in ``[0, high)`` handed out from fixed-size blocks.

    ``take(a)`` followed by ``take(b)`` returns exactly the values of
    ``take(a + b)``.
    """

    def __init__(self, high: int, seed: SeedLike, block: int = 1 << 12):
        self.high = int(high)
        self.block = block
        self._rng = np.random.Generator(np.random.PCG64(_as_seed_sequence(seed)))
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.int64)
        filled = 0
        while filled < n:
            if self._pos == len(self._buf):
                self._buf = self._rng.integers(0, self.high, size=self.block, dtype=np.int64)
                self._pos = 0
            step = min(n - filled, len(self._buf) - self._pos)
            out[filled:filled + step] = self._buf[self._pos:self._pos + step]
            filled += step
            self._pos += step
        return out


class _Issuer:
    N: int
    m: int

    def _check_stores(self, stores) -> np.ndarray:
        stores = np.asarray(stores, dtype=np.int64).reshape(-1)
        if stores.size and (stores.min() < 0 or stores.max() >= self.m):
            bad = stores[(stores < 0) | (stores >= self.m)][0]
            raise UnknownStoreError(f"unknown store id {bad}; stores are 0..{self.m - 1}")
        return stores

    def issue(self, stores: Sequence[int] | np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def next_ticket(self, store: int) -> int:
        return int(self.issue([store])[0])


class IndependentGenerator(_Issuer):
    """Each store draws uniformly from ``[0, N)`` with its own stream.

    Store ``s`` uses child ``s`` of ``SeedSequence(seed).spawn(m)``.
    """

    def __init__(self, N: int, m: int, seed: SeedLike = None):
        if N < 1 or m < 1:
            raise ValueError("need N >= 1 and m >= 1")
        self.N, self.m = int(N), int(m)
        children = _as_seed_sequence(seed).spawn(self.m)
        self.streams = [UniformStream(self.N, child) for child in children]

    def issue(self, stores):
        stores = self._check_stores(stores)
        out = np.empty(stores.size, dtype=np.int64)
        for s in np.unique(stores):
            mask = stores == s
            out[mask] = self.streams[s].take(int(mask.sum()))
        return out


# Central server: two-level bit vector. ``words`` holds one bit per rank (set =
# issued); ``summary`` holds one bit per word (set = word full). Padding bits
# past N, and past the last word, start set so they are never handed out.

_ONE = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
_U0 = np.uint64(0)


@numba.njit(cache=True, nogil=True)
def _ctz(v):
    n = 0
    while (v & _ONE) == _U0:
        v >>= _ONE
        n += 1
    return n


@numba.njit(cache=True, nogil=True)
def _first_free_word(summary, start):
    # first word index >= start whose summary bit is clear, wrapping to 0
    n_sum = summary.shape[0]
    s = start >> 6
    if s < n_sum:
        free = ~summary[s] & (_ALL << np.uint64(start & 63))
        if free != _U0:
            return s * 64 + _ctz(free)
        for t in range(s + 1, n_sum):
            free = ~summary[t]
            if free != _U0:
                return t * 64 + _ctz(free)
    for t in range(n_sum):
        free = ~summary[t]
        if free != _U0:
            return t * 64 + _ctz(free)
    return -1


@numba.njit(cache=True, nogil=True)
def _central_issue(starts, words, summary, issued, N):
    out = np.empty(starts.shape[0], dtype=np.int64)
    n_words = words.shape[0]
    for j in range(starts.shape[0]):
        x = starts[j]
        if issued >= N:
            out[j] = x
            continue
        w = x >> 6
        free = ~words[w] & (_ALL << np.uint64(x & 63))
        if free == _U0:
            nxt = w + 1
            if nxt >= n_words:
                nxt = 0
            w = _first_free_word(summary, nxt)
            free = ~words[w]
        bit = _ctz(free)
        words[w] |= _ONE << np.uint64(bit)
        if words[w] == _ALL:
            summary[w >> 6] |= _ONE << np.uint64(w & 63)
        out[j] = w * 64 + bit
        issued += 1
    return out, issued


class CentralServerGenerator(_Issuer):
    """A single allocator that never repeats a rank until all ``N`` are issued.

    Each request draws a uniform start ``x`` and receives the first unissued
    rank at or after ``x`` (wrapping past ``N - 1``). Once the space is
    exhausted the drawn ``x`` itself is issued, so later sales behave like
    independent draws.
    """

    def __init__(self, N: int, m: int, seed: SeedLike = None):
        if N < 1 or m < 1:
            raise ValueError("need N >= 1 and m >= 1")
        self.N, self.m = int(N), int(m)
        self.stream = UniformStream(self.N, seed)
        n_words = -(-self.N // 64)
        self.words = np.zeros(n_words, dtype=np.uint64)
        self.summary = np.zeros(-(-n_words // 64), dtype=np.uint64)
        tail = self.N % 64
        if tail:
            self.words[-1] = _ALL << np.uint64(tail)
        tail = n_words % 64
        if tail:
            self.summary[-1] = _ALL << np.uint64(tail)
        self.count_issued = 0

    def issue(self, stores):
        stores = self._check_stores(stores)
        starts = self.stream.take(stores.size)
        out, self.count_issued = _central_issue(
            starts, self.words, self.summary, self.count_issued, self.N
        )
        return out


@dataclass(frozen=True)
class PairingPlan:
    """Assignment of ``m`` stores to ``p = ceil(m/2)`` pairs over disjoint regions.

    ``regions[i]`` is the half-open interval ``(lo, hi)`` owned by pair ``i``;
    ``assignment[s]`` is ``(pair index, direction)`` for store ``s``.
    """

    m: int
    N: int
    regions: tuple[tuple[int, int], ...]
    assignment: tuple[tuple[int, int], ...]

    @property
    def p(self) -> int:
        return len(self.regions)


def make_pairing_plan(m: int, N: int, seed: int | None = None) -> PairingPlan:
    """Split ``[0, N)`` into ``ceil(m/2)`` near-equal regions and pair the stores.

    With ``seed=None`` stores ``2i`` (ascending) and ``2i+1`` (descending) form
    pair ``i``; with a seed, partners and directions are shuffled
    deterministically. For odd ``m`` the unpaired store sells its whole region
    in ascending order.
    """
    if m < 1 or N < 1:
        raise ValueError("need m >= 1 and N >= 1")
    p = -(-m // 2)
    if N < p:
        raise ValueError(f"cannot give {p} pairs non-empty regions of a space of size {N}")
    regions = tuple((i * N // p, (i + 1) * N // p) for i in range(p))
    order = np.arange(m)
    if seed is not None:
        order = np.random.default_rng(seed).permutation(m)
    assignment = [None] * m
    for slot, store in enumerate(order):
        pair = slot // 2
        direction = ASCENDING if slot % 2 == 0 else DESCENDING
        assignment[int(store)] = (pair, direction)
    return PairingPlan(m=m, N=N, regions=regions, assignment=tuple(assignment))


@numba.njit(cache=True, nogil=True)
def _pairing_issue(stores, store_pair, store_dir, lo, hi, asc_used, desc_used):
    out = np.empty(stores.shape[0], dtype=np.int64)
    for j in range(stores.shape[0]):
        s = stores[j]
        q = store_pair[s]
        if store_dir[s] > 0:
            out[j] = lo[q] + asc_used[q]
            asc_used[q] += 1
        else:
            out[j] = hi[q] - 1 - desc_used[q]
            desc_used[q] += 1
        if asc_used[q] + desc_used[q] == hi[q] - lo[q]:
            # region exhausted: the pair starts over from both ends
            asc_used[q] = 0
            desc_used[q] = 0
    return out


class PairingGenerator(_Issuer):
    """Deterministic pairing: no communication after the plan is handed out."""

    def __init__(self, plan: PairingPlan):
        self.plan = plan
        self.N, self.m = plan.N, plan.m
        self.lo = np.array([r[0] for r in plan.regions], dtype=np.int64)
        self.hi = np.array([r[1] for r in plan.regions], dtype=np.int64)
        self.store_pair = np.array([a[0] for a in plan.assignment], dtype=np.int64)
        self.store_dir = np.array([a[1] for a in plan.assignment], dtype=np.int64)
        self.asc_used = np.zeros(plan.p, dtype=np.int64)
        self.desc_used = np.zeros(plan.p, dtype=np.int64)

    def issue(self, stores):
        stores = self._check_stores(stores)
        return _pairing_issue(
            stores, self.store_pair, self.store_dir, self.lo, self.hi,
            self.asc_used, self.desc_used,
        )


def make_generator(strategy: str, N: int, m: int, seed: SeedLike = None) -> _Issuer:
    if strategy == "independent":
        return IndependentGenerator(N, m, seed)
    if strategy == "central":
        return CentralServerGenerator(N, m, seed)
    if strategy == "pairing":
        # fully deterministic; build a shuffled plan with make_pairing_plan if wanted
        return PairingGenerator(make_pairing_plan(m, N))
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def count_distinct(issued) -> int:
    return int(np.unique(np.asarray(issued, dtype=np.int64)).size)
