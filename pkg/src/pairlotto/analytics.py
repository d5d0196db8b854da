"""Closed-form expected values for the three ticket-generation strategies.

Every scheme reduces to the same identity: a group of ``g`` identical tickets
jointly holds ``P/N`` of expected prize, so the mean value of a ticket is

    expected_distinct(k) * P / (k * N)

and the expected fraction of the pool claimed is ``expected_distinct(k) / N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, ndtr

# Exact binomial summation up to this many tickets, normal approximation above.
EXACT_DP_LIMIT = 10**6
# Binomial mass further than this many standard deviations from k/2 is dropped.
TAIL_SIGMAS = 12.0


def _check_space(N) -> None:
    if N < 1:
        raise ValueError(f"ticket space size must be >= 1, got {N}")


def _check_sold(k) -> None:
    if np.any(np.asarray(k) < 1):
        raise ValueError("expected value per ticket is undefined for fewer than one ticket sold")


def expected_distinct_ir(k, N):
    """Expected distinct tickets after ``k`` independent uniform draws from ``N``.

    ``N * (1 - (1 - 1/N)**k)``, evaluated as ``-N * expm1(k * log1p(-1/N))``.
    Accepts real or array ``k``.
    """
    _check_space(N)
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise ValueError("tickets sold must be >= 0")
    if N == 1:
        out = np.minimum(k_arr, 1.0)
    else:
        out = -N * np.expm1(k_arr * math.log1p(-1.0 / N))
    return float(out) if out.ndim == 0 else out


def expected_distinct_cs(k, N):
    _check_space(N)
    out = np.minimum(np.asarray(k, dtype=float), float(N))
    return float(out) if out.ndim == 0 else out


def _per_ticket(distinct, k, N, P):
    # one shared formula so schemes with equal distinct counts compare equal
    out = np.asarray(distinct, dtype=float) / np.asarray(k, dtype=float) * (P / N)
    return float(out) if out.ndim == 0 else out


def ev_ir(k, N, P):
    """Expected value of one ticket under independent Quick Pick generation."""
    _check_sold(k)
    return _per_ticket(expected_distinct_ir(k, N), k, N, P)


def ev_cs(k, N, P):
    """Expected value of one ticket from a central non-repeating server.

    ``P/N`` while ``k <= N``, ``P/k`` after.
    """
    _check_sold(k)
    return _per_ticket(expected_distinct_cs(k, N), k, N, P)


def _two_bin_distinct_exact(k: int, h: int) -> float:
    # E[min(X, h) + min(k - X, h)] for X ~ Binomial(k, 1/2)
    if k <= h:
        return float(k)
    mu, sigma = k / 2.0, math.sqrt(k) / 2.0
    lo = max(0, math.floor(mu - TAIL_SIGMAS * sigma))
    hi = min(k, math.ceil(mu + TAIL_SIGMAS * sigma))
    i = np.arange(lo, hi + 1, dtype=float)
    log_pmf = gammaln(k + 1.0) - gammaln(i + 1.0) - gammaln(k - i + 1.0) - k * math.log(2.0)
    pmf = np.exp(log_pmf - log_pmf.max())
    kept = np.minimum(i, h) + np.minimum(k - i, h)
    # summed directly rather than as k - overflow, which cancels badly for k >> N
    value = float(np.dot(pmf, kept) / pmf.sum())
    return min(value, float(k), 2.0 * h)


def _normal_partial_mean(gap: float, sigma: float) -> float:
    # E[max(Z, 0)] for Z ~ Normal(gap, sigma^2)
    z = gap / sigma
    phi = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return gap * float(ndtr(z)) + sigma * phi


def _two_bin_distinct_normal(k: float, h: float) -> float:
    # 2 * E[min(Y, h)], Y ~ Normal(k/2, k/4); pick the form without cancellation
    mu, sigma = k / 2.0, math.sqrt(k) / 2.0
    if mu <= h:
        value = 2.0 * (mu - _normal_partial_mean(mu - h, sigma))
    else:
        value = 2.0 * (h - _normal_partial_mean(h - mu, sigma))
    return min(value, k, 2.0 * h)


def expected_distinct_dp_two_bins(k, N, method: str = "auto") -> float:
    """Expected distinct tickets when two store pairs split ``N`` evenly.

    Each ticket lands in either half with probability 1/2 and a half holds at
    most ``N/2`` distinct tickets, so the count is
    ``E[min(X, N/2) + min(k - X, N/2)]`` with ``X ~ Binomial(k, 1/2)``.

    ``method`` is ``"exact"`` (log-space binomial sum, integer ``k`` only),
    ``"normal"`` or ``"auto"`` (exact up to ``EXACT_DP_LIMIT``).
    """
    if N % 2:
        raise ValueError(f"the two-bin model needs an even ticket space, got N={N}")
    if k < 0:
        raise ValueError("tickets sold must be >= 0")
    h = N // 2
    if method == "auto":
        method = "exact" if k <= EXACT_DP_LIMIT else "normal"
    if method == "exact":
        if k != int(k):
            raise ValueError("exact two-bin summation needs an integer ticket count")
        return _two_bin_distinct_exact(int(k), h)
    if method == "normal":
        if k == 0:
            return 0.0
        return _two_bin_distinct_normal(float(k), h)
    raise ValueError(f"unknown method {method!r}")


def ev_dp_two_bins(k, N, P, method: str = "auto") -> float:
    """Expected value of one ticket under deterministic pairing with two pairs."""
    _check_sold(k)
    return _per_ticket(expected_distinct_dp_two_bins(k, N, method), k, N, P)


@dataclass(frozen=True)
class CollisionEstimate:
    asymptotic: float  # sqrt(pi * N / 2)
    rule_of_thumb: float  # 1.25 * sqrt(N)


def first_collision_estimate(N) -> CollisionEstimate:
    """Expected number of uniform draws before the first repeated ticket."""
    _check_space(N)
    return CollisionEstimate(math.sqrt(math.pi * N / 2.0), 1.25 * math.sqrt(N))
