"""Jackpot-driven ticket sales and the expected value of a ticket versus jackpot.

Jackpots ``j`` are in millions of dollars and the prize pool is ``j * 1e6``.
Tickets sold follow a quadratic ``T(j) = a*j**2 + b*j + c``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from pairlotto import analytics
from pairlotto.ticketspace import POWERBALL, space_size

POWERBALL_N = space_size(POWERBALL)
DOLLARS_PER_UNIT = 1e6
SCHEMES = ("IR", "CS", "DP2")

# j_min is the starting jackpot of the game
DEFAULT_DOMAIN = (40.0, 3000.0)
SCAN_POINTS = 4001


class RankDeficientError(ValueError):
    pass


class NoRootError(ValueError):
    pass


class NotUnimodalError(ValueError):
    pass


class SalesDataError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SalesModel:
    a: float
    b: float
    c: float
    j_min: float = DEFAULT_DOMAIN[0]
    j_max: float = DEFAULT_DOMAIN[1]

    def __call__(self, j):
        return tickets_sold(self, j)

    @property
    def coefficients(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


POWERBALL_SALES = SalesModel(278.36, -5364.95, 10582740.74)


@dataclass(frozen=True)
class SalesRecord:
    jackpot_millions: float
    tickets_sold: int

    def __post_init__(self):
        if self.jackpot_millions < 0 or self.tickets_sold < 0:
            raise ValueError("sales records must be nonnegative")


def tickets_sold(model: SalesModel, j):
    out = (model.a * np.asarray(j, dtype=float) + model.b) * np.asarray(j, dtype=float) + model.c
    return float(out) if out.ndim == 0 else out


def fit_quadratic(records: Iterable[SalesRecord]) -> SalesModel:
    """Least-squares quadratic of tickets sold on jackpot.

    Solved by SVD-based least squares on a centred, scaled jackpot so the design
    stays well conditioned, then mapped back to raw coefficients.
    """
    records = list(records)
    j = np.array([r.jackpot_millions for r in records], dtype=float)
    t = np.array([r.tickets_sold for r in records], dtype=float)
    if np.unique(j).size < 3:
        raise RankDeficientError(
            f"need at least 3 distinct jackpot values to fit a quadratic, got {np.unique(j).size}"
        )
    centre = j.mean()
    scale = np.abs(j - centre).max()
    u = (j - centre) / scale
    design = np.column_stack([np.ones_like(u), u, u * u])
    (c0, c1, c2), *_ = np.linalg.lstsq(design, t, rcond=None)
    # t = c0 + c1*u + c2*u^2 with u = (j - centre)/scale
    a = c2 / scale**2
    b = c1 / scale - 2.0 * c2 * centre / scale**2
    c = c0 - c1 * centre / scale + c2 * centre**2 / scale**2
    return SalesModel(float(a), float(b), float(c), float(j.min()), float(j.max()))


def r_squared(model: SalesModel, records: Iterable[SalesRecord]) -> float:
    records = list(records)
    t = np.array([r.tickets_sold for r in records], dtype=float)
    pred = tickets_sold(model, np.array([r.jackpot_millions for r in records]))
    ss_res = float(np.sum((t - pred) ** 2))
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def ev_at_jackpot(model: SalesModel, j, scheme: str = "IR", N: int = POWERBALL_N):
    """Expected value in dollars of one ticket when the jackpot is ``j`` million.

    ``scheme`` is ``"IR"`` (independent Quick Pick), ``"CS"`` (central server)
    or ``"DP2"`` (deterministic pairing with two pairs). Ticket counts are kept
    real-valued.
    """
    k = tickets_sold(model, j)
    if np.any(np.asarray(k) < 1):
        raise ValueError(f"model sells fewer than one ticket at jackpot {j}")
    pool = np.asarray(j, dtype=float) * DOLLARS_PER_UNIT
    if scheme == "IR":
        return analytics.ev_ir(k, N, pool)
    if scheme == "CS":
        return analytics.ev_cs(k, N, pool)
    if scheme == "DP2":
        if np.ndim(k):
            return np.array([analytics.ev_dp_two_bins(kk, N, pp, "normal") for kk, pp in zip(k, pool)])
        return analytics.ev_dp_two_bins(k, N, float(pool), "normal")
    raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


def _domain(model: SalesModel, domain):
    lo, hi = domain if domain is not None else (model.j_min, model.j_max)
    if not lo < hi:
        raise ValueError(f"empty search domain [{lo}, {hi}]")
    return float(lo), float(hi)


def _scan(f: Callable, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    grid = np.linspace(lo, hi, SCAN_POINTS)
    return grid, np.array([f(x) for x in grid])


def breakeven_roots(
    model: SalesModel,
    scheme: str = "IR",
    N: int = POWERBALL_N,
    ticket_cost: float = 2.0,
    domain: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """Lowest and highest jackpots at which a ticket is worth exactly its price."""
    lo, hi = _domain(model, domain)

    def f(x):
        return ev_at_jackpot(model, x, scheme, N) - ticket_cost

    grid, vals = _scan(f, lo, hi)
    crossings = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
    crossings = [i for i in crossings if not (vals[i] == 0 and vals[i + 1] == 0)]
    if len(crossings) < 2:
        raise NoRootError(
            f"expected value never crosses ${ticket_cost:g} twice on [{lo:g}, {hi:g}] "
            f"({len(crossings)} crossing(s) found)"
        )

    def solve(i):
        a, b = grid[i], grid[i + 1]
        if vals[i] == 0:
            return a
        if vals[i + 1] == 0:
            return b
        return brentq(f, a, b, xtol=1e-10, rtol=4 * np.finfo(float).eps, maxiter=200)

    return solve(crossings[0]), solve(crossings[-1])


def argmax_ev(
    model: SalesModel,
    scheme: str = "IR",
    N: int = POWERBALL_N,
    domain: tuple[float, float] | None = None,
) -> tuple[float, float]:
    """Jackpot (millions) at which a ticket's expected value peaks, and that value.

    The curve is scanned for interior local maxima; exactly one is required,
    which is then refined by bounded Brent minimisation.
    """
    lo, hi = _domain(model, domain)

    def f(x):
        return ev_at_jackpot(model, x, scheme, N)

    grid, vals = _scan(f, lo, hi)
    peaks = [
        i for i in range(1, len(grid) - 1)
        if vals[i] >= vals[i - 1] and vals[i] > vals[i + 1]
    ]
    if not peaks:
        raise NotUnimodalError(
            f"expected value has no interior maximum on [{lo:g}, {hi:g}] (monotone curve)"
        )
    if len(peaks) > 1:
        where = ", ".join(f"{grid[i]:.1f}" for i in peaks[:5])
        raise NotUnimodalError(f"expected value has {len(peaks)} local maxima near {where}")
    i = peaks[0]
    res = minimize_scalar(
        lambda x: -f(x), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
        options={"xatol": 1e-6},
    )
    j_star = float(res.x)
    if f(grid[i]) > f(j_star):
        j_star = float(grid[i])
    return j_star, f(j_star)


SALES_CSV_HEADER = ("jackpot_millions", "tickets_sold")


def _parse_tickets(text: str) -> int:
    value = float(text)
    if not math.isfinite(value) or value != int(value):
        raise ValueError(f"tickets_sold must be a whole number, got {text!r}")
    return int(value)


def read_sales_csv(path: str | Path) -> list[SalesRecord]:
    """Read ``jackpot_millions,tickets_sold`` rows; errors carry the line number."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SalesDataError("empty file", 1)
        if tuple(h.strip() for h in header) != SALES_CSV_HEADER:
            raise SalesDataError(
                f"expected header {','.join(SALES_CSV_HEADER)!r}, got {','.join(header)!r}", 1
            )
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise SalesDataError(f"expected 2 fields, got {len(row)}", line)
            try:
                record = SalesRecord(float(row[0]), _parse_tickets(row[1]))
            except ValueError as exc:
                raise SalesDataError(str(exc), line) from None
            records.append(record)
    return records


def write_sales_csv(path: str | Path, records: Iterable[SalesRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SALES_CSV_HEADER)
        for r in records:
            writer.writerow([repr(float(r.jackpot_millions)), r.tickets_sold])
