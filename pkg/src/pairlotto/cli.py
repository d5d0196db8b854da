"""``pairlotto`` command line: ranking, simulation, jackpot analysis and fitting.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import TextIO

import numpy as np

from pairlotto import __version__
from pairlotto import salesmodel as sm
from pairlotto.analytics import first_collision_estimate
from pairlotto.generators import STRATEGIES
from pairlotto.simulate import curve_rows, figure1_curves
from pairlotto.ticketspace import (
    PRESETS,
    ConfigurationError,
    Ticket,
    TicketSpaceConfig,
    rank,
    unrank,
)

log = logging.getLogger("pairlotto")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunManifest:
    """What produced an output file. The timestamp is kept out of file headers
    so identical runs give identical bytes."""

    command: str
    params: dict
    seed: int | None = None
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def header_lines(self) -> list[str]:
        lines = [
            f"# pairlotto {self.command}",
            f"# version: {self.version}",
            f"# params: {json.dumps(self.params, sort_keys=True)}",
        ]
        if self.seed is not None:
            lines.insert(2, f"# seed: {self.seed}")
        return lines


def _open_out(path: str) -> TextIO:
    if path == "-":
        return sys.stdout
    return open(path, "w", newline="", encoding="utf-8")


def _write_csv(path: str, manifest: RunManifest | None, header, rows) -> None:
    fh = _open_out(path)
    try:
        for line in manifest.header_lines() if manifest else ():
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _fmt(x: float) -> str:
    return repr(float(x))


# ---- game selection -------------------------------------------------------


def _add_game_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", choices=sorted(PRESETS), default="powerball")
    p.add_argument("--white-max", type=int, help="override: number of white-ball values")
    p.add_argument("--white-count", type=int, help="override: white balls per ticket")
    p.add_argument("--special-max", type=int, help="override: number of special-ball values")


def _game(args) -> TicketSpaceConfig:
    base = PRESETS[args.game]
    return TicketSpaceConfig(
        args.white_max if args.white_max is not None else base.white_max,
        args.white_count if args.white_count is not None else base.white_count,
        args.special_max if args.special_max is not None else base.special_max,
    )


_TICKET_RE = re.compile(r"^\s*(\d+(?:\s*,\s*\d+)*)\s*(?:pb|mb|sb|\+)\s*(\d+)\s*$", re.IGNORECASE)


def parse_ticket(text: str) -> Ticket:
    """Parse ``"1,2,3,4,5 pb 1"`` (``mb``, ``sb`` or ``+`` also separate the special ball)."""
    match = _TICKET_RE.match(text)
    if not match:
        raise UsageError(f"malformed ticket {text!r}; expected e.g. '1,2,3,4,5 pb 1'")
    whites = [int(w) for w in match.group(1).split(",")]
    return Ticket(whites, int(match.group(2)))


def cmd_unrank(args) -> int:
    print(unrank(args.rank, _game(args)))
    return EXIT_OK


def cmd_rank(args) -> int:
    ticket = parse_ticket(" ".join(args.ticket))
    print(rank(ticket, _game(args)))
    return EXIT_OK


# ---- simulate ---------------------------------------------------------------


def cmd_simulate(args) -> int:
    strategies = STRATEGIES if args.strategy == "all" else (args.strategy,)
    k_max = args.k_max if args.k_max is not None else 3 * args.space_size
    params = {
        "space_size": args.space_size,
        "stores": args.stores,
        "strategy": args.strategy,
        "k_max": k_max,
        "steps": args.steps,
        "trials": args.trials,
    }
    manifest = RunManifest("simulate", params, seed=args.seed)
    log.info("manifest: %s", json.dumps(asdict(manifest), sort_keys=True))
    results = figure1_curves(
        N=args.space_size, m=args.stores, k_max=k_max, steps=args.steps,
        trials=args.trials, seed=args.seed, strategies=strategies, workers=args.workers,
    )
    rows = (
        (s, k, _fmt(mean), _fmt(se), _fmt(frac))
        for s, k, mean, se, frac in curve_rows(results)
    )
    _write_csv(
        args.out, None if args.no_manifest else manifest,
        ("strategy", "k", "mean_distinct", "stderr", "pool_fraction"), rows,
    )
    return EXIT_OK


# ---- analyze ----------------------------------------------------------------


def _parse_coeffs(text: str) -> tuple[float, float, float]:
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"coefficients must be numbers: {text!r}") from None
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three coefficients a,b,c, got {len(values)}")
    return values


def _safe_ev(model, j, scheme, N) -> float:
    try:
        return sm.ev_at_jackpot(model, j, scheme, N)
    except ValueError:
        return float("nan")


def cmd_analyze(args) -> int:
    a, b, c = args.coeffs
    model = sm.SalesModel(a, b, c, args.j_min, args.j_max)
    N = args.space_size
    est = first_collision_estimate(N)
    print(
        f"first collision expected after ~{est.asymptotic:.0f} tickets "
        f"(sqrt(pi N/2)); 1.25 sqrt(N) = {est.rule_of_thumb:.0f}"
    )
    for scheme in ("IR", "CS"):
        try:
            lo, hi = sm.breakeven_roots(model, scheme, N, args.cost)
            print(f"{scheme} break-even: {lo:.4f} to {hi:.4f} million (ticket cost ${args.cost:g})")
        except sm.NoRootError as exc:
            print(f"{scheme} break-even: none ({exc})")
        try:
            j_star, ev_star = sm.argmax_ev(model, scheme, N)
            print(f"{scheme} max expected value: ${ev_star:.4f} at {j_star:.4f} million")
        except sm.NotUnimodalError as exc:
            print(f"{scheme} max expected value: none ({exc})")
    if args.out:
        grid = np.linspace(args.j_min, args.j_max, args.steps + 1)
        rows = (
            (_fmt(j), _fmt(sm.tickets_sold(model, j)),
             _fmt(_safe_ev(model, j, "IR", N)), _fmt(_safe_ev(model, j, "CS", N)))
            for j in grid
        )
        params = {
            "coeffs": [a, b, c], "space_size": N, "j_min": args.j_min,
            "j_max": args.j_max, "steps": args.steps, "cost": args.cost,
        }
        manifest = None if args.no_manifest else RunManifest("analyze", params)
        _write_csv(args.out, manifest, ("jackpot_millions", "tickets_sold", "ev_ir", "ev_cs"), rows)
    return EXIT_OK


# ---- fit --------------------------------------------------------------------


def cmd_fit(args) -> int:
    records = sm.read_sales_csv(args.input)
    model = sm.fit_quadratic(records)
    print(f"a = {model.a:.10g}")
    print(f"b = {model.b:.10g}")
    print(f"c = {model.c:.10g}")
    print(f"r_squared = {sm.r_squared(model, records):.10g}")
    if args.residuals:
        rows = []
        for r in records:
            pred = sm.tickets_sold(model, r.jackpot_millions)
            rows.append((_fmt(r.jackpot_millions), r.tickets_sold, _fmt(pred), _fmt(r.tickets_sold - pred)))
        manifest = None if args.no_manifest else RunManifest(
            "fit", {"input": str(args.input), "coeffs": list(model.coefficients)}
        )
        _write_csv(
            args.residuals, manifest,
            ("jackpot_millions", "tickets_sold", "predicted", "residual"), rows,
        )
    return EXIT_OK


# ---- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pairlotto", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log run manifests to stderr")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("unrank", help="print the ticket with a given rank")
    _add_game_args(p)
    p.add_argument("rank", type=int)
    p.set_defaults(func=cmd_unrank)

    p = sub.add_parser("rank", help="print the rank of a ticket such as '1,2,3,4,5 pb 1'")
    _add_game_args(p)
    p.add_argument("ticket", nargs="+")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("simulate", help="Monte Carlo pool-fraction curves as CSV")
    p.add_argument("--space-size", type=_positive_int, default=100_000)
    p.add_argument("--stores", type=_positive_int, default=2)
    p.add_argument("--strategy", choices=("all",) + STRATEGIES, default="all")
    p.add_argument("--k-max", type=_positive_int, help="largest sale count (default 3 x space size)")
    p.add_argument("--steps", type=_positive_int, default=60)
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    p.add_argument("--no-manifest", action="store_true", help="omit '#' header lines")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="expected value versus jackpot, break-even and peak")
    p.add_argument("--coeffs", type=_parse_coeffs, default=sm.POWERBALL_SALES.coefficients,
                   help="sales quadratic a,b,c with T(j) = a j^2 + b j + c")
    p.add_argument("--space-size", type=_positive_int, default=sm.POWERBALL_N)
    p.add_argument("--j-min", type=float, default=sm.DEFAULT_DOMAIN[0])
    p.add_argument("--j-max", type=float, default=sm.DEFAULT_DOMAIN[1])
    p.add_argument("--steps", type=_positive_int, default=296)
    p.add_argument("--cost", type=float, default=2.0)
    p.add_argument("--out", help="write the EV table to this CSV path")
    p.add_argument("--no-manifest", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("fit", help="fit the sales quadratic to a jackpot_millions,tickets_sold CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--residuals", help="write per-record residuals to this CSV path")
    p.add_argument("--no-manifest", action="store_true")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pairlotto {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ConfigurationError, OSError, ArithmeticError) as exc:
        print(f"pairlotto {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
