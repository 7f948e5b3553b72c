"""Command-line front end.

Every analysis is a subcommand; ``--format`` selects ``table`` (default,
human readable), ``csv`` or ``json``.  Exit codes: 0 success, 1 a ``tables``
cell out of tolerance, 2 bad arguments, 3 solver found no solution,
4 value outside a utility's domain.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import secrets
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import catastrophic as cat
from . import lottery as lot
from . import pill
from . import population as pop
from .errors import DomainError, InvalidThresholdError, NoSolutionError, PillRiskError, RangeError
from .utility import CaraExp, Linear, PowerNeg, UtilityFamily, make_family, parse_gamma

EXIT_OK = 0
EXIT_TABLE_FAIL = 1
EXIT_USAGE = 2
EXIT_NO_SOLUTION = 3
EXIT_DOMAIN = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def _gamma(text: str) -> float:
    try:
        return parse_gamma(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a gamma value: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _lottery(text: str) -> lot.DiscreteLottery:
    try:
        if text.lstrip().startswith("["):
            return lot.DiscreteLottery.from_json(text)
        return lot.DiscreteLottery.parse(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad lottery {text!r}: {exc}") from None


# --- output ---------------------------------------------------------------


def _fmt_cell(value: Any, money: bool) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        if money and math.isfinite(value) and abs(value) < 1e18:
            return f"{value:,.2f}"
        return f"{value:.6g}"
    return str(value)


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def emit(rows: list[dict[str, Any]], fmt: str, money: Sequence[str] = (), out=None) -> None:
    """Print ``rows`` in the requested format.

    A single row prints as ``key: value`` lines in table mode and as a bare
    object in JSON mode.
    """
    out = out or sys.stdout
    if fmt == "json":
        payload: Any = rows[0] if len(rows) == 1 else rows
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    if not rows:
        return
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            writer.writerow([_csv_cell(row[k]) for k in keys])
        out.write(buf.getvalue())
        return
    cells = [[_fmt_cell(row[k], k in money) for k in keys] for row in rows]
    if len(rows) == 1:
        width = max(len(k) for k in keys)
        for k, c in zip(keys, cells[0]):
            out.write(f"{k.ljust(width)}  {c}\n")
        return
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    out.write("  ".join(k.rjust(w) for k, w in zip(keys, widths)) + "\n")
    for c in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(c, widths)) + "\n")


# --- subcommands ----------------------------------------------------------


def _family(args: argparse.Namespace) -> UtilityFamily:
    if args.family == "linear":
        return Linear()
    if args.gamma is None:
        raise _UsageError(f"--gamma is required for the {args.family} family")
    return make_family(args.family, args.gamma)


def _deal(args: argparse.Namespace) -> pill.PillDeal:
    try:
        return pill.PillDeal(args.l, args.r, args.p)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def cmd_naive_bound(args: argparse.Namespace) -> int:
    emit([{"r": args.r, "p": args.p, "l0": pill.naive_life_bound(args.r, args.p)}], args.format, ("r", "l0"))
    return EXIT_OK


def cmd_implied_life(args: argparse.Namespace) -> int:
    u = _family(args)
    l = pill.implied_life(u, args.r, args.p)
    emit([{**u.to_dict(), "r": args.r, "p": args.p, "l": l}], args.format, ("r", "l"))
    return EXIT_OK


def cmd_calibrate_gamma(args: argparse.Namespace) -> int:
    g = pill.calibrate_gamma(args.family, args.life, args.r, args.p)
    emit(
        [{"family": args.family, "life": args.life, "r": args.r, "p": args.p, "gamma": g, "log10_gamma": math.log10(g)}],
        args.format,
        ("life", "r"),
    )
    return EXIT_OK


def cmd_ce(args: argparse.Namespace) -> int:
    u = _family(args)
    emit(
        [{**u.to_dict(), "mean": lot.mean(args.lottery), "certainty_equivalent": lot.certainty_equivalent(u, args.lottery)}],
        args.format,
        ("mean", "certainty_equivalent"),
    )
    return EXIT_OK


def cmd_pill_value(args: argparse.Namespace) -> int:
    u = _family(args)
    deal = _deal(args)
    value = pill.deal_value(u, deal)
    emit(
        [{**u.to_dict(), "l": deal.l, "r": deal.r, "p": deal.p, "value": value, "acceptable": value > deal.l}],
        args.format,
        ("l", "r", "value"),
    )
    return EXIT_OK


def cmd_p_threshold(args: argparse.Namespace) -> int:
    u = _family(args)
    p_star = pill.acceptance_probability_threshold(u, args.l, args.r)
    emit([{**u.to_dict(), "l": args.l, "r": args.r, "p_star": p_star}], args.format, ("l", "r"))
    return EXIT_OK


def cmd_lambda_threshold(args: argparse.Namespace) -> int:
    emit([{"l": args.l, "r": args.r, "lambda0": cat.lambda_threshold(args.l, args.r)}], args.format, ("l", "r"))
    return EXIT_OK


def cmd_w_lambda(args: argparse.Namespace) -> int:
    row = {
        "l": args.l,
        "r": args.r,
        "p": args.p,
        "lambda": args.lam,
        "w_value": cat.w_lambda(args.l, args.r, args.p, args.lam),
        "limit": cat.w_lambda_limit(args.l, args.r, args.lam),
    }
    emit([row], args.format, ("l", "r", "w_value", "limit"))
    return EXIT_OK


def classification_record(l: float, r: float, lam: float) -> dict[str, Any]:
    result = cat.classify_agent(l, r, lam)
    return {
        "lambda": lam,
        "lambda0": cat.lambda_threshold(l, r),
        "class": result.kind.value,
        "p_star": result.p_star,
    }


def cmd_classify(args: argparse.Namespace) -> int:
    emit([classification_record(args.l, args.r, args.lam)], args.format)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if not 1 < args.inv_p_from < args.inv_p_to:
        raise _UsageError("need 1 < --inv-p-from < --inv-p-to")
    grid = np.logspace(math.log10(args.inv_p_from), math.log10(args.inv_p_to), args.points).tolist()
    if args.model == "eu":
        u = _family(args)
        pairs = pill.sweep_deal_value(u, args.l, args.r, grid)
        column = "value"
    else:
        if args.lam is None:
            raise _UsageError("--lambda is required for --model cat")
        pairs = cat.sweep_w_lambda(args.l, args.r, args.lam, grid)
        column = "w_value"
    emit([{"inv_p": x, column: v} for x, v in pairs], args.format, (column,))
    return EXIT_OK


_SIM_FLAGS = ("n_agents", "eu_fraction", "l_min", "l_max", "g_lo", "g_hi", "lam_lo", "lam_hi", "seed")


def cmd_simulate(args: argparse.Namespace) -> int:
    values: dict[str, Any] = {}
    if args.config:
        try:
            values.update(pop.spec_dict(pop.PopulationSpec.from_config(args.config)))
            with open(args.config) as fh:
                seed_in_config = any(line.split("#", 1)[0].split("=", 1)[0].strip() == "seed" for line in fh)
        except (OSError, ValueError) as exc:
            raise _UsageError(f"bad config {args.config}: {exc}") from None
        if not seed_in_config:
            values.pop("seed")
    for name in _SIM_FLAGS:
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    chose_seed = "seed" not in values
    if chose_seed:
        values["seed"] = secrets.randbits(63)
    try:
        spec = pop.PopulationSpec(**values)
        deal = pill.PillDeal(spec.l_min, args.r, args.p)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    outcome = pop.simulate(spec, deal)
    summary = pop.summarize(outcome)
    summary["seed"] = spec.seed
    summary["seed_chosen"] = chose_seed
    if chose_seed:
        print(f"seed: {spec.seed}", file=sys.stderr)
    if args.agents_csv:
        with open(args.agents_csv, "w") as fh:
            fh.write(pop.agents_csv(outcome))
    if args.format == "json":
        sys.stdout.write(json.dumps({"spec": pop.spec_dict(spec), "r": args.r, "p": args.p, **summary}, indent=2) + "\n")
    else:
        flat = {k: v for k, v in summary.items() if k != "quantiles"}
        emit([flat], args.format)
    return EXIT_OK


# --- reproduction report --------------------------------------------------

R_REF = 220_000.0
P_REF = 1e-9


def _cell(section: str, cell: str, compute: Callable[[], float], published: float, check: Callable[[float], bool], tol: str) -> dict[str, Any]:
    try:
        value = compute()
        ok = bool(check(value))
    except PillRiskError as exc:
        value, ok = math.nan, False
        cell = f"{cell} [{type(exc).__name__}]"
    return {"section": section, "cell": cell, "computed": value, "published": published, "tolerance": tol, "pass": ok}


def _rel(target: float, tol: float) -> Callable[[float], bool]:
    return lambda v: abs(v - target) <= tol * abs(target)


def _abs(target: float, tol: float) -> Callable[[float], bool]:
    return lambda v: abs(v - target) <= tol


def tables_report() -> list[dict[str, Any]]:
    """Recompute every reproduced table cell with its tolerance and verdict."""
    rows = []
    rows.append(_cell("life_value", "linear implied l", lambda: pill.implied_life(Linear(), R_REF, P_REF), 2.2e14, _abs(2.2e14, 0.0), "exact"))
    for exponent, target in ((-5.53, 7.0e6), (-4.86, 1.7e6)):
        rows.append(_cell("life_value", f"cara gamma=10^{exponent} implied l", lambda e=exponent: pill.implied_life(CaraExp(10.0**e), R_REF, P_REF), target, _rel(target, 0.05), "5% rel"))
    for g, target in ((5.3, 7.0e6), (10.0, 1.7e6)):
        rows.append(_cell("life_value", f"power gamma={g:g} implied l", lambda g=g: pill.implied_life(PowerNeg(g), R_REF, P_REF), target, _rel(target, 0.05), "5% rel"))
    for exponent, target in ((-5.53, 7.0e6), (-4.86, 1.7e6)):
        rows.append(_cell("life_value", f"cara calibrate l={target:.2g} -> log10 gamma", lambda t=target: math.log10(pill.calibrate_gamma(CaraExp, t, R_REF, P_REF)), exponent, _abs(exponent, 0.05), "0.05 abs"))
    for g, target in ((5.3, 7.0e6), (10.0, 1.7e6)):
        rows.append(_cell("life_value", f"power calibrate l={target:.2g} -> gamma", lambda t=target: pill.calibrate_gamma(PowerNeg, t, R_REF, P_REF), g, _rel(g, 0.10), "10% rel"))

    coin = lot.DiscreteLottery(((100.0, 0.5), (200.0, 0.5)))
    rows.append(_cell("coin_flip", "linear coin-flip CE", lambda: lot.certainty_equivalent(Linear(), coin), 150.0, _abs(150.0, 0.0), "exact"))
    rows.append(_cell("coin_flip", "cara gamma=1e-5 coin-flip CE", lambda: lot.certainty_equivalent(CaraExp(1e-5), coin), 149.98, _abs(149.98, 0.005), "0.005 abs"))
    rows.append(_cell("coin_flip", "power gamma=7 coin-flip CE", lambda: lot.certainty_equivalent(PowerNeg(7.0), coin), 110.3, _abs(110.3, 0.05), "0.05 abs"))

    for exponent, p, target in ((-5.0, 1e-9, 2.18e6), (-4.9, 1e-10, 2.04e6), (-4.8, 1e-13, 2.10e6)):
        rows.append(_cell("deal_value", f"cara gamma=10^{exponent} p={p:g} deal value", lambda e=exponent, p=p: pill.deal_value(CaraExp(10.0**e), pill.PillDeal(2e6, R_REF, p)), target, _rel(target, 0.01), "1% rel"))

    rows.append(_cell("lambda0", "l=3e6 r=2.2e5 threshold", lambda: cat.lambda_threshold(3e6, R_REF), 0.926, _abs(0.926, 0.001), "0.001 abs"))
    return rows


def cmd_tables(args: argparse.Namespace) -> int:
    rows = tables_report()
    emit(rows, args.format)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_TABLE_FAIL


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pillrisk", description="Value-of-life and catastrophic-risk analysis of the pill deal.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func: Callable[[argparse.Namespace], int], help_: str, default_format: str = "table") -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--format", choices=("table", "csv", "json"), default=default_format)
        p.set_defaults(func=func)
        return p

    def family(p: argparse.ArgumentParser, default: str | None = None) -> None:
        p.add_argument("--family", choices=("linear", "cara", "power"), required=default is None, default=default)
        p.add_argument("--gamma", type=_gamma)

    p = add("naive-bound", cmd_naive_bound, "life value bound r/p under linear preferences")
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--p", type=_number, required=True)

    p = add("implied-life", cmd_implied_life, "life value at indifference")
    family(p)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--p", type=_number, required=True)

    p = add("calibrate-gamma", cmd_calibrate_gamma, "risk aversion matching a target life value")
    p.add_argument("--family", choices=("cara", "power"), required=True)
    p.add_argument("--life", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--p", type=_number, required=True)

    p = add("ce", cmd_ce, "certainty equivalent of a lottery")
    family(p)
    p.add_argument("--lottery", type=_lottery, required=True, help="wealth:prob,... or a JSON array")

    p = add("pill-value", cmd_pill_value, "certainty equivalent of the pill deal")
    family(p)
    for flag in ("--l", "--r", "--p"):
        p.add_argument(flag, type=_number, required=True)

    p = add("p-threshold", cmd_p_threshold, "largest acceptable deadly-pill probability")
    family(p)
    p.add_argument("--l", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)

    p = add("lambda-threshold", cmd_lambda_threshold, "lambda below which the deal is never taken")
    p.add_argument("--l", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)

    p = add("w-lambda", cmd_w_lambda, "catastrophic ranking of the pill deal")
    for flag in ("--l", "--r", "--p"):
        p.add_argument(flag, type=_number, required=True)
    p.add_argument("--lambda", dest="lam", type=_number, required=True)

    p = add("classify", cmd_classify, "never-taker or acceptance threshold", default_format="json")
    p.add_argument("--l", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--lambda", dest="lam", type=_number, required=True)

    p = add("sweep", cmd_sweep, "deal value along a log grid of 1/p", default_format="csv")
    p.add_argument("--model", choices=("eu", "cat"), required=True)
    family(p, default="cara")
    p.add_argument("--lambda", dest="lam", type=_number)
    p.add_argument("--l", type=_number, required=True)
    p.add_argument("--r", type=_number, required=True)
    p.add_argument("--inv-p-from", type=_number, required=True)
    p.add_argument("--inv-p-to", type=_number, required=True)
    p.add_argument("--points", type=_positive_int, default=50)

    p = add("simulate", cmd_simulate, "Monte Carlo respondent population", default_format="json")
    p.add_argument("--config", help="flat key=value file with population settings")
    p.add_argument("--n-agents", type=_positive_int)
    for name in ("eu-fraction", "l-min", "l-max", "g-lo", "g-hi", "lam-lo", "lam-hi"):
        p.add_argument(f"--{name}", type=_number)
    p.add_argument("--seed", type=int)
    p.add_argument("--r", type=_number, default=R_REF)
    p.add_argument("--p", type=_number, default=P_REF)
    p.add_argument("--agents-csv", help="write per-agent records to this CSV file")

    add("tables", cmd_tables, "reproduce the calibration tables with pass/fail")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NoSolutionError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except (DomainError, RangeError, InvalidThresholdError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
