"""``conic-iv`` command line: calibrate a chain, price one option, or synthesize a chain."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from conic_iv.calibrate import SolverConfig
from conic_iv.chain import ChainConfig, emit_csv, ingest_chain, process_chain, write_chain
from conic_iv.conic import choquet_two_price, conic_price
from conic_iv.errors import ConicIVError, DomainError, EmptyChain, ParseError
from conic_iv.pricing import MarketConvention, Model, OptionKind, OptionSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

DAYS_PER_YEAR = 365.0
_DEFAULTS = SolverConfig()


def _add_market(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spot", type=float, required=True, help="underlying level X0")
    p.add_argument("--rate", type=float, default=0.0, help="continuously compounded risk-free rate")
    p.add_argument("--carry", type=float, default=0.0, help="drift adjustment alpha (e.g. dividend yield)")
    exp = p.add_mutually_exclusive_group(required=True)
    exp.add_argument("--expiry-days", type=float, help="maturity in days, ACT/365")
    exp.add_argument("--expiry-years", type=float, help="maturity in years")
    p.add_argument("--model", choices=[m.value for m in Model], default=Model.BLACK_SCHOLES.value)


def _convention(args: argparse.Namespace) -> MarketConvention:
    t = args.expiry_years if args.expiry_years is not None else args.expiry_days / DAYS_PER_YEAR
    return MarketConvention(args.spot, args.rate, args.carry, t, Model(args.model))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conic-iv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="liquidity-free implied vols for an option chain")
    cal.add_argument("--chain", required=True, help="input CSV with columns kind,strike,bid,ask")
    _add_market(cal)
    cal.add_argument("--out", required=True, help="output CSV path")
    cal.add_argument("--svg", help="prefix for the four SVG panels")
    cal.add_argument("--gamma-max", type=float, default=_DEFAULTS.gamma_max)
    cal.add_argument("--tol", type=float, default=_DEFAULTS.outer_tol, help="outer solver tolerance")

    pr = sub.add_parser("price", help="bid / risk-neutral / ask for a single option")
    _add_market(pr)
    pr.add_argument("--sigma", type=float, required=True)
    pr.add_argument("--gamma", type=float, required=True)
    pr.add_argument("--strike", type=float, required=True)
    pr.add_argument("--kind", choices=["c", "p", "C", "P"], default="c")
    pr.add_argument("--oracle", action="store_true", help="also evaluate the Choquet quadrature")

    sy = sub.add_parser("synth", help="forward-generate a synthetic chain")
    _add_market(sy)
    sy.add_argument("--sigma", type=float, required=True)
    sy.add_argument("--gamma-profile", default="linear:0.01:0.5", help="const:G or linear:G_ATM:G_WING")
    sy.add_argument("--moneyness-min", type=float, default=0.6)
    sy.add_argument("--moneyness-max", type=float, default=1.4)
    sy.add_argument("--n-strikes", type=int, default=41)
    sy.add_argument("--kinds", choices=["otm", "c", "p", "cp"], default="otm")
    sy.add_argument("--out", help="output CSV (default: stdout)")
    return parser


def _cmd_calibrate(args: argparse.Namespace) -> int:
    from conic_iv.plots import emit_svg

    cfg = ChainConfig(_convention(args), SolverConfig(gamma_max=args.gamma_max, outer_tol=args.tol))
    records = ingest_chain(args.chain, cfg)
    rows = process_chain(records, cfg)
    emit_csv(rows, args.out)
    if args.svg:
        emit_svg(rows, args.svg)
    failed = sum(r.status.failed for r in rows)
    print(f"{len(rows)} rows written to {args.out} ({failed} failed)", file=sys.stderr)
    return EXIT_OK


def _cmd_price(args: argparse.Namespace) -> int:
    conv = _convention(args)
    opt = OptionSpec(args.strike, OptionKind.parse(args.kind))
    tp = conic_price(conv, opt, args.sigma, args.gamma)
    print(f"bid {tp.bid!r}\nrn  {tp.risk_neutral!r}\nask {tp.ask!r}")
    if args.oracle:
        q = choquet_two_price(conv, opt, args.sigma, args.gamma)
        print(f"oracle bid {q.bid!r}\noracle rn  {q.risk_neutral!r}\noracle ask {q.ask!r}")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    from conic_iv.synth import GammaProfile, strike_grid, synth_chain

    conv = _convention(args)
    try:
        profile = GammaProfile.parse(args.gamma_profile)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    if args.n_strikes < 1:
        raise DomainError("--n-strikes must be at least 1")
    strikes = strike_grid(conv.spot, args.moneyness_min, args.moneyness_max, args.n_strikes)
    records = synth_chain(conv, args.sigma, strikes, profile.gammas(strikes, conv.spot), args.kinds)
    write_chain(records, args.out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"calibrate": _cmd_calibrate, "price": _cmd_price, "synth": _cmd_synth}[args.command]
    try:
        return handler(args)
    except (ParseError, EmptyChain, DomainError) as exc:
        print(f"conic-iv: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"conic-iv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConicIVError as exc:
        print(f"conic-iv: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
