"""Option-chain batch processing: ingest, per-quote calibration, CSV output."""

from __future__ import annotations

import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from conic_iv.calibrate import (
    Quote,
    SolverConfig,
    calibrate_liquidity_free,
    implied_vol,
)
from conic_iv.errors import (
    ConicIVError,
    DomainError,
    EmptyChain,
    NoExistence,
    ParseError,
    PriceOutOfBounds,
    SpreadInfeasible,
)
from conic_iv.pricing import MarketConvention, Model, OptionKind, OptionSpec

CSV_COLUMNS = (
    "kind",
    "strike",
    "moneyness",
    "bid",
    "ask",
    "mid",
    "rn_price",
    "abs_spread",
    "rel_spread",
    "iv_mid",
    "iv_bid",
    "iv_ask",
    "sigma_lf",
    "gamma_implied",
    "status",
)
INPUT_COLUMNS = ("kind", "strike", "bid", "ask")
THREADS_ENV = "CONIC_IV_THREADS"


class Status(str, Enum):
    OK = "Ok"
    NO_EXISTENCE = "NoExistence"
    SPREAD_INFEASIBLE = "SpreadInfeasible"
    DEGENERATE = "Degenerate"
    PRICE_OUT_OF_BOUNDS = "PriceOutOfBounds"

    @property
    def failed(self) -> bool:
        return self not in (Status.OK, Status.DEGENERATE)


@dataclass(frozen=True, slots=True)
class ChainRecord:
    kind: OptionKind
    strike: float
    bid: float
    ask: float
    line: int = 0


@dataclass(frozen=True, slots=True)
class SmileRow:
    kind: OptionKind
    strike: float
    moneyness: float | None
    bid: float
    ask: float
    mid: float
    rn_price: float | None
    abs_spread: float
    rel_spread: float | None
    iv_mid: float | None
    iv_bid: float | None
    iv_ask: float | None
    sigma_lf: float | None
    gamma_implied: float | None
    status: Status
    message: str = field(default="", compare=False)


@dataclass(frozen=True, slots=True)
class ChainConfig:
    conv: MarketConvention
    solver: SolverConfig = SolverConfig()
    threads: int | None = None


# -- ingest -----------------------------------------------------------------


def _parse_float(text: str, name: str, line: int) -> float:
    try:
        val = float(text)
    except (TypeError, ValueError):
        raise ParseError(line, f"{name} {text!r} is not a number") from None
    if not math.isfinite(val):
        raise ParseError(line, f"{name} must be finite, got {text!r}")
    return val


def ingest_chain(path: str | os.PathLike, config: ChainConfig | None = None) -> list[ChainRecord]:
    """Read a ``kind,strike,bid,ask`` CSV with ``kind`` in {C, P}.

    ``config`` only supplies the model, which decides whether non-positive strikes are valid.

    Raises :class:`ParseError` naming the offending (1-based) file line and
    :class:`EmptyChain` if no data rows are present.
    """
    model = config.conv.model if config is not None else Model.BLACK_SCHOLES
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        records: list[ChainRecord] = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if header is None:
                header = [c.strip().lower() for c in row]
                missing = [c for c in INPUT_COLUMNS if c not in header]
                if missing:
                    raise ParseError(line, f"header lacks column(s) {', '.join(missing)}")
                idx = {c: header.index(c) for c in INPUT_COLUMNS}
                continue
            if len(row) != len(header):
                raise ParseError(line, f"expected {len(header)} fields, got {len(row)}")
            try:
                kind = OptionKind.parse(row[idx["kind"]])
            except ValueError:
                raise ParseError(line, f"kind must be C or P, got {row[idx['kind']]!r}") from None
            strike = _parse_float(row[idx["strike"]], "strike", line)
            bid = _parse_float(row[idx["bid"]], "bid", line)
            ask = _parse_float(row[idx["ask"]], "ask", line)
            if model is Model.BLACK_SCHOLES and strike <= 0.0:
                raise ParseError(line, f"strike must be positive under Black-Scholes, got {strike!r}")
            if bid < 0.0:
                raise ParseError(line, f"negative bid {bid!r}")
            if bid > ask:
                raise ParseError(line, f"bid {bid!r} exceeds ask {ask!r}")
            records.append(ChainRecord(kind, strike, bid, ask, line))
    if not records:
        raise EmptyChain(f"{os.fspath(path)} contains no option rows")
    return records


# -- processing -------------------------------------------------------------


def _safe_iv(conv: MarketConvention, opt: OptionSpec, price: float) -> float | None:
    try:
        return implied_vol(conv, opt, price)
    except (PriceOutOfBounds, DomainError):
        return None


def process_record(rec: ChainRecord, cfg: ChainConfig) -> SmileRow:
    conv = cfg.conv
    opt = OptionSpec(rec.strike, rec.kind)
    mid = 0.5 * (rec.bid + rec.ask)
    spread = rec.ask - rec.bid
    moneyness = rec.strike / conv.spot if conv.spot != 0.0 else None
    rel = spread / mid if mid != 0.0 else None
    base = dict(
        kind=rec.kind,
        strike=rec.strike,
        moneyness=moneyness,
        bid=rec.bid,
        ask=rec.ask,
        mid=mid,
        abs_spread=spread,
        rel_spread=rel,
    )
    blank = dict(rn_price=None, iv_mid=None, iv_bid=None, iv_ask=None, sigma_lf=None, gamma_implied=None)
    try:
        res = calibrate_liquidity_free(conv, opt, Quote(rec.bid, rec.ask), cfg.solver)
    except NoExistence as exc:
        return SmileRow(**base, **blank, status=Status.NO_EXISTENCE, message=str(exc))
    except SpreadInfeasible as exc:
        return SmileRow(**base, **blank, status=Status.SPREAD_INFEASIBLE, message=str(exc))
    except ConicIVError as exc:
        return SmileRow(**base, **blank, status=Status.PRICE_OUT_OF_BOUNDS, message=str(exc))

    if res.degenerate and rec.bid == rec.ask:
        iv_mid = iv_bid = iv_ask = res.sigma
    else:
        iv_bid, iv_ask = res.bracket
        iv_mid = _safe_iv(conv, opt, mid)
    status = Status.DEGENERATE if res.degenerate else Status.OK
    return SmileRow(
        **base,
        rn_price=res.risk_neutral_price,
        iv_mid=iv_mid,
        iv_bid=iv_bid,
        iv_ask=iv_ask,
        sigma_lf=res.sigma,
        gamma_implied=res.gamma,
        status=status,
    )


def worker_count(requested: int | None = None) -> int:
    n = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, n)


def _sort_key(rec: ChainRecord) -> tuple[int, float, int]:
    return (0 if rec.kind is OptionKind.CALL else 1, rec.strike, rec.line)


def process_chain(records: Iterable[ChainRecord], cfg: ChainConfig) -> list[SmileRow]:
    """One :class:`SmileRow` per record, ordered by (kind, strike).

    Per-row failures are reported through ``status``; the batch never aborts.
    """
    ordered = sorted(records, key=_sort_key)
    n = worker_count(cfg.threads)
    if n == 1 or len(ordered) < 2:
        return [process_record(r, cfg) for r in ordered]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda r: process_record(r, cfg), ordered))


# -- output -----------------------------------------------------------------


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        # repr is the shortest string that round-trips the double
        return repr(value)
    return str(value)


def row_values(row: SmileRow) -> list[str]:
    return [format_value(getattr(row, c)) for c in CSV_COLUMNS]


def emit_csv(rows: Sequence[SmileRow], path: str | os.PathLike) -> None:
    if not rows:
        raise ValueError("no rows to write")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row_values(row))


def write_chain(records: Sequence[ChainRecord], path: str | os.PathLike | None = None) -> None:
    """Write records in the ingest format (``kind,strike,bid,ask``); stdout when ``path`` is None."""
    if path is None:
        _write_records(records, sys.stdout)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_records(records, fh)


def _write_records(records: Sequence[ChainRecord], fh) -> None:
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(INPUT_COLUMNS)
    for r in records:
        writer.writerow([r.kind.value, repr(r.strike), repr(r.bid), repr(r.ask)])
