import csv
import io

import numpy as np
import pytest

from conic_iv.calibrate import SolverConfig
from conic_iv.chain import (
    CSV_COLUMNS,
    ChainConfig,
    ChainRecord,
    Status,
    emit_csv,
    ingest_chain,
    process_chain,
    worker_count,
    write_chain,
)
from conic_iv.errors import EmptyChain, ParseError
from conic_iv.plots import emit_svg
from conic_iv.pricing import MarketConvention, Model, OptionKind
from conic_iv.synth import GammaProfile, strike_grid, synth_chain

C, P = OptionKind.CALL, OptionKind.PUT
CONV = MarketConvention(100, 0.0, 0.0, 1.0)


def write(tmp_path, text, name="chain.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


# -- ingest -----------------------------------------------------------------


def test_ingest_happy_path(tmp_path):
    path = write(tmp_path, "kind,strike,bid,ask\nC,100,7.5,8.5\nP,90,2,2.5\nc,110,3,3.4\n")
    recs = ingest_chain(path)
    assert [(r.kind, r.strike, r.bid, r.ask) for r in recs] == [
        (C, 100.0, 7.5, 8.5),
        (P, 90.0, 2.0, 2.5),
        (C, 110.0, 3.0, 3.4),
    ]


def test_ingest_header_order_is_free(tmp_path):
    recs = ingest_chain(write(tmp_path, "bid,ask,strike,kind\n1,2,100,P\n"))
    assert recs[0] == ChainRecord(P, 100.0, 1.0, 2.0, 2)


def test_ingest_rejects_crossed_row(tmp_path):
    path = write(tmp_path, "kind,strike,bid,ask\nC,100,7.5,8.5\nC,105,6,5\n")
    with pytest.raises(ParseError) as exc:
        ingest_chain(path)
    assert exc.value.line == 3
    assert "exceeds ask" in str(exc.value)


@pytest.mark.parametrize(
    "row,reason",
    [
        ("X,100,1,2", "kind"),
        ("C,abc,1,2", "strike"),
        ("C,100,nan,2", "finite"),
        ("C,100,1", "fields"),
        ("C,-5,1,2", "positive"),
        ("C,100,-1,2", "negative"),
    ],
)
def test_ingest_line_numbered_diagnostics(tmp_path, row, reason):
    with pytest.raises(ParseError) as exc:
        ingest_chain(write(tmp_path, f"kind,strike,bid,ask\n{row}\n"))
    assert exc.value.line == 2
    assert reason in exc.value.reason


def test_ingest_negative_strike_allowed_for_bachelier(tmp_path):
    cfg = ChainConfig(MarketConvention(-1.0, 0.0, 0.0, 1.0, Model.BACHELIER))
    assert ingest_chain(write(tmp_path, "kind,strike,bid,ask\nC,-0.5,0.6,0.7\n"), cfg)[0].strike == -0.5


def test_ingest_missing_header_column(tmp_path):
    with pytest.raises(ParseError):
        ingest_chain(write(tmp_path, "kind,strike,bid\nC,1,2\n"))


@pytest.mark.parametrize("text", ["", "kind,strike,bid,ask\n", "\n\n"])
def test_ingest_empty(tmp_path, text):
    with pytest.raises(EmptyChain):
        ingest_chain(write(tmp_path, text))


# -- processing -------------------------------------------------------------


def _smile(model=Model.BLACK_SCHOLES, sigma=0.2, profile="linear:0.01:0.5", n=21):
    conv = MarketConvention(100, 0.01, 0.0, 1.0, model)
    ks = strike_grid(100, 0.7, 1.3, n)
    gs = GammaProfile.parse(profile).gammas(ks, 100)
    return conv, dict(zip(ks.tolist(), gs.tolist())), synth_chain(conv, sigma, ks, gs)


@pytest.mark.parametrize("model,sigma", [(Model.BLACK_SCHOLES, 0.2), (Model.BACHELIER, 18.0)])
def test_process_round_trip(model, sigma):
    conv, gmap, recs = _smile(model, sigma)
    rows = process_chain(recs, ChainConfig(conv))
    assert len(rows) == len(recs)
    for row in rows:
        assert row.status is Status.OK
        assert row.sigma_lf == pytest.approx(sigma, rel=1e-8)
        assert row.gamma_implied == pytest.approx(gmap[row.strike], abs=1e-7)
        assert row.iv_bid < row.sigma_lf < row.iv_ask
        assert row.bid < row.rn_price < row.ask
        assert row.rel_spread == pytest.approx(row.abs_spread / row.mid)
        assert row.moneyness == pytest.approx(row.strike / 100)


def test_process_orders_by_kind_then_strike():
    conv, _, recs = _smile()
    rows = process_chain(list(reversed(recs)), ChainConfig(conv))
    keys = [(r.kind.value, r.strike) for r in rows]
    assert keys == sorted(keys)


def test_failures_are_isolated():
    conv, _, recs = _smile()
    clean = process_chain(recs, ChainConfig(conv))
    intrinsic_bad = ChainRecord(C, 80.0, 19.0, 22.0, 99)
    rows = process_chain(recs + [intrinsic_bad], ChainConfig(conv))
    bad = [r for r in rows if r.strike == 80.0 and r.kind is C]
    assert bad[0].status is Status.NO_EXISTENCE
    assert bad[0].sigma_lf is None and bad[0].gamma_implied is None
    others = [r for r in rows if r is not bad[0]]
    assert others == clean


def test_zero_spread_row_is_degenerate():
    rows = process_chain([ChainRecord(C, 100.0, 8.0, 8.0)], ChainConfig(CONV))
    assert rows[0].status is Status.DEGENERATE
    assert rows[0].gamma_implied == 0.0
    assert rows[0].iv_mid == rows[0].sigma_lf


def test_spread_infeasible_status():
    rows = process_chain([ChainRecord(C, 100.0, 2.0, 30.0)], ChainConfig(CONV, SolverConfig(gamma_max=0.2)))
    assert rows[0].status is Status.SPREAD_INFEASIBLE


def test_threading_does_not_change_results(monkeypatch):
    conv, _, recs = _smile(n=31)
    serial = process_chain(recs, ChainConfig(conv, threads=1))
    monkeypatch.setenv("CONIC_IV_THREADS", "4")
    assert worker_count(8) == 4
    assert process_chain(recs, ChainConfig(conv, threads=8)) == serial


def test_threads_env_must_be_integer(monkeypatch):
    monkeypatch.setenv("CONIC_IV_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count(2)


# -- output -----------------------------------------------------------------


def test_emit_csv_single_row(tmp_path):
    rows = process_chain([ChainRecord(C, 100.0, 7.5, 8.5)], ChainConfig(CONV))
    out = tmp_path / "out.csv"
    emit_csv(rows, out)
    raw = out.read_bytes()
    lines = raw.decode().split("\r\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len([ln for ln in lines if ln]) == 2
    rec = next(csv.DictReader(io.StringIO(raw.decode())))
    assert float(rec["sigma_lf"]) == rows[0].sigma_lf  # shortest repr round-trips exactly
    assert rec["status"] == "Ok"


def test_emit_csv_failed_row_has_empty_model_fields(tmp_path):
    rows = process_chain([ChainRecord(C, 80.0, 19.0, 22.0)], ChainConfig(CONV))
    out = tmp_path / "out.csv"
    emit_csv(rows, out)
    rec = next(csv.DictReader(io.StringIO(out.read_text())))
    assert rec["status"] == "NoExistence"
    for col in ("rn_price", "iv_mid", "iv_bid", "iv_ask", "sigma_lf", "gamma_implied"):
        assert rec[col] == ""
    assert rec["bid"] == "19.0"


def test_emit_csv_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "x.csv")


def test_outputs_are_deterministic(tmp_path):
    conv, _, recs = _smile()
    rows = process_chain(recs + [ChainRecord(C, 80.0, 19.0, 22.0)], ChainConfig(conv))
    for run in ("a", "b"):
        emit_csv(rows, tmp_path / run / "out.csv")
        emit_svg(rows, tmp_path / run / "smile")
    names = ["out.csv"] + [f"smile_{p}.svg" for p in ("prices", "spreads", "vols", "liquidity")]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_svg_omits_failed_rows(tmp_path):
    ok = process_chain([ChainRecord(C, 100.0, 7.5, 8.5)], ChainConfig(CONV))
    bad = process_chain([ChainRecord(C, 80.0, 19.0, 22.0)], ChainConfig(CONV))
    emit_svg(ok, tmp_path / "ok")
    emit_svg(ok + bad, tmp_path / "mixed")
    assert (tmp_path / "ok_vols.svg").read_bytes() == (tmp_path / "mixed_vols.svg").read_bytes()


def test_write_chain_round_trips(tmp_path):
    _, _, recs = _smile()
    write_chain(recs, tmp_path / "c.csv")
    back = ingest_chain(tmp_path / "c.csv")
    assert [(r.kind, r.strike, r.bid, r.ask) for r in back] == [(r.kind, r.strike, r.bid, r.ask) for r in recs]


def test_gamma_profile_parse():
    assert GammaProfile.parse("const:0.2").atm == 0.2
    prof = GammaProfile.parse("linear:0.01:0.5")
    g = prof.gammas(np.array([60.0, 100.0, 140.0]), 100.0)
    assert g.tolist() == pytest.approx([0.5, 0.01, 0.5])
    for bad in ("linear:1", "cubic:1:2", "const:x", "const:-1"):
        with pytest.raises(ValueError):
            GammaProfile.parse(bad)
