"""Static SVG smile panels: prices, spreads, implied vols and implied liquidity vs moneyness."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from conic_iv.chain import SmileRow  # noqa: E402
from conic_iv.pricing import OptionKind  # noqa: E402

# fixed salt and no timestamp keep the SVG byte-identical between runs
_RC = {"svg.hashsalt": "conic-iv", "svg.fonttype": "none", "path.simplify": False}

PANELS = {
    "prices": ("price", [("bid", "bid"), ("ask", "ask"), ("mid", "mid"), ("rn_price", "risk-neutral")]),
    "spreads": ("spread", [("abs_spread", "absolute"), ("rel_spread", "relative (vs mid)")]),
    "vols": (
        "implied volatility",
        [("iv_mid", "mid IV"), ("iv_bid", "bid IV"), ("iv_ask", "ask IV"), ("sigma_lf", "liquidity-free")],
    ),
    "liquidity": ("implied gamma", [("gamma_implied", "gamma")]),
}


def _x(row: SmileRow) -> float:
    return row.moneyness if row.moneyness is not None else row.strike


def _panel(rows: Sequence[SmileRow], ylabel: str, series, path: Path, xlabel: str) -> None:
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot(1, 1, 1)
    for kind, marker in ((OptionKind.CALL, "o"), (OptionKind.PUT, "s")):
        sub = [r for r in rows if r.kind is kind]
        if not sub:
            continue
        for attr, label in series:
            pts = [(_x(r), getattr(r, attr)) for r in sub if getattr(r, attr) is not None]
            if not pts:
                continue
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker=marker, markersize=3, linewidth=1, label=f"{label} ({kind.value})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, linewidth=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def emit_svg(rows: Sequence[SmileRow], path_prefix: str | os.PathLike) -> list[Path]:
    """Write ``<prefix>_{prices,spreads,vols,liquidity}.svg``. Failed rows are left out."""
    if not rows:
        raise ValueError("no rows to plot")
    good = [r for r in rows if not r.status.failed]
    xlabel = "moneyness (K / X0)" if all(r.moneyness is not None for r in rows) else "strike"
    prefix = Path(path_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    out = []
    with matplotlib.rc_context(_RC):
        for name, (ylabel, series) in PANELS.items():
            path = prefix.with_name(f"{prefix.name}_{name}.svg")
            _panel(good, ylabel, series, path, xlabel)
            out.append(path)
    return out
