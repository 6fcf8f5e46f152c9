"""Forward-generated synthetic chains with known (sigma, gamma) per strike."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from conic_iv.chain import ChainRecord
from conic_iv.conic import conic_price
from conic_iv.pricing import MarketConvention, OptionKind, OptionSpec


@dataclass(frozen=True, slots=True)
class GammaProfile:
    """Distortion as a function of distance from the money.

    ``linear`` rises from ``atm`` at the forward-neutral strike to ``wing`` at
    the farthest strike in the chain; ``const`` uses ``atm`` everywhere.
    """

    shape: str
    atm: float
    wing: float

    @classmethod
    def parse(cls, spec: str) -> "GammaProfile":
        """Parse ``const:G`` or ``linear:G_ATM:G_WING``."""
        parts = spec.strip().split(":")
        try:
            if parts[0] == "const" and len(parts) == 2:
                g = float(parts[1])
                prof = cls("const", g, g)
            elif parts[0] == "linear" and len(parts) == 3:
                prof = cls("linear", float(parts[1]), float(parts[2]))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"bad gamma profile {spec!r}; use const:G or linear:G_ATM:G_WING") from None
        if prof.atm < 0 or prof.wing < 0:
            raise ValueError("gamma profile values must be non-negative")
        return prof

    def gammas(self, strikes: np.ndarray, spot: float) -> np.ndarray:
        if self.shape == "const":
            return np.full(strikes.shape, self.atm)
        dist = np.abs(strikes - spot)
        span = dist.max()
        frac = dist / span if span > 0 else np.zeros_like(dist)
        return self.atm + (self.wing - self.atm) * frac


def strike_grid(spot: float, lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` strikes evenly spaced in moneyness ``[lo, hi]``, times spot."""
    return spot * np.linspace(lo, hi, n)


def otm_kind(strike: float, spot: float) -> OptionKind:
    return OptionKind.PUT if strike < spot else OptionKind.CALL


def synth_chain(
    conv: MarketConvention,
    sigma: float,
    strikes: np.ndarray,
    gammas: np.ndarray,
    kinds: str = "otm",
) -> list[ChainRecord]:
    """Closed-form conic quotes for each strike.

    ``kinds`` is ``otm`` (puts below spot, calls from spot up), ``c``, ``p`` or ``cp``.
    """
    pick: Callable[[float], list[OptionKind]]
    if kinds == "otm":
        pick = lambda k: [otm_kind(k, conv.spot)]  # noqa: E731
    elif kinds in ("c", "p", "cp"):
        sel = [OptionKind.CALL] * ("c" in kinds) + [OptionKind.PUT] * ("p" in kinds)
        pick = lambda k: sel  # noqa: E731
    else:
        raise ValueError(f"kinds must be otm, c, p or cp, got {kinds!r}")
    out = []
    line = 2
    for k, g in zip(strikes.tolist(), gammas.tolist()):
        for kind in pick(k):
            tp = conic_price(conv, OptionSpec(k, kind), sigma, g)
            out.append(ChainRecord(kind, k, tp.bid, tp.ask, line))
            line += 1
    return out
