"""Risk-neutral European option prices under Black-Scholes and Bachelier dynamics.

Both models share the risk-neutral drift ``r - alpha`` on the underlying, with
``alpha`` the carry adjustment (dividend yield, futures convention, ...).
Black-Scholes is lognormal; Bachelier keeps the proportional drift with an
additive diffusion, so its terminal law is normal with analytic moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from conic_iv.dist_math import norm_cdf, norm_pdf
from conic_iv.errors import DomainError

_erfc = math.erfc
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# |r - alpha| below which the Bachelier variance uses its analytic limit
DRIFT_LIMIT = 1e-10


class Model(str, Enum):
    BLACK_SCHOLES = "bs"
    BACHELIER = "bachelier"


class OptionKind(str, Enum):
    CALL = "C"
    PUT = "P"

    @classmethod
    def parse(cls, text: str) -> "OptionKind":
        t = text.strip().upper()
        if t in ("C", "CALL"):
            return cls.CALL
        if t in ("P", "PUT"):
            return cls.PUT
        raise ValueError(f"unknown option kind {text!r}")


@dataclass(frozen=True, slots=True)
class MarketConvention:
    spot: float
    rate: float
    carry: float
    maturity: float
    model: Model = Model.BLACK_SCHOLES

    def __post_init__(self) -> None:
        if not (self.maturity > 0.0 and math.isfinite(self.maturity)):
            raise DomainError(f"maturity must be positive, got {self.maturity!r}")
        if self.model is Model.BLACK_SCHOLES and not self.spot > 0.0:
            raise DomainError(f"Black-Scholes needs a positive spot, got {self.spot!r}")

    @property
    def forward(self) -> float:
        return math.exp((self.rate - self.carry) * self.maturity) * self.spot

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.maturity)


@dataclass(frozen=True, slots=True)
class OptionSpec:
    strike: float
    kind: OptionKind = OptionKind.CALL

    @property
    def is_call(self) -> bool:
        return self.kind is OptionKind.CALL


@dataclass(frozen=True, slots=True)
class BachelierMoments:
    mubar: float
    sigmabar: float


def _check_option(conv: MarketConvention, opt: OptionSpec) -> None:
    if conv.model is Model.BLACK_SCHOLES and not opt.strike > 0.0:
        raise DomainError(f"Black-Scholes needs a positive strike, got {opt.strike!r}")


# -- scalar kernels (no validation; used in solver hot loops) ---------------


def bs_kernel(spot, strike, rate, carry, t, sigma, is_call):
    sd = sigma * math.sqrt(t)
    d1 = (math.log(spot / strike) + (rate - carry) * t) / sd + 0.5 * sd
    d2 = d1 - sd
    fs = math.exp(-carry * t) * spot
    dk = math.exp(-rate * t) * strike
    # Phi(x) = erfc(-x / sqrt 2) / 2, inlined for the solver loops
    if is_call:
        return 0.5 * (fs * _erfc(-d1 * _INV_SQRT2) - dk * _erfc(-d2 * _INV_SQRT2))
    return 0.5 * (dk * _erfc(d2 * _INV_SQRT2) - fs * _erfc(d1 * _INV_SQRT2))


def bachelier_kernel(mubar, sigmabar, strike, rate, t, is_call):
    m = (mubar - strike) if is_call else (strike - mubar)
    z = m / sigmabar
    return math.exp(-rate * t) * (m * norm_cdf(z) + sigmabar * norm_pdf(z))


def bachelier_scale(rate: float, carry: float, t: float) -> float:
    """sigmabar / sigma, i.e. sqrt((exp(2cT) - 1) / (2c)) with c = r - alpha."""
    c = rate - carry
    if abs(c) < DRIFT_LIMIT:
        return math.sqrt(t)
    return math.sqrt(math.expm1(2.0 * c * t) / (2.0 * c))


# -- public API -------------------------------------------------------------


def bs_price(conv: MarketConvention, opt: OptionSpec, sigma: float) -> float:
    if conv.model is not Model.BLACK_SCHOLES:
        raise DomainError("bs_price requires a Black-Scholes convention")
    _check_option(conv, opt)
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    return bs_kernel(conv.spot, opt.strike, conv.rate, conv.carry, conv.maturity, sigma, opt.is_call)


def bachelier_moments(conv: MarketConvention, sigma: float) -> BachelierMoments:
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if not conv.maturity > 0.0:
        raise DomainError("maturity must be positive")
    return BachelierMoments(
        mubar=conv.forward,
        sigmabar=sigma * bachelier_scale(conv.rate, conv.carry, conv.maturity),
    )


def bachelier_price_from_moments(
    m: BachelierMoments, strike: float, rate: float, t: float, kind: OptionKind
) -> float:
    if not m.sigmabar > 0.0:
        raise DomainError(f"sigmabar must be positive, got {m.sigmabar!r}")
    return bachelier_kernel(m.mubar, m.sigmabar, strike, rate, t, kind is OptionKind.CALL)


def bachelier_price(conv: MarketConvention, opt: OptionSpec, sigma: float) -> float:
    if conv.model is not Model.BACHELIER:
        raise DomainError("bachelier_price requires a Bachelier convention")
    m = bachelier_moments(conv, sigma)
    return bachelier_price_from_moments(m, opt.strike, conv.rate, conv.maturity, opt.kind)


def model_price(conv: MarketConvention, opt: OptionSpec, sigma: float) -> float:
    if conv.model is Model.BLACK_SCHOLES:
        return bs_price(conv, opt, sigma)
    return bachelier_price(conv, opt, sigma)


def price_bounds(conv: MarketConvention, opt: OptionSpec) -> tuple[float, float]:
    """Infimum and supremum of the model price over sigma > 0.

    The Black-Scholes supremum is the discounted forward for calls and the
    discounted strike for puts. Under Bachelier the price is unbounded in sigma.
    """
    df = conv.discount
    fwd = conv.forward
    if opt.is_call:
        lo = df * max(fwd - opt.strike, 0.0)
        hi = math.exp(-conv.carry * conv.maturity) * conv.spot
    else:
        lo = df * max(opt.strike - fwd, 0.0)
        hi = df * opt.strike
    if conv.model is Model.BACHELIER:
        hi = math.inf
    return lo, hi


def parity_residual(conv: MarketConvention, strike: float, sigma: float) -> float:
    """Left-hand side of put-call parity, discounted forward - discounted strike + P - C."""
    call = model_price(conv, OptionSpec(strike, OptionKind.CALL), sigma)
    put = model_price(conv, OptionSpec(strike, OptionKind.PUT), sigma)
    df = conv.discount
    if conv.model is Model.BLACK_SCHOLES:
        fwd_pv = math.exp(-conv.carry * conv.maturity) * conv.spot
    else:
        fwd_pv = df * conv.forward
    return fwd_pv - df * strike + put - call
