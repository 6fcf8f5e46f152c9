"""Bid and ask prices in a two-price economy under the Wang distortion.

The closed forms exploit that the Wang transform maps a normal law to a normal
law with shifted mean: under Black-Scholes this is a shift of the carry by
``gamma * sigma / sqrt(T)``, under Bachelier a shift of the terminal mean by
``gamma * sigmabar``. The quadrature routines evaluate the Choquet integrals
directly from the terminal distribution function and serve as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from scipy import integrate

from conic_iv.dist_math import norm_cdf, wang_transform
from conic_iv.errors import DomainError, QuadratureError
from conic_iv.pricing import (
    MarketConvention,
    Model,
    OptionSpec,
    bachelier_kernel,
    bachelier_moments,
    bs_kernel,
    _check_option,
)

QUAD_TOL = 1e-10
QUAD_LIMIT = 10_000
# Half-width of the truncated domain, in terminal (log-)standard deviations.
TRUNCATION_SD = 12.0


@dataclass(frozen=True, slots=True)
class TwoPrice:
    bid: float
    ask: float
    risk_neutral: float

    @property
    def spread(self) -> float:
        return self.ask - self.bid


class Tail(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


def _check(sigma: float, gamma: float) -> None:
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    if not gamma >= 0.0:
        raise DomainError(f"gamma must be non-negative, got {gamma!r}")


def conic_bs(conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float) -> TwoPrice:
    if conv.model is not Model.BLACK_SCHOLES:
        raise DomainError("conic_bs requires a Black-Scholes convention")
    _check_option(conv, opt)
    _check(sigma, gamma)
    s, k, r, a, t = conv.spot, opt.strike, conv.rate, conv.carry, conv.maturity
    shift = gamma * sigma / math.sqrt(t)
    # bid of a call raises the carry; bid of a put lowers it
    sgn = 1.0 if opt.is_call else -1.0
    rn = bs_kernel(s, k, r, a, t, sigma, opt.is_call)
    if gamma == 0.0:
        return TwoPrice(rn, rn, rn)
    bid = bs_kernel(s, k, r, a + sgn * shift, t, sigma, opt.is_call)
    ask = bs_kernel(s, k, r, a - sgn * shift, t, sigma, opt.is_call)
    return TwoPrice(bid, ask, rn)


def conic_bachelier(
    conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float
) -> TwoPrice:
    if conv.model is not Model.BACHELIER:
        raise DomainError("conic_bachelier requires a Bachelier convention")
    _check(sigma, gamma)
    m = bachelier_moments(conv, sigma)
    k, r, t = opt.strike, conv.rate, conv.maturity
    rn = bachelier_kernel(m.mubar, m.sigmabar, k, r, t, opt.is_call)
    if gamma == 0.0:
        return TwoPrice(rn, rn, rn)
    lo = m.mubar - gamma * m.sigmabar
    hi = m.mubar + gamma * m.sigmabar
    if opt.is_call:
        bid_mean, ask_mean = lo, hi
    else:
        bid_mean, ask_mean = hi, lo
    bid = bachelier_kernel(bid_mean, m.sigmabar, k, r, t, opt.is_call)
    ask = bachelier_kernel(ask_mean, m.sigmabar, k, r, t, opt.is_call)
    return TwoPrice(bid, ask, rn)


def conic_price(conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float) -> TwoPrice:
    if conv.model is Model.BLACK_SCHOLES:
        return conic_bs(conv, opt, sigma, gamma)
    return conic_bachelier(conv, opt, sigma, gamma)


# -- terminal law -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class _TerminalLaw:
    """Normal law of X_T (Bachelier) or of log X_T (Black-Scholes)."""

    loc: float
    scale: float
    lognormal: bool

    def z(self, x: float) -> float:
        if self.lognormal:
            return (math.log(x) - self.loc) / self.scale
        return (x - self.loc) / self.scale

    def cdf(self, x: float) -> float:
        if self.lognormal and x <= 0.0:
            return 0.0
        return norm_cdf(self.z(x))

    def sf(self, x: float) -> float:
        if self.lognormal and x <= 0.0:
            return 1.0
        return norm_cdf(-self.z(x))


def _terminal_law(conv: MarketConvention, sigma: float) -> _TerminalLaw:
    if conv.model is Model.BLACK_SCHOLES:
        t = conv.maturity
        loc = math.log(conv.spot) + (conv.rate - conv.carry - 0.5 * sigma * sigma) * t
        return _TerminalLaw(loc, sigma * math.sqrt(t), True)
    m = bachelier_moments(conv, sigma)
    return _TerminalLaw(m.mubar, m.sigmabar, False)


def distorted_cdf(
    conv: MarketConvention, sigma: float, gamma: float, x: float, tail: Tail = Tail.LOWER
) -> float:
    """psi_gamma(F(x)) for the lower tail, psi_gamma(1 - F(x)) for the upper tail."""
    law = _terminal_law(conv, sigma)
    if Tail(tail) is Tail.LOWER:
        return wang_transform(law.cdf(x), gamma)
    return wang_transform(law.sf(x), gamma)


# -- Choquet quadrature -----------------------------------------------------


def _quad(f: Callable[[float], float], lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    out = integrate.quad(f, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=QUAD_LIMIT, full_output=1)
    if len(out) > 3:
        raise QuadratureError(out[3].splitlines()[0] if out[3] else "quadrature failed")
    return out[0]


def _choquet_leg(
    conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float, side: str
) -> float:
    _check_option(conv, opt)
    _check(sigma, gamma)
    law = _terminal_law(conv, sigma)
    k = opt.strike
    psi = wang_transform

    # Each Stieltjes integral, integrated by parts, becomes the integral of a
    # distorted (survival) distribution function over one side of the strike.
    if opt.is_call:
        if side == "bid":
            def h(x):
                return 1.0 - psi(law.cdf(x), gamma)
        else:
            def h(x):
                return psi(law.sf(x), gamma)
    else:
        if side == "bid":
            def h(x):
                return 1.0 - psi(law.sf(x), gamma)
        else:
            def h(x):
                return psi(law.cdf(x), gamma)

    width = TRUNCATION_SD + gamma
    if law.lognormal:
        # integrate in u = log x; the extra scale covers the e^u Jacobian tilt
        width += law.scale
        u_lo = law.loc - width * law.scale
        u_hi = law.loc + width * law.scale
        uk = math.log(k)

        def g(u):
            x = math.exp(u)
            return h(x) * x

        val = _quad(g, uk, u_hi) if opt.is_call else _quad(g, u_lo, uk)
    else:
        x_lo = law.loc - width * law.scale
        x_hi = law.loc + width * law.scale
        if opt.is_call:
            val = _quad(h, max(k, x_lo), x_hi) + max(x_lo - k, 0.0)
        else:
            val = _quad(h, x_lo, min(k, x_hi)) + max(k - x_hi, 0.0)
    return conv.discount * val


def choquet_bid(conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float) -> float:
    return _choquet_leg(conv, opt, sigma, gamma, "bid")


def choquet_ask(conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float) -> float:
    return _choquet_leg(conv, opt, sigma, gamma, "ask")


def choquet_two_price(conv: MarketConvention, opt: OptionSpec, sigma: float, gamma: float) -> TwoPrice:
    rn = _choquet_leg(conv, opt, sigma, 0.0, "ask")
    return TwoPrice(choquet_bid(conv, opt, sigma, gamma), choquet_ask(conv, opt, sigma, gamma), rn)


# -- discrete Choquet integral ----------------------------------------------


def choquet_integral(values: Sequence[float], probs: Sequence[float], gamma: float) -> float:
    """Choquet integral of a discrete random variable w.r.t. the distorted measure psi_gamma(Q).

    Layer-cake form started at the smallest outcome:
    ``C(X) = v_1 + sum_i (v_i - v_{i-1}) * psi(Q(X >= v_i))`` over sorted distinct outcomes.
    """
    if len(values) != len(probs) or not values:
        raise ValueError("values and probs must be non-empty and of equal length")
    total = math.fsum(probs)
    if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    pairs = sorted(zip(values, probs))
    # upper[i] = Q(X >= v_i) accumulated from the top to avoid drift
    upper = [0.0] * len(pairs)
    acc = 0.0
    for i in range(len(pairs) - 1, -1, -1):
        acc += pairs[i][1]
        upper[i] = min(acc / total, 1.0)
    result = prev = pairs[0][0]
    for (v, _), q in zip(pairs, upper):
        if v > prev:
            result += (v - prev) * wang_transform(q, gamma)
            prev = v
    return result


def discrete_two_price(
    payoff: Sequence[float], probs: Sequence[float], gamma: float, discount: float = 1.0
) -> TwoPrice:
    """bid = -disc * C(-X), ask = disc * C(X) for a discrete payoff distribution."""
    ask = discount * choquet_integral(payoff, probs, gamma)
    bid = -discount * choquet_integral([-v for v in payoff], probs, gamma)
    rn = discount * math.fsum(v * p for v, p in zip(payoff, probs))
    return TwoPrice(bid, ask, rn)
