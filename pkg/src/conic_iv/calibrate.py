"""Implied volatilities in a two-price market.

Four notions are provided: the usual implied vol of a single price, the bid and
ask implied vols (each leg at zero distortion), conic implied vols (each leg at a
fixed distortion) and the liquidity-free pair (sigma, gamma) that reprices bid and
ask simultaneously.

The joint solve is a nested pair of bracketed 1-D root searches. For a trial
volatility the inner search finds the unique distortion that reproduces the
quoted spread; the outer search moves the volatility inside
``[sigma_bid, sigma_ask]`` until the bid leg matches. The outer function changes
sign on that interval, so a bracketing method always converges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

from scipy.optimize import brentq

from conic_iv.errors import DomainError, NoExistence, PriceOutOfBounds, SpreadInfeasible
from conic_iv.pricing import (
    MarketConvention,
    Model,
    OptionSpec,
    _check_option,
    bachelier_kernel,
    bachelier_scale,
    bs_kernel,
    price_bounds,
)

_RTOL = 4.0 * 2.220446049250313e-16


@dataclass(frozen=True, slots=True)
class Quote:
    bid: float
    ask: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.bid + self.ask)

    @property
    def spread(self) -> float:
        return self.ask - self.bid


@dataclass(frozen=True, slots=True)
class SolverConfig:
    gamma_max: float = 10.0
    # outer stop: |g| <= outer_tol * max(1, a - b) or bracket width <= sigma_xtol
    outer_tol: float = 1e-10
    sigma_xtol: float = 1e-12
    inner_tol: float = 1e-12
    max_iter: int = 200


@dataclass(frozen=True, slots=True)
class CalibrationResult:
    sigma: float
    gamma: float
    risk_neutral_price: float
    inner_iterations: int
    outer_iterations: int
    residual_bid: float
    residual_ask: float
    bracket: tuple[float, float]
    degenerate: bool = False


class TwoPricePricer(Protocol):
    """A claim whose risk-neutral price is strictly increasing in one parameter."""

    def price(self, lam: float) -> float: ...
    def bid(self, lam: float, gamma: float) -> float: ...
    def ask(self, lam: float, gamma: float) -> float: ...
    def bounds(self) -> tuple[float, float]: ...
    def initial_guess(self) -> float: ...


class BSPricer:
    """Wang-distorted Black-Scholes prices as functions of (sigma, gamma)."""

    def __init__(self, conv: MarketConvention, opt: OptionSpec):
        if conv.model is not Model.BLACK_SCHOLES:
            raise DomainError("BSPricer requires a Black-Scholes convention")
        _check_option(conv, opt)
        self.conv, self.opt = conv, opt
        self._args = (conv.spot, opt.strike, conv.rate)
        self._carry = conv.carry
        self._t = conv.maturity
        self._inv_sqrt_t = 1.0 / math.sqrt(conv.maturity)
        self._call = opt.is_call
        # bid raises the carry for calls, lowers it for puts
        self._sgn = 1.0 if opt.is_call else -1.0

    def price(self, sigma: float) -> float:
        s, k, r = self._args
        return bs_kernel(s, k, r, self._carry, self._t, sigma, self._call)

    def bid(self, sigma: float, gamma: float) -> float:
        s, k, r = self._args
        a = self._carry + self._sgn * gamma * sigma * self._inv_sqrt_t
        return bs_kernel(s, k, r, a, self._t, sigma, self._call)

    def ask(self, sigma: float, gamma: float) -> float:
        s, k, r = self._args
        a = self._carry - self._sgn * gamma * sigma * self._inv_sqrt_t
        return bs_kernel(s, k, r, a, self._t, sigma, self._call)

    def bounds(self) -> tuple[float, float]:
        return price_bounds(self.conv, self.opt)

    def initial_guess(self) -> float:
        return 0.2


class BachelierPricer:
    """Wang-distorted Bachelier prices: the distortion shifts the terminal mean by gamma * sigmabar."""

    def __init__(self, conv: MarketConvention, opt: OptionSpec):
        if conv.model is not Model.BACHELIER:
            raise DomainError("BachelierPricer requires a Bachelier convention")
        self.conv, self.opt = conv, opt
        self._mu = conv.forward
        self._scale = bachelier_scale(conv.rate, conv.carry, conv.maturity)
        self._k = opt.strike
        self._r = conv.rate
        self._t = conv.maturity
        self._call = opt.is_call
        self._sgn = -1.0 if opt.is_call else 1.0

    def price(self, sigma: float) -> float:
        return bachelier_kernel(self._mu, sigma * self._scale, self._k, self._r, self._t, self._call)

    def bid(self, sigma: float, gamma: float) -> float:
        sb = sigma * self._scale
        mu = self._mu + self._sgn * gamma * sb
        return bachelier_kernel(mu, sb, self._k, self._r, self._t, self._call)

    def ask(self, sigma: float, gamma: float) -> float:
        sb = sigma * self._scale
        mu = self._mu - self._sgn * gamma * sb
        return bachelier_kernel(mu, sb, self._k, self._r, self._t, self._call)

    def bounds(self) -> tuple[float, float]:
        return price_bounds(self.conv, self.opt)

    def initial_guess(self) -> float:
        # terminal standard deviation of ~20% of the underlying level
        return 0.2 * max(abs(self._mu), abs(self._k), 1.0) / self._scale


def make_pricer(conv: MarketConvention, opt: OptionSpec) -> TwoPricePricer:
    if conv.model is Model.BLACK_SCHOLES:
        return BSPricer(conv, opt)
    return BachelierPricer(conv, opt)


# -- one-leg inversions -----------------------------------------------------

_LAM_MIN = 1e-14
_LAM_MAX_FACTOR = 1e8


def _invert_increasing(
    f: Callable[[float], float], target: float, guess: float, leg: str | None = None
) -> float:
    """Solve f(lam) = target for strictly increasing f on (0, inf) by bracketing then Brent."""
    lo = hi = guess
    f_lo = f_hi = f(guess)
    if f_lo == target:
        return guess
    if f_lo > target:
        while f_lo >= target:
            hi, f_hi = lo, f_lo
            lo *= 0.25
            if lo < _LAM_MIN * guess:
                raise PriceOutOfBounds("lower", target, f_lo, leg)
            f_lo = f(lo)
    else:
        while f_hi <= target:
            lo, f_lo = hi, f_hi
            hi *= 4.0
            if hi > _LAM_MAX_FACTOR * guess:
                raise PriceOutOfBounds("upper", target, f_hi, leg)
            f_hi = f(hi)
    return brentq(lambda x: f(x) - target, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=500)


def _check_bounds(pricer: TwoPricePricer, price: float, leg: str | None = None) -> None:
    lo, hi = pricer.bounds()
    if not price > lo:
        raise PriceOutOfBounds("lower", price, lo, leg)
    if not price < hi:
        raise PriceOutOfBounds("upper", price, hi, leg)


def implied_vol(conv: MarketConvention, opt: OptionSpec, price: float) -> float:
    """Volatility at which the risk-neutral model price equals ``price``."""
    pricer = make_pricer(conv, opt)
    _check_bounds(pricer, price)
    return _invert_increasing(pricer.price, price, pricer.initial_guess())


def bid_ask_implied_vols(conv: MarketConvention, opt: OptionSpec, q: Quote) -> tuple[float, float]:
    pricer = make_pricer(conv, opt)
    return _bid_ask_vols(pricer, q)


def _bid_ask_vols(pricer: TwoPricePricer, q: Quote) -> tuple[float, float]:
    _check_bounds(pricer, q.bid, "bid")
    _check_bounds(pricer, q.ask, "ask")
    guess = pricer.initial_guess()
    s_bid = _invert_increasing(pricer.price, q.bid, guess, "bid")
    s_ask = _invert_increasing(pricer.price, q.ask, max(s_bid, 1e-300), "ask")
    return s_bid, s_ask


def conic_implied_vols(
    conv: MarketConvention, opt: OptionSpec, q: Quote, gamma_fixed: float
) -> tuple[float, float]:
    """Per-leg vols at a known distortion. The two outputs need not be ordered."""
    if not gamma_fixed >= 0.0:
        raise DomainError(f"gamma_fixed must be non-negative, got {gamma_fixed!r}")
    pricer = make_pricer(conv, opt)
    guess = pricer.initial_guess()
    s_bid = _invert_increasing(lambda s: pricer.bid(s, gamma_fixed), q.bid, guess, "bid")
    s_ask = _invert_increasing(lambda s: pricer.ask(s, gamma_fixed), q.ask, guess, "ask")
    return s_bid, s_ask


# -- liquidity-free joint solve ---------------------------------------------


@dataclass
class _Counters:
    inner: int = 0
    outer: int = 0


@dataclass
class _InnerSolver:
    pricer: TwoPricePricer
    spread: float
    cfg: SolverConfig
    counters: _Counters = field(default_factory=_Counters)

    def spread_at(self, sigma: float, gamma: float) -> float:
        return self.pricer.ask(sigma, gamma) - self.pricer.bid(sigma, gamma)

    def gamma_for(self, sigma: float) -> float:
        """Unique gamma with ask - bid equal to the quoted spread at this sigma."""
        target = self.spread
        hi = min(1.0, self.cfg.gamma_max)
        while self.spread_at(sigma, hi) < target:
            if hi >= self.cfg.gamma_max:
                raise SpreadInfeasible(
                    f"spread {target!r} not reached by gamma <= {self.cfg.gamma_max} at sigma={sigma!r}"
                )
            hi = min(2.0 * hi, self.cfg.gamma_max)
        gamma, res = brentq(
            lambda g: self.spread_at(sigma, g) - target,
            0.0,
            hi,
            xtol=1e-300,
            rtol=_RTOL,
            maxiter=self.cfg.max_iter,
            full_output=True,
            disp=False,
        )
        self.counters.inner += res.iterations
        return gamma


def solve_two_price_system(
    pricer: TwoPricePricer,
    q: Quote,
    config: SolverConfig | None = None,
    start: float | None = None,
) -> CalibrationResult:
    """Find the unique (lam, gamma) with bid(lam, gamma) = b and ask(lam, gamma) = a.

    ``start`` optionally restarts the outer search from an interior point of the
    bid/ask implied-vol bracket; used to probe uniqueness.
    """
    cfg = config or SolverConfig()
    b, a = q.bid, q.ask
    if not (math.isfinite(b) and math.isfinite(a)):
        raise DomainError("quote must be finite")
    if b > a:
        raise DomainError(f"bid {b!r} exceeds ask {a!r}")
    lo_price, hi_price = pricer.bounds()
    if not lo_price < b:
        raise NoExistence("lower", f"bid {b!r} <= infimum price {lo_price!r}")
    if not hi_price > a:
        raise NoExistence("upper", f"ask {a!r} >= supremum price {hi_price!r}")

    if b == a:
        try:
            sigma = _invert_increasing(pricer.price, b, pricer.initial_guess())
        except PriceOutOfBounds as exc:
            raise NoExistence(exc.which, str(exc)) from exc
        return CalibrationResult(sigma, 0.0, pricer.price(sigma), 0, 0, 0.0, 0.0, (sigma, sigma), True)

    try:
        s_b, s_a = _bid_ask_vols(pricer, q)
    except PriceOutOfBounds as exc:
        raise NoExistence(exc.which, str(exc)) from exc

    inner = _InnerSolver(pricer, a - b, cfg)
    for s in (s_b, s_a):
        if inner.spread_at(s, cfg.gamma_max) < a - b:
            raise SpreadInfeasible(f"spread {a - b!r} exceeds the gamma_max={cfg.gamma_max} spread at sigma={s!r}")

    def g(sigma: float) -> float:
        inner.counters.outer += 1
        return pricer.bid(sigma, inner.gamma_for(sigma)) - b

    tol = cfg.outer_tol * max(1.0, a - b)
    g_lo, g_hi = g(s_b), g(s_a)
    degenerate = False
    lo, hi = s_b, s_a
    if abs(g_lo) <= tol and abs(g_hi) <= tol:
        # pathologically tight quote: the whole bracket reprices within tolerance
        sigma, degenerate = 0.5 * (s_b + s_a), True
    elif g_lo == 0.0:
        sigma = s_b
    elif g_hi == 0.0:
        sigma = s_a
    else:
        if g_lo > 0.0 or g_hi < 0.0:
            # cannot happen for a monotone pricer with an attainable spread
            raise NoExistence("bracket", f"outer function does not change sign: g={g_lo!r}, {g_hi!r}")
        if start is not None and lo < start < hi:
            g_mid = g(start)
            if g_mid < 0.0:
                lo = start
            else:
                hi = start
        if hi - lo <= cfg.sigma_xtol:
            sigma = 0.5 * (lo + hi)
        else:
            sigma = brentq(g, lo, hi, xtol=cfg.sigma_xtol * 1e-3, rtol=_RTOL, maxiter=cfg.max_iter)

    gamma = inner.gamma_for(sigma)
    return CalibrationResult(
        sigma=sigma,
        gamma=gamma,
        risk_neutral_price=pricer.price(sigma),
        inner_iterations=inner.counters.inner,
        outer_iterations=inner.counters.outer,
        residual_bid=pricer.bid(sigma, gamma) - b,
        residual_ask=pricer.ask(sigma, gamma) - a,
        bracket=(s_b, s_a),
        degenerate=degenerate,
    )


def calibrate_liquidity_free(
    conv: MarketConvention,
    opt: OptionSpec,
    q: Quote,
    config: SolverConfig | None = None,
    start: float | None = None,
) -> CalibrationResult:
    """Liquidity-free implied volatility and implied distortion of a bid/ask quote."""
    return solve_two_price_system(make_pricer(conv, opt), q, config, start)
