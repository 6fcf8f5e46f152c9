"""Exception hierarchy shared by the pricing, calibration and chain layers."""

from __future__ import annotations


class ConicIVError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ConicIVError, ValueError):
    """An argument lies outside the domain of a pricing or math routine."""


class PriceOutOfBounds(ConicIVError):
    """A target price is not attainable by the model for any volatility."""

    def __init__(self, which: str, price: float, bound: float, leg: str | None = None):
        self.which = which
        self.price = price
        self.bound = bound
        self.leg = leg
        rel = "<=" if which == "lower" else ">="
        prefix = f"{leg} " if leg else ""
        super().__init__(f"{prefix}price {price!r} {rel} {which} bound {bound!r}")


class NoExistence(ConicIVError):
    """The quote violates an existence pre-condition of the two-price system."""

    def __init__(self, which_bound: str, detail: str = ""):
        self.which_bound = which_bound
        super().__init__(f"no solution ({which_bound} bound): {detail}".rstrip(": "))


class SpreadInfeasible(ConicIVError):
    """No distortion level up to gamma_max reproduces the quoted spread."""


class QuadratureError(ConicIVError):
    """Adaptive quadrature did not reach its tolerance within budget."""


class ParseError(ConicIVError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class EmptyChain(ConicIVError):
    """The input chain contains no option rows."""
