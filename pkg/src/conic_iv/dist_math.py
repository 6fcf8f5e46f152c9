"""Standard normal primitives and the Wang distortion."""

from __future__ import annotations

import math
from statistics import NormalDist

from conic_iv.errors import DomainError

_STD = NormalDist()
_INV_SQRT_2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Clamp used before the quantile so that interior evaluations never see 0 or 1.
WANG_EPS = 1e-300


def norm_cdf(x: float) -> float:
    """Standard normal distribution function via erfc (no cancellation in either tail)."""
    return 0.5 * math.erfc(-x * _INV_SQRT_2)


def norm_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_quantile(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open unit interval."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"quantile needs 0 < p < 1, got {p!r}")
    # Wichura AS241 is already accurate to a few ulp, a Newton polish gains nothing
    return _STD.inv_cdf(p)


def wang_transform(p: float, gamma: float) -> float:
    """psi_gamma(p) = Phi(Phi^{-1}(p) + gamma); exact at the endpoints 0 and 1."""
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    if gamma == 0.0:
        return p
    p = max(p, WANG_EPS)
    return norm_cdf(norm_quantile(p) + gamma)
