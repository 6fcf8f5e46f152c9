"""Closed-form conic prices against the Choquet quadrature over a (moneyness, gamma) grid.

Prints the worst absolute bid/ask discrepancy per model and maturity.
"""

import argparse

import numpy as np

from conic_iv.conic import choquet_two_price, conic_price
from conic_iv.pricing import MarketConvention, Model, OptionKind, OptionSpec


def sweep(model, t, sigma, moneyness, gammas):
    conv = MarketConvention(100.0, 0.03, 0.01, t, model)
    worst = 0.0
    for m in moneyness:
        for kind in OptionKind:
            opt = OptionSpec(100.0 * m, kind)
            for g in gammas:
                a = conic_price(conv, opt, sigma, g)
                b = choquet_two_price(conv, opt, sigma, g)
                worst = max(worst, abs(a.bid - b.bid), abs(a.ask - b.ask))
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-moneyness", type=int, default=9)
    ap.add_argument("--n-gamma", type=int, default=9)
    args = ap.parse_args()
    moneyness = np.linspace(0.5, 1.5, args.n_moneyness)
    gammas = np.linspace(0.0, 2.0, args.n_gamma)
    for model, sigma in ((Model.BLACK_SCHOLES, 0.25), (Model.BACHELIER, 25.0)):
        for t in (0.1, 1.0, 5.0):
            print(f"{model.value:10s} T={t:<4} max |closed - quad| = {sweep(model, t, sigma, moneyness, gammas):.2e}")


if __name__ == "__main__":
    main()
