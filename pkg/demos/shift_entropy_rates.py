"""Entropy rates of symbol shifts, estimated and closed form side by side.

Prints the block entropy table H_n and the running rate H_n/n for a
biased coin and for a two-state Markov chain, then compares the final
increment-based estimate against the closed forms.
"""

import math

from entroflow import SymbolicSystem, info_rate_report, markov_entropy_rate


def show(title: str, report, closed: float) -> None:
    print(title)
    print("  n   H_n        H_n/n      increment")
    previous = 0.0
    for n, (h, rate) in enumerate(zip(report.block_entropies, report.rates), start=1):
        print(f"  {n:2d}  {h:9.6f}  {rate:9.6f}  {h - previous:9.6f}")
        previous = h
    print(f"  estimate {report.h_estimate:.12f}  closed form {closed:.12f}",
          f" converged={report.converged}")
    print()


def main() -> None:
    p = 0.25
    coin = SymbolicSystem.bernoulli((p, 1.0 - p))
    closed = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
    show("Bernoulli(0.25) shift", info_rate_report(coin, None, 12), closed)

    q = [[0.9, 0.1], [0.5, 0.5]]
    chain = SymbolicSystem.markov(q)
    show(
        "Markov shift, Q = [[0.9, 0.1], [0.5, 0.5]]",
        info_rate_report(chain, None, 14),
        markov_entropy_rate(chain.marginal, q),
    )


if __name__ == "__main__":
    main()
