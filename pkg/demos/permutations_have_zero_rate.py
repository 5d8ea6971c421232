"""Finite permutations generate no information; genuine shifts do.

For a measure-preserving permutation the iterated join of any partition
stabilizes after at most |X| steps, so the block entropy sequence
plateaus and the asymptotic rate is exactly zero. A Bernoulli shift
keeps producing fresh information forever. Both facts are checked here
through the same plateau-vs-rate consistency test.
"""

import numpy as np

from entroflow import (
    Partition,
    PermutationSystem,
    SymbolicSystem,
    cyclic_system,
    make_space,
    theorem_limit_point_check,
)


def describe(label: str, result) -> None:
    print(f"  {label:28s} verdict={result.verdict.status:12s}"
          f" h={result.h_estimate:.6f} consistent={result.consistent}")


def main() -> None:
    print("permutation systems (rate must vanish):")
    for n in (3, 5, 8, 12):
        system = cyclic_system(n)
        half = Partition(system.space, [range(n // 2), range(n // 2, n)])
        describe(f"cycle on {n} points", theorem_limit_point_check(system, half))

    rng = np.random.default_rng(2024)
    for trial in range(3):
        n = int(rng.integers(5, 11))
        space = make_space(tuple(range(n)), (1.0 / n,) * n)
        system = PermutationSystem(space, tuple(int(i) for i in rng.permutation(n)))
        thirds = Partition(space, [range(n // 3 + 1), range(n // 3 + 1, n)])
        describe(f"random permutation #{trial} ({n} pts)",
                 theorem_limit_point_check(system, thirds))

    print()
    print("symbol shifts (rate must not vanish):")
    for probs in ((0.5, 0.5), (0.1, 0.9), (0.2, 0.3, 0.5)):
        system = SymbolicSystem.bernoulli(probs)
        n_max = 14 if len(probs) == 2 else 12  # keep 3^n under the word cap
        describe(f"bernoulli {probs}",
                 theorem_limit_point_check(system, None, n_max=n_max))


if __name__ == "__main__":
    main()
