"""Limit-point detection on partition flows.

A refinement flow whose entropies stall has a limit point in the
entropy pseudo-distance; one whose increments stay bounded away from
zero does not. This script builds one flow of each kind plus an
ambiguous one and prints the three verdicts.
"""

import numpy as np

from entroflow import (
    Partition,
    PartitionFlow,
    detect_entropy_plateau,
    detect_limit_point,
    entropy_sequence,
    make_space,
)


def halving_refinements(depth: int) -> PartitionFlow:
    """Split the first atom in half at every step on a geometric space."""
    n = 2**depth
    weights = np.full(n, 1.0 / n)
    space = make_space(tuple(range(n)), weights)
    steps = []
    for level in range(1, depth + 1):
        size = n // 2**level
        atoms = [range(i * size, (i + 1) * size) for i in range(2**level)]
        steps.append(Partition(space, atoms))
    return PartitionFlow(space, tuple(steps), "refinement")


def main() -> None:
    flow = halving_refinements(6)
    print("entropies:", [round(h, 3) for h in entropy_sequence(flow, len(flow))])
    verdict = detect_limit_point(flow, epsilon=1e-9)
    print("uniform halving:", verdict.status,
          "(every step adds a full bit, nothing stalls)")
    print()

    # Saturating sequence: the flow reaches the discrete partition early
    # and repeats it, which is exactly what a limit point looks like.
    n = 8
    space = make_space(tuple(range(n)), (1.0 / n,) * n)
    discrete = Partition(space, [[i] for i in range(n)])
    pair_atoms = [range(i, i + 2) for i in range(0, n, 2)]
    steps = [Partition(space, pair_atoms)] + [discrete] * 9
    saturating = PartitionFlow(space, tuple(steps), "refinement")
    verdict = detect_limit_point(saturating, epsilon=1e-9)
    print("saturating flow:", verdict.status, "from index", verdict.witness_index)
    print()

    # Raw sequences work too; detection is about numbers, not partitions.
    noisy = [1.0 + 0.25 * (-1) ** k for k in range(24)]
    print("oscillating values:", detect_entropy_plateau(noisy, epsilon=1e-3).status)


if __name__ == "__main__":
    main()
