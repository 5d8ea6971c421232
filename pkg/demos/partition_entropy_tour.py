"""Tour of the partition calculus: entropy, coarsening, join, pseudo-distance.

Builds a handful of partitions of one weighted space and prints the
quantities the rest of the package is assembled from. Ends with the
standard witness that the entropy distance is only a pseudo-metric:
two different partitions at distance zero.
"""

from entroflow import (
    Partition,
    entropy,
    is_coarsening,
    join,
    make_space,
    pseudo_distance,
)


def main() -> None:
    space = make_space("abcdefgh", (0.25, 0.25, 0.125, 0.125, 0.0625, 0.0625, 0.0625, 0.0625))

    halves = Partition.from_point_ids(space, [list("abcd"), list("efgh")])
    quarters = Partition.from_point_ids(space, [list("ab"), list("cd"), list("ef"), list("gh")])
    crossing = Partition.from_point_ids(space, [list("aceg"), list("bdfh")])

    print("H(halves)   =", entropy(halves), "bits")
    print("H(quarters) =", entropy(quarters), "bits")
    print("H(crossing) =", entropy(crossing), "bits")
    print()

    print("halves coarsens quarters:", is_coarsening(halves, quarters))
    print("halves coarsens crossing:", is_coarsening(halves, crossing))

    j = join(quarters, crossing)
    print("join(quarters, crossing) has", j.n_atoms, "atoms, H =", entropy(j))
    print("the join refines both:",
          is_coarsening(quarters, j) and is_coarsening(crossing, j))
    print()

    # Distinct partitions can carry the same information content, so the
    # entropy distance cannot separate them.
    left = Partition.from_point_ids(space, [list("ab"), list("cdefgh")])
    right = Partition.from_point_ids(space, [list("ba"), list("cdefgh")])
    swapped = Partition.from_point_ids(space, [list("ac"), list("bdefgh")])
    print("d(left, right)  =", pseudo_distance(left, right), "(same partition)")
    print("d(left, swapped) =", pseudo_distance(left, swapped),
          "with left != swapped:", left != swapped)


if __name__ == "__main__":
    main()
