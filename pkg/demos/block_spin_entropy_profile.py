"""Entropy profile of block-spin coarse graining on a small spin chain.

Enumerates the Gibbs measure of an 8-site periodic chain, pushes the
majority-rule blocking to the configuration space level by level, and
prints how many bits each level retains. Coupling strength controls the
shape: a free chain loses exactly one site's worth of freedom per
halving, a strongly coupled chain is one collective bit all the way
down.
"""

from entroflow import rg_entropy_flow


def profile(k0: float, k1: float) -> None:
    result = rg_entropy_flow((k0, k1), 8, levels=3)
    print(f"K = ({k0}, {k1})")
    for level in range(result.levels):
        print(f"  level {level}: {result.atom_counts[level]:3d} atoms, "
              f"H = {result.entropies[level]:.6f} bits")
    print("  coarse flow plateau:", result.coarse_verdict.status)
    print()


def main() -> None:
    profile(0.0, 0.0)   # free spins: 4 -> 2 -> 1 bits exactly
    profile(0.0, 0.8)   # intermediate coupling
    profile(0.0, 5.0)   # nearly frozen: every level is one shared bit
    profile(0.5, 0.5)   # a field breaks the up/down symmetry

    print("the refinement reading of the same flow validates too:")
    result = rg_entropy_flow((0.0, 0.8), 8, levels=3)
    print("  reversed direction:", result.refinement_flow.direction,
          "with entropies", [round(h, 4) for h in reversed(result.entropies)])


if __name__ == "__main__":
    main()
