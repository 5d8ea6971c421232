"""Decimation of the spin chain: one step, a trajectory, and the way back.

Removing every second site maps couplings to couplings. In the
V = exp(-K) frame the map has a whole fixed line (lambda, 1), reached
from generic starts in a handful of steps; the zero-temperature point
(1, 0) is unstable in forward flow and only reachable backwards. Each
closed-form step is cross-checked against the matrix-squaring oracle.
"""

import math

from entroflow import (
    VVector,
    inverse_rg_step_zero_field,
    rg_step_closed,
    rg_step_oracle,
    rg_trajectory,
)


def main() -> None:
    start = VVector(0.7, 0.9)
    v_new, c = rg_step_closed(start)
    oracle_k, oracle_c = rg_step_oracle(start.couplings)
    print("one step from (0.7, 0.9):")
    print("  closed form:", (v_new.v0, v_new.v1), "c =", c)
    print("  oracle:     ", (oracle_k.v.v0, oracle_k.v.v1), "c =", oracle_c)
    print()

    out = rg_trajectory(start, max_steps=60, tol=1e-10)
    print(f"trajectory ({out.steps_used} steps):")
    for step, (v, c) in enumerate(out.steps, start=1):
        print(f"  {step}: V = ({v.v0:.12f}, {v.v1:.12f})  c = {c:.12f}")
    print("converged to:", (out.converged_to.v0, out.converged_to.v1))
    print()

    print("walking backwards toward zero temperature (V1 -> 0):")
    for iterations in (10, 20, 30, 41):
        k1 = 0.1
        for _ in range(iterations):
            k1 = inverse_rg_step_zero_field(k1)
        print(f"  after {iterations:2d} inverse steps: V1 = {math.exp(-k1):.3e}")
    print("each inverse step adds about ln(2)/2 to K1, so V1 shrinks by ~0.707")


if __name__ == "__main__":
    main()
