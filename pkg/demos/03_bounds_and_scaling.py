"""Closed-form quantities and how the local dimension scales with epsilon.

The distance of the family from separable states is bounded below by
1 - 1/d_A^n - q*. Choosing d_A and d_B as functions of epsilon pushes this
bound above 1 - epsilon with total dimension growing like eps^-(2+1/n).
"""

import itertools

from pptfarm import bound_report, dims_for_epsilon, sep_distance_lower_bound
from pptfarm.analysis import C_n

print("n d_A d_B   q*         bound")
for n, d_A, d_B in itertools.product([2, 3, 4], repeat=3):
    r = bound_report(n, d_A, d_B)
    print(f"{n} {d_A:>3} {d_B:>3}   {r.q_star:.6f}   {r.sep_distance_lower_bound:.6f}")

grid = list(itertools.product([2, 3, 4], repeat=3))
worst = min(grid, key=lambda c: sep_distance_lower_bound(*c))
print(f"\nsmallest bound on the grid: {sep_distance_lower_bound(*worst):.6f} at {worst}")

print("\nn  eps      d_ideal        d * eps^(2+1/n)  C(n)/2   integer dims -> bound")
for n in (2, 3, 4):
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        r = dims_for_epsilon(n, eps)
        scaled = r.d_ideal * eps ** (2 + 1 / n)
        print(f"{n}  {eps:<7g}  {r.d_ideal:13.6g}  {scaled:15.6f}  {C_n(n) / 2:7.4f}"
              f"  ({r.d_A}, {r.d_B}) -> {r.sep_distance_lower_bound:.6f}")
