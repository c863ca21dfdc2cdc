"""Measure positivity of every partial transpose along the mixing segment.

For each cut (subset of parties whose A and B factors are transposed) the
minimum eigenvalue is tracked as q runs from 0 to 1, and set beside the
closed-form margin predicted by the two-by-two and d_A-by-d_A block
reduction. With the canonical payloads the measured minimum stays
negative everywhere, so the audit reports an empty feasible interval.
"""

import numpy as np

from pptfarm import FamilyParams, ppt_audit, q_star

n, d_A, d_B = 3, 3, 2
qs = sorted({0.0, 0.1, 0.25, q_star(n, d_A, d_B), 0.6, 0.8, 1.0})
rep = ppt_audit(FamilyParams(n, d_A, d_B), qs)

print(f"q* = {rep.q_star:.6f}, separable-distance bound = {rep.lemma3_bound:.6f}\n")
header = "q        rho_min     " + "  ".join(f"PT{c['parties']!s:<9}" for c in rep.cuts) + "  analytic"
print(header)
for k, q in enumerate(qs):
    row = "  ".join(f"{c['min_eig'][k]:+.5f}    " for c in rep.cuts)
    print(f"{q:.4f}  {rep.rho_min_eig[k]:+.3e}  {row}  {rep.analytic_min_margin[k]:+.5f}")

print(f"\nbest q = {rep.best_q:.6f} with worst PT eigenvalue {rep.best_min_eig:+.6f}")
print(f"feasible q-interval: {rep.feasible_q}")

# a payload choice with a genuine PPT point: b proportional to the identity
from pptfarm import BlockPair, SymMatrix  # noqa: E402

P = FamilyParams(2, 3, 2)
m = P.block_order
blocks = BlockPair(SymMatrix(np.eye(m) / (3 * m), P.space.b_space),
                   SymMatrix(np.eye(m) / (2 * m), P.space.b_space))
alt = ppt_audit(P, [0.0, 0.5, 1.0], blocks=blocks)
print(f"\nidentity payload b, (n, d_A, d_B) = (2, 3, 2): feasible q = {alt.feasible_q}")
print(f"bracket = {alt.feasible_bracket}")
