"""Build an explicit k-wise independent generator and watch it fool majority.

A k-wise space maps short seeds to cube points so that every k-coordinate
projection is exactly uniform.  The whole point: expectations of halfspaces
under the tiny space track their uniform expectations.
"""

from fractions import Fraction

from hsprg import (
    FamilySpec,
    build_space,
    exact_bias,
    family,
    fooling_error,
    sample,
    support_array,
    verify_kwise,
)

# the classic 4-point pairwise space on three coordinates
space = build_space(n=3, k=2)
print(f"n=3, k=2 space: {2**space.s} points from {space.s}-bit seeds")
for seed in range(2**space.s):
    print(f"  seed {seed:02b} -> {tuple(int(v) for v in sample(space, seed))}")

# every pair of coordinates is exactly uniform...
print("2-wise verification:", "PASS" if verify_kwise(space, 2).passed else "FAIL")

# ...but the triple is not: x3 = x1*x2 on the support, so one cell is empty
rep3 = verify_kwise(space, 3)
print(f"3-wise verification: {'PASS' if rep3.passed else 'FAIL'} "
      f"(empty cell: {rep3.first_zero_cell})")

# that deficiency is visible to majority: the space misestimates its bias
maj3 = family(FamilySpec("majority", 3))
print(f"majority-3 fooling error under the 4-point space: "
      f"{fooling_error(maj3, space)} (uniform bias {exact_bias(maj3).bias})")

# more independence drives the error down; k = n nails it exactly
print("\nmajority-9 fooling error by independence level:")
maj9 = family(FamilySpec("majority", 9))
for k in range(1, 10):
    sp = build_space(9, k)
    err = fooling_error(maj9, sp)
    print(f"  k={k}  s={sp.s:2d} bits  error = {str(err):>6s}  ~ {float(err):.4f}")
