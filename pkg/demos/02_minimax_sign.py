"""Best uniform approximation of sign(t) away from the origin.

The fooling argument needs a low-degree polynomial that hugs sign(t) on
[-1,-a] u [a,1] to within eps^2.  The optimal odd approximant comes out of
a weighted Remez exchange; an independent Jackson-style construction
(best ramp interpolant pushed through the amplifying polynomial) certifies
its error from above without touching the exchange.
"""

import numpy as np

from hsprg import (
    amplifier_exact,
    certificate_at_budget,
    certify_error,
    remez_best_sign_approx,
)
from fractions import Fraction

# the degree-1 case can be solved by hand: r0 = 2/(1+a), M = (1-a)/(1+a)
sa = remez_best_sign_approx(a=1 / 3, m=0)
print(f"degree-1 oracle: p(t) = {float(sa.r.coeffs[0]):.6f} t, "
      f"error M = {sa.M:.6f}, alternation at z = {sa.alternation_points}")

# a real instance: 12 equioscillation points, error flat to machine level
sa = remez_best_sign_approx(a=0.1, m=10)
print(f"\na=0.1, m=10: degree {sa.degree}, M = {sa.M:.6e}")
print(f"  alternation abscissae t_i = "
      f"{np.round(np.sqrt(sa.alternation_points), 4).tolist()}")
print(f"  error signs {sa.error_signs}")

# error decays geometrically with the degree
print("\nerror vs degree at a = 0.3:")
for m in range(0, 13, 2):
    print(f"  m={m:2d}  M(2m+1) = {remez_best_sign_approx(0.3, m).M:.3e}")

# the amplifier pushes [3/5, 1] inputs toward 1 exponentially fast
print("\namplifier values A_k(4/5):")
for k in (1, 2, 5, 10, 20):
    val = amplifier_exact(k, Fraction(4, 5))
    print(f"  k={k:2d}  2 A_k(4/5) - 1 = {float(2 * val - 1):.10f}")

# certificate route: ramp interpolant + amplification, measured on a grid
cert = certify_error(a=0.25, eps=0.2)
print(f"\ncertificate at (a=0.25, eps=0.2): J degree {cert.j_degree} "
      f"(error {cert.j_error:.4f} <= Jackson {cert.jackson_bound:.4f}), "
      f"amplified x{cert.k_amp} -> measured {cert.measured_error:.3e} "
      f"<= eps^2 = {cert.target:.3e}")

# optimality: at the same degree budget the exchange always wins
for a, m in [(1 / 3, 38), (0.5, 25)]:
    best = remez_best_sign_approx(a, m)
    budget = certificate_at_budget(a, 2 * m)
    print(f"optimality at a={a:.3f}: M({2 * m + 1}) = {best.M:.3e} "
          f"<= certificate {budget.measured_error:.3e}")
