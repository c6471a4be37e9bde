"""Direct statistical sums against their high-temperature expansions."""
import math

from sliding_spectral.statsum import LevelLaw, asympt_1d, level_law, report, theta_identity_check

for z in (0.01, 1.0, 100.0):
    lhs, rhs = theta_identity_check(z)
    print(f"theta identity z={z:g}: {lhs:.15g} vs {rhs:.15g}")

# levels (pi n / a)^2 + c on [0, a]; the defect is c a
a = 2.0
for c in (0.5, 0.0):
    law = LevelLaw(lambda n: (math.pi * n / a) ** 2 + c) if c else level_law(f"box:{a}")
    print(f"q = {c:g}")
    for row in report(law, [1e2, 1e3, 1e4], lambda T: asympt_1d(T, a, c * a)):
        print(f"  T={row.T:8g}  Z={row.z_direct:.10g}  expansion={row.z_asymptotic:.10g}  residual={row.residual:.2e}")
