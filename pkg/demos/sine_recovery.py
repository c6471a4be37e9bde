"""Recover q(x) = sin x from Dirichlet spectra on [0, a] as the endpoint a slides."""
import math

import numpy as np

from sliding_spectral import from_tag
from sliding_spectral.inverse import sliding_pipeline_schrodinger

a = np.arange(1.0, math.pi + 1e-9, 0.1)
res = sliding_pipeline_schrodinger(from_tag("sin"), 0, a, n_max=60)

print(f"{'a':>6} {'defect':>12} {'q_hat':>10} {'sin a':>10}")
for x, d, q in zip(a, res.curve.values, res.q_hat):
    print(f"{x:6.2f} {d:12.8f} {q:10.6f} {math.sin(x):10.6f}")
print(f"relative L2 error {res.l2_relative_error:.3e}")
