"""Finite-past prediction errors against Kolmogorov-Szego values.

    python3 demos/innovation_determinants.py
"""

import numpy as np

from specreg import classify, covariance_from_measure, example, levinson_prediction

for name, n_max in (("scalar_ma1", 64), ("regular", 4), ("type3_candidate", 32)):
    S = example(name)
    rep = classify(S)
    C = covariance_from_measure(S, n_max).submatrix(rep.subprocess_indices)
    res = levinson_prediction(C, n_max)
    shown = [1, 2, 4, 8, 16, 32, 64]
    dets = ", ".join(f"n={n}: {res.dets[n]:.6f}" for n in shown if n <= res.n)
    print(f"{name} channels {[i + 1 for i in rep.subprocess_indices]}")
    print(f"    det Sigma_n  {dets}")
    print(f"    limit from the spectral density: {rep.ks_subprocess:.6f}"
          f"   (eigenvalue form: {rep.ks_lambda:.6f})")

print(f"\n2 pi^2 = {2 * np.pi ** 2:.6f}")
