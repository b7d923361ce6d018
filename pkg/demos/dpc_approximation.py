"""Rank-k approximation: closed-form error, filters, and a Monte Carlo check.

    python3 demos/dpc_approximation.py
"""

import numpy as np

from specreg import align_gauge, build_filter_bank, certificate, classify, decompose, example, monte_carlo_mse
from specreg.lowrank import approx_covariance
from specreg.hermitian import spectral_norm
from specreg.spectral import covariance_from_measure

S = example("regular")
verdict = classify(S).verdict
E = align_gauge(decompose(S))

for k in (1, 2):
    c = certificate(E, k)
    print(f"k={k}: mse {c.mse:.6f}  relative error {c.relative_error:.3f}  "
          f"covariance error bound {c.covariance_error_bound:.6f}")

bank = build_filter_bank(E, 1, verdict=verdict)
print(f"\nfilter bank: {bank.sided}, taps j in [{bank.tap_orders[0]}, {bank.tap_orders[-1]}], "
      f"tail energy {bank.tail_energy:.2e}")
print("w(0) =\n", np.round(bank.w(0).real, 6))

mc = monte_carlo_mse(S, bank, 100_000, reps=8, seed=1)
print(f"\nMonte Carlo mse {mc.estimate:.4f} +- {mc.stderr:.4f}  vs  2 pi = {2 * np.pi:.4f}")

# Covariance error stays under the integral of the next eigenvalue.
T1 = example("type1")
E1 = align_gauge(decompose(T1, rank=2))
C, C1 = covariance_from_measure(T1, 64), approx_covariance(E1, 1, 64)
worst = max(spectral_norm(C(h) - C1(h)) for h in range(65))
print(f"\ntype1, k=1: max_h ||C(h) - C_1(h)|| = {worst:.6f} <= {certificate(E1, 1).covariance_error_bound:.6f}")
