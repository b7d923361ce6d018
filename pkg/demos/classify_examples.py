"""Classify every built-in model and show the diagnostics behind each verdict.

    python3 demos/classify_examples.py
"""

import numpy as np

from specreg import EXAMPLES, classify, example


def fmt(x):
    if x is None:
        return "-"
    return f"{x:.4g}" if np.isfinite(x) else str(x)


print(f"{'model':<20}{'verdict':<26}{'rank':>5}{'log-integral':>14}{'ks_lambda':>12}{'ks_sub':>12}  channels")
for name in EXAMPLES:
    rep = classify(example(name))
    chans = "-" if rep.subprocess_indices is None else "{" + ",".join(str(i + 1) for i in rep.subprocess_indices) + "}"
    print(f"{name:<20}{rep.verdict:<26}{rep.rank:>5}{fmt(rep.log_integral):>14}"
          f"{fmt(rep.ks_lambda):>12}{fmt(rep.ks_subprocess):>12}  {chans}")

# The rank-switching model: rank 2 inside |w| <= 1, rank 1 outside.
rep = classify(example("type1"))
profile = np.array(rep.rank_profile)
print(f"\ntype1 rank profile: {np.mean(profile == 2):.3f} of nodes at rank 2 (1/pi = {1 / np.pi:.3f})")

# For the white-noise model the two Kolmogorov-Szego values differ by the
# squared modulus of the channel-selection minor of U, here 1/2.
rep = classify(example("regular"))
print(f"regular: ks_lambda / ks_subprocess = {rep.ks_lambda / rep.ks_subprocess:.6f}")
