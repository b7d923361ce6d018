"""Eigenvector phases and one-sidedness.

The same constant density admits a causal eigenvector field and a
non-causal one. The tool can only test the gauges it tries, so a model
with no one-sided field found is reported as inconclusive.

    python3 demos/eigenvector_gauges.py
"""

import numpy as np

from specreg import EigenField, align_gauge, decompose, example, fourier_of_field, one_sidedness
from specreg.corpus import analytic

n = 8192
omega = example("regular", n).grid.nodes

# 1. The closed-form field built from g(w) = (e^{-iw} + e^{2iw}) / (2 sqrt2 |cos(3w/2)|).
g_field = EigenField.from_field(analytic("type3_illustration").field(omega))
F = fourier_of_field(g_field)
print("g field:          ", one_sidedness(F))
for j in (1, -2):
    print(f"    psi_11({j:+d}) = {F.coef(j)[0, 0].real:.6f}   (closed form sqrt(2)/pi = {np.sqrt(2) / np.pi:.6f})")

# 2. The field the eigensolver finds for the very same density is constant.
E = align_gauge(decompose(example("type3_illustration", n)))
print("computed field:   ", one_sidedness(fourier_of_field(E)))

# 3. The closed-form e^{-iw} field of the white-noise model: all energy at j = 1.
F = fourier_of_field(EigenField.from_field(analytic("regular").field(omega)))
print("e^{-iw} field:    ", one_sidedness(F), " energy share at j=1:",
      round(F.energies[F.orders == 1][0] / F.energy, 12))

# 4. The candidate model: no tried gauge is one-sided.
E = decompose(example("type3_candidate"))
for gauge in ("phase-continuity", "anchor-real", "none"):
    print(f"candidate, {gauge:<17}", one_sidedness(fourier_of_field(align_gauge(E, gauge))))
