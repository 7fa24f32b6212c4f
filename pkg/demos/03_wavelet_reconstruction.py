"""
Compressing a distribution with Coiflet wavelets
================================================

Histogram lognormal samples, keep only the k largest wavelet coefficients,
and measure how much information the reconstruction loses.
"""

import numpy as np

from gfet_prva import mcint, stats, wavelet

x = mcint.SoftwareLognormal(0.0, 0.25, seed=7).draw(200_000)
hist = stats.build_histogram(x, 128, x.min(), x.max())

coeffs = wavelet.dwt(stats.normalize(hist).probabilities)
print("levels:", coeffs.levels, " approximation band:", len(coeffs.approx))

# energy is preserved by the orthonormal transform
p = stats.normalize(hist).probabilities
print("energy in / out:", p @ p, coeffs.energy())

for k in (4, 8, 16, 32, 64, 128):
    q, kl = wavelet.reconstruct_distribution(hist, k)
    print(f"k={k:4d}  KL={kl:.3e}  max bin error={np.max(np.abs(q.probabilities - p)):.2e}")
