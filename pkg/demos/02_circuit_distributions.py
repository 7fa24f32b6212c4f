"""
Uniform noise through a transistor chain
========================================

Push uniform gate voltages through a two-stage resistor-loaded chain and
watch the output distribution become skewed.  Then reshape it into a
lognormal-like sampler.
"""

import numpy as np
from scipy import stats as sps

from gfet_prva import circuit, device, stats

lib = device.synthetic_library()
chain = circuit.PRESETS["paper-run-1"]
print(chain.describe())

batch = circuit.simulate_chain(chain, lib, 100_000, seed=42)
v = batch.values
print(f"output range [{v.min():.4f}, {v.max():.4f}] V, skewness {sps.skew(v):+.3f}")

# the output is far from uniform
hist = stats.build_histogram(v, 64, v.min(), v.max())
chi2, p = stats.chi_square_uniformity(hist)
print(f"chi-square vs uniform: {chi2:.1f}, p = {p:.3g}")

# a coarse text histogram
peak = hist.counts.max()
for lo, c in zip(hist.bin_edges[:-1:4], hist.counts.reshape(16, 4).sum(axis=1)):
    print(f"{lo:8.4f} | {'#' * int(60 * c / (4 * peak))}")

# rank-based CCDF gives an evenly spaced grid in (0, 1); mirroring keeps the
# values but flips the skew
ranked = circuit.ccdf_transform(batch)
mirrored = circuit.mirror_transform(batch)
print(f"rank map skewness {sps.skew(ranked.values):+.2e}, mirror skewness {sps.skew(mirrored.values):+.3f}")
mu, sigma = circuit.fit_lognormal(mirrored)
print(f"lognormal fit of the mirrored batch: mu={mu:.4f}, sigma={sigma:.4f}")
