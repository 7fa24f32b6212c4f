"""Histograms, empirical CDFs, KL divergence and goodness-of-fit helpers."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .errors import ValidationError

KL_FLOOR = 1e-12
Z_90 = 1.645


@dataclass(frozen=True, eq=False)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        edges = np.array(self.bin_edges, dtype=float)
        counts = np.array(self.counts, dtype=np.int64)
        if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
            raise ValidationError("bin edges must be strictly increasing with at least 2 entries")
        if counts.shape != (len(edges) - 1,):
            raise ValidationError("need exactly one count per bin")
        if np.any(counts < 0):
            raise ValidationError("counts must be non-negative")
        edges.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def m(self) -> int:
        return len(self.counts)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in zip(self.bin_edges[:-1].tolist(), self.bin_edges[1:].tolist(), self.counts.tolist()):
            buf.write(f"{lo!r},{hi!r},{int(c)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Histogram":
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if not rows or rows[0].replace(" ", "") != "bin_lo,bin_hi,count":
            raise ValidationError("histogram CSV must start with header bin_lo,bin_hi,count")
        lo, hi, counts = [], [], []
        for k, row in enumerate(rows[1:], start=2):
            parts = row.split(",")
            if len(parts) != 3:
                raise ValidationError(f"histogram row {k}: expected 3 fields")
            lo.append(float(parts[0]))
            hi.append(float(parts[1]))
            counts.append(int(float(parts[2])))
        if not lo:
            raise ValidationError("histogram CSV has no bins")
        if not np.allclose(lo[1:], hi[:-1], rtol=1e-12, atol=0):
            raise ValidationError("histogram bins are not contiguous")
        return cls(np.array(lo + [hi[-1]]), np.array(counts))


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    probabilities: np.ndarray
    support_labels: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 1 or len(p) == 0:
            raise ValidationError("probabilities must be a non-empty 1-d array")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return len(self.probabilities)


def build_histogram(values, m: int, lo: float, hi: float) -> Histogram:
    """Equal-width histogram on ``[lo, hi]`` with ``m`` bins.

    Bins are half-open on the right except the last; values outside the range
    are clamped into the nearest edge bin so the total always equals the
    number of inputs.
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("cannot histogram an empty sample")
    if m < 1 or not lo < hi:
        raise ValidationError(f"need m >= 1 and lo < hi, got m={m}, lo={lo}, hi={hi}")
    edges = np.linspace(lo, hi, m + 1)
    idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, m - 1)
    return Histogram(edges, np.bincount(idx, minlength=m))


def normalize(hist: Histogram) -> DiscreteDistribution:
    total = hist.total
    if total <= 0:
        raise ValidationError("cannot normalize a histogram with zero total")
    p = hist.counts / total
    # absorb rounding so the sum is 1 to within a few ulps
    p = p / p.sum()
    return DiscreteDistribution(p, hist.bin_edges)


def _as_probs(d) -> np.ndarray:
    if isinstance(d, DiscreteDistribution):
        return d.probabilities
    return np.asarray(d, dtype=float)


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats, with ``q`` floored at 1e-12 and renormalized.

    The floor in bin i is ``min(1e-12, p_i)``: bins where ``p`` is zero get no
    extra mass and contribute nothing, so ``kl(p, p)`` is exactly 0.
    """
    p = _as_probs(p)
    q = _as_probs(q)
    if p.shape != q.shape:
        raise ValidationError(f"length mismatch: {p.shape} vs {q.shape}")
    q = np.maximum(q, np.minimum(KL_FLOOR, p))
    q = q / q.sum()
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / q[nz])))


def chi_square_uniformity(hist: Histogram) -> tuple[float, float]:
    """Pearson chi-square statistic and p-value against equal bin counts."""
    m = hist.m
    if m < 2:
        raise ValidationError("chi-square test needs at least 2 bins")
    expected = hist.total / m
    if expected < 5:
        raise ValidationError(f"expected count per bin is {expected:.3g} < 5")
    stat = float(np.sum((hist.counts - expected) ** 2) / expected)
    return stat, float(_sps.chi2.sf(stat, m - 1))


class EmpiricalCDF:
    """Right-continuous step function F(x) = #{x_i <= x} / n."""

    def __init__(self, values):
        x = np.sort(np.asarray(values, dtype=float).ravel())
        if x.size == 0:
            raise ValidationError("empirical CDF needs at least one value")
        self.sorted_values = x
        self.n = x.size
        self.mid_ranks = _sps.rankdata(x, method="average")

    def __call__(self, q):
        r = np.searchsorted(self.sorted_values, q, side="right") / self.n
        return float(r) if np.ndim(r) == 0 else r


def empirical_cdf(values) -> EmpiricalCDF:
    return EmpiricalCDF(values)


def confidence_interval_90(values) -> tuple[float, float]:
    """Mean and normal-approximation 90% half-width, 1.645 * s / sqrt(n)."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size < 2:
        raise ValidationError("confidence interval needs at least 2 values")
    s = x.std(ddof=1)
    return float(x.mean()), float(Z_90 * s / np.sqrt(x.size))
