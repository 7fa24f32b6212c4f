"""Periodic orthonormal DWT with the Coiflet-2 filter bank.

Decomposition, coefficient-budget truncation, reconstruction, and a helper
that scores a truncated reconstruction of a binned distribution by KL
divergence.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .stats import DiscreteDistribution, Histogram, kl_divergence, normalize

# Coiflet order 2 scaling filter (12 taps, sum sqrt(2)).
_COIF2 = (
    0.01638733646320364,
    -0.04146493678687178,
    -0.0673725547237256,
    0.3861100668227629,
    0.8127236354494135,
    0.4170051844232391,
    -0.07648859907828076,
    -0.05943441864643109,
    0.02368017194684777,
    0.005611434819368834,
    -0.0018232088709110323,
    -0.000720549445520347,
)


@dataclass(frozen=True, eq=False)
class WaveletFilter:
    name: str
    lowpass: np.ndarray

    def __post_init__(self):
        h = np.array(self.lowpass, dtype=float)
        if h.ndim != 1 or len(h) < 2 or len(h) % 2:
            raise ValidationError("lowpass filter must have an even number of taps")
        if abs(h.sum() - np.sqrt(2)) > 1e-8 or abs(np.dot(h, h) - 1) > 1e-8:
            raise ValidationError(f"filter {self.name!r} is not an orthonormal scaling filter")
        h.setflags(write=False)
        object.__setattr__(self, "lowpass", h)

    @property
    def highpass(self) -> np.ndarray:
        h = self.lowpass
        k = np.arange(len(h))
        return (-1.0) ** k * h[::-1]

    def __len__(self):
        return len(self.lowpass)


def coiflet2_filter() -> WaveletFilter:
    return WaveletFilter("coif2", np.array(_COIF2))


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Critically sampled multi-level coefficients.

    ``details[0]`` is the finest level (length n/2) and ``details[-1]`` the
    coarsest; ``approx`` holds the remaining n / 2**levels scaling coefficients.
    """

    approx: np.ndarray
    details: tuple[np.ndarray, ...]
    original_length: int

    def __post_init__(self):
        a = np.array(self.approx, dtype=float)
        ds = tuple(np.array(d, dtype=float) for d in self.details)
        n = self.original_length
        if not ds:
            raise ValidationError("coefficient set needs at least one detail level")
        if not _is_pow2(n) or n < 2 ** len(ds):
            raise ValidationError(f"original length {n} is not a power of two >= 2**levels")
        for j, d in enumerate(ds, start=1):
            if d.shape != (n >> j,):
                raise ValidationError(f"detail level {j} has shape {d.shape}, expected ({n >> j},)")
        if a.shape != (n >> len(ds),):
            raise ValidationError(f"approximation band has shape {a.shape}, expected ({n >> len(ds)},)")
        object.__setattr__(self, "approx", a)
        object.__setattr__(self, "details", ds)

    @property
    def levels(self) -> int:
        return len(self.details)

    def flatten(self) -> np.ndarray:
        """Coarse-to-fine vector: approximation band, then details coarsest first."""
        return np.concatenate([self.approx, *self.details[::-1]])

    def with_flat(self, flat) -> "CoefficientSet":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.original_length,):
            raise ValidationError("flat coefficient vector has the wrong length")
        pos = len(self.approx)
        approx = flat[:pos]
        details = []
        for d in self.details[::-1]:
            details.append(flat[pos:pos + len(d)])
            pos += len(d)
        return CoefficientSet(approx, tuple(details[::-1]), self.original_length)

    def __add__(self, other: "CoefficientSet") -> "CoefficientSet":
        return self.with_flat(self.flatten() + other.flatten())

    def __mul__(self, scalar: float) -> "CoefficientSet":
        return self.with_flat(self.flatten() * scalar)

    __rmul__ = __mul__

    def energy(self) -> float:
        f = self.flatten()
        return float(np.dot(f, f))

    def to_csv(self) -> str:
        """``level,index,value`` rows; level -1 is the approximation band."""
        buf = io.StringIO()
        buf.write("level,index,value\n")
        for i, v in enumerate(self.approx.tolist()):
            buf.write(f"-1,{i},{v!r}\n")
        for j, d in enumerate(self.details, start=1):
            for i, v in enumerate(d.tolist()):
                buf.write(f"{j},{i},{v!r}\n")
        return buf.getvalue()


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def default_levels(length: int) -> int:
    return max(1, int(np.log2(length)) - 2)


def _analysis_step(x: np.ndarray, h: np.ndarray, g: np.ndarray):
    n = len(x)
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(h))[None, :]) % n
    win = x[idx]
    return win @ h, win @ g


def _synthesis_step(a: np.ndarray, d: np.ndarray, h: np.ndarray, g: np.ndarray):
    n = 2 * len(a)
    out = np.zeros(n)
    idx = (2 * np.arange(len(a))[:, None] + np.arange(len(h))[None, :]) % n
    # scatter-add in a fixed order; np.add.at handles repeated indices when n < len(h)
    np.add.at(out, idx, a[:, None] * h[None, :] + d[:, None] * g[None, :])
    return out


def dwt(signal, filt: WaveletFilter | None = None, levels: int | None = None) -> CoefficientSet:
    """Multi-level periodic DWT (pyramid algorithm).

    a[k] = sum_j h[j] x[(2k + j) mod n], d[k] likewise with the highpass
    filter.  With an orthonormal filter the transform is orthogonal, so
    energy is preserved exactly up to rounding.
    """
    filt = filt or coiflet2_filter()
    x = np.asarray(signal, dtype=float)
    n = x.size
    if x.ndim != 1 or not _is_pow2(n) or n < 2:
        raise ValidationError(f"signal length must be a power of two >= 2, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("signal contains non-finite samples")
    if levels is None:
        levels = default_levels(n)
    if levels < 1 or 2**levels > n:
        raise ValidationError(f"levels={levels} out of range for length {n}")
    h, g = filt.lowpass, filt.highpass
    details = []
    a = x
    for _ in range(levels):
        a, d = _analysis_step(a, h, g)
        details.append(d)
    return CoefficientSet(a, tuple(details), n)


def idwt(coeffs: CoefficientSet, filt: WaveletFilter | None = None) -> np.ndarray:
    filt = filt or coiflet2_filter()
    h, g = filt.lowpass, filt.highpass
    a = coeffs.approx
    for d in coeffs.details[::-1]:
        if d.shape != a.shape:
            raise ValidationError("malformed coefficient set: band lengths do not match")
        a = _synthesis_step(a, d, h, g)
    return a


def truncate_coefficients(coeffs: CoefficientSet, k: int) -> CoefficientSet:
    """Keep the ``k`` largest-magnitude coefficients and zero the rest.

    Ties go to the coarser band, then to the lower index.
    """
    flat = coeffs.flatten()
    if not 1 <= k <= flat.size:
        raise ValidationError(f"k={k} outside 1..{flat.size}")
    order = np.argsort(-np.abs(flat), kind="stable")
    out = np.zeros_like(flat)
    keep = order[:k]
    out[keep] = flat[keep]
    return coeffs.with_flat(out)


def reconstruct_distribution(
    hist: Histogram,
    k: int,
    filt: WaveletFilter | None = None,
    levels: int | None = None,
) -> tuple[DiscreteDistribution, float]:
    """Reconstruct ``hist`` from a ``k``-coefficient wavelet budget.

    Negative reconstructed mass is clipped before renormalizing.  Returns the
    reconstruction and KL(original || reconstruction).
    """
    if not _is_pow2(hist.m):
        raise ValidationError(f"histogram bin count {hist.m} is not a power of two")
    p = normalize(hist)
    c = truncate_coefficients(dwt(p.probabilities, filt, levels), k)
    r = np.clip(idwt(c, filt), 0.0, None)
    total = r.sum()
    if not total > 0:
        raise ValidationError(f"reconstruction with k={k} has no positive mass")
    q = DiscreteDistribution(r / total, hist.bin_edges)
    return q, kl_divergence(p, q)
