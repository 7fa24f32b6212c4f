"""Sorted-sample trapezoidal Monte Carlo integration of a lognormal density.

The integrand is f(x) = (z / x) exp(-(ln x - mu)^2 / (2 sigma^2)).  Samples
are drawn from a sampler, sorted, and the area under f is accumulated one
trapezoid at a time between consecutive samples; the error is |1 - area|.
Three samplers are compared: a bounded uniform range, a software lognormal
generator, and a pre-filled buffer standing in for a hardware source whose
samples cost one memory read each.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sps

from .errors import ConfigurationError, DomainError, ValidationError
from .stats import confidence_interval_90

SWEEP_HEADER = ("sampler", "n", "repeats", "mean_error", "error_ci90", "mean_time_s", "time_ci90")


@dataclass(frozen=True)
class TargetDensity:
    mu: float = 0.0
    sigma: float = 0.25
    z: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if self.z is None:
            object.__setattr__(self, "z", 1.0 / (self.sigma * math.sqrt(2.0 * math.pi)))
        elif not self.z > 0:
            raise ValidationError(f"z must be positive, got {self.z}")

    def __call__(self, x):
        return lognormal_pdf(self, x)


def lognormal_pdf(density: TargetDensity, x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("lognormal density is defined for x > 0 only")
    out = density.z / x * np.exp(-((np.log(x) - density.mu) ** 2) / (2.0 * density.sigma**2))
    return float(out) if out.ndim == 0 else out


def tail_mass_outside(density: TargetDensity, lo: float, hi: float) -> float:
    """Probability mass of the normalized lognormal outside ``[lo, hi]``.

    This is the area a sampler confined to ``[lo, hi]`` can never see, i.e.
    the floor under its integration error.
    """
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    a = (math.log(lo) - density.mu) / density.sigma
    b = (math.log(hi) - density.mu) / density.sigma if math.isfinite(hi) else math.inf
    return float(_sps.norm.cdf(a) + _sps.norm.sf(b))


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class UniformRange:
    lo: float = 0.0
    hi: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValidationError("UniformRange needs lo < hi")

    @property
    def name(self) -> str:
        return f"uniform:{self.lo:g}:{self.hi:g}"

    def draw(self, n: int, stream: int = 0) -> np.ndarray:
        # hi - span*u with u in [0, 1) lands in (lo, hi], so lo=0 never yields 0
        u = _rng(self.seed, stream).random(n)
        return self.hi - (self.hi - self.lo) * u


@dataclass(frozen=True)
class SoftwareLognormal:
    mu: float = 0.0
    sigma: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("SoftwareLognormal needs sigma > 0")

    @property
    def name(self) -> str:
        return f"lognormal:{self.mu:g}:{self.sigma:g}"

    def draw(self, n: int, stream: int = 0) -> np.ndarray:
        return _rng(self.seed, stream).lognormal(self.mu, self.sigma, n)


@dataclass(frozen=True, eq=False)
class HardwareBuffer:
    """Ring buffer of pre-generated samples, read sequentially.

    Stream ``s`` of an ``n``-sample draw starts at ``offset + s*n`` (mod the
    buffer length), so consecutive repeats consume consecutive stretches.
    """

    buffer: np.ndarray
    offset: int = 0
    label: str = "hwbuffer"
    seed: int = 0

    def __post_init__(self):
        buf = np.array(self.buffer, dtype=float).ravel()
        if buf.size == 0:
            raise ConfigurationError("hardware buffer is empty")
        buf.setflags(write=False)
        object.__setattr__(self, "buffer", buf)

    @property
    def name(self) -> str:
        return self.label

    @classmethod
    def idealized(cls, mu=0.0, sigma=0.25, size=1 << 22, seed=0, label="hwbuffer"):
        """Buffer filled from an ideal lognormal source."""
        return cls(_rng(seed, 0).lognormal(mu, sigma, size), 0, label, seed)

    @classmethod
    def from_batch(cls, batch, mu=0.0, sigma=0.25, label="hwbuffer-circuit"):
        """Buffer filled with circuit output mapped onto lognormal(mu, sigma).

        The log of the circuit samples is standardized with its own fitted
        mean and deviation, then rescaled and exponentiated.
        """
        from .circuit import fit_lognormal

        m, s = fit_lognormal(batch)
        if s == 0:
            raise ConfigurationError("circuit output is constant; cannot map it to a lognormal")
        x = np.exp(mu + sigma * (np.log(batch.values) - m) / s)
        return cls(x, 0, label, batch.seed or 0)

    def draw(self, n: int, stream: int = 0) -> np.ndarray:
        size = self.buffer.size
        start = (self.offset + stream * n) % size
        first = self.buffer[start:start + n]
        if first.size == n:
            return first.copy()
        return np.concatenate([first, np.resize(self.buffer, n - first.size)])


def draw_samples(spec, n: int, stream: int = 0) -> np.ndarray:
    if n < 2:
        raise ValidationError(f"need at least 2 samples, got {n}")
    return spec.draw(n, stream)


def integrate_mc(samples, density=None) -> tuple[float, float]:
    """Area under ``density`` from sorted samples, and |1 - area|.

    The trapezoids are accumulated strictly left to right over the sorted
    samples (a running sum, not a pairwise reduction).
    """
    density = TargetDensity() if density is None else density
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size < 2:
        raise ValidationError("need at least 2 samples")
    if not x[0] > 0:
        raise DomainError("samples must be strictly positive")
    fx = np.asarray(density(x), dtype=float)
    b = x[1:] - x[:-1]
    h = (fx[1:] + fx[:-1]) / 2
    area = float(np.cumsum(b * h)[-1])
    return area, abs(1.0 - area)


@dataclass(frozen=True)
class SweepRow:
    sampler: str
    n: int
    repeats: int
    mean_error: float
    error_ci90: float
    mean_time_s: float
    time_ci90: float
    errors: np.ndarray = field(repr=False, compare=False, default=None)

    def csv_line(self) -> str:
        return (
            f"{self.sampler},{self.n},{self.repeats},{self.mean_error!r},{self.error_ci90!r},"
            f"{self.mean_time_s!r},{self.time_ci90!r}"
        )


def run_experiment(spec, density: TargetDensity, n: int, repeats: int, vary_seed: bool = True) -> SweepRow:
    """Time and score ``repeats`` independent integrations with ``n`` samples.

    Each timing spans generation, sorting and accumulation.  With
    ``vary_seed=False`` every repeat reuses stream 0.
    """
    if repeats < 2:
        raise ValidationError("need at least 2 repeats for a confidence interval")
    errors = np.empty(repeats)
    times = np.empty(repeats)
    for r in range(repeats):
        stream = r if vary_seed else 0
        t0 = time.perf_counter()
        x = draw_samples(spec, n, stream)
        _, e = integrate_mc(x, density)
        times[r] = time.perf_counter() - t0
        errors[r] = e
    me, ce = confidence_interval_90(errors)
    mt, ct = confidence_interval_90(times)
    return SweepRow(spec.name, n, repeats, me, ce, mt, ct, errors)


def sweep(specs, density: TargetDensity, ns, repeats: int, progress=None) -> list[SweepRow]:
    rows = []
    for spec in specs:
        for n in ns:
            row = run_experiment(spec, density, int(n), repeats)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(SWEEP_HEADER) + "\n")
    for row in rows:
        buf.write(row.csv_line() + "\n")
    return buf.getvalue()


def sweep_from_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(lines[0].split(",")) != SWEEP_HEADER:
        raise ValidationError("sweep CSV header mismatch")
    rows = []
    for ln in lines[1:]:
        s, n, r, me, ce, mt, ct = ln.split(",")
        rows.append(SweepRow(s, int(n), int(r), float(me), float(ce), float(mt), float(ct)))
    return rows


def crossover_n(reference: list[SweepRow], challenger: list[SweepRow]) -> float:
    """Smallest n from which ``challenger`` has lower mean error than ``reference``
    at every larger n of the shared grid.

    Returns ``inf`` when the challenger is not ahead at the largest n, i.e.
    any crossing lies beyond the grid.
    """
    ref = {r.n: r.mean_error for r in reference}
    ch = {r.n: r.mean_error for r in challenger}
    grid = sorted(set(ref) & set(ch))
    if not grid:
        raise ValidationError("no common n between the two sweeps")
    best = math.inf
    for n in reversed(grid):
        if ch[n] < ref[n]:
            best = n
        else:
            break
    return float(best)


def draw_cost(spec, n: int, repeats: int = 5) -> float:
    """Median wall time per sample of ``spec.draw`` at size ``n``."""
    times = []
    for r in range(repeats):
        t0 = time.perf_counter()
        spec.draw(n, r)
        times.append(time.perf_counter() - t0)
    return float(np.median(times)) / n


def composite_trapezoid(f, grid) -> float:
    """Textbook composite trapezoid rule on ``grid``, summed left to right."""
    area = 0.0
    for i in range(1, len(grid)):
        area += (grid[i] - grid[i - 1]) * ((f[i] + f[i - 1]) / 2)
    return float(area)


def run_invariant_checks(seed: int = 0, n: int = 10_000) -> list[tuple[str, bool, str]]:
    """Self-checks of the integration scheme; returns (name, passed, detail)."""
    dens = TargetDensity()
    rng = np.random.default_rng(seed)
    x = rng.lognormal(0.0, 0.25, n)
    results = []

    a0, _ = integrate_mc(x, dens)
    a1, _ = integrate_mc(rng.permutation(x), dens)
    results.append(("permutation invariance", a0 == a1, f"{a0!r} vs {a1!r}"))

    a2, _ = integrate_mc(np.append(x, x[: n // 10]), dens)
    results.append(("duplicate samples add no area", math.isclose(a0, a2, rel_tol=1e-12), f"{a0!r} vs {a2!r}"))

    results.append(("area non-negative", a0 >= 0, f"{a0!r}"))

    grid = np.linspace(0.1, 5.0, 1025)
    fg = lognormal_pdf(dens, grid)
    ag, _ = integrate_mc(grid, dens)
    at = composite_trapezoid(fg, grid)
    results.append(("grid equals composite trapezoid", ag == at, f"{ag!r} vs {at!r}"))

    floor = tail_mass_outside(dens, 1e-300, 3.0)
    _, e3 = integrate_mc(UniformRange(0.0, 3.0, seed).draw(10**6), dens)
    results.append(("uniform[0,3] error at least its tail floor", e3 >= 0.5 * floor, f"E={e3:.3g} floor={floor:.3g}"))

    hw = HardwareBuffer.idealized(size=1 << 20, seed=seed)
    sw = SoftwareLognormal(seed=seed)
    c_hw = draw_cost(hw, 1 << 19)
    c_sw = draw_cost(sw, 1 << 19)
    results.append(("buffer draw cheaper than lognormal draw", c_hw < c_sw, f"ratio {c_sw / c_hw:.2f}x"))
    return results
