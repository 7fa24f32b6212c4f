"""Cascaded GFET + resistor circuit driven by uniform gate-voltage noise.

Each stage feeds its input voltage to a GFET gate, looks up the drain current
on that device's transfer curve, and converts it to the next stage's gate
voltage through a load resistor (v_out = I_DS * R).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
import yaml
from scipy import stats as _sps

from .device import Branch, CharacteristicLibrary, TransferCurve, interpolate_current
from .errors import ConfigurationError, DomainError, ValidationError

GENERATOR_NAME = "numpy.PCG64"


@dataclass(frozen=True)
class StageConfig:
    v_ds_bias: float
    load_resistance: float
    branch: Branch = Branch.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        if not (math.isfinite(self.load_resistance) and self.load_resistance > 0):
            raise ValidationError(f"load resistance must be positive, got {self.load_resistance}")

    def curve(self, library: CharacteristicLibrary) -> TransferCurve:
        c = library.get_curve(self.v_ds_bias, self.branch)
        if c is None:
            raise ConfigurationError(
                f"no transfer curve for v_ds={self.v_ds_bias} V branch={self.branch.value} in {library!r}"
            )
        return c

    def describe(self) -> str:
        return f"GFET({self.v_ds_bias:g}V,{self.branch.value})->R({self.load_resistance:g})"


@dataclass(frozen=True)
class CircuitChain:
    stages: tuple[StageConfig, ...]
    source_lo: float = -8.0
    source_hi: float = 8.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ValidationError("a circuit chain needs at least one stage")
        if not self.source_lo < self.source_hi:
            raise ValidationError("source_lo must be below source_hi")

    def validate(self, library: CharacteristicLibrary):
        for st in self.stages:
            st.curve(library)

    def describe(self) -> str:
        parts = [f"U[{self.source_lo:g},{self.source_hi:g}]"] + [s.describe() for s in self.stages]
        return " -> ".join(parts)

    def transfer(self, library: CharacteristicLibrary, v_in):
        """Deterministic composed transfer function of the whole chain."""
        v = np.asarray(v_in, dtype=float)
        for st in self.stages:
            _, v = stage_transform(st, library, v)
        return v


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    unit: str = "Volt"
    seed: int | None = None
    chain_description: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValidationError("sample batch is empty")
        if not np.all(np.isfinite(v)):
            raise ValidationError("sample batch contains non-finite values")
        if self.unit not in ("Volt", "Ampere", "Dimensionless"):
            raise ValidationError(f"unknown unit {self.unit!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# metadata\n")
        buf.write(f"# seed: {self.seed}\n")
        buf.write(f"# chain: {self.chain_description}\n")
        buf.write(f"# unit: {self.unit}\n")
        buf.write("value\n")
        for x in self.values.tolist():
            buf.write(f"{x!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampleBatch":
        meta = {}
        values = []
        header = False
        for lineno, line in enumerate(text.splitlines(), start=1):
            if line.startswith("#"):
                key, sep, val = line[1:].partition(":")
                if sep:
                    meta[key.strip()] = val.strip()
                continue
            if not line.strip():
                continue
            if not header:
                if line.strip() != "value":
                    raise ValidationError(f"line {lineno}: expected header 'value'")
                header = True
                continue
            values.append(float(line))
        seed = meta.get("seed")
        return cls(
            np.array(values),
            unit=meta.get("unit", "Volt"),
            seed=None if seed in (None, "None") else int(seed),
            chain_description=meta.get("chain", ""),
        )


def stage_transform(stage: StageConfig, library: CharacteristicLibrary, v_in):
    """Drain current and output voltage of one stage for gate voltage ``v_in``."""
    i_ds = interpolate_current(stage.curve(library), v_in)
    return i_ds, i_ds * stage.load_resistance


def simulate_chain(chain: CircuitChain, library: CharacteristicLibrary, n: int, seed: int) -> SampleBatch:
    """Push ``n`` uniform gate voltages through every stage of ``chain``."""
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    chain.validate(library)
    rng = np.random.Generator(np.random.PCG64(seed))
    v = rng.uniform(chain.source_lo, chain.source_hi, size=n)
    out = chain.transfer(library, v)
    return SampleBatch(out, "Volt", seed, f"{chain.describe()} [{GENERATOR_NAME}]")


def ccdf_transform(batch: SampleBatch) -> SampleBatch:
    """Map each sample to 1 - F(x_i) with mid-rank F(x_i) = (rank - 0.5) / n.

    Ties share their average rank.  The result depends on the ranks only.
    """
    x = batch.values
    if x.size < 2:
        raise ValidationError("ccdf transform needs at least 2 samples")
    ranks = _sps.rankdata(x, method="average")
    y = 1.0 - (ranks - 0.5) / x.size
    return SampleBatch(y, "Dimensionless", batch.seed, f"ccdf({batch.chain_description})")


def mirror_transform(batch: SampleBatch) -> SampleBatch:
    """Reflect the batch about the midpoint of its range, y = min + max - x.

    Unlike :func:`ccdf_transform` this keeps the shape of the distribution,
    so a right-skewed batch becomes left-skewed.
    """
    x = batch.values
    if x.size < 2:
        raise ValidationError("mirror transform needs at least 2 samples")
    y = (x.min() + x.max()) - x
    return SampleBatch(y, batch.unit, batch.seed, f"mirror({batch.chain_description})")


def fit_lognormal(batch) -> tuple[float, float]:
    """Mean and population standard deviation of ln(x)."""
    x = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if np.any(x <= 0):
        raise DomainError("lognormal fit needs strictly positive samples")
    lx = np.log(x)
    return float(lx.mean()), float(lx.std())


# The two bias/resistor configurations simulated with the measured devices.
PRESETS: dict[str, CircuitChain] = {
    "paper-run-1": CircuitChain(
        (StageConfig(0.8, 2200.0), StageConfig(1.0, 1000.0)), -8.0, 8.0
    ),
    "paper-run-2": CircuitChain(
        (StageConfig(1.0, 1200.0), StageConfig(0.8, 1000.0)), -8.0, 8.0
    ),
}


@dataclass
class ChainRunConfig:
    """A chain plus the run parameters read from a config file."""

    chain: CircuitChain
    n: int = 100_000
    seed: int = 0
    extra: dict = field(default_factory=dict)


def chain_from_mapping(cfg: dict) -> ChainRunConfig:
    """Build a run config from a parsed key-value tree.

    Expected keys: ``source: {lo, hi}``, ``stages: [{v_ds_bias, branch,
    resistance_ohms}, ...]``, ``n``, ``seed``.  ``preset`` may name one of
    :data:`PRESETS` instead of listing stages.
    """
    cfg = dict(cfg or {})
    if "preset" in cfg:
        try:
            chain = PRESETS[cfg.pop("preset")]
        except KeyError as exc:
            raise ConfigurationError(f"unknown preset {exc.args[0]!r}; known: {sorted(PRESETS)}") from None
    else:
        src = cfg.pop("source", {}) or {}
        stages_cfg = cfg.pop("stages", None)
        if not stages_cfg:
            raise ConfigurationError("chain config needs 'stages' or 'preset'")
        try:
            stages = [
                StageConfig(float(s["v_ds_bias"]), float(s["resistance_ohms"]), Branch.parse(str(s.get("branch", "F"))))
                for s in stages_cfg
            ]
        except KeyError as exc:
            raise ConfigurationError(f"stage entry missing key {exc.args[0]!r}") from None
        chain = CircuitChain(tuple(stages), float(src.get("lo", -8.0)), float(src.get("hi", 8.0)))
    n = int(cfg.pop("n", 100_000))
    seed = int(cfg.pop("seed", 0))
    return ChainRunConfig(chain, n, seed, cfg)


def load_chain_config(path) -> ChainRunConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"cannot parse {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return chain_from_mapping(cfg)


def chain_to_mapping(chain: CircuitChain, n: int, seed: int) -> dict:
    return {
        "source": {"lo": chain.source_lo, "hi": chain.source_hi},
        "stages": [
            {"v_ds_bias": s.v_ds_bias, "branch": s.branch.value, "resistance_ohms": s.load_resistance}
            for s in chain.stages
        ],
        "n": n,
        "seed": seed,
    }
