"""GFET transfer characteristics: loading, synthesis and interpolation.

A transfer curve is the drain current I_DS as a function of the top-gate
voltage V_GS, measured at one fixed drain-source bias V_DS and on one sweep
branch (forward or reverse; the devices show hysteresis).  All quantities are
SI internally.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

CSV_HEADER = ("v_gs", "i_ds", "v_ds", "branch", "unit_i")

_UNIT_SCALE = {"A": 1.0, "uA": 1e-6}


class Branch(str, enum.Enum):
    FORWARD = "F"
    REVERSE = "R"

    @classmethod
    def parse(cls, text: str) -> "Branch":
        try:
            return cls(text.strip())
        except ValueError:
            raise ValidationError(f"unknown sweep branch {text!r} (expected F or R)") from None


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TransferCurve:
    """Drain current against gate voltage at a fixed drain-source bias."""

    v_ds_bias: float
    v_gs: np.ndarray
    i_ds: np.ndarray
    branch: Branch = Branch.FORWARD

    def __post_init__(self):
        v = _frozen(self.v_gs)
        i = _frozen(self.i_ds)
        object.__setattr__(self, "v_gs", v)
        object.__setattr__(self, "i_ds", i)
        object.__setattr__(self, "branch", Branch(self.branch))
        if v.ndim != 1 or v.shape != i.shape:
            raise ValidationError("v_gs and i_ds must be 1-d arrays of equal length")
        if len(v) < 4:
            raise ValidationError(f"a transfer curve needs at least 4 points, got {len(v)}")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(i))):
            raise ValidationError("transfer curve contains non-finite values")
        if np.any(np.diff(v) <= 0):
            raise ValidationError("v_gs must be strictly increasing")
        if np.any(i <= 0):
            raise ValidationError("drain current must be strictly positive")
        if not (math.isfinite(self.v_ds_bias) and self.v_ds_bias > 0):
            raise ValidationError(f"v_ds_bias must be positive, got {self.v_ds_bias}")

    @property
    def key(self) -> tuple[float, Branch]:
        return (float(self.v_ds_bias), self.branch)

    @property
    def dirac_point(self) -> float:
        """Gate voltage of the tabulated current minimum."""
        return float(self.v_gs[np.argmin(self.i_ds)])

    def __call__(self, v_gs):
        return interpolate_current(self, v_gs)

    def __len__(self):
        return len(self.v_gs)


def interpolate_current(curve: TransferCurve, v_gs):
    """Piecewise-linear drain current at ``v_gs``.

    Outside the measured gate range the endpoint current is held; the curve is
    never extrapolated.  Accepts scalars or arrays.
    """
    out = np.interp(v_gs, curve.v_gs, curve.i_ds)
    if np.ndim(out) == 0:
        return float(out)
    return out


class CharacteristicLibrary(Mapping):
    """Immutable collection of transfer curves keyed by ``(v_ds_bias, branch)``."""

    def __init__(self, curves: Iterable[TransferCurve]):
        table: dict[tuple[float, Branch], TransferCurve] = {}
        for c in curves:
            if c.key in table:
                raise ValidationError(f"duplicate curve for v_ds={c.v_ds_bias} branch={c.branch.value}")
            table[c.key] = c
        if not table:
            raise ValidationError("characteristic library is empty")
        self._curves = dict(sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1].value)))

    def __getitem__(self, key):
        return self._curves[key]

    def __iter__(self) -> Iterator[tuple[float, Branch]]:
        return iter(self._curves)

    def __len__(self):
        return len(self._curves)

    def get_curve(self, v_ds_bias: float, branch: Branch | str = Branch.FORWARD, tol: float = 1e-9):
        """Return the curve whose bias matches ``v_ds_bias`` within ``tol``, else None."""
        branch = Branch(branch)
        for (bias, br), curve in self._curves.items():
            if br is branch and abs(bias - v_ds_bias) <= tol:
                return curve
        return None

    @property
    def biases(self) -> list[float]:
        return sorted({k[0] for k in self._curves})

    def __repr__(self):
        keys = ", ".join(f"{b:g}V/{br.value}" for b, br in self._curves)
        return f"CharacteristicLibrary([{keys}])"


def _parse_float(text, name, lineno):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse {name}={text!r} as a number", lineno) from None


def load_characteristics(source) -> CharacteristicLibrary:
    """Read a characterization CSV into a library.

    ``source`` is a path or an open text stream.  Columns are
    ``v_gs,i_ds,v_ds,branch,unit_i``; lines that begin with ``#`` are comments.  Rows are grouped per (v_ds, branch) and
    repeated gate voltages within a group are averaged.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return load_characteristics(fh)

    groups: dict[tuple[float, Branch], dict[float, list[float]]] = {}
    header_seen = False
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = next(csv.reader([line]))
        fields = [f.strip() for f in fields]
        if not header_seen:
            if tuple(fields) != CSV_HEADER:
                raise ParseError(f"expected header {','.join(CSV_HEADER)}, got {line!r}", lineno)
            header_seen = True
            continue
        if len(fields) != len(CSV_HEADER):
            raise ParseError(f"expected {len(CSV_HEADER)} fields, got {len(fields)}", lineno)
        v_gs = _parse_float(fields[0], "v_gs", lineno)
        i_ds = _parse_float(fields[1], "i_ds", lineno)
        v_ds = _parse_float(fields[2], "v_ds", lineno)
        try:
            branch = Branch.parse(fields[3])
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
        if fields[4] not in _UNIT_SCALE:
            raise ParseError(f"unknown current unit {fields[4]!r} (expected A or uA)", lineno)
        if not all(math.isfinite(x) for x in (v_gs, i_ds, v_ds)):
            raise ValidationError(f"line {lineno}: non-finite value in row {line!r}")
        i_ds *= _UNIT_SCALE[fields[4]]
        groups.setdefault((v_ds, branch), {}).setdefault(v_gs, []).append(i_ds)

    if not header_seen:
        raise ParseError("missing header row")
    curves = []
    for (v_ds, branch), rows in groups.items():
        v = sorted(rows)
        if len(v) < 4:
            raise ValidationError(
                f"curve v_ds={v_ds} branch={branch.value} has {len(v)} distinct points, need at least 4"
            )
        i = [sum(rows[x]) / len(rows[x]) for x in v]
        curves.append(TransferCurve(v_ds, v, i, branch))
    return CharacteristicLibrary(curves)


def save_characteristics(library: CharacteristicLibrary, dest=None, unit: str = "A") -> str:
    """Write ``library`` in the characterization CSV format.

    Returns the text; also writes it to ``dest`` (path or stream) if given.
    """
    scale = _UNIT_SCALE[unit]
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for curve in library.values():
        for v, i in zip(curve.v_gs.tolist(), curve.i_ds.tolist()):
            buf.write(f"{v!r},{i / scale!r},{float(curve.v_ds_bias)!r},{curve.branch.value},{unit}\n")
    text = buf.getvalue()
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return text


@dataclass(frozen=True)
class SyntheticGfetParams:
    """Parameters of the hyperbolic v-shaped stand-in transfer curve.

    ``bias_depth_scale`` scales the whole curve with V_DS, which deepens the
    conductance valley in absolute terms as the bias grows.
    """

    v_dirac: float = 0.6
    i_min: float = 2.0e-5
    transconductance_p: float = 1.2e-4
    transconductance_n: float = 0.8e-4
    bias_depth_scale: float = 0.5

    def __post_init__(self):
        if not self.i_min > 0:
            raise ValidationError("i_min must be positive")
        if not (self.transconductance_p > 0 and self.transconductance_n > 0):
            raise ValidationError("transconductances must be positive")
        if not all(math.isfinite(x) for x in (self.v_dirac, self.bias_depth_scale)):
            raise ValidationError("v_dirac and bias_depth_scale must be finite")


def synthesize_characteristic(
    params: SyntheticGfetParams,
    v_ds_bias: float,
    v_gs_grid,
    branch: Branch | str = Branch.FORWARD,
) -> TransferCurve:
    grid = np.asarray(v_gs_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 4 or np.any(np.diff(grid) <= 0):
        raise ValidationError("v_gs grid must be strictly increasing with at least 4 points")
    scale = 1.0 + params.bias_depth_scale * v_ds_bias
    if not scale > 0:
        raise ValidationError(f"bias scale 1 + {params.bias_depth_scale}*{v_ds_bias} is not positive")
    dv = grid - params.v_dirac
    g = np.where(grid < params.v_dirac, params.transconductance_p, params.transconductance_n)
    i_ds = np.sqrt(params.i_min**2 + (g * dv) ** 2) * scale
    return TransferCurve(v_ds_bias, grid, i_ds, branch)


DEFAULT_GRID = np.linspace(-10.0, 10.0, 401)


def synthetic_library(
    params: SyntheticGfetParams | None = None,
    biases: Iterable[float] = (0.2, 0.4, 0.6, 0.8, 1.0),
    v_gs_grid=None,
    hysteresis: float = 0.3,
) -> CharacteristicLibrary:
    """Forward and reverse synthetic curves for each bias.

    The reverse branch has its Dirac point shifted by ``hysteresis`` volts.
    """
    params = params or SyntheticGfetParams()
    grid = DEFAULT_GRID if v_gs_grid is None else v_gs_grid
    rev = SyntheticGfetParams(
        params.v_dirac + hysteresis,
        params.i_min,
        params.transconductance_p,
        params.transconductance_n,
        params.bias_depth_scale,
    )
    curves = []
    for b in biases:
        curves.append(synthesize_characteristic(params, b, grid, Branch.FORWARD))
        curves.append(synthesize_characteristic(rev, b, grid, Branch.REVERSE))
    return CharacteristicLibrary(curves)
