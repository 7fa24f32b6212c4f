"""Command-line experiment runner.

Subcommands ``characterize``, ``simulate``, ``wavelet`` and ``mcbench``.
Every artifact-producing run writes ``manifest.json`` into ``--out`` after
all other files.  Exit codes: 0 success, 2 usage or configuration error,
1 failed self-check.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import circuit, device, mcint, stats, svgplot, wavelet
from .errors import ConfigurationError, ValidationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class RunRecorder:
    """Collects emitted artifacts and writes the manifest last."""

    def __init__(self, out: Path | None, command: str, config: dict, seed):
        self.out = out
        self.command = command
        self.config = config
        self.seed = seed
        self.started = _dt.datetime.now(_dt.timezone.utc).isoformat()
        self.artifacts: list[str] = []
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str):
        if self.out is None:
            return
        path = self.out / name
        path.write_text(text, encoding="utf-8", newline="\n")
        self.artifacts.append(name)

    def finish(self):
        if self.out is None:
            return
        blob = json.dumps(self.config, sort_keys=True, default=str).encode()
        manifest = {
            "tool": "gfet_prva",
            "tool_version": __version__,
            "command": self.command,
            "config_hash": hashlib.sha256(blob).hexdigest(),
            "config": self.config,
            "seed": self.seed,
            "started": self.started,
            "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "artifacts": list(self.artifacts),
        }
        (self.out / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8"
        )


def _load_config(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"config file {p} does not exist")
    with p.open(encoding="utf-8") as fh:
        try:
            cfg = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"cannot parse {p}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError(f"{p}: top level must be a mapping")
    return cfg


def _merge(cfg: dict, args, keys) -> dict:
    """Flags given on the command line override config-file values."""
    out = dict(cfg)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _out_dir(args, cfg):
    out = args.out if args.out is not None else cfg.get("out")
    return Path(out) if out is not None else None


def _library(path):
    if path is None:
        return device.synthetic_library()
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"characterization file {p} does not exist")
    return device.load_characteristics(p)


# -- characterize -------------------------------------------------------------

def cmd_characterize(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["csv", "resample"])
    if cfg.get("csv") is None and not args.synthetic:
        raise ConfigurationError("give --csv PATH or --synthetic")
    if cfg.get("csv") is not None:
        lib = _library(cfg["csv"])
    else:
        params = device.SyntheticGfetParams(**cfg.get("synthetic_params", {}))
        lib = device.synthetic_library(params, cfg.get("biases", (0.2, 0.4, 0.6, 0.8, 1.0)))
    rec = RunRecorder(_out_dir(args, cfg), "characterize", cfg, args.seed)

    lines = [f"curves: {len(lib)}"]
    for (bias, br), c in lib.items():
        lines.append(
            f"v_ds={bias:g} V branch={br.value} points={len(c)} "
            f"v_gs=[{c.v_gs[0]:g}, {c.v_gs[-1]:g}] V dirac={c.dirac_point:g} V "
            f"i_min={c.i_ds.min():.4g} A i_max={c.i_ds.max():.4g} A"
        )
    summary = "\n".join(lines) + "\n"
    sys.stdout.write(summary)
    rec.write("summary.txt", summary)

    if cfg.get("resample"):
        m = int(cfg["resample"])
        if m < 4:
            raise ValidationError("--resample needs at least 4 points")
        curves = []
        for c in lib.values():
            grid = np.linspace(c.v_gs[0], c.v_gs[-1], m)
            curves.append(device.TransferCurve(c.v_ds_bias, grid, device.interpolate_current(c, grid), c.branch))
        rec.write("resampled.csv", device.save_characteristics(device.CharacteristicLibrary(curves)))
    if args.svg:
        series = {f"{b:g}V {br.value}": (c.v_gs, c.i_ds) for (b, br), c in lib.items()}
        rec.write("curves.svg", svgplot.line_svg(series, "Transfer characteristics", "V_GS (V)", "I_DS (A)"))
    rec.finish()
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["preset", "n", "seed", "library", "bins"])
    spec = {k: cfg[k] for k in ("preset", "source", "stages", "n", "seed") if k in cfg}
    if "preset" not in spec and "stages" not in spec:
        spec["preset"] = "paper-run-1"
    run = circuit.chain_from_mapping(spec)
    if run.n < 1:
        raise ValidationError(f"n must be at least 1, got {run.n}")
    lib = _library(cfg.get("library"))
    bins = int(cfg.get("bins", 64))
    rec = RunRecorder(_out_dir(args, cfg), "simulate", {**cfg, **circuit.chain_to_mapping(run.chain, run.n, run.seed)}, run.seed)

    batch = circuit.simulate_chain(run.chain, lib, run.n, run.seed)
    rec.write("samples.csv", batch.to_csv())
    v = batch.values
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        hi = lo + 1.0
    hist = stats.build_histogram(v, bins, lo, hi)
    rec.write("histogram.csv", hist.to_csv())
    print(f"chain: {batch.chain_description}")
    print(f"samples: {len(batch)} range=[{lo:.6g}, {hi:.6g}] V")
    if hist.total / hist.m >= 5 and hist.m >= 2:
        chi2, p = stats.chi_square_uniformity(hist)
        print(f"chi-square vs uniform: statistic={chi2:.6g} p={p:.3g}")
    if args.svg:
        rec.write("histogram.svg", svgplot.histogram_svg(hist, "Circuit output", "V_out (V)"))

    if args.ccdf:
        transform = circuit.mirror_transform if args.ccdf_mode == "mirror" else circuit.ccdf_transform
        tb = transform(batch)
        rec.write("ccdf_samples.csv", tb.to_csv())
        mu, sigma = circuit.fit_lognormal(tb)
        th = stats.build_histogram(tb.values, bins, float(tb.values.min()), float(tb.values.max()))
        rec.write("ccdf_histogram.csv", th.to_csv())
        rec.write("lognormal_fit.json", json.dumps({"mu": mu, "sigma": sigma, "mode": args.ccdf_mode}, indent=2) + "\n")
        print(f"{args.ccdf_mode} transform lognormal fit: mu={mu:.6g} sigma={sigma:.6g}")
        if args.svg:
            ref = _lognormal_bin_counts(th, mu, sigma, len(tb))
            rec.write("ccdf_histogram.svg", svgplot.histogram_svg(th, "Transformed output vs fitted lognormal", overlay=ref))
    rec.finish()
    return EXIT_OK


def _lognormal_bin_counts(hist, mu, sigma, n):
    from scipy.stats import lognorm

    cdf = lognorm.cdf(np.clip(hist.bin_edges, 0, None), sigma, scale=np.exp(mu)) if sigma > 0 else None
    if cdf is None:
        return None
    return np.diff(cdf) * n


# -- wavelet ------------------------------------------------------------------

def _parse_k_list(text, full):
    ks = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if not tok:
            continue
        ks.append(full if tok == "full" else int(tok))
    return ks


def cmd_wavelet(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["histogram", "k", "levels", "mu", "sigma", "samples", "bins", "seed"])
    seed = int(cfg.get("seed", 0))
    if cfg.get("histogram") is not None:
        p = Path(cfg["histogram"])
        if not p.is_file():
            raise ConfigurationError(f"histogram file {p} does not exist")
        hist = stats.Histogram.from_csv(p.read_text(encoding="utf-8"))
    elif args.lognormal or "mu" in cfg:
        mu, sigma = float(cfg.get("mu", 0.0)), float(cfg.get("sigma", 0.25))
        n = int(cfg.get("samples", 10**6))
        bins = int(cfg.get("bins", 64))
        x = mcint.SoftwareLognormal(mu, sigma, seed).draw(n)
        hist = stats.build_histogram(x, bins, float(x.min()), float(x.max()))
    else:
        raise ConfigurationError("give --histogram PATH or --lognormal")
    if hist.m & (hist.m - 1):
        raise ValidationError(f"histogram has {hist.m} bins, not a power of two")

    filt = wavelet.coiflet2_filter()
    levels = int(cfg["levels"]) if cfg.get("levels") is not None else wavelet.default_levels(hist.m)
    ks = _parse_k_list(cfg.get("k", "full"), hist.m)
    rec = RunRecorder(_out_dir(args, cfg), "wavelet", {**cfg, "levels": levels, "k": ks}, seed)
    p = stats.normalize(hist)
    rec.write("coefficients.csv", wavelet.dwt(p.probabilities, filt, levels).to_csv())

    summary = ["k,kl"]
    for k in ks:
        q, kl = wavelet.reconstruct_distribution(hist, k, filt, levels)
        summary.append(f"{k},{kl!r}")
        print(f"k={k:5d}  KL={kl:.6g}")
        rows = ["bin_lo,bin_hi,p_original,p_reconstructed"]
        for lo, hi, a, b in zip(
            hist.bin_edges[:-1].tolist(), hist.bin_edges[1:].tolist(), p.probabilities.tolist(), q.probabilities.tolist()
        ):
            rows.append(f"{lo!r},{hi!r},{a!r},{b!r}")
        rec.write(f"reconstruction_k{k}.csv", "\n".join(rows) + "\n")
        if args.svg:
            rec.write(
                f"reconstruction_k{k}.svg",
                svgplot.histogram_svg(hist, f"k={k} coefficients, KL={kl:.3g}", overlay=q.probabilities * hist.total),
            )
    rec.write("kl_summary.csv", "\n".join(summary) + "\n")
    rec.finish()
    return EXIT_OK


# -- mcbench ------------------------------------------------------------------

def parse_sampler(text: str, seed: int, mu: float, sigma: float):
    """``uniform:LO:HI``, ``lognormal[:MU:SIGMA]``, ``hwbuffer[:SIZE]``,
    ``hwcircuit[:PRESET]``."""
    kind, *rest = text.split(":")
    try:
        if kind == "uniform":
            lo, hi = (float(r) for r in rest) if rest else (0.0, 3.0)
            return mcint.UniformRange(lo, hi, seed)
        if kind == "lognormal":
            m, s = (float(r) for r in rest) if rest else (mu, sigma)
            return mcint.SoftwareLognormal(m, s, seed)
        if kind == "hwbuffer":
            size = int(float(rest[0])) if rest else 1 << 22
            return mcint.HardwareBuffer.idealized(mu, sigma, size, seed)
        if kind == "hwcircuit":
            preset = rest[0] if rest else "paper-run-2"
            if preset not in circuit.PRESETS:
                raise ConfigurationError(f"unknown preset {preset!r}")
            batch = circuit.simulate_chain(circuit.PRESETS[preset], device.synthetic_library(), 1 << 20, seed)
            return mcint.HardwareBuffer.from_batch(batch, mu, sigma)
    except ValueError as exc:
        if isinstance(exc, (ConfigurationError, ValidationError)):
            raise
        raise ConfigurationError(f"bad sampler spec {text!r}: {exc}") from None
    raise ConfigurationError(f"unknown sampler kind {kind!r}")


def _parse_grid(text):
    return [int(float(t)) for t in str(text).split(",") if t.strip()]


def cmd_mcbench(args) -> int:
    if args.check:
        results = mcint.run_invariant_checks(args.seed or 0)
        for name, ok, detail in results:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL

    cfg = _merge(_load_config(args.config), args, ["sampler", "n_grid", "repeats", "mu", "sigma", "seed"])
    seed = int(cfg.get("seed", 0))
    mu, sigma = float(cfg.get("mu", 0.0)), float(cfg.get("sigma", 0.25))
    names = cfg.get("sampler") or ["uniform:0:3", "lognormal", "hwbuffer"]
    ns = _parse_grid(cfg.get("n_grid", "100,1000,10000,100000,1000000"))
    repeats = int(cfg.get("repeats", 1000))
    if repeats < 2:
        raise ValidationError("--repeats must be at least 2")
    if any(n < 2 for n in ns):
        raise ValidationError("every n in the grid must be at least 2")
    specs = [parse_sampler(s, seed, mu, sigma) for s in names]
    density = mcint.TargetDensity(mu, sigma)
    rec = RunRecorder(_out_dir(args, cfg), "mcbench", {**cfg, "sampler": names, "n_grid": ns, "repeats": repeats}, seed)

    def progress(row):
        print(f"{row.sampler:>22s} n={row.n:<9d} E={row.mean_error:.3e} ±{row.error_ci90:.1e}  "
              f"t={row.mean_time_s:.3e}s", file=sys.stderr, flush=True)

    rows = mcint.sweep(specs, density, ns, repeats, progress)
    text = mcint.sweep_to_csv(rows)
    if rec.out is None:
        sys.stdout.write(text)
    rec.write("sweep.csv", text)
    if args.svg:
        err, tim = {}, {}
        for spec in specs:
            sel = [r for r in rows if r.sampler == spec.name]
            x = [r.n for r in sel]
            err[spec.name] = (x, [r.mean_error for r in sel], [r.error_ci90 for r in sel])
            tim[spec.name] = (x, [r.mean_time_s for r in sel], [r.time_ci90 for r in sel])
        rec.write("error.svg", svgplot.loglog_svg(err, "Integration error", "N", "|1 - A|"))
        rec.write("time.svg", svgplot.loglog_svg(tim, "Integration time", "N", "t (s)"))
    rec.finish()
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit seed")
    common.add_argument("--out", default=None, help="output directory for artifacts")
    common.add_argument("--config", default=None, help="YAML config file; flags override it")
    common.add_argument("--svg", action="store_true", help="also emit SVG plots")

    ap = argparse.ArgumentParser(prog="gfet-prva", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", parents=[common], help="validate and summarize transfer curves")
    p.add_argument("--csv", default=None)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--resample", type=int, default=None, help="write curves resampled to this many points")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("simulate", parents=[common], help="run the GFET circuit chain")
    p.add_argument("--preset", choices=sorted(circuit.PRESETS), default=None)
    p.add_argument("--library", default=None, help="characterization CSV (default: synthetic curves)")
    p.add_argument("-n", "--n", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--ccdf", action="store_true", help="also emit the transformed batch and lognormal fit")
    p.add_argument("--ccdf-mode", choices=("rank", "mirror"), default="rank")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("wavelet", parents=[common], help="wavelet reconstruction of a distribution")
    p.add_argument("--histogram", default=None, help="histogram CSV (bin_lo,bin_hi,count)")
    p.add_argument("--lognormal", action="store_true", help="histogram software lognormal samples instead")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--k", default=None, help="comma-separated coefficient budgets; 'full' for all")
    p.set_defaults(func=cmd_wavelet)

    p = sub.add_parser("mcbench", parents=[common], help="Monte Carlo integration sweep")
    p.add_argument("--sampler", action="append", default=None,
                   help="uniform:LO:HI | lognormal[:MU:SIGMA] | hwbuffer[:SIZE] | hwcircuit[:PRESET]; repeatable")
    p.add_argument("--n-grid", dest="n_grid", default=None, help="comma-separated sample counts")
    p.add_argument("--repeats", type=int, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--check", action="store_true", help="run the integration self-checks only")
    p.set_defaults(func=cmd_mcbench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
