"""Command-line front end for the Benford violation pipeline.

Subcommands:
  observables  dump (lambda, value) rows of an observable curve
  profile      sliding-window violation profile (CSV + metadata sidecar)
  scaling      per-N pseudo-critical points and the scaling exponent q
  table1       the 4x4 exponent table (M_z under md/sd/bd, T_xx under md)
  benford      digit-conformance report for a numeric file

Configuration comes from defaults, then an optional `--config FILE` of
flat `key = value` lines, then a resolution preset (`--coarse`/`--full`),
then explicit flags; later sources win.  A profile run writes a metadata
sidecar that parses back as a config file and reproduces the run
byte-identically.

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 I/O failure.
Every failure prints a single diagnostic line `error[<class>]: message`
to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import benford
from . import scaling as sc
from .quadrature import QuadratureError
from .windows import (
    ConvergenceError,
    WindowSpec,
    convergence_check,
    default_jobs,
    fmt17,
    profile as profile_windows,
    profile_csv_text,
    profile_meta_text,
    profile_set,
)
from .xy_model import ObservableCurve, ObservableKind

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

# converged samples per digit depth at the reference resolution
CONVERGED_N = {1: 10000, 2: 10000, 3: 11000, 4: 40000}
COARSE_EPSILON = 1e-3
COARSE_N = 10000
FULL_EPSILON = 5e-5
SCALING_SIZES = (14, 20, 24, 30, 34, 40)


class UsageError(Exception):
    """Bad flags, flag combinations, or config values."""


class InputFormatError(Exception):
    """A data or config file exists but its content cannot be parsed."""


@dataclass
class RunConfig:
    """Resolved settings for one CLI run."""

    observable: str = "mz"
    gamma: float = 0.5
    beta_tilde: float = math.inf
    n_sites: tuple = ()  # empty = per-command default
    a: float = 0.5
    b: float = 1.5
    w: float = 0.05
    epsilon: float = COARSE_EPSILON
    n: int | None = COARSE_N
    auto_n: bool = False
    k: int = 1
    distance: str = "md"
    fit_window: tuple | None = None  # None = adaptive feature window
    scaling_mode: str = "fixed"
    lambda_c: float = 1.0
    out: str = "."
    jobs: int = 0  # 0 = all available cores
    preset: str | None = None
    emit_plot: bool = False

    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else default_jobs()

    def resolved_n(self, k: int) -> int | None:
        if self.auto_n:
            return None
        if self.n is not None:
            return self.n
        if self.preset == "full":
            return CONVERGED_N[k]
        return COARSE_N

    def sizes_or(self, default) -> tuple:
        return self.n_sites if self.n_sites else tuple(default)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_sites(text) -> tuple:
    """Sizes from flag repeats or a config value; 'inf' means N = infinity."""
    if isinstance(text, str):
        text = [text]
    sites = []
    for chunk in text:
        for tok in chunk.replace(",", " ").split():
            sites.append(None if tok.lower() in ("inf", "infinity") else int(tok))
    return tuple(sites)


def _parse_fit_window(text: str):
    if text.strip().lower() == "auto":
        return None
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"fit window must be 'LO,HI' or 'auto', got {text!r}")
    return (float(parts[0]), float(parts[1]))


_CONFIG_PARSERS = {
    "observable": str,
    "gamma": float,
    "beta_tilde": float,
    "n_sites": _parse_sites,
    "a": float,
    "b": float,
    "w": float,
    "epsilon": float,
    "n": int,
    "auto_n": _parse_bool,
    "k": int,
    "distance": str,
    "fit_window": _parse_fit_window,
    "scaling_mode": str,
    "lambda_c": float,
    "out": str,
    "jobs": int,
    "emit_plot": _parse_bool,
}


def read_config_file(path: str) -> dict:
    """Flat `key = value` lines; blank lines and # comments are skipped."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise InputFormatError(f"{path}:{lineno}: expected 'key = value'")
            if key not in _CONFIG_PARSERS:
                raise InputFormatError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_PARSERS[key](val.strip())
            except ValueError as exc:
                raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="benfordxy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--observable", help="mz | txx | tyy | tzz | g:R")
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--beta-tilde", type=float, dest="beta_tilde")
        sp.add_argument("--n-sites", action="append", dest="n_sites", metavar="N",
                        help="system size; repeatable; 'inf' for the thermodynamic limit")
        sp.add_argument("--k", type=int, help="digit depth 1..4")
        sp.add_argument("--distance", choices=("md", "sd", "bd"))
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--w", type=float)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--n", type=int, help="samples per window (or grid points)")
        sp.add_argument("--auto-n", action="store_true", dest="auto_n", default=None,
                        help="pick n by the doubling convergence check")
        sp.add_argument("--fit-window", dest="fit_window", metavar="LO,HI|auto")
        sp.add_argument("--scaling-mode", choices=("fixed", "free"), dest="scaling_mode")
        sp.add_argument("--lambda-c", type=float, dest="lambda_c")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--jobs", type=int, help="parallel workers (default: all cores)")
        sp.add_argument("--coarse", action="store_true", default=None,
                        help="desk-scale preset: epsilon 1e-3, n 1e4")
        sp.add_argument("--full", action="store_true", default=None,
                        help="paper-scale preset: epsilon 5e-5, converged n per k")
        sp.add_argument("--emit-plot", action="store_true", dest="emit_plot", default=None)

    for name, helptext in (
        ("observables", "dump (lambda, value) rows over a grid"),
        ("profile", "violation profile over sliding windows"),
        ("scaling", "pseudo-critical points and scaling exponent"),
        ("table1", "4x4 exponent table over k and distances"),
        ("benford", "digit-conformance report for a numeric file"),
    ):
        sp = sub.add_parser(name, help=helptext)
        if name == "benford":
            sp.add_argument("path", help="file of one number per line")
        common(sp)
    return parser


def resolve_config(args) -> RunConfig:
    values = dataclasses.asdict(RunConfig())
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    if getattr(args, "coarse", None) and getattr(args, "full", None):
        raise UsageError("--coarse and --full are mutually exclusive")
    if getattr(args, "coarse", None):
        values.update(preset="coarse", epsilon=COARSE_EPSILON, n=COARSE_N)
    if getattr(args, "full", None):
        values.update(preset="full", epsilon=FULL_EPSILON, n=None)
    explicit_n = False
    for key in _CONFIG_PARSERS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        if key == "n_sites":
            values[key] = _parse_sites(flag)
        elif key == "fit_window":
            try:
                values[key] = _parse_fit_window(flag)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        else:
            values[key] = flag
        if key == "n":
            explicit_n = True
    if values["auto_n"]:
        if explicit_n:
            raise UsageError("--n and --auto-n are mutually exclusive")
        values["n"] = None
    try:
        cfg = RunConfig(**values)
        ObservableKind.parse(cfg.observable)  # validate early
        if cfg.k not in (1, 2, 3, 4):
            raise ValueError(f"digit depth must be 1..4, got {cfg.k}")
        if cfg.distance not in ("md", "sd", "bd"):
            raise ValueError(f"unknown distance {cfg.distance!r}")
        if cfg.scaling_mode not in ("fixed", "free"):
            raise ValueError(f"unknown scaling mode {cfg.scaling_mode!r}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return cfg


def _curve(cfg: RunConfig, size, kind_name=None) -> ObservableCurve:
    kind = ObservableKind.parse(kind_name or cfg.observable)
    return ObservableCurve(kind, gamma=cfg.gamma, beta_tilde=cfg.beta_tilde, size=size)


def _outpath(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)
    print(f"wrote {path}")


def cmd_observables(cfg: RunConfig) -> int:
    sizes = cfg.sizes_or((None,))
    if len(sizes) != 1:
        raise UsageError("observables takes exactly one --n-sites value")
    n = cfg.n if cfg.n is not None else 201
    if n < 1:
        raise UsageError(f"empty grid: n = {n}")
    curve = _curve(cfg, sizes[0])
    lams = np.linspace(cfg.a, cfg.b, n)
    vals = np.asarray(curve(lams), dtype=float)
    lines = ["lambda,value"]
    lines += [f"{fmt17(l)},{fmt17(v)}" for l, v in zip(lams, vals)]
    _write(_outpath(cfg, "observables.csv"), "\n".join(lines) + "\n")
    return EXIT_OK


_PLOT_TEMPLATE = """\
# gnuplot script; run as: gnuplot {name}
set datafile separator ","
set xlabel "lambda"
set ylabel "Delta_{distance}({observable}), k={k}"
set key off
set grid
plot "{csv}" every ::1 using 1:2 with lines lw 2
pause -1 "press enter to close"
"""


def cmd_profile(cfg: RunConfig) -> int:
    sizes = cfg.sizes_or((40,))
    if len(sizes) != 1:
        raise UsageError("profile takes exactly one --n-sites value")
    curve = _curve(cfg, sizes[0])
    n = cfg.resolved_n(cfg.k)
    if n is None:
        probe = WindowSpec(cfg.a, cfg.b, cfg.w, cfg.epsilon, COARSE_N)
        res = convergence_check(
            curve, probe, cfg.k, cfg.distance, jobs=cfg.resolved_jobs()
        )
        print(f"auto-n: converged at n = {res.n} (deviation {res.deviation:.3g})")
        n = res.n
    spec = WindowSpec(cfg.a, cfg.b, cfg.w, cfg.epsilon, n)
    prof = profile_windows(curve, spec, cfg.k, cfg.distance, jobs=cfg.resolved_jobs())
    csv_path = _outpath(cfg, "profile.csv")
    _write(csv_path, profile_csv_text(prof))
    _write(_outpath(cfg, "profile.meta"), profile_meta_text(prof))
    if cfg.emit_plot:
        script = _PLOT_TEMPLATE.format(
            name="profile.gp", csv="profile.csv",
            distance=cfg.distance, observable=prof.meta.observable, k=cfg.k,
        )
        _write(_outpath(cfg, "profile.gp"), script)
    return EXIT_OK


def _pseudo_criticals(cfg: RunConfig, kind_name, sizes, ks, distances):
    """lambda_c^N per (k, distance, N) sharing one sampling pass per (N, n)."""
    points = {}
    for size in sizes:
        curve = _curve(cfg, size, kind_name)
        by_n = {}
        for k in ks:
            by_n.setdefault(cfg.resolved_n(k), []).append(k)
        for n, k_group in sorted(by_n.items()):
            spec = WindowSpec(cfg.a, cfg.b, cfg.w, cfg.epsilon, n)
            profs = profile_set(
                curve, spec, k_group, distances, jobs=cfg.resolved_jobs()
            )
            for (k, d), prof in profs.items():
                try:
                    lc, _ = sc.profile_pseudo_critical(list(prof.points), cfg.fit_window)
                    points.setdefault((k, d), []).append((size, lc))
                except (sc.FitError, ValueError) as exc:
                    print(
                        f"warning: {kind_name or cfg.observable} N={size} k={k} "
                        f"{d}: {exc}",
                        file=sys.stderr,
                    )
    return points


def cmd_scaling(cfg: RunConfig) -> int:
    sizes = cfg.sizes_or(SCALING_SIZES)
    if any(s is None for s in sizes):
        raise UsageError("scaling needs finite system sizes")
    if len(sizes) < 3:
        raise UsageError(f"scaling needs >= 3 system sizes, got {len(sizes)}")
    points = _pseudo_criticals(cfg, None, sizes, [cfg.k], [cfg.distance])
    pts = points.get((cfg.k, cfg.distance), [])
    result = sc.scaling_fit(pts, cfg.scaling_mode, cfg.lambda_c)
    record = sc.scaling_record_text(result)
    sys.stdout.write(record)
    _write(_outpath(cfg, "scaling.txt"), record)
    _write(_outpath(cfg, "regression.csv"), sc.regression_csv_text(result))
    return EXIT_OK


TABLE1_COLUMNS = (("mz", "md"), ("mz", "sd"), ("mz", "bd"), ("txx", "md"))


def cmd_table1(cfg: RunConfig) -> int:
    sizes = cfg.sizes_or(SCALING_SIZES)
    if any(s is None for s in sizes):
        raise UsageError("table1 needs finite system sizes")
    if len(sizes) < 3:
        raise UsageError(f"scaling needs >= 3 system sizes, got {len(sizes)}")
    ks = (1, 2, 3, 4)
    cells = {}
    for obs in ("mz", "txx"):
        dists = [d for o, d in TABLE1_COLUMNS if o == obs]
        points = _pseudo_criticals(cfg, obs, sizes, ks, dists)
        for (k, d), pts in points.items():
            try:
                cells[(obs, d, k)] = sc.scaling_fit(pts, cfg.scaling_mode, cfg.lambda_c)
            except (sc.FitError, ValueError) as exc:
                print(f"warning: cell {obs}/{d}/k={k} failed: {exc}", file=sys.stderr)
    header = ["k"]
    for obs, d in TABLE1_COLUMNS:
        header += [f"q_{d}_{obs}", f"resid_{d}_{obs}"]
    lines = [",".join(header)]
    for k in ks:
        row = [str(k)]
        for obs, d in TABLE1_COLUMNS:
            cell = cells.get((obs, d, k))
            row += ["", ""] if cell is None else [fmt17(cell.q), fmt17(cell.fit_residual)]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    _write(_outpath(cfg, "table1.csv"), text)
    return EXIT_OK


def _read_numeric_file(path: str) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            tok = raw.strip().rstrip(",")
            if not tok:
                continue
            try:
                values.append(float(tok))
            except ValueError:
                raise InputFormatError(
                    f"{path}:{lineno}: malformed numeric token {tok!r}"
                ) from None
    return np.array(values)


def cmd_benford(cfg: RunConfig, path: str) -> int:
    data = _read_numeric_file(path)
    if data.size == 0:
        raise InputFormatError(f"{path}: no usable rows")
    observed = benford.observed_table(data, cfg.k)
    expected = benford.expected_table(observed.total, cfg.k)
    lo, _ = benford.key_bounds(cfg.k)
    print(f"file: {path}  values: {data.size}  binned: {fmt17(observed.total)}  k: {cfg.k}")
    print("key,observed,expected")
    for i, (o, e) in enumerate(zip(observed.counts, expected.counts)):
        print(f"{lo + i},{fmt17(o)},{fmt17(e)}")
    for name in ("md", "sd", "bd"):
        val = benford.DISTANCES[name](observed, expected)
        marker = " *" if name == cfg.distance else ""
        print(f"delta_{name} = {fmt17(val)}{marker}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        if args.command == "observables":
            return cmd_observables(cfg)
        if args.command == "profile":
            return cmd_profile(cfg)
        if args.command == "scaling":
            return cmd_scaling(cfg)
        if args.command == "table1":
            return cmd_table1(cfg)
        if args.command == "benford":
            return cmd_benford(cfg, args.path)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error[usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputFormatError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, QuadratureError, ConvergenceError) as exc:
        print(f"error[numeric]: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
