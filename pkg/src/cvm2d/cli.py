"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O or input-file
error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import __version__
from .analytic import analytic_table
from .configuration import brute_force_count, count_configs, identity_residuals, to_fractions
from .errors import ConfigError, GridFormatError
from .lattice import generate_random, read_grid, save_grid
from .minimizer import DEFAULT_MAX_SWAP_ATTEMPTS, DEFAULT_STALL_LIMIT, DescentParams, adjust_x1, descend
from .plot import sweep_svg
from .sweep import RunConfig, read_sweep_csv, run_sweep, write_sweep_csv
from .thermodynamics import EnthalpyForm, free_energy

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

IDENTITY_TOL = 1e-12

# flag dest -> (type, default); the config file accepts the same names
_OPTIONS = {
    "rows": (int, 16),
    "cols": (int, 16),
    "x1": (float, 0.35),
    "h_min": (float, 0.8),
    "h_max": (float, 1.8),
    "h_step": (float, 0.1),
    "h": (float, 1.0),
    "trials": (int, 20),
    "perturb_fraction": (float, 0.1),
    "seed": (int, 0),
    "triplet_mode": (str, "horizontal"),
    "enthalpy_form": (str, EnthalpyForm.CURRENT.value),
    "max_swaps": (int, DEFAULT_MAX_SWAP_ATTEMPTS),
    "stall_limit": (int, DEFAULT_STALL_LIMIT),
    "x1_tolerance": (float, None),
    "workers": (int, 1),
    "out": (str, None),
    "svg": (str, None),
    "sizes": (str, "4x4,6x6,8x8"),
    "sweep_csv": (str, None),
    "include_divergences": (bool, False),
    "minimize": (bool, False),
}

_HELP = {
    "rows": "grid rows (even, >= 4)",
    "cols": "grid columns (>= 4)",
    "x1": "target fraction of A units",
    "h_min": "first h value",
    "h_max": "last h value (kept if within half a step)",
    "h_step": "h increment",
    "h": "interaction parameter for single-point commands",
    "trials": "trials per h value (validate: grids per size)",
    "perturb_fraction": "fraction of units toggled between the two minimizations",
    "seed": "master seed",
    "triplet_mode": "which triplets to count",
    "enthalpy_form": "2y2: eps1*2*y2; delta: eps1*(2*y2 - y1 - y3)",
    "max_swaps": "swap attempts per descent",
    "stall_limit": "stop after this many consecutive rejections",
    "x1_tolerance": "allowed |x1 - target| (default: half a unit)",
    "workers": "worker processes for the sweep",
    "out": "output path (default: stdout)",
    "svg": "also write an SVG plot here",
    "sizes": "comma-separated RxC grid sizes",
    "sweep_csv": "sweep CSV (run at x1 = 0.5) supplying an experimental z3 column",
    "include_divergences": "insert rows at the exact divergence points",
    "minimize": "run the swap descent at --h before writing",
}

_CHOICES = {
    "triplet_mode": ("horizontal", "full"),
    "enthalpy_form": ("2y2", "delta"),
}

_COMMAND_OPTIONS = {
    "sweep": ("rows", "cols", "x1", "h_min", "h_max", "h_step", "trials", "perturb_fraction",
              "seed", "triplet_mode", "enthalpy_form", "max_swaps", "stall_limit",
              "x1_tolerance", "workers", "out", "svg"),
    "analytic": ("h_min", "h_max", "h_step", "sweep_csv", "include_divergences", "out"),
    "count": ("h", "triplet_mode", "enthalpy_form", "out"),
    "generate": ("rows", "cols", "x1", "seed", "x1_tolerance", "minimize", "h", "triplet_mode",
                 "enthalpy_form", "max_swaps", "stall_limit", "out"),
    "validate": ("sizes", "trials", "seed", "out"),
}
_COMMAND_OPTIONS["perturb-sweep"] = _COMMAND_OPTIONS["sweep"]


class UsageError(Exception):
    pass


def _add_options(p: argparse.ArgumentParser, names: Sequence[str]) -> None:
    for name in names:
        kind, default = _OPTIONS[name]
        flag = "--" + name.replace("_", "-")
        help_ = _HELP[name] + ("" if default is None else f" (default: {default})")
        if kind is bool:
            p.add_argument(flag, action="store_true", default=argparse.SUPPRESS, help=_HELP[name])
        else:
            p.add_argument(flag, type=kind, choices=_CHOICES.get(name),
                           default=argparse.SUPPRESS, help=help_)
    p.add_argument("--config", default=None, help="key=value file mirroring the flags; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvm2d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (
        ("sweep", "minimize over an h range and write the averaged CSV"),
        ("perturb-sweep", "alias of sweep"),
    ):
        _add_options(sub.add_parser(name, help=help_), _COMMAND_OPTIONS[name])
    _add_options(sub.add_parser("analytic", help="closed-form z3(h) table for x1 = 0.5"),
                 _COMMAND_OPTIONS["analytic"])
    p = sub.add_parser("count", help="configuration counts and thermodynamics of a grid file")
    p.add_argument("grid", help="grid file")
    _add_options(p, _COMMAND_OPTIONS["count"])
    _add_options(sub.add_parser("generate", help="write a random grid file"),
                 _COMMAND_OPTIONS["generate"])
    _add_options(sub.add_parser("validate", help="check fast counting against the brute-force oracle"),
                 _COMMAND_OPTIONS["validate"])
    return parser


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config_file(path: str | Path) -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment, keys use flag names."""
    out: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in _OPTIONS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            kind = _OPTIONS[key][0]
            try:
                out[key] = _parse_bool(value) if kind is bool else kind(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
            if key in _CHOICES and out[key] not in _CHOICES[key]:
                raise ConfigError(f"{path}:{lineno}: {key} must be one of {_CHOICES[key]}")
    return out


def resolve_options(ns: argparse.Namespace) -> dict[str, object]:
    """Defaults, then config file, then explicit flags."""
    names = _COMMAND_OPTIONS[ns.command]
    opts = {n: _OPTIONS[n][1] for n in names}
    if ns.config:
        for key, value in load_config_file(ns.config).items():
            if key in opts:
                opts[key] = value
    for n in names:
        if hasattr(ns, n):
            opts[n] = getattr(ns, n)
    return opts


def _open_out(path: str | None) -> TextIO:
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _emit(text: str, path: str | None) -> None:
    fh = _open_out(path)
    try:
        fh.write(text)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _fmt(v: float | None) -> str:
    if v is None:
        return "div"
    s = format(v, ".6g")
    return "0" if s == "-0" else s


def cmd_sweep(opts: dict) -> int:
    cfg = RunConfig(
        rows=opts["rows"], cols=opts["cols"], x1=opts["x1"],
        h_min=opts["h_min"], h_max=opts["h_max"], h_step=opts["h_step"],
        trials=opts["trials"], perturb_fraction=opts["perturb_fraction"], seed=opts["seed"],
        triplet_mode=opts["triplet_mode"], enthalpy_form=opts["enthalpy_form"],
        max_swaps=opts["max_swaps"], stall_limit=opts["stall_limit"],
        x1_tolerance=opts["x1_tolerance"], workers=opts["workers"],
    )
    rows = run_sweep(cfg)
    fh = _open_out(opts["out"])
    try:
        write_sweep_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    if opts["svg"]:
        title = f"x1 = {cfg.x1}, {cfg.rows}x{cfg.cols}, {cfg.trials} trials, enthalpy {cfg.enthalpy_form.value}"
        _emit(sweep_svg(rows, title), opts["svg"])
    return EXIT_OK


def analytic_csv(opts: dict) -> str:
    table = analytic_table(opts["h_min"], opts["h_max"], opts["h_step"], opts["include_divergences"])
    experimental = None
    if opts["sweep_csv"]:
        with open(opts["sweep_csv"], encoding="utf-8") as fh:
            sweep_rows = read_sweep_csv(fh)
        pre = [r for r in sweep_rows if r.phase == "pre_perturb"]
        if any(abs(r.x1 - 0.5) > 0.01 for r in pre):
            raise ConfigError("the analytic comparison needs a sweep run at x1 = 0.5")
        experimental = {round(r.h, 9): r.z3 for r in pre}
    header = "h,z3_analyt1,z3_analyt2"
    if experimental is not None:
        header += ",z3_experimental"
    lines = [header]
    for pt in table:
        cols = [_fmt(pt.h), _fmt(pt.z3_analyt1), _fmt(pt.z3_analyt2)]
        if experimental is not None:
            z = experimental.get(round(pt.h, 9))
            cols.append("" if z is None else _fmt(z))
        lines.append(",".join(cols))
    return "\n".join(lines) + "\n"


def cmd_analytic(opts: dict) -> int:
    _emit(analytic_csv(opts), opts["out"])
    return EXIT_OK


def count_report(grid, h: float, mode: str, form: str) -> tuple[str, bool]:
    counts = count_configs(grid, mode)
    f = to_fractions(counts)
    res = identity_residuals(f)
    ok = all(abs(v) <= IDENTITY_TOL for v in res.values())
    t = free_energy(f, h, form)

    def row(label: str, vals) -> str:
        return f"{label:<10}" + " ".join(f"{_fmt(v):>10}" for v in vals)

    lines = [
        f"grid       {grid.rows}x{grid.cols} ({grid.size} units), triplet mode {mode}",
        row("count x", counts.cx),
        row("count y", counts.cy),
        row("count w", counts.cw),
        row("count z", counts.cz),
        f"totals     pairs {counts.pair_total}, triplets {counts.triplet_total}",
        row("x", f.x),
        row("y", f.y),
        row("w", f.w),
        row("z", f.z),
        f"identities {'PASS' if ok else 'FAIL'} (max residual {max(abs(v) for v in res.values()):.3g})",
        f"h          {_fmt(h)} (eps1 {_fmt(t.eps1)}, enthalpy form {t.enthalpy_form.value})",
        f"delta      {_fmt(t.delta)}",
        f"enthalpy   {_fmt(t.enthalpy)}",
        f"entropy    {_fmt(t.entropy)}",
        f"free energy {_fmt(t.free_energy)}",
    ]
    return "\n".join(lines) + "\n", ok


def cmd_count(opts: dict, grid_path: str) -> int:
    grid = read_grid(grid_path)
    text, ok = count_report(grid, opts["h"], opts["triplet_mode"], opts["enthalpy_form"])
    _emit(text, opts["out"])
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_generate(opts: dict) -> int:
    rng = np.random.default_rng(opts["seed"])
    if not 0.0 < opts["x1"] < 1.0:
        raise ConfigError("x1 must lie in (0, 1)")
    grid = generate_random(opts["rows"], opts["cols"], opts["x1"], rng)
    tol = opts["x1_tolerance"] if opts["x1_tolerance"] is not None else 1.0 / (2 * grid.size)
    grid = adjust_x1(grid, opts["x1"], tol, rng)
    comments = [f"seed {opts['seed']}, x1 target {opts['x1']}"]
    if opts["minimize"]:
        params = DescentParams(
            x1_target=opts["x1"], h=opts["h"], x1_tolerance=opts["x1_tolerance"],
            max_swap_attempts=opts["max_swaps"], stall_limit=opts["stall_limit"],
            enthalpy_form=opts["enthalpy_form"], triplet_mode=opts["triplet_mode"],
        )
        grid, trace = descend(grid, params, rng)
        comments.append(f"minimized at h {opts['h']}: free energy {_fmt(trace.thermo.free_energy)}")
    fh = _open_out(opts["out"])
    try:
        save_grid(grid, fh, comments)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            r, c = (int(v) for v in part.split("x"))
        except ValueError:
            raise UsageError(f"bad size {part!r}; expected RxC") from None
        sizes.append((r, c))
    if not sizes:
        raise UsageError("no grid sizes given")
    return sizes


def validate_report(sizes: Sequence[tuple[int, int]], trials: int, seed: int) -> tuple[str, bool]:
    """Compare fast and brute-force counts in both triplet modes on random grids."""
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    lines = []
    total = exact = 0
    for rows, cols in sizes:
        hits = 0
        for _ in range(trials):
            grid = generate_random(rows, cols, float(rng.random()), rng)
            if all(count_configs(grid, m) == brute_force_count(grid, m) for m in ("horizontal", "full")):
                hits += 1
        lines.append(f"{rows}x{cols}: {hits}/{trials} exact")
        total += trials
        exact += hits
    ok = exact == total
    lines.append(f"total: {exact}/{total} exact ({'PASS' if ok else 'FAIL'})")
    return "\n".join(lines) + "\n", ok


def cmd_validate(opts: dict) -> int:
    text, ok = validate_report(parse_sizes(opts["sizes"]), opts["trials"], opts["seed"])
    _emit(text, opts["out"])
    return EXIT_OK if ok else EXIT_VALIDATION


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = resolve_options(ns)
        if ns.command in ("sweep", "perturb-sweep"):
            return cmd_sweep(opts)
        if ns.command == "analytic":
            return cmd_analytic(opts)
        if ns.command == "count":
            return cmd_count(opts, ns.grid)
        if ns.command == "generate":
            return cmd_generate(opts)
        return cmd_validate(opts)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cvm2d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GridFormatError, OSError) as exc:
        print(f"cvm2d: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"cvm2d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
