"""h-sweep experiments with trial averaging, and their CSV rendering.

Every (h, trial) cell draws from its own generator seeded by
``SeedSequence([seed, h_index, trial_index])``, so extending the h range never
reshuffles the cells already present, and cells can run in any order.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, TextIO

import numpy as np

from .configuration import PAIR_DEGENERACY, TRIPLET_DEGENERACY
from .errors import ConfigError, InvalidGeometryError
from .lattice import check_dims
from .minimizer import (
    DEFAULT_MAX_SWAP_ATTEMPTS,
    DEFAULT_STALL_LIMIT,
    DescentParams,
    PhaseResult,
    TrialRecord,
    run_trial,
)
from .thermodynamics import EnthalpyForm

__all__ = [
    "CSV_HEADER",
    "PHASES",
    "RunConfig",
    "SweepRow",
    "h_values",
    "trial_rng",
    "iter_trials",
    "summarize",
    "run_sweep",
    "write_sweep_csv",
    "read_sweep_csv",
    "sweep_csv_text",
]

CSV_HEADER = (
    "h,x1,y1,y2,y3,w1,w2,w3,z1,z2,z3,z4,z5,z6,"
    "delta,enthalpy,neg_entropy,free_energy,phase,trials"
)
PHASES = ("pre_perturb", "post_perturb")
_VALUE_COLUMNS = CSV_HEADER.split(",")[1:-2]


@dataclass(frozen=True)
class RunConfig:
    rows: int = 16
    cols: int = 16
    x1: float = 0.35
    h_min: float = 0.8
    h_max: float = 1.8
    h_step: float = 0.1
    trials: int = 20
    perturb_fraction: float = 0.1
    seed: int = 0
    triplet_mode: str = "horizontal"
    enthalpy_form: EnthalpyForm = EnthalpyForm.CURRENT
    max_swaps: int = DEFAULT_MAX_SWAP_ATTEMPTS
    stall_limit: int = DEFAULT_STALL_LIMIT
    x1_tolerance: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "enthalpy_form", EnthalpyForm.parse(self.enthalpy_form))
        try:
            check_dims(self.rows, self.cols)
        except InvalidGeometryError as exc:
            raise ConfigError(str(exc)) from None
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not 0.0 < self.perturb_fraction < 1.0:
            raise ConfigError("perturb fraction must lie in (0, 1)")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        h_values(self.h_min, self.h_max, self.h_step)
        self.params(self.h_min)

    def params(self, h: float) -> DescentParams:
        return DescentParams(
            x1_target=self.x1,
            h=h,
            x1_tolerance=self.x1_tolerance,
            max_swap_attempts=self.max_swaps,
            stall_limit=self.stall_limit,
            enthalpy_form=self.enthalpy_form,
            triplet_mode=self.triplet_mode,
        )

    @property
    def h_grid(self) -> list[float]:
        return h_values(self.h_min, self.h_max, self.h_step)


def h_values(h_min: float, h_max: float, h_step: float) -> list[float]:
    """Inclusive grid ``h_min + k*h_step``; ``h_max`` is kept if within half a step."""
    if not (h_min > 0 and h_max >= h_min and h_step > 0):
        raise ConfigError(
            f"invalid h range: min={h_min}, max={h_max}, step={h_step}"
        )
    out = []
    k = 0
    while h_min + k * h_step <= h_max + 0.5 * h_step:
        out.append(round(h_min + k * h_step, 12))
        k += 1
    if out[-1] > h_max and len(out) > 1 and out[-1] - h_max > 1e-9:
        # the half-step allowance rounds onto h_max, never past it
        out[-1] = h_max
    return out


def trial_rng(seed: int, h_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, h_index, trial_index]))


def _run_cell(args: tuple[RunConfig, int, int]) -> TrialRecord:
    cfg, hi, ti = args
    rng = trial_rng(cfg.seed, hi, ti)
    return run_trial(cfg.params(cfg.h_grid[hi]), cfg.perturb_fraction, rng, cfg.rows, cfg.cols)


def iter_trials(cfg: RunConfig) -> Iterator[tuple[int, int, TrialRecord]]:
    """Yield ``(h_index, trial_index, record)`` in (h, trial) order."""
    cells = [(cfg, hi, ti) for hi in range(len(cfg.h_grid)) for ti in range(cfg.trials)]
    if cfg.workers == 1:
        for cell in cells:
            yield cell[1], cell[2], _run_cell(cell)
        return
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        for cell, rec in zip(cells, pool.map(_run_cell, cells, chunksize=1)):
            yield cell[1], cell[2], rec


@dataclass(frozen=True)
class SweepRow:
    h: float
    phase: str
    trials: int
    x1: float
    y1: float
    y2: float
    y3: float
    w1: float
    w2: float
    w3: float
    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float
    delta: float
    enthalpy: float
    neg_entropy: float
    free_energy: float

    @property
    def y(self) -> tuple[float, float, float]:
        return (self.y1, self.y2, self.y3)

    @property
    def w(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)

    @property
    def z(self) -> tuple[float, ...]:
        return (self.z1, self.z2, self.z3, self.z4, self.z5, self.z6)

    def normalization_residuals(self) -> tuple[float, float, float]:
        return (
            sum(b * v for b, v in zip(PAIR_DEGENERACY, self.y)) - 1.0,
            sum(b * v for b, v in zip(PAIR_DEGENERACY, self.w)) - 1.0,
            sum(g * v for g, v in zip(TRIPLET_DEGENERACY, self.z)) - 1.0,
        )


def _phase_values(res: PhaseResult) -> dict[str, float]:
    f, t = res.fractions, res.thermo
    vals = {"x1": f.x[0]}
    vals.update({f"y{i + 1}": v for i, v in enumerate(f.y)})
    vals.update({f"w{i + 1}": v for i, v in enumerate(f.w)})
    vals.update({f"z{i + 1}": v for i, v in enumerate(f.z)})
    vals.update(
        delta=t.delta,
        enthalpy=t.enthalpy,
        neg_entropy=t.neg_entropy,
        free_energy=t.free_energy,
    )
    return vals


def summarize(h: float, records: Sequence[TrialRecord]) -> list[SweepRow]:
    """Average the pre- and post-perturbation minima over ``records``."""
    if not records:
        raise ValueError("no trial records to summarize")
    rows = []
    for phase in PHASES:
        per_trial = [_phase_values(getattr(rec, phase.split("_")[0])) for rec in records]
        means = {k: float(np.mean([v[k] for v in per_trial])) for k in _VALUE_COLUMNS}
        rows.append(SweepRow(h=h, phase=phase, trials=len(records), **means))
    return rows


def run_sweep(
    cfg: RunConfig,
    on_trial: Callable[[int, int, TrialRecord], None] | None = None,
) -> list[SweepRow]:
    """One pre- and one post-perturbation row per h value.

    ``on_trial`` sees every trial record as it completes; records are not
    retained otherwise.
    """
    grid = cfg.h_grid
    rows: list[SweepRow] = []
    bucket: list[TrialRecord] = []
    for hi, ti, rec in iter_trials(cfg):
        if on_trial is not None:
            on_trial(hi, ti, rec)
        bucket.append(_strip(rec))
        if ti == cfg.trials - 1:
            rows.extend(summarize(grid[hi], bucket))
            bucket = []
    return rows


def _strip(rec: TrialRecord) -> TrialRecord:
    # drop the per-attempt traces once the caller has seen them
    rec.pre_trace.steps.clear()
    rec.post_trace.steps.clear()
    return rec


def _fmt(v: float) -> str:
    s = format(v, ".6g")
    return "0" if s == "-0" else s


def write_sweep_csv(rows: Sequence[SweepRow], stream: TextIO) -> None:
    stream.write(CSV_HEADER + "\n")
    for r in rows:
        vals = [_fmt(r.h)] + [_fmt(getattr(r, k)) for k in _VALUE_COLUMNS]
        vals += [r.phase, str(r.trials)]
        stream.write(",".join(vals) + "\n")


def sweep_csv_text(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()


def read_sweep_csv(stream: TextIO) -> list[SweepRow]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or ",".join(reader.fieldnames) != CSV_HEADER:
        raise ValueError("not a sweep CSV: header mismatch")
    out = []
    for rec in reader:
        out.append(
            SweepRow(
                h=float(rec["h"]),
                phase=rec["phase"],
                trials=int(rec["trials"]),
                **{k: float(rec[k]) for k in _VALUE_COLUMNS},
            )
        )
    return out

