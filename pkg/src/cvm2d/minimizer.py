"""Two-stage free energy minimization at fixed activation fraction.

Stage one flips randomly chosen units of the over-represented state until the
fraction of A units is within tolerance of the target. Stage two repeatedly
exchanges a random A unit with a random B unit and keeps the exchange only if
the free energy strictly drops. Exchanges never change the A count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .configuration import ConfigFractions, IncrementalCounter, to_fractions
from .errors import ConfigError, DegenerateCompositionError
from .lattice import A, Grid, generate_random
from .thermodynamics import EnthalpyForm, ThermoState, eps_from_h, free_energy, free_energy_from_counts

__all__ = [
    "DescentParams",
    "DescentStep",
    "DescentTrace",
    "PhaseResult",
    "TrialRecord",
    "adjust_x1",
    "descend",
    "perturb",
    "run_trial",
]

DEFAULT_MAX_SWAP_ATTEMPTS = 200
DEFAULT_STALL_LIMIT = 400


@dataclass(frozen=True)
class DescentParams:
    x1_target: float
    h: float
    x1_tolerance: float | None = None  # None -> one unit, 1/(2N)
    max_swap_attempts: int = DEFAULT_MAX_SWAP_ATTEMPTS
    stall_limit: int = DEFAULT_STALL_LIMIT
    enthalpy_form: EnthalpyForm = EnthalpyForm.CURRENT
    triplet_mode: str = "horizontal"

    def __post_init__(self) -> None:
        if not 0.0 < self.x1_target < 1.0:
            raise ConfigError(f"x1 target must lie in (0, 1), got {self.x1_target}")
        if not self.h > 0:
            raise ConfigError(f"h must be positive, got {self.h}")
        if self.x1_tolerance is not None and not self.x1_tolerance > 0:
            raise ConfigError("x1 tolerance must be positive")
        if self.max_swap_attempts < 1 or self.stall_limit < 1:
            raise ConfigError("descent limits must be positive")
        object.__setattr__(self, "enthalpy_form", EnthalpyForm.parse(self.enthalpy_form))
        if self.triplet_mode not in ("horizontal", "full"):
            raise ConfigError(f"unknown triplet mode {self.triplet_mode!r}")

    def tolerance_for(self, n_units: int) -> float:
        if self.x1_tolerance is None:
            return 1.0 / (2 * n_units)
        return self.x1_tolerance


class DescentStep(NamedTuple):
    attempt: int
    accepted: bool
    free_energy: float


@dataclass
class DescentTrace:
    initial_free_energy: float
    steps: list[DescentStep] = field(default_factory=list)
    # x1 recomputed from the cells after every accepted exchange
    x1_history: list[float] = field(default_factory=list)
    fractions: ConfigFractions | None = None
    thermo: ThermoState | None = None

    @property
    def accepted_free_energies(self) -> list[float]:
        return [s.free_energy for s in self.steps if s.accepted]

    @property
    def attempts(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class PhaseResult:
    """Minimized state recorded before or after perturbation."""

    grid: Grid
    fractions: ConfigFractions
    thermo: ThermoState


@dataclass
class TrialRecord:
    params: DescentParams
    perturb_fraction: float
    pre: PhaseResult
    post: PhaseResult
    pre_trace: DescentTrace
    post_trace: DescentTrace


def _allowed_counts(n: int, target: float, tol: float) -> range:
    lo = math.ceil((target - tol) * n - 1e-9)
    hi = math.floor((target + tol) * n + 1e-9)
    return range(max(lo, 0), min(hi, n) + 1)


def adjust_x1(grid: Grid, x1_target: float, x1_tolerance: float | None, rng: np.random.Generator) -> Grid:
    """Flip random units of the surplus state until x1 is within tolerance."""
    n = grid.size
    tol = 1.0 / (2 * n) if x1_tolerance is None else x1_tolerance
    allowed = _allowed_counts(n, x1_target, tol)
    if len(allowed) == 0:
        raise ConfigError(
            f"no A count on a {n}-unit grid is within {tol} of x1 = {x1_target}"
        )
    cells = list(grid.cells)
    count = sum(cells)
    while count not in allowed:
        surplus = A if count > allowed.stop - 1 else 1 - A
        candidates = [i for i, v in enumerate(cells) if v == surplus]
        i = candidates[int(rng.integers(len(candidates)))]
        cells[i] ^= 1
        count += -1 if surplus == A else 1
    if cells == list(grid.cells):
        return grid
    return Grid(grid.rows, grid.cols, tuple(cells))


def _evaluate(counter: IncrementalCounter, params: DescentParams) -> tuple[ConfigFractions, ThermoState]:
    f = to_fractions(counter.counts())
    return f, free_energy(f, params.h, params.enthalpy_form)


def descend(grid: Grid, params: DescentParams, rng: np.random.Generator) -> tuple[Grid, DescentTrace]:
    """Stochastic swap descent on the free energy at fixed A count.

    Stops after ``max_swap_attempts`` exchanges or ``stall_limit``
    consecutive rejections, whichever comes first.
    """
    n_a = grid.count_a
    if n_a == 0 or n_a == grid.size:
        raise DegenerateCompositionError(
            "grid holds a single state; no A/B exchange is possible"
        )
    counter = IncrementalCounter(grid, params.triplet_mode)
    a_pos = [i for i, v in enumerate(grid.cells) if v == A]
    b_pos = [i for i, v in enumerate(grid.cells) if v != A]
    n_b = len(b_pos)

    eps1 = eps_from_h(params.h)
    form = params.enthalpy_form
    g = free_energy_from_counts(counter, eps1, form)
    trace = DescentTrace(initial_free_energy=g)
    stall = 0
    max_attempts = params.max_swap_attempts
    # drawn up front so the stream consumed does not depend on when descent stops
    draws = rng.random((max_attempts, 2))
    cells = counter.cells
    size = counter.size

    for attempt in range(max_attempts):
        ka = int(draws[attempt, 0] * n_a)
        kb = int(draws[attempt, 1] * n_b)
        ia, ib = a_pos[ka], b_pos[kb]
        counter.swap(ia, ib)
        cand = free_energy_from_counts(counter, eps1, form)
        if cand < g:
            g = cand
            a_pos[ka], b_pos[kb] = ib, ia
            stall = 0
            trace.steps.append(DescentStep(attempt, True, g))
            trace.x1_history.append(sum(cells) / size)
        else:
            counter.undo()
            stall += 1
            trace.steps.append(DescentStep(attempt, False, g))
        if stall >= params.stall_limit:
            break

    final = counter.grid()
    trace.fractions, trace.thermo = _evaluate(counter, params)
    return final, trace


def perturb(grid: Grid, fraction: float, rng: np.random.Generator) -> Grid:
    """Toggle ``round(fraction * N)`` distinct, uniformly chosen units."""
    if not 0.0 < fraction < 1.0:
        raise ConfigError(f"perturbation fraction must lie in (0, 1), got {fraction}")
    k = int(math.floor(fraction * grid.size + 0.5))
    if k == 0:
        warnings.warn(
            f"perturbation fraction {fraction} toggles no units on a {grid.size}-unit grid",
            RuntimeWarning,
            stacklevel=2,
        )
        return grid
    chosen = rng.choice(grid.size, size=k, replace=False)
    cells = list(grid.cells)
    for i in chosen:
        cells[int(i)] ^= 1
    return Grid(grid.rows, grid.cols, tuple(cells))


def _minimize(grid: Grid, params: DescentParams, rng: np.random.Generator) -> tuple[PhaseResult, DescentTrace]:
    grid = adjust_x1(grid, params.x1_target, params.tolerance_for(grid.size), rng)
    grid, trace = descend(grid, params, rng)
    return PhaseResult(grid, trace.fractions, trace.thermo), trace


def run_trial(
    params: DescentParams,
    perturb_fraction: float,
    rng: np.random.Generator,
    rows: int = 16,
    cols: int = 16,
) -> TrialRecord:
    """Generate, minimize, perturb, and minimize again."""
    grid = generate_random(rows, cols, params.x1_target, rng)
    pre, pre_trace = _minimize(grid, params, rng)
    shaken = perturb(pre.grid, perturb_fraction, rng)
    post, post_trace = _minimize(shaken, params, rng)
    return TrialRecord(params, perturb_fraction, pre, post, pre_trace, post_trace)


def with_h(params: DescentParams, h: float) -> DescentParams:
    return replace(params, h=h)
