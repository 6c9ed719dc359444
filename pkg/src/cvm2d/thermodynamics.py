"""Enthalpy, CVM configurational entropy and free energy per unit (k_B T = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .configuration import PAIR_DEGENERACY, TRIPLET_DEGENERACY, ConfigFractions, delta

__all__ = [
    "EnthalpyForm",
    "ThermoState",
    "H_TO_EPS_SCALE",
    "eps_from_h",
    "h_from_eps",
    "enthalpy",
    "enthalpy_z_form",
    "entropy",
    "free_energy",
    "free_energy_from_counts",
]

# eps1 = H_TO_EPS_SCALE * ln(h); the only place the h <-> eps1 convention lives
H_TO_EPS_SCALE = 4.0


class EnthalpyForm(str, Enum):
    """Which interaction enthalpy to use.

    ``PREVIOUS`` is eps1 * 2*y2; ``CURRENT`` is eps1 * (2*y2 - y1 - y3).
    """

    PREVIOUS = "2y2"
    CURRENT = "delta"

    @classmethod
    def parse(cls, value: "EnthalpyForm | str") -> "EnthalpyForm":
        if isinstance(value, cls):
            return value
        aliases = {"previous2y2": cls.PREVIOUS, "currentdelta": cls.CURRENT}
        key = str(value).strip()
        if key.lower() in aliases:
            return aliases[key.lower()]
        return cls(key)


@dataclass(frozen=True)
class ThermoState:
    h: float
    eps1: float
    enthalpy_form: EnthalpyForm
    enthalpy: float
    neg_entropy: float
    free_energy: float
    delta: float

    @property
    def entropy(self) -> float:
        return -self.neg_entropy


def eps_from_h(h: float) -> float:
    """Interaction enthalpy parameter for a given ``h``; zero at ``h = 1``."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    return H_TO_EPS_SCALE * math.log(h)


def h_from_eps(eps1: float) -> float:
    return math.exp(eps1 / H_TO_EPS_SCALE)


def enthalpy(f: ConfigFractions, eps1: float, form: EnthalpyForm | str = EnthalpyForm.CURRENT) -> float:
    form = EnthalpyForm.parse(form)
    if form is EnthalpyForm.PREVIOUS:
        return eps1 * 2.0 * f.y[1]
    return eps1 * delta(f)


def enthalpy_z_form(f: ConfigFractions, eps1: float, form: EnthalpyForm | str = EnthalpyForm.CURRENT) -> float:
    """Same enthalpy written in triplet variables; equals :func:`enthalpy` on any grid."""
    form = EnthalpyForm.parse(form)
    z = f.z
    if form is EnthalpyForm.PREVIOUS:
        return eps1 * (z[1] + z[2] + z[3] + z[4])
    return eps1 * (z[2] + z[3] - z[0] - z[5])


def _lf(v: float) -> float:
    if v < 0.0 or v > 1.0 + 1e-12:
        raise ValueError(f"fraction {v} outside [0, 1]")
    return v * math.log(v) if v > 0.0 else 0.0


def entropy(f: ConfigFractions) -> float:
    """CVM entropy per unit.

    S = 2 sum b_i L(y_i) + sum b_i L(w_i) - sum L(x_i) - 2 sum g_i L(z_i),
    with L(v) = v ln v. Evaluates to ln 2 for the uncorrelated equiprobable
    state and to 0 for fully ordered grids.
    """
    # fsum over the individual terms so exact cancellations come out as 0.0
    terms = [2.0 * b * _lf(v) for b, v in zip(PAIR_DEGENERACY, f.y)]
    terms += [b * _lf(v) for b, v in zip(PAIR_DEGENERACY, f.w)]
    terms += [-_lf(v) for v in f.x]
    terms += [-2.0 * g * _lf(v) for g, v in zip(TRIPLET_DEGENERACY, f.z)]
    return math.fsum(terms)


def free_energy(f: ConfigFractions, h: float, form: EnthalpyForm | str = EnthalpyForm.CURRENT) -> ThermoState:
    form = EnthalpyForm.parse(form)
    eps1 = eps_from_h(h)
    hh = enthalpy(f, eps1, form)
    s = entropy(f)
    return ThermoState(
        h=h,
        eps1=eps1,
        enthalpy_form=form,
        enthalpy=hh,
        neg_entropy=-s,
        free_energy=hh - s,
        delta=delta(f),
    )


@lru_cache(maxsize=8)
def _clogc_table(limit: int) -> tuple[float, ...]:
    return (0.0,) + tuple(c * math.log(c) for c in range(1, limit + 1))


_LN2 = math.log(2.0)


def free_energy_from_counts(counts, eps1: float, form: EnthalpyForm) -> float:
    """Free energy straight from integer tallies.

    Each degeneracy-weighted sum of v*ln(v) collapses to
    ``(sum c*ln(c) - c_mixed*ln 2) / total - ln(total)``, so the descent inner
    loop needs only table lookups. Must agree with :func:`free_energy`.
    """
    cx, cy, cw, cz = counts.cx, counts.cy, counts.cw, counts.cz
    n = cx[0] + cx[1]
    p = counts.pair_total
    t = counts.triplet_total
    L = _clogc_table(max(n, p, t))
    sy = (L[cy[0]] + L[cy[1]] + L[cy[2]] - cy[1] * _LN2) / p - math.log(p)
    sw = (L[cw[0]] + L[cw[1]] + L[cw[2]] - cw[1] * _LN2) / p - math.log(p)
    sx = (L[cx[0]] + L[cx[1]]) / n - math.log(n)
    sz = (
        L[cz[0]] + L[cz[1]] + L[cz[2]] + L[cz[3]] + L[cz[4]] + L[cz[5]]
        - (cz[1] + cz[4]) * _LN2
    ) / t - math.log(t)
    s = 2.0 * sy + sw - sx - 2.0 * sz
    if form is EnthalpyForm.PREVIOUS:
        hh = eps1 * cy[1] / p
    else:
        hh = eps1 * (cy[1] - cy[0] - cy[2]) / p
    return hh - s
