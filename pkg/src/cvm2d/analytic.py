"""Closed-form equilibrium z3(h) for the equiprobable grid (x1 = x2 = 0.5).

Two enthalpy conventions give two curves. With enthalpy eps1*2*y2::

    z3 = (h^2 - 3)(h^2 + 1) / (8 (h^4 - 6 h^2 + 1))

and with eps1*(2*y2 - y1 - y3) the same expression in h^2 -> h^4::

    z3 = (h^4 - 3)(h^4 + 1) / (8 (h^8 - 6 h^4 + 1))

Both blow up where the denominator vanishes. A point is reported as
divergent (``None``) when the raw denominator is below ``DENOM_TOL`` or when
``h`` sits within ``ROOT_WINDOW`` of a denominator root, which covers the
3-decimal root values 0.644 and 1.554 for the second curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sweep import h_values

__all__ = [
    "AnalyticPoint",
    "DENOM_TOL",
    "ROOT_WINDOW",
    "z3_previous",
    "z3_current",
    "previous_divergences",
    "current_divergences",
    "analytic_table",
]

DENOM_TOL = 1e-9
ROOT_WINDOW = 5e-4

_SQRT2 = math.sqrt(2.0)
# h^2 = 3 +- 2*sqrt(2) = (sqrt(2) +- 1)^2
_PREV_ROOTS = (_SQRT2 - 1.0, _SQRT2 + 1.0)
_CUR_ROOTS = tuple(math.sqrt(r) for r in _PREV_ROOTS)


def previous_divergences() -> tuple[float, float]:
    return _PREV_ROOTS


def current_divergences() -> tuple[float, float]:
    """h values (about 0.6436 and 1.5538) where the current-enthalpy curve diverges."""
    return _CUR_ROOTS


def _closed_form(u: float, roots: tuple[float, ...], h: float) -> float | None:
    # u is h^2 for the previous form, h^4 for the current one
    denom = u * u - 6.0 * u + 1.0
    if abs(denom) < DENOM_TOL or any(abs(h - r) <= ROOT_WINDOW for r in roots):
        return None
    return (u - 3.0) * (u + 1.0) / (8.0 * denom)


def _check_h(h: float) -> None:
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")


def z3_previous(h: float) -> float | None:
    """Equilibrium z3 under the eps1*2*y2 enthalpy; ``None`` at a divergence."""
    _check_h(h)
    return _closed_form(h * h, _PREV_ROOTS, h)


def z3_current(h: float) -> float | None:
    """Equilibrium z3 under the eps1*(2*y2 - y1 - y3) enthalpy; ``None`` at a divergence."""
    _check_h(h)
    return _closed_form(h ** 4, _CUR_ROOTS, h)


@dataclass(frozen=True)
class AnalyticPoint:
    h: float
    z3_analyt1: float | None  # current enthalpy
    z3_analyt2: float | None  # previous enthalpy

    @property
    def divergent(self) -> bool:
        return self.z3_analyt1 is None or self.z3_analyt2 is None


def analytic_table(
    h_min: float, h_max: float, h_step: float, include_divergences: bool = False
) -> list[AnalyticPoint]:
    """Both curves over an inclusive h grid.

    With ``include_divergences`` the denominator roots lying inside
    ``[h_min, h_max]`` are inserted as extra rows, in h order.
    """
    hs = h_values(h_min, h_max, h_step)
    if include_divergences:
        extra = [r for r in _CUR_ROOTS + _PREV_ROOTS if h_min <= r <= h_max]
        hs = sorted(set(hs) | set(extra))
    return [AnalyticPoint(h, z3_current(h), z3_previous(h)) for h in hs]
