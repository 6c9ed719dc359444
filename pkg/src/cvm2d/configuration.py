"""Configuration-variable counting on a grid.

Raw tallies are kept as undirected slot counts. Degeneracy factors (2 for the
mixed pair classes and for the triplet classes z2 and z5) are applied only
when converting counts to fractions.

Triplet classes, read endpoint -> apex -> endpoint::

    z1 AAA    z2 AAB, BAA    z3 ABA    z4 BAB    z5 ABB, BBA    z6 BBB
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import Grid, geometry

__all__ = [
    "TRIPLET_MODES",
    "PAIR_DEGENERACY",
    "TRIPLET_DEGENERACY",
    "ConfigCounts",
    "ConfigFractions",
    "count_configs",
    "brute_force_count",
    "to_fractions",
    "fractions_of",
    "delta",
    "identity_residuals",
    "IncrementalCounter",
]

TRIPLET_MODES = ("horizontal", "full")
PAIR_DEGENERACY = (1, 2, 1)
TRIPLET_DEGENERACY = (1, 2, 1, 1, 2, 1)

BRUTE_FORCE_MAX_UNITS = 4096

# index = 4*endpoint + 2*apex + endpoint, A = 1
_TRIPLET_CLASS = (5, 4, 3, 1, 4, 2, 1, 0)
_TRIPLET_LUT = np.array(_TRIPLET_CLASS, dtype=np.intp)


@dataclass(frozen=True)
class ConfigCounts:
    """Integer tallies: ``cx`` (A, B), ``cy``/``cw`` (AA, mixed, BB), ``cz`` (z1..z6)."""

    cx: tuple[int, int]
    cy: tuple[int, int, int]
    cw: tuple[int, int, int]
    cz: tuple[int, int, int, int, int, int]
    pair_total: int
    triplet_total: int

    @property
    def n_units(self) -> int:
        return self.cx[0] + self.cx[1]


@dataclass(frozen=True)
class ConfigFractions:
    x: tuple[float, float]
    y: tuple[float, float, float]
    w: tuple[float, float, float]
    z: tuple[float, float, float, float, float, float]

    def as_dict(self) -> dict[str, float]:
        out = {"x1": self.x[0], "x2": self.x[1]}
        out.update({f"y{i + 1}": v for i, v in enumerate(self.y)})
        out.update({f"w{i + 1}": v for i, v in enumerate(self.w)})
        out.update({f"z{i + 1}": v for i, v in enumerate(self.z)})
        return out


def _check_mode(mode: str) -> None:
    if mode not in TRIPLET_MODES:
        raise ValueError(f"triplet mode must be one of {TRIPLET_MODES}, got {mode!r}")


@lru_cache(maxsize=32)
def _index_arrays(rows: int, cols: int, mode: str):
    geo = geometry(rows, cols)
    nn = np.array(geo.nn_pairs, dtype=np.intp)
    nnn = np.array(geo.nnn_pairs, dtype=np.intp)
    tri = np.array(geo.triplets(mode), dtype=np.intp)
    return nn, nnn, tri


def count_configs(grid: Grid, triplet_mode: str = "horizontal") -> ConfigCounts:
    """Tally every wrapped slot of ``grid``.

    ``horizontal`` counts only the row-pair zigzag triplets (2N slots);
    ``full`` adds the column-pair zigzags (4N slots).
    """
    _check_mode(triplet_mode)
    nn, nnn, tri = _index_arrays(grid.rows, grid.cols, triplet_mode)
    s = np.asarray(grid.cells, dtype=np.intp)
    n_a = int(s.sum())
    cy = np.bincount(2 - (s[nn[:, 0]] + s[nn[:, 1]]), minlength=3)
    cw = np.bincount(2 - (s[nnn[:, 0]] + s[nnn[:, 1]]), minlength=3)
    codes = 4 * s[tri[:, 0]] + 2 * s[tri[:, 1]] + s[tri[:, 2]]
    cz = np.bincount(_TRIPLET_LUT[codes], minlength=6)
    return ConfigCounts(
        cx=(n_a, grid.size - n_a),
        cy=tuple(int(v) for v in cy),
        cw=tuple(int(v) for v in cw),
        cz=tuple(int(v) for v in cz),
        pair_total=len(nn),
        triplet_total=len(tri),
    )


def brute_force_count(grid: Grid, triplet_mode: str = "horizontal") -> ConfigCounts:
    """Reference tally by direct enumeration from cell coordinates.

    Shares no traversal code with :func:`count_configs`: every unit lists its
    own neighbors, each undirected pair is seen twice and halved, and triplet
    apexes are found by intersecting neighbor sets.
    """
    _check_mode(triplet_mode)
    R, C = grid.rows, grid.cols
    if R * C > BRUTE_FORCE_MAX_UNITS:
        raise ValueError(
            f"brute-force oracle limited to {BRUTE_FORCE_MAX_UNITS} units, got {R * C}"
        )
    st = [["A" if grid.cells[r * C + c] else "B" for c in range(C)] for r in range(R)]

    def nearest(r, c):
        # even rows reach down-left/down-right to columns c-1, c; odd rows to c, c+1
        cols = (c - 1, c) if r % 2 == 0 else (c, c + 1)
        return [((r + dr) % R, cc % C) for dr in (-1, 1) for cc in cols]

    def next_nearest(r, c):
        return [(r, (c - 1) % C), (r, (c + 1) % C), ((r - 2) % R, c), ((r + 2) % R, c)]

    pair_name = {"AA": 0, "AB": 1, "BA": 1, "BB": 2}
    triplet_name = {
        "AAA": 0, "AAB": 1, "BAA": 1, "ABA": 2,
        "BAB": 3, "ABB": 4, "BBA": 4, "BBB": 5,
    }

    n_a = sum(row.count("A") for row in st)
    cy2 = [0, 0, 0]
    cw2 = [0, 0, 0]
    for r in range(R):
        for c in range(C):
            for rr, cc in nearest(r, c):
                cy2[pair_name[st[r][c] + st[rr][cc]]] += 1
            for rr, cc in next_nearest(r, c):
                cw2[pair_name[st[r][c] + st[rr][cc]]] += 1

    cz = [0] * 6
    n_tri = 0
    for r in range(R):
        for c in range(C):
            ends = [((r, (c + 1) % C), ((r - 1) % R, (r + 1) % R))]
            if triplet_mode == "full":
                ends.append((((r + 2) % R, c), ((r + 1) % R,)))
            for (er, ec), apex_rows in ends:
                common = set(nearest(r, c)) & set(nearest(er, ec))
                for ar in apex_rows:
                    for apex in sorted(p for p in common if p[0] == ar):
                        pattern = st[r][c] + st[apex[0]][apex[1]] + st[er][ec]
                        cz[triplet_name[pattern]] += 1
                        n_tri += 1

    return ConfigCounts(
        cx=(n_a, R * C - n_a),
        cy=tuple(v // 2 for v in cy2),
        cw=tuple(v // 2 for v in cw2),
        cz=tuple(cz),
        pair_total=sum(cy2) // 2,
        triplet_total=n_tri,
    )


def to_fractions(counts: ConfigCounts) -> ConfigFractions:
    n = counts.n_units
    p = counts.pair_total
    t = counts.triplet_total
    if n <= 0 or p <= 0 or t <= 0:
        raise ValueError("counts have a zero total")
    cy, cw, cz = counts.cy, counts.cw, counts.cz
    return ConfigFractions(
        x=(counts.cx[0] / n, counts.cx[1] / n),
        y=(cy[0] / p, cy[1] / (2 * p), cy[2] / p),
        w=(cw[0] / p, cw[1] / (2 * p), cw[2] / p),
        z=(
            cz[0] / t,
            cz[1] / (2 * t),
            cz[2] / t,
            cz[3] / t,
            cz[4] / (2 * t),
            cz[5] / t,
        ),
    )


def fractions_of(grid: Grid, triplet_mode: str = "horizontal") -> ConfigFractions:
    return to_fractions(count_configs(grid, triplet_mode))


def delta(f: ConfigFractions) -> float:
    """``2*y2 - y1 - y3``: positive for alternation-rich grids, negative when clustered."""
    return 2.0 * f.y[1] - f.y[0] - f.y[2]


def identity_residuals(f: ConfigFractions) -> dict[str, float]:
    """Residuals of the pair/triplet identities that hold exactly on every grid."""
    z = f.z
    return {
        "y1 = z1 + z2": f.y[0] - (z[0] + z[1]),
        "y3 = z5 + z6": f.y[2] - (z[4] + z[5]),
        "2y2 = z2 + z3 + z4 + z5": 2.0 * f.y[1] - (z[1] + z[2] + z[3] + z[4]),
    }


class IncrementalCounter:
    """Mutable grid copy whose counts are updated locally on each swap.

    Only the slots touching the two exchanged cells are re-tallied, which
    must (and is tested to) agree with a full :func:`count_configs`.
    """

    def __init__(self, grid: Grid, triplet_mode: str = "horizontal"):
        _check_mode(triplet_mode)
        geo = geometry(grid.rows, grid.cols)
        self.rows, self.cols = grid.rows, grid.cols
        self.triplet_mode = triplet_mode
        self.cells = list(grid.cells)
        self._nn = geo.nn_pairs
        self._nnn = geo.nnn_pairs
        self._tri = geo.triplets(triplet_mode)

        n = grid.size
        inc_nn = [[] for _ in range(n)]
        inc_nnn = [[] for _ in range(n)]
        inc_tri = [[] for _ in range(n)]
        for a, b in self._nn:
            inc_nn[a].append(b)
            inc_nn[b].append(a)
        for a, b in self._nnn:
            inc_nnn[a].append(b)
            inc_nnn[b].append(a)
        for slot in self._tri:
            for i in slot:
                inc_tri[i].append(slot)
        self._nn_of = [tuple(v) for v in inc_nn]
        self._nnn_of = [tuple(v) for v in inc_nnn]
        self._cell_tri = [tuple(v) for v in inc_tri]
        self._undo = None

        start = count_configs(grid, triplet_mode)
        self.count_a = start.cx[0]
        self.cy = list(start.cy)
        self.cw = list(start.cw)
        self.cz = list(start.cz)

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def cx(self) -> tuple[int, int]:
        return (self.count_a, len(self.cells) - self.count_a)

    @property
    def pair_total(self) -> int:
        return len(self._nn)

    @property
    def triplet_total(self) -> int:
        return len(self._tri)

    def swap(self, i: int, j: int) -> None:
        """Exchange the states of flat cells ``i`` and ``j`` (which must differ)."""
        s = self.cells
        si = s[i]
        if si == s[j]:
            raise ValueError("swap requires cells in different states")
        dy = self._pair_delta(self._nn_of, i, j, si)
        dw = self._pair_delta(self._nnn_of, i, j, si)

        # triplets holding both cells must be visited once
        trips = self._cell_tri[i] + tuple(t for t in self._cell_tri[j] if i not in t)
        lut = _TRIPLET_CLASS
        dz = [0, 0, 0, 0, 0, 0]
        for a, b, c in trips:
            dz[lut[4 * s[a] + 2 * s[b] + s[c]]] -= 1
        s[i], s[j] = s[j], si
        for a, b, c in trips:
            dz[lut[4 * s[a] + 2 * s[b] + s[c]]] += 1

        cy, cw, cz = self.cy, self.cw, self.cz
        for k in range(3):
            cy[k] += dy[k]
            cw[k] += dw[k]
        for k in range(6):
            cz[k] += dz[k]
        self._undo = (i, j, dy, dw, dz)

    def _pair_delta(self, partners_of, i, j, si):
        # pairs joining i and j stay mixed and are skipped
        s = self.cells
        d = [0, 0, 0]
        for u, su, other in ((i, si, j), (j, 1 - si, i)):
            ps = partners_of[u]
            m = 0
            k = 0
            for q in ps:
                if q != other:
                    m += 1
                    k += s[q]
            if su:  # A -> B
                d[0] -= k
                d[1] += 2 * k - m
                d[2] += m - k
            else:  # B -> A
                d[0] += k
                d[1] += m - 2 * k
                d[2] -= m - k
        return d

    def undo(self) -> None:
        """Revert the most recent :meth:`swap` without re-tallying."""
        if self._undo is None:
            raise RuntimeError("nothing to undo")
        i, j, dy, dw, dz = self._undo
        s = self.cells
        s[i], s[j] = s[j], s[i]
        cy, cw, cz = self.cy, self.cw, self.cz
        for k in range(3):
            cy[k] -= dy[k]
            cw[k] -= dw[k]
        for k in range(6):
            cz[k] -= dz[k]
        self._undo = None

    def counts(self) -> ConfigCounts:
        n = len(self.cells)
        return ConfigCounts(
            cx=(self.count_a, n - self.count_a),
            cy=tuple(self.cy),
            cw=tuple(self.cw),
            cz=tuple(self.cz),
            pair_total=len(self._nn),
            triplet_total=len(self._tri),
        )

    def grid(self) -> Grid:
        return Grid(self.rows, self.cols, tuple(self.cells))
