"""Wrapped, staggered 2-D grid of bistate units.

Rows alternate in a half-cell stagger: odd-index rows sit half a cell to the
right of even-index rows. Every unit touches four nearest neighbors on the
diagonals (two in the row above, two in the row below). Next-nearest
neighbors are the two same-row horizontal contacts and the two same-column
contacts two rows away. A triplet is a zigzag path endpoint -> apex ->
endpoint, where the endpoints are a next-nearest pair and the apex is a
nearest neighbor of both.

All index arithmetic wraps in both directions (toroidal envelope). The row
count must be even so that the stagger survives the vertical wrap.

Cell states are stored as ints, ``1`` for state A (active) and ``0`` for
state B.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import GridFormatError, InvalidGeometryError, InvalidSwapError

__all__ = [
    "A",
    "B",
    "Grid",
    "Geometry",
    "check_dims",
    "geometry",
    "new_from_states",
    "generate_random",
    "flip_unit",
    "swap_pair",
    "load_grid",
    "save_grid",
    "read_grid",
    "write_grid",
]

A = 1
B = 0

MIN_ROWS = 4
MIN_COLS = 4

_STATE_ALIASES = {1: A, 0: B, True: A, False: B, "1": A, "0": B, "A": A, "B": B}


def check_dims(rows: int, cols: int) -> None:
    if rows < MIN_ROWS or cols < MIN_COLS:
        raise InvalidGeometryError(
            f"grid must be at least {MIN_ROWS}x{MIN_COLS}, got {rows}x{cols}"
        )
    if rows % 2:
        raise InvalidGeometryError(
            f"row count must be even for the staggered wrap, got {rows}"
        )


@dataclass(frozen=True)
class Grid:
    """Immutable grid state. ``cells`` is row-major, one int per unit."""

    rows: int
    cols: int
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        check_dims(self.rows, self.cols)
        if len(self.cells) != self.rows * self.cols:
            raise InvalidGeometryError(
                f"expected {self.rows * self.cols} cells, got {len(self.cells)}"
            )
        if any(v not in (0, 1) for v in self.cells):
            raise InvalidGeometryError("cell states must be 0 (B) or 1 (A)")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def count_a(self) -> int:
        return sum(self.cells)

    @property
    def x1(self) -> float:
        return self.count_a / self.size

    def index(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"cell ({r}, {c}) outside {self.rows}x{self.cols} grid")
        return r * self.cols + c

    def state(self, r: int, c: int) -> int:
        return self.cells[self.index(r, c)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=np.int8).reshape(self.rows, self.cols)

    def lines(self) -> list[str]:
        return [
            "".join(str(v) for v in self.cells[r * self.cols : (r + 1) * self.cols])
            for r in range(self.rows)
        ]


@dataclass(frozen=True)
class Geometry:
    """Slot tables for one (rows, cols) lattice.

    Every slot is a tuple of flat cell indices. Triplets are ordered
    ``(endpoint, apex, endpoint)``.
    """

    rows: int
    cols: int
    nn_pairs: tuple[tuple[int, int], ...]
    nnn_pairs: tuple[tuple[int, int], ...]
    h_triplets: tuple[tuple[int, int, int], ...]
    v_triplets: tuple[tuple[int, int, int], ...]

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def _wrap(self, r: int, c: int) -> int:
        return (r % self.rows) * self.cols + (c % self.cols)

    def nearest_neighbors(self, r: int, c: int) -> list[tuple[int, int]]:
        off = r % 2
        out = []
        for dr in (-1, 1):
            for dc in (off - 1, off):
                out.append(((r + dr) % self.rows, (c + dc) % self.cols))
        return out

    def next_nearest_neighbors(self, r: int, c: int) -> list[tuple[int, int]]:
        return [
            (r, (c - 1) % self.cols),
            (r, (c + 1) % self.cols),
            ((r - 2) % self.rows, c),
            ((r + 2) % self.rows, c),
        ]

    def triplets(self, mode: str = "horizontal") -> tuple[tuple[int, int, int], ...]:
        if mode == "horizontal":
            return self.h_triplets
        if mode == "full":
            return self.h_triplets + self.v_triplets
        raise ValueError(f"unknown triplet mode {mode!r}")


@lru_cache(maxsize=32)
def geometry(rows: int, cols: int) -> Geometry:
    """Build (and cache) the slot tables for a ``rows`` x ``cols`` lattice."""
    check_dims(rows, cols)

    def at(r: int, c: int) -> int:
        return (r % rows) * cols + (c % cols)

    nn, nnn, htri, vtri = [], [], [], []
    for r in range(rows):
        off = r % 2
        for c in range(cols):
            u = at(r, c)
            # pairs are only enumerated towards row r+1 / column c+1 so each appears once
            nn.append((u, at(r + 1, c + off - 1)))
            nn.append((u, at(r + 1, c + off)))
            nnn.append((u, at(r, c + 1)))
            nnn.append((u, at(r + 2, c)))
            right = at(r, c + 1)
            htri.append((u, at(r + 1, c + off), right))
            htri.append((u, at(r - 1, c + off), right))
            below2 = at(r + 2, c)
            vtri.append((u, at(r + 1, c + off - 1), below2))
            vtri.append((u, at(r + 1, c + off), below2))
    return Geometry(rows, cols, tuple(nn), tuple(nnn), tuple(htri), tuple(vtri))


def _coerce_states(states: Iterable) -> tuple[int, ...]:
    out = []
    for s in states:
        try:
            out.append(_STATE_ALIASES[s])
        except (KeyError, TypeError):
            try:
                out.append(_STATE_ALIASES[int(s)])
            except (KeyError, TypeError, ValueError):
                raise InvalidGeometryError(f"illegal cell state {s!r}") from None
    return tuple(out)


def new_from_states(rows: int, cols: int, states: Iterable) -> Grid:
    """Build a grid from a flat row-major sequence of states.

    States may be given as 1/0, True/False, or the letters ``"A"``/``"B"``.
    """
    return Grid(rows, cols, _coerce_states(states))


def generate_random(rows: int, cols: int, p_a: float, rng: np.random.Generator) -> Grid:
    """Each unit is independently A with probability ``p_a``."""
    if not 0.0 <= p_a <= 1.0:
        raise ValueError(f"p_a must lie in [0, 1], got {p_a}")
    check_dims(rows, cols)
    draws = rng.random(rows * cols) < p_a
    return Grid(rows, cols, tuple(int(v) for v in draws))


def flip_unit(grid: Grid, r: int, c: int) -> Grid:
    i = grid.index(r, c)
    cells = list(grid.cells)
    cells[i] ^= 1
    return Grid(grid.rows, grid.cols, tuple(cells))


def swap_pair(grid: Grid, pos_a: Sequence[int], pos_b: Sequence[int]) -> Grid:
    """Exchange an A unit at ``pos_a`` with a B unit at ``pos_b``."""
    ia = grid.index(*pos_a)
    ib = grid.index(*pos_b)
    if grid.cells[ia] != A or grid.cells[ib] != B:
        raise InvalidSwapError(
            f"swap needs A at {tuple(pos_a)} and B at {tuple(pos_b)}, "
            f"found {grid.cells[ia]} and {grid.cells[ib]}"
        )
    cells = list(grid.cells)
    cells[ia], cells[ib] = B, A
    return Grid(grid.rows, grid.cols, tuple(cells))


_HEADER = re.compile(r"(\d+) (\d+)")


def load_grid(stream: TextIO) -> Grid:
    """Parse the text grid format.

    Optional ``#`` comment lines, then a ``rows cols`` header, then ``rows``
    lines of exactly ``cols`` characters drawn from ``{0, 1}``.
    """
    lines = stream.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0
    while pos < len(lines) and lines[pos].startswith("#"):
        pos += 1
    if pos >= len(lines):
        raise GridFormatError("missing 'rows cols' header")
    m = _HEADER.fullmatch(lines[pos])
    if m is None:
        raise GridFormatError(f"malformed header {lines[pos]!r}")
    rows, cols = int(m.group(1)), int(m.group(2))
    body = lines[pos + 1 :]
    if len(body) != rows:
        raise GridFormatError(f"header declares {rows} rows, found {len(body)}")
    cells: list[int] = []
    for k, line in enumerate(body):
        bad = set(line) - {"0", "1"}
        if bad:
            raise GridFormatError(
                f"row {k}: illegal character {sorted(bad)[0]!r}"
            )
        if len(line) != cols:
            raise GridFormatError(
                f"ragged row {k}: expected {cols} characters, found {len(line)}"
            )
        cells.extend(int(ch) for ch in line)
    try:
        return Grid(rows, cols, tuple(cells))
    except InvalidGeometryError as exc:
        raise GridFormatError(str(exc)) from exc


def save_grid(grid: Grid, stream: TextIO, comments: Sequence[str] = ()) -> None:
    for line in comments:
        stream.write(f"# {line}\n")
    stream.write(f"{grid.rows} {grid.cols}\n")
    for line in grid.lines():
        stream.write(line + "\n")


def read_grid(path: str | Path) -> Grid:
    with open(path, encoding="ascii", newline="") as fh:
        return load_grid(fh)


def write_grid(grid: Grid, path: str | Path, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        save_grid(grid, fh, comments)
