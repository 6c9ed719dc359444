import io

import numpy as np
import pytest
from hypothesis import given

from cvm2d.errors import GridFormatError, InvalidGeometryError, InvalidSwapError
from cvm2d.lattice import (
    Grid,
    flip_unit,
    generate_random,
    geometry,
    load_grid,
    new_from_states,
    read_grid,
    save_grid,
    swap_pair,
    write_grid,
)

from conftest import grids


@pytest.mark.parametrize("rows,cols", [(3, 4), (4, 3), (5, 6), (2, 8), (0, 0)])
def test_bad_dimensions_rejected(rows, cols):
    with pytest.raises(InvalidGeometryError):
        Grid(rows, cols, (0,) * (rows * cols))


def test_cell_values_validated():
    with pytest.raises(InvalidGeometryError):
        Grid(4, 4, (2,) + (0,) * 15)
    with pytest.raises(InvalidGeometryError):
        Grid(4, 4, (0,) * 15)


def test_new_from_states_accepts_letters_and_bools():
    g = new_from_states(4, 4, "AB" * 8)
    assert g.cells == (1, 0) * 8
    assert new_from_states(4, 4, [True, False] * 8) == g
    with pytest.raises(InvalidGeometryError):
        new_from_states(4, 4, "AC" * 8)


def test_index_bounds():
    g = Grid(4, 4, (0,) * 16)
    assert g.index(3, 3) == 15
    with pytest.raises(IndexError):
        g.index(4, 0)


def test_neighbors_even_row():
    geo = geometry(4, 4)
    assert sorted(geo.nearest_neighbors(0, 0)) == sorted([(1, 3), (1, 0), (3, 3), (3, 0)])
    assert sorted(geo.next_nearest_neighbors(0, 0)) == sorted([(0, 1), (0, 3), (2, 0), (2, 0)])


def test_neighbors_odd_row_wrap():
    geo = geometry(4, 4)
    assert sorted(geo.nearest_neighbors(1, 3)) == sorted([(0, 3), (0, 0), (2, 3), (2, 0)])


@pytest.mark.parametrize("rows,cols", [(4, 4), (6, 5), (8, 8), (16, 16)])
def test_slot_totals(rows, cols):
    geo = geometry(rows, cols)
    n = rows * cols
    assert len(geo.nn_pairs) == 2 * n
    assert len(geo.nnn_pairs) == 2 * n
    assert len(geo.triplets("horizontal")) == 2 * n
    assert len(geo.triplets("full")) == 4 * n


@pytest.mark.parametrize("rows,cols", [(4, 4), (6, 7), (10, 8)])
def test_neighbor_relation_symmetric_and_distinct(rows, cols):
    geo = geometry(rows, cols)
    for r in range(rows):
        for c in range(cols):
            nn = geo.nearest_neighbors(r, c)
            assert len(set(nn)) == 4 and (r, c) not in nn
            for q in nn:
                assert (r, c) in geo.nearest_neighbors(*q)
            for q in geo.next_nearest_neighbors(r, c):
                assert (r, c) in geo.next_nearest_neighbors(*q)


@pytest.mark.parametrize("rows,cols", [(4, 4), (6, 5), (8, 8)])
def test_triplet_memberships(rows, cols):
    # each unit is an endpoint of four horizontal triplets and the apex of two
    geo = geometry(rows, cols)
    n = rows * cols
    ends, apex = [0] * n, [0] * n
    nn = set(frozenset(p) for p in geo.nn_pairs)
    for a, m, b in geo.triplets("horizontal"):
        ends[a] += 1
        ends[b] += 1
        apex[m] += 1
        assert frozenset((a, m)) in nn and frozenset((m, b)) in nn
    assert set(ends) == {4} and set(apex) == {2}


def test_generate_random_degenerate_and_reproducible():
    assert generate_random(4, 4, 0.0, np.random.default_rng(0)).count_a == 0
    assert generate_random(4, 4, 1.0, np.random.default_rng(0)).count_a == 16
    a = generate_random(16, 16, 0.35, np.random.default_rng(7))
    b = generate_random(16, 16, 0.35, np.random.default_rng(7))
    assert a == b
    with pytest.raises(ValueError):
        generate_random(4, 4, 1.5, np.random.default_rng(0))


def test_flip_and_swap():
    g = Grid(4, 4, (0,) * 16)
    f = flip_unit(g, 1, 2)
    assert f.state(1, 2) == 1 and f.count_a == 1
    s = swap_pair(f, (1, 2), (3, 3))
    assert s.state(1, 2) == 0 and s.state(3, 3) == 1 and s.count_a == 1
    with pytest.raises(InvalidSwapError):
        swap_pair(s, (1, 2), (0, 0))


@given(grids())
def test_file_round_trip(grid):
    buf = io.StringIO()
    save_grid(grid, buf, comments=["test"])
    buf.seek(0)
    assert load_grid(buf) == grid


def test_file_round_trip_on_disk(tmp_path):
    g = new_from_states(4, 4, "1000" * 4)
    p = tmp_path / "g.txt"
    write_grid(g, p)
    assert p.read_bytes() == b"4 4\n1000\n1000\n1000\n1000\n"
    assert read_grid(p) == g


@pytest.mark.parametrize(
    "text,msg",
    [
        ("", "header"),
        ("4  4\n", "header"),
        ("4 4\n0000\n0000\n0000\n", "rows"),
        ("4 4\n0000\n0000\n00x0\n0000\n", "illegal"),
        ("4 4\n0000\n000\n0000\n0000\n", "ragged"),
        ("5 4\n" + "0000\n" * 5, "even"),
    ],
)
def test_malformed_files(text, msg):
    with pytest.raises(GridFormatError, match=msg):
        load_grid(io.StringIO(text))
