"""Tests for grid construction, candidate sets, and separation frontiers."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circlepack.geometry import Circle, CircleContainer, StripContainer, exact
from circlepack.grid import (
    build_grid,
    build_strip_grid,
    relaxed_candidates,
    restricted_candidates,
    sep_holds,
    separation_frontier,
)

DISC = CircleContainer()


def test_build_grid_snaps_exact_divisions():
    """1.8 / 0.3 must give 6 cells even though float division lands above 6."""
    grid = build_grid(1.8, 0.3, 0.5)
    assert grid.theta == 6
    assert grid.delta == 0.3
    assert grid.index_count == 13
    assert grid.bit_width == 4
    assert grid.theta * grid.delta_exact == grid.size_exact


def test_build_grid_fine():
    grid = build_grid(1.8, 0.1, 0.5)
    assert grid.theta == 18
    assert grid.delta == pytest.approx(0.1)
    assert grid.bit_width == 6  # indices up to 36


def test_build_grid_rounds_up():
    grid = build_grid(1.0, 0.4, 1.0)
    assert grid.theta == 3
    assert grid.delta_exact == Fraction(1, 3)


def test_bit_width_covers_top_index():
    """Every index 0..2*theta must be representable: 2**bits > 2*theta."""
    grid = build_grid(8.0, 1.0, 2.0)
    assert grid.theta == 8
    assert 2**grid.bit_width > 2 * grid.theta  # 4 bits would lose index 16


def test_build_grid_rejects_coarse_spacing():
    with pytest.raises(ValueError, match="diagonal"):
        build_grid(1.0, 0.5, 0.5)


def brute_restricted_disc(grid, radius):
    """Oracle: exact Fraction enumeration of lattice points within size - r."""
    ok = set()
    r = exact(radius)
    for i in range(grid.points_x):
        for j in range(grid.points_y):
            x, y = grid.point_exact(i, j)
            if x * x + y * y <= (grid.size_exact - r) ** 2 and r <= grid.size_exact:
                ok.add((i, j))
    return ok


def brute_relaxed_disc(grid, radius):
    """Oracle: clamp the origin into each cell, exact squared comparison."""
    ok = set()
    r = exact(radius)
    if r > grid.size_exact:
        return ok
    for i in range(grid.cells_x):
        for j in range(grid.cells_y):
            x0, y0, x1, y1 = grid.cell_bounds_exact(i, j)
            cx = min(max(Fraction(0), x0), x1)
            cy = min(max(Fraction(0), y0), y1)
            if cx * cx + cy * cy <= (grid.size_exact - r) ** 2:
                ok.add((i, j))
    return ok


def test_restricted_disc_example():
    """R=2, delta=1, r=1: exactly the center and its 4 axis neighbours."""
    grid = build_grid(2.0, 1.0, 1.5)
    cand = restricted_candidates(grid, Circle(1, 1.0), DISC)
    got = set(cand.indices())
    assert got == brute_restricted_disc(grid, 1.0)
    assert got == {(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)}


def test_restricted_full_size_circle():
    grid = build_grid(2.0, 1.0, 1.5)
    cand = restricted_candidates(grid, Circle(1, 2.0), DISC)
    assert set(cand.indices()) == {(2, 2)}


def test_restricted_oversized_circle_empty():
    grid = build_grid(2.0, 1.0, 1.5)
    cand = restricted_candidates(grid, Circle(1, 2.5), DISC)
    assert cand.count == 0


def test_restricted_strip_interior():
    """L=W=4, delta=1, r=1: inset square [1,3]x[1,3] -> 3x3 lattice points."""
    grid = build_strip_grid(4.0, 4.0, 1.0, 1.5)
    cand = restricted_candidates(grid, Circle(1, 1.0), StripContainer(4.0))
    got = set(cand.indices())
    assert got == {(i, j) for i in (1, 2, 3) for j in (1, 2, 3)}


def test_relaxed_disc_boundary_cells_included():
    """R=2, delta=1, r=1: all 12 cells whose nearest point reaches the origin disc.

    Exact enumeration: the four cells around the origin (distance 0) plus the
    eight cells one step out whose nearest corner sits at distance exactly
    1 = R - r.  Tangency is admissible, so the closed inequality keeps them.
    """
    grid = build_grid(2.0, 1.0, 1.5)
    cand = relaxed_candidates(grid, Circle(1, 1.0), DISC)
    got = set(cand.indices())
    oracle = brute_relaxed_disc(grid, 1.0)
    assert got == oracle
    assert len(got) == 12


def test_relaxed_contains_restricted_corners():
    """Each restricted point, as a cell lower-left corner, is a relaxed cell."""
    grid = build_grid(3.0, 0.5, 1.0)
    for r in (0.8, 1.0, 1.4, 2.9):
        res = restricted_candidates(grid, Circle(1, r), DISC)
        rel = relaxed_candidates(grid, Circle(1, r), DISC)
        for i, j in res.indices():
            if i < grid.cells_x and j < grid.cells_y:
                assert rel.mask[i, j]


def test_relaxed_strip_covers_inset():
    grid = build_strip_grid(4.0, 4.0, 1.0, 1.5)
    cand = relaxed_candidates(grid, Circle(1, 1.0), StripContainer(4.0))
    # inset rectangle [1,3]x[1,3] meets every cell except none: cells 0..3 per
    # axis all touch it except those fully outside; exact oracle below
    got = set(cand.indices())
    oracle = set()
    r = Fraction(1)
    for i in range(grid.cells_x):
        for j in range(grid.cells_y):
            x0, y0, x1, y1 = grid.cell_bounds_exact(i, j)
            if x1 >= r and x0 <= 4 - r and y1 >= r and y0 <= 4 - r:
                oracle.add((i, j))
    assert got == oracle


def test_relaxed_strip_empty_when_diameter_exceeds_length():
    grid = build_strip_grid(1.5, 4.0, 0.4, 1.0)
    cand = relaxed_candidates(grid, Circle(1, 0.9), StripContainer(4.0))
    assert cand.count == 0  # 2r = 1.8 > 1.5: no admissible center at all


def brute_frontier(min_sq, mode, limit=64):
    """Oracle: enumerate all satisfying pairs, keep the Pareto-minimal ones."""
    sat = set()
    for u1 in range(limit):
        for u2 in range(limit):
            if mode == "restricted":
                good = u1 * u1 + u2 * u2 >= min_sq
            else:
                good = (u1 + 1) ** 2 + (u2 + 1) ** 2 >= min_sq
            if good:
                sat.add((u1, u2))
    minimal = {
        p
        for p in sat
        if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in sat)
    }
    return minimal


def test_frontier_restricted_example():
    fr = separation_frontier(2.5, 1.0, "restricted", bound=8)
    assert set(fr.pairs) == {(0, 3), (2, 2), (3, 0)}
    assert set(fr.pairs) == brute_frontier(fr.min_sq_steps, "restricted")


def test_frontier_relaxed_example():
    fr = separation_frontier(2.5, 1.0, "relaxed", bound=8)
    assert set(fr.pairs) == {(0, 2), (1, 1), (2, 0)}
    assert set(fr.pairs) == brute_frontier(fr.min_sq_steps, "relaxed")


def test_frontier_touching_circles():
    fr = separation_frontier(1.0, 1.0, "restricted", bound=4)
    assert set(fr.pairs) == {(0, 1), (1, 0)}
    fr2 = separation_frontier(0.75, 1.0, "restricted", bound=4)
    assert set(fr2.pairs) == {(0, 1), (1, 0)}


def test_sep_holds_examples():
    fr = separation_frontier(2.5, 1.0, "restricted", bound=8)
    assert sep_holds(-2, 2, fr)
    assert not sep_holds(1, 2, fr)
    assert not sep_holds(0, 0, fr)


@given(
    r_sum=st.floats(min_value=0.05, max_value=8.0, allow_nan=False),
    delta=st.floats(min_value=0.05, max_value=2.0, allow_nan=False),
    mode=st.sampled_from(["restricted", "relaxed"]),
)
def test_frontier_matches_direct_inequality(r_sum, delta, mode):
    """sep_holds must agree with the squared-distance predicate everywhere."""
    ratio = r_sum / delta
    if ratio > 24:
        return
    bound = math.ceil(ratio) + 2
    fr = separation_frontier(r_sum, delta, mode, bound=bound)
    for di in range(-bound - 1, bound + 2):
        for dj in range(-bound - 1, bound + 2):
            assert sep_holds(di, dj, fr) == fr.satisfies_direct(di, dj), (di, dj)


@given(
    size=st.floats(min_value=1.0, max_value=5.0),
    ratio=st.floats(min_value=0.15, max_value=0.9),
)
def test_halving_delta_preserves_restricted_candidates(size, ratio):
    """Candidate (i, j) maps to (2i, 2j) when the spacing is halved."""
    radius = size * ratio
    min_r = radius
    target = min_r / 2.0
    grid = build_grid(size, target, min_r)
    fine = build_grid(size, float(grid.delta_exact / 2), min_r)
    if fine.theta != 2 * grid.theta:  # snap produced a different refinement
        return
    coarse_set = restricted_candidates(grid, Circle(1, radius), DISC)
    fine_set = restricted_candidates(fine, Circle(1, radius), DISC)
    for i, j in coarse_set.indices():
        assert fine_set.mask[2 * i, 2 * j]


@given(
    size=st.floats(min_value=1.0, max_value=5.0),
    ratio=st.floats(min_value=0.15, max_value=0.9),
)
def test_relaxed_covers_refined_restricted(size, ratio):
    """Every fine-grid restricted point lies in some flagged coarse cell."""
    radius = size * ratio
    target = radius / 2.0
    coarse = build_grid(size, target, radius)
    fine = build_grid(size, float(coarse.delta_exact / 3), radius)
    if fine.theta != 3 * coarse.theta:  # snap produced a different refinement
        return
    rel = relaxed_candidates(coarse, Circle(1, radius), DISC)
    res = restricted_candidates(fine, Circle(1, radius), DISC)

    def containing_cells(steps: Fraction, count: int):
        """Coarse cell indices (centered) whose closed extent holds a coordinate
        given in units of the coarse spacing from the grid center."""
        low = math.floor(steps)
        cells = {low} if low != steps else {low - 1, low}
        return [c + coarse.theta for c in cells if 0 <= c + coarse.theta < count]

    for i, j in res.indices():
        sx = Fraction(i - fine.theta, 3)
        sy = Fraction(j - fine.theta, 3)
        for ci in containing_cells(sx, coarse.cells_x):
            for cj in containing_cells(sy, coarse.cells_y):
                assert rel.mask[ci, cj], ((i, j), (ci, cj))
