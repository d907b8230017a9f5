"""Feasible-region identification by constraint propagation over cell bitmaps.

For each circle a conservative region of admissible center cells is built
(for disc containers: an annulus combining containment with the reach needed
to leave room for the largest circle), optionally narrowed by symmetry
restrictions for the two largest circles.  Arc consistency then repeatedly
deletes cells that cannot be paired with any surviving cell of every other
circle under the farthest-corner separation test (the relaxed predicate, so
deletions never remove a truly feasible center).

If any circle's region becomes empty, no continuous packing exists at the
probed container size — an exact lower-bound certificate used both for
bound initialization and for short-circuiting the bisection driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy import signal

from .geometry import Circle, Instance, exact
from .grid import Grid, grid_for_instance, relaxed_candidates

__all__ = [
    "RegionMap",
    "annulus_region",
    "build_region_map",
    "propagate",
    "region_feasible",
    "write_region_pgm",
]

MAX_SWEEPS = 50


@dataclass(frozen=True)
class RegionMap:
    """Per-circle bitmaps of surviving center cells at one container size."""

    grid: Grid
    size: float
    masks: Mapping[int, np.ndarray]

    def cell_count(self, circle_id: int) -> int:
        return int(self.masks[circle_id].sum())

    def is_empty(self) -> bool:
        return any(not m.any() for m in self.masks.values())


def _nearest_steps(cell_index: np.ndarray) -> np.ndarray:
    return np.maximum(np.maximum(cell_index, 0), -(cell_index + 1))


def _farthest_steps(cell_index: np.ndarray) -> np.ndarray:
    return np.maximum(np.abs(cell_index), np.abs(cell_index + 1))


def annulus_region(
    circle: Circle, size: float, reference_radius: float, grid: Grid
) -> np.ndarray:
    """Cells that intersect the admissible annulus for one circle in a disc.

    The annulus is max(0, 2*reference_radius + r - size) <= |p| <= size - r:
    the outer bound is containment; the inner bound says the center must
    leave enough of the container for the reference circle to fit somewhere.
    A cell survives when its nearest point is inside the outer disc and its
    farthest point is outside the inner disc — except that an annulus whose
    inner radius exceeds its outer radius is empty outright (a straddling
    cell would pass both one-sided tests despite containing no annulus
    point).  All threshold comparisons are exact.
    """
    if grid.kind != "circle":
        raise ValueError("annulus regions apply to disc containers only")
    shape = (grid.cells_x, grid.cells_y)
    r = exact(circle.radius)
    size_q = exact(size)
    outer = size_q - r
    inner = max(Fraction(0), 2 * exact(reference_radius) + r - size_q)
    if outer < 0 or inner > outer:
        return np.zeros(shape, dtype=bool)

    outer_limit = math.floor((outer / grid.delta_exact) ** 2)
    inner_limit = math.ceil((inner / grid.delta_exact) ** 2)
    axis = np.arange(shape[0]) - grid.theta
    near = _nearest_steps(axis)
    far = _farthest_steps(axis)
    near2 = near[:, None] ** 2 + near[None, :] ** 2
    far2 = far[:, None] ** 2 + far[None, :] ** 2
    return (near2 <= outer_limit) & (far2 >= inner_limit)


def _strip_region(circle: Circle, grid: Grid) -> np.ndarray:
    """Strip containers get plain relaxed containment (no radial structure)."""
    from .geometry import StripContainer

    return relaxed_candidates(grid, circle, StripContainer(grid.width)).mask.copy()


def _symmetry_masks(grid: Grid, n: int) -> dict[int, np.ndarray]:
    """Conservative cell-level symmetry restrictions for circles 1 and 2.

    Disc: circle 1 may be confined to the first quadrant (rotations by 90
    degrees and reflection across y=x map packings to packings and preserve
    the lattice), circle 2 to the half-plane y >= x.  Cells are kept when
    they intersect the closed restricted set.  Strip: circle 1 confined to
    x >= L/2 and y >= W/2 (both axis reflections are strip symmetries);
    there is no valid second-circle restriction for strips.
    """
    out: dict[int, np.ndarray] = {}
    nx, ny = grid.cells_x, grid.cells_y
    ii = np.arange(nx)[:, None] * np.ones((1, ny), dtype=int)
    jj = np.ones((nx, 1), dtype=int) * np.arange(ny)[None, :]
    if grid.kind == "circle":
        out[1] = (ii >= grid.theta - 1) & (jj >= grid.theta - 1)
        if n >= 2:
            out[2] = jj >= ii - 1
    else:
        # cell [i, i+1]*delta intersects x >= L/2  <=>  i >= ceil(L/(2 delta)) - 1
        lo_i = math.ceil(grid.size_exact / (2 * grid.delta_exact)) - 1
        lo_j = math.ceil(grid.width_exact / (2 * grid.delta_exact)) - 1
        out[1] = (ii >= lo_i) & (jj >= lo_j)
    return out


def build_region_map(
    instance: Instance,
    size: float,
    grid: Grid,
    symmetry: bool = True,
) -> RegionMap:
    """Initial per-circle regions: annuli (disc) or containment (strip)."""
    masks: dict[int, np.ndarray] = {}
    radii = instance.radii
    for circle in instance.circles:
        if instance.is_strip:
            mask = _strip_region(circle, grid)
        else:
            if instance.n == 1:
                ref = 0.0
            elif circle.id == 1:
                ref = radii[1]
            else:
                ref = radii[0]
            mask = annulus_region(circle, size, ref, grid)
        masks[circle.id] = mask
    if symmetry:
        for cid, sym in _symmetry_masks(grid, instance.n).items():
            masks[cid] = masks[cid] & sym
    return RegionMap(grid=grid, size=float(size), masks=masks)


def _forbidden_kernel(r_sum: Fraction, delta: Fraction) -> np.ndarray:
    """Indicator of offsets (di, dj) whose farthest-corner distance is too
    small: (|di|+1)^2 + (|dj|+1)^2 < ceil((r_sum/delta)^2)."""
    min_sq = math.ceil((r_sum / delta) ** 2)
    reach = max(0, math.isqrt(max(0, min_sq - 1)))  # |d|+1 <= sqrt(min_sq-1)
    offs = np.arange(-reach, reach + 1)
    a = (np.abs(offs) + 1) ** 2
    bad = (a[:, None] + a[None, :]) < min_sq
    return bad.astype(np.float64)


def propagate(region_map: RegionMap, radii: Sequence[float]) -> RegionMap | None:
    """Arc-consistency fixpoint over the region bitmaps; None means EMPTY.

    A cell of circle k survives a sweep when, for every other circle c,
    some current cell of c is far enough (farthest-corner test).  Support
    counting is done by convolving c's bitmap with the pair's forbidden-
    offset kernel: a cell is unsupported exactly when every cell of c lies
    at a forbidden offset.  Sweeps update all circles from the same input
    (double buffering) and stop at a fixpoint or after MAX_SWEEPS.
    """
    grid = region_map.grid
    ids = sorted(region_map.masks.keys())
    if len(ids) != len(radii):
        raise ValueError("radii count does not match region map")
    rq = {cid: exact(radii[pos]) for pos, cid in enumerate(ids)}
    masks = {cid: region_map.masks[cid].copy() for cid in ids}

    kernels: dict[tuple[int, int], np.ndarray] = {}
    for a_pos, ca in enumerate(ids):
        for cb in ids[a_pos + 1 :]:
            key = (ca, cb)
            kernels[key] = _forbidden_kernel(rq[ca] + rq[cb], grid.delta_exact)

    for _ in range(MAX_SWEEPS):
        changed = False
        new_masks: dict[int, np.ndarray] = {}
        for ck in ids:
            keep = masks[ck].copy()
            for cc in ids:
                if cc == ck:
                    continue
                kernel = kernels[(min(cc, ck), max(cc, ck))]
                total = int(masks[cc].sum())
                if total == 0:
                    return None
                if kernel.size == 1 and kernel[0, 0] == 0.0:
                    continue  # no offset is forbidden: every cell supports
                hits = signal.oaconvolve(
                    masks[cc].astype(np.float64), kernel, mode="same"
                )
                unsupported = hits >= total - 0.5
                keep &= ~unsupported
                if not keep.any():
                    return None
            if not np.array_equal(keep, masks[ck]):
                changed = True
            new_masks[ck] = keep
        masks = new_masks
        if not changed:
            break

    if any(not m.any() for m in masks.values()):
        return None
    return RegionMap(grid=grid, size=region_map.size, masks=masks)


def region_feasible(instance: Instance, size: float, delta_r: float) -> bool:
    """False certifies that no packing of the instance fits at ``size``.

    Builds the cell regions at working resolution ``delta_r`` and runs the
    propagation; emptiness is a proof of continuous infeasibility, while
    True is NOT a feasibility proof (the relaxed tests are one-sided).
    """
    if not size > 0:
        return False
    if not instance.is_strip and exact(instance.max_radius) > exact(size):
        return False
    if instance.is_strip and 2 * exact(instance.max_radius) > exact(size):
        return False
    grid = grid_for_instance(instance, size, delta_r)
    base = build_region_map(instance, size, grid, symmetry=True)
    if base.is_empty():
        return False
    return propagate(base, instance.radii) is not None


def write_region_pgm(region_map: RegionMap, directory: str | Path, prefix: str = "region") -> list[Path]:
    """Dump each circle's bitmap as a binary PGM image for visual inspection.

    Row order follows descending j (so +y points up in the image); surviving
    cells are white on black.  Returns the written paths.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for cid in sorted(region_map.masks.keys()):
        mask = region_map.masks[cid]
        img = (mask.T[::-1, :] * 255).astype(np.uint8)
        path = directory / f"{prefix}-circle{cid:02d}.pgm"
        header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
        path.write_bytes(header + img.tobytes())
        written.append(path)
    return written
