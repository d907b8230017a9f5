"""Branch-and-prune solver for the two grid feasibility models.

The restricted model asks for an assignment of every circle center to an
admissible lattice point such that all pairwise integer separation tests
pass; a solution maps to a genuine packing (exact arithmetic end to end).
The relaxed model asks the same over whole cells with farthest-corner
separation, so when even that fails, no continuous packing exists at the
probed container size.

Both models are solved by one depth-first engine that assigns circles in
decreasing-radius order with three individually toggleable pruning rules:

* area — back out of a node when the unassigned circles need more area
  than the container has left (plus a certified idle-area correction for
  exactly tangent triples of already assigned circles);
* farthest pair — back out when even the farthest candidate cells of the
  two largest unassigned circles are closer than their radius sum;
* conditional elimination — after each assignment delete every candidate
  that would overlap the newly placed circle, failing fast on any emptied
  domain.

All pruning is conservative: toggling rules changes the search effort,
never the outcome.  The equivalent binary linear program can be written
to an LP file by the milp module.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Mapping

import numpy as np

from .bounds import idle_area_triple
from .geometry import Instance, Placement, exact
from .grid import (
    CandidateSet,
    Grid,
    Mode,
    SeparationFrontier,
    relaxed_candidates,
    restricted_candidates,
    separation_frontier,
)
from .reduction import RegionMap

__all__ = [
    "FeasibilityProblem",
    "PruneConfig",
    "SolveLimits",
    "SolveOutcome",
    "assignment_to_placement",
    "build_problem",
    "solve",
]


@dataclass(frozen=True)
class SolveLimits:
    """Search budget: wall-clock seconds (None = unlimited) and node count."""

    time_seconds: float | None = None
    max_nodes: int = 100_000_000


@dataclass(frozen=True)
class PruneConfig:
    """Which pruning rules the search applies (all sound, all optional)."""

    area: bool = True
    farthest_pair: bool = True
    conditional: bool = True


@dataclass(frozen=True)
class FeasibilityProblem:
    """One grid feasibility question: domains, radii and pair thresholds.

    ``domains`` maps circle id to its candidate bitmap (lattice points in
    restricted mode, cells in relaxed mode) after intersecting the mode's
    candidate set with optional reduced regions and symmetry restrictions.
    ``frontiers`` holds the exact pairwise separation thresholds keyed by
    (low id, high id).
    """

    instance: Instance
    grid: Grid
    mode: Mode
    domains: Mapping[int, CandidateSet]
    radii: tuple[float, ...]
    frontiers: Mapping[tuple[int, int], SeparationFrontier]
    symmetry: bool = True

    @property
    def trivially_infeasible(self) -> bool:
        """True when some circle has no candidate at all."""
        return any(not d.mask.any() for d in self.domains.values())


@dataclass(frozen=True)
class SolveOutcome:
    """Search result: feasible with an assignment, infeasible, or unknown.

    ``assignment`` maps circle id to its lattice index pair (i, j); it is
    present exactly when ``status == "feasible"``.  ``reason`` explains an
    unknown outcome ("timeout" or "node-limit").  A limit hit is always
    reported as unknown, never as infeasible.
    """

    status: Literal["feasible", "infeasible", "unknown"]
    assignment: dict[int, tuple[int, int]] | None = None
    reason: str | None = None
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def is_feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def is_infeasible(self) -> bool:
        return self.status == "infeasible"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"


def _points_from_cells(cells: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Lattice points incident to at least one surviving cell.

    A point is a corner of up to four cells; keeping it whenever any of
    them survives is the conservative way to carry a cell-level region
    over to the point-level restricted model.
    """
    out = np.zeros(shape, dtype=bool)
    cx, cy = cells.shape
    for dx in (-1, 0):
        for dy in (-1, 0):
            i0, i1 = max(0, -dx), min(shape[0] - 1, cx - 1 - dx)
            j0, j1 = max(0, -dy), min(shape[1] - 1, cy - 1 - dy)
            if i0 > i1 or j0 > j1:
                continue
            out[i0 : i1 + 1, j0 : j1 + 1] |= cells[
                i0 + dx : i1 + dx + 1, j0 + dy : j1 + dy + 1
            ]
    return out


def _symmetry_restrictions(
    grid: Grid, mode: Mode, n: int, shape: tuple[int, int]
) -> dict[int, np.ndarray]:
    """Index-level symmetry cuts for the first (and second) circle.

    Disc: quarter-turn rotations and the diagonal reflection map the
    lattice onto itself, so any packing can be moved so that circle 1 has
    x >= 0 and y >= 0 and circle 2 has y >= x.  In relaxed mode the same
    index inequalities are sound because a center with x >= 0 always lands
    in a cell with i >= theta under half-open cell snapping, and snapping
    is monotone for the diagonal constraint.

    Strip: only the length-axis reflection maps lattice points onto
    lattice points (the width is generally not a whole number of cells),
    so the restricted model pins circle 1 to the right half along x only.
    Relaxed cells need no lattice alignment — both strip reflections are
    container isometries — so circle 1 is also pinned to the top half.
    """
    ii = np.arange(shape[0])[:, None]
    jj = np.arange(shape[1])[None, :]
    out: dict[int, np.ndarray] = {}
    if grid.kind == "circle":
        out[1] = np.broadcast_to((ii >= grid.theta) & (jj >= grid.theta), shape)
        if n >= 2:
            out[2] = np.broadcast_to(jj >= ii, shape)
    elif mode == "restricted":
        out[1] = np.broadcast_to(ii >= (grid.theta + 1) // 2, shape)
    else:
        lo_j = math.floor(grid.width_exact / (2 * grid.delta_exact))
        out[1] = np.broadcast_to((ii >= grid.theta // 2) & (jj >= lo_j), shape)
    return out


def build_problem(
    instance: Instance,
    grid: Grid,
    mode: Mode,
    reduced_regions: RegionMap | None = None,
    *,
    symmetry: bool = True,
) -> FeasibilityProblem:
    """Assemble candidate domains and pair thresholds for one grid model.

    Domains are the mode's candidate sets intersected with the reduced
    regions (cell bitmaps; restricted points survive when incident to a
    surviving cell) and with the symmetry restrictions.  An instance that
    leaves some circle without candidates comes back flagged trivially
    infeasible rather than raising.
    """
    if mode not in ("restricted", "relaxed"):
        raise ValueError(f"mode must be 'restricted' or 'relaxed', got {mode!r}")
    if reduced_regions is not None and reduced_regions.grid != grid:
        raise ValueError("reduced regions were built for a different grid")

    container = instance.container
    domains: dict[int, CandidateSet] = {}
    sym = (
        _symmetry_restrictions(
            grid,
            mode,
            instance.n,
            (grid.points_x, grid.points_y)
            if mode == "restricted"
            else (grid.cells_x, grid.cells_y),
        )
        if symmetry
        else {}
    )
    for circle in instance.circles:
        if mode == "restricted":
            mask = restricted_candidates(grid, circle, container).mask.copy()
            if reduced_regions is not None:
                mask &= _points_from_cells(
                    reduced_regions.masks[circle.id], mask.shape
                )
        else:
            mask = relaxed_candidates(grid, circle, container).mask.copy()
            if reduced_regions is not None:
                mask &= reduced_regions.masks[circle.id]
        if circle.id in sym:
            mask &= sym[circle.id]
        domains[circle.id] = CandidateSet(circle.id, mode, mask)

    frontiers: dict[tuple[int, int], SeparationFrontier] = {}
    for a, b in combinations(range(1, instance.n + 1), 2):
        r_sum = exact(instance.radii[a - 1]) + exact(instance.radii[b - 1])
        bound = max(grid.max_index, math.ceil(r_sum / grid.delta_exact) + 1)
        frontiers[(a, b)] = separation_frontier(r_sum, grid.delta_exact, mode, bound)

    return FeasibilityProblem(
        instance=instance,
        grid=grid,
        mode=mode,
        domains=domains,
        radii=instance.radii,
        frontiers=frontiers,
        symmetry=symmetry,
    )


def assignment_to_placement(grid: Grid, assignment: Mapping[int, tuple[int, int]]) -> Placement:
    """Map a restricted-mode assignment to exact lattice coordinates."""
    centers = {cid: grid.point_exact(i, j) for cid, (i, j) in assignment.items()}
    return Placement(centers=centers, container_size=grid.size_exact)


def _assignment_satisfies(
    problem: FeasibilityProblem, assignment: Mapping[int, tuple[int, int]]
) -> bool:
    """Direct re-check of an assignment against domains and pair thresholds."""
    for cid in range(1, problem.instance.n + 1):
        if cid not in assignment:
            return False
        i, j = assignment[cid]
        mask = problem.domains[cid].mask
        if not (0 <= i < mask.shape[0] and 0 <= j < mask.shape[1] and mask[i, j]):
            return False
    for (a, b), frontier in problem.frontiers.items():
        ia, ja = assignment[a]
        ib, jb = assignment[b]
        if not frontier.satisfies_direct(ia - ib, ja - jb):
            return False
    return True


class _LimitHit(Exception):
    def __init__(self, reason: str) -> None:
        self.reason = reason


def _soddy_radius(r_a: float, r_b: float, r_c: float) -> float:
    """Radius of the largest circle that fits the cusp between three
    mutually tangent circles (inner Descartes solution)."""
    inv = 1.0 / r_a + 1.0 / r_b + 1.0 / r_c
    cross = 1.0 / (r_a * r_b) + 1.0 / (r_b * r_c) + 1.0 / (r_c * r_a)
    return 1.0 / (inv + 2.0 * math.sqrt(cross))


class _Engine:
    """Single-threaded depth-first search over one feasibility problem."""

    def __init__(
        self,
        problem: FeasibilityProblem,
        limits: SolveLimits,
        prune: PruneConfig,
        first_filter: list[tuple[int, int]] | None = None,
    ) -> None:
        self.problem = problem
        self.limits = limits
        self.prune = prune
        self.mode = problem.mode
        grid = problem.grid
        n = problem.instance.n
        self.n = n
        # circle ids are 1..n in non-increasing radius order
        self.masks = [problem.domains[cid].mask.copy() for cid in range(1, n + 1)]
        if first_filter is not None:
            keep = np.zeros_like(self.masks[0])
            for i, j in first_filter:
                keep[i, j] = True
            self.masks[0] &= keep

        self.min_sq = [[0] * n for _ in range(n)]
        for (a, b), frontier in problem.frontiers.items():
            self.min_sq[a - 1][b - 1] = frontier.min_sq_steps
            self.min_sq[b - 1][a - 1] = frontier.min_sq_steps

        radii = problem.radii
        if self.mode == "restricted":
            self.eff = list(radii)
        else:
            shrink = float(grid.delta) * math.sqrt(2.0) / 2.0
            self.eff = [max(0.0, r - shrink) for r in radii]
        areas = [math.pi * r * r for r in self.eff]
        self.prefix_area = [0.0] * (n + 1)
        for t, a in enumerate(areas):
            self.prefix_area[t + 1] = self.prefix_area[t] + a
        total = self.prefix_area[n]
        self.suffix_area = [total - p for p in self.prefix_area]
        if grid.kind == "circle":
            self.container_area = math.pi * grid.size * grid.size
        else:
            self.container_area = grid.size * grid.width
        self.area_margin = 1e-9 * self.container_area

        # exact tangency thresholds (restricted only): squared step count at
        # which a pair of full circles is exactly tangent, when representable
        self.tangent_sq: dict[tuple[int, int], int] = {}
        if self.mode == "restricted" and prune.area:
            for a, b in combinations(range(n), 2):
                ratio = (exact(radii[a]) + exact(radii[b])) / grid.delta_exact
                sq = ratio * ratio
                if sq.denominator == 1:
                    self.tangent_sq[(a, b)] = int(sq)

        # forbidden-offset windows per pair, used both for conditional
        # deletion and for the vectorized last-level scan
        self.kernels: dict[tuple[int, int], tuple[np.ndarray, int] | None] = {}
        for a, b in combinations(range(n), 2):
            self.kernels[(a, b)] = self._build_kernel(self.min_sq[a][b])

        if grid.kind == "circle":
            ref = (float(grid.theta), float(grid.theta))
        else:
            ref = (
                grid.theta / 2.0,
                float(grid.width_exact / (2 * grid.delta_exact)),
            )
        if self.mode == "relaxed":
            ref = (ref[0] - 0.5, ref[1] - 0.5)
        self.center_ref = ref

        self.positions: list[tuple[int, int] | None] = [None] * n
        self.idle = 0.0
        self.nodes = 0
        self._next_time_check = 0
        self._deadline = (
            time.monotonic() + limits.time_seconds
            if limits.time_seconds is not None
            else None
        )

    def _build_kernel(self, min_sq: int) -> tuple[np.ndarray, int] | None:
        if self.mode == "restricted":
            m = math.isqrt(max(0, min_sq - 1))
        else:
            m = math.isqrt(max(0, min_sq - 1)) - 1
        if m < 0:
            return None
        offs = np.arange(-m, m + 1)
        if self.mode == "restricted":
            d2 = offs[:, None] ** 2 + offs[None, :] ** 2
            return (d2 < min_sq), m
        a = (np.abs(offs) + 1) ** 2
        return ((a[:, None] + a[None, :]) < min_sq), m

    def _forbidden(self, a: int, b: int, di: int, dj: int) -> bool:
        """True when the offset violates the pair's separation threshold."""
        di, dj = abs(di), abs(dj)
        if self.mode == "restricted":
            return di * di + dj * dj < self.min_sq[a][b]
        return (di + 1) ** 2 + (dj + 1) ** 2 < self.min_sq[a][b]

    def _tick(self, count: int = 1) -> None:
        self.nodes += count
        if self.nodes > self.limits.max_nodes:
            raise _LimitHit("node-limit")
        if self._deadline is not None and self.nodes >= self._next_time_check:
            self._next_time_check = self.nodes + 256
            if time.monotonic() > self._deadline:
                raise _LimitHit("timeout")

    def _ordered(self, t: int, mask: np.ndarray) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(mask)
        if ii.size == 0:
            return []
        if t == 0:
            key = (ii - self.center_ref[0]) ** 2 + (jj - self.center_ref[1]) ** 2
        else:
            pi, pj = self.positions[t - 1]
            key = (ii - pi) ** 2 + (jj - pj) ** 2
        order = np.lexsort((jj, ii, key))
        return [(int(ii[o]), int(jj[o])) for o in order]

    def _area_prunes(self, t: int) -> bool:
        remaining = self.container_area - self.prefix_area[t] - self.idle
        return self.suffix_area[t] > remaining + self.area_margin

    def _bbox(self, mask: np.ndarray) -> tuple[int, int, int, int] | None:
        # boolean axis reductions instead of nonzero: the index arrays the
        # latter materializes dominate the whole search at large grids
        rows = mask.any(axis=1)
        imin = int(rows.argmax())
        if not rows[imin]:
            return None
        cols = mask.any(axis=0)
        imax = int(rows.size - 1 - rows[::-1].argmax())
        jmin = int(cols.argmax())
        jmax = int(cols.size - 1 - cols[::-1].argmax())
        return imin, imax, jmin, jmax

    def _farthest_prunes(self, t: int) -> bool:
        """Even the farthest candidates of the two largest unassigned
        circles are too close (bounding-box upper bound on distance)."""
        box_a = self._bbox(self.masks[t])
        box_b = self._bbox(self.masks[t + 1])
        if box_a is None or box_b is None:
            return True
        max_di = max(box_a[1] - box_b[0], box_b[1] - box_a[0])
        max_dj = max(box_a[3] - box_b[2], box_b[3] - box_a[2])
        min_sq = self.min_sq[t][t + 1]
        if self.mode == "restricted":
            return max_di * max_di + max_dj * max_dj < min_sq
        return (max_di + 1) ** 2 + (max_dj + 1) ** 2 < min_sq

    def _without_forbidden(
        self, mask: np.ndarray, pair: tuple[int, int], i: int, j: int
    ) -> np.ndarray | None:
        """Copy of ``mask`` with cells conflicting with (i, j) cleared, or
        None when the kernel window misses the mask entirely."""
        entry = self.kernels.get((min(pair), max(pair)))
        if entry is None:
            return None
        kernel, m = entry
        nx, ny = mask.shape
        r0, r1 = max(0, i - m), min(nx - 1, i + m)
        c0, c1 = max(0, j - m), min(ny - 1, j + m)
        if r0 > r1 or c0 > c1:
            return None
        out = mask.copy()
        out[r0 : r1 + 1, c0 : c1 + 1] &= ~kernel[
            r0 - i + m : r1 - i + m + 1, c0 - j + m : c1 - j + m + 1
        ]
        return out

    def _conflicts(self, t: int, i: int, j: int) -> bool:
        for u in range(t):
            pi, pj = self.positions[u]
            if self._forbidden(u, t, i - pi, j - pj):
                return True
        return False

    def _new_idle(self, t: int, i: int, j: int) -> float:
        """Idle area sealed off by triples of exactly tangent assigned
        circles that the new assignment completes.

        Counted only when the cusp cannot host even the smallest circle
        (inner tangent radius below it), so the estimate never over-prunes.
        """
        if self.mode != "restricted" or not self.tangent_sq:
            return 0.0
        tangent_to_t = []
        for u in range(t):
            sq = self.tangent_sq.get((u, t))
            if sq is None:
                continue
            pi, pj = self.positions[u]
            if (i - pi) ** 2 + (j - pj) ** 2 == sq:
                tangent_to_t.append(u)
        if len(tangent_to_t) < 2:
            return 0.0
        contrib = 0.0
        smallest = self.eff[self.n - 1]
        radii = self.problem.radii
        for a, b in combinations(tangent_to_t, 2):
            sq = self.tangent_sq.get((a, b))
            if sq is None:
                continue
            pa, pb = self.positions[a], self.positions[b]
            if (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2 != sq:
                continue
            if _soddy_radius(radii[a], radii[b], radii[t]) < smallest * (1 - 1e-9):
                contrib += idle_area_triple(radii[a], radii[b], radii[t])
        return contrib

    def _leaf(self, t: int) -> bool:
        """Vectorized last level: any surviving candidate completes the
        packing once cleared against every assigned circle."""
        mask = self.masks[t]
        if not self.prune.conditional:
            for u in range(t):
                pi, pj = self.positions[u]
                cleared = self._without_forbidden(mask, (u, t), pi, pj)
                if cleared is not None:
                    mask = cleared
        self._tick(max(1, int(mask.sum())))
        if not mask.any():
            return False
        choice = self._ordered(t, mask)[0]
        self.positions[t] = choice
        return True

    def _dfs(self, t: int) -> bool:
        if self.prune.area and self._area_prunes(t):
            return False
        if self.prune.farthest_pair and t + 1 < self.n and self._farthest_prunes(t):
            return False
        if t == self.n:
            return True
        if t == self.n - 1:
            return self._leaf(t)

        for i, j in self._ordered(t, self.masks[t]):
            self._tick()
            if not self.prune.conditional and self._conflicts(t, i, j):
                continue
            self.positions[t] = (i, j)
            saved: list[tuple[int, np.ndarray]] = []
            dead = False
            if self.prune.conditional:
                for k in range(t + 1, self.n):
                    cleared = self._without_forbidden(self.masks[k], (t, k), i, j)
                    if cleared is None:
                        continue
                    saved.append((k, self.masks[k]))
                    self.masks[k] = cleared
                    if not cleared.any():
                        dead = True
                        break
            idle_before = self.idle
            if self.prune.area:
                self.idle += self._new_idle(t, i, j)
            found = not dead and self._dfs(t + 1)
            self.idle = idle_before
            for k, old in saved:
                self.masks[k] = old
            if found:
                return True
            self.positions[t] = None
        return False

    def run(self) -> SolveOutcome:
        start = time.monotonic()
        try:
            found = self._dfs(0)
        except _LimitHit as hit:
            return SolveOutcome(
                status="unknown",
                reason=hit.reason,
                nodes=self.nodes,
                elapsed=time.monotonic() - start,
            )
        elapsed = time.monotonic() - start
        if not found:
            return SolveOutcome(status="infeasible", nodes=self.nodes, elapsed=elapsed)
        assignment = {
            t + 1: self.positions[t] for t in range(self.n)
        }
        if not _assignment_satisfies(self.problem, assignment):
            raise RuntimeError("internal error: assignment failed re-verification")
        return SolveOutcome(
            status="feasible", assignment=assignment, nodes=self.nodes, elapsed=elapsed
        )


def _solve_chunk(
    problem: FeasibilityProblem,
    chunk: list[tuple[int, int]],
    limits: SolveLimits,
    prune: PruneConfig,
) -> SolveOutcome:
    """Worker entry point: search with the first circle pinned to a chunk."""
    return _Engine(problem, limits, prune, first_filter=chunk).run()


def solve(
    problem: FeasibilityProblem,
    limits: SolveLimits | None = None,
    prune: PruneConfig | None = None,
    threads: int = 1,
) -> SolveOutcome:
    """Decide one feasibility problem within the given budget.

    Single-threaded search is deterministic.  With ``threads > 1`` the
    first circle's candidates are split round-robin into chunks pulled
    from a process pool; a feasible answer from any worker is re-verified
    against the problem before being reported, infeasible requires every
    chunk to be exhausted, and any chunk hitting its limit downgrades the
    combined answer to unknown.
    """
    limits = limits or SolveLimits()
    prune = prune or PruneConfig()
    start = time.monotonic()
    if problem.trivially_infeasible:
        return SolveOutcome(status="infeasible", nodes=0, elapsed=0.0)
    if threads <= 1:
        return _Engine(problem, limits, prune).run()

    probe = _Engine(problem, limits, prune)
    order = probe._ordered(0, probe.masks[0])
    chunk_count = max(1, min(threads * 4, len(order)))
    chunks = [order[k::chunk_count] for k in range(chunk_count)]

    total_nodes = 0
    unknown_reason: str | None = None
    pool = ProcessPoolExecutor(max_workers=threads)
    try:
        pending = {
            pool.submit(_solve_chunk, problem, chunk, limits, prune)
            for chunk in chunks
        }
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                outcome = fut.result()
                total_nodes += outcome.nodes
                if outcome.is_feasible:
                    if not _assignment_satisfies(problem, outcome.assignment):
                        raise RuntimeError(
                            "internal error: worker assignment failed re-verification"
                        )
                    for other in pending:
                        other.cancel()
                    return SolveOutcome(
                        status="feasible",
                        assignment=outcome.assignment,
                        nodes=total_nodes,
                        elapsed=time.monotonic() - start,
                    )
                if outcome.is_unknown and unknown_reason is None:
                    unknown_reason = outcome.reason
    finally:
        pool.shutdown(wait=False, cancel_futures=True)
    elapsed = time.monotonic() - start
    if unknown_reason is not None:
        return SolveOutcome(
            status="unknown", reason=unknown_reason, nodes=total_nodes, elapsed=elapsed
        )
    return SolveOutcome(status="infeasible", nodes=total_nodes, elapsed=elapsed)
