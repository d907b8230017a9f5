"""Certified lower bounds and constructive upper bounds for packing instances.

Four lower-bound methods of increasing cost are provided, each returning a
value that provably cannot exceed the optimal container size:

- ``lb1``: the two largest circles must fit side by side.
- ``lb2``: total circle area must fit inside the container area.
- ``lb3``: bisection on the grid-based region-elimination test, which can
  certify infeasibility of candidate sizes between ``max(lb1, lb2)`` and the
  current upper bound.
- ``lb4``: an exact combinatorial selection of mutually tangent circle
  triples whose pocket areas provably stay uncovered, tightening the area
  bound of ``lb2``.

The constructive side (``initial_upper_bound``) builds a feasible placement
greedily and certifies it with exact rational arithmetic, so the returned
value is a true upper bound, not a float estimate.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Mapping, Sequence

from .geometry import Instance, Placement, trivial_bounds, verify_placement
from .reduction import region_feasible

__all__ = [
    "BoundReport",
    "lb1",
    "lb2",
    "lb3",
    "lb4",
    "idle_area_triple",
    "idle_area_with_container",
    "initial_upper_bound",
    "compute_bounds",
    "load_best_known",
]

_REPAIR_ATTEMPTS = 200


def lb1(instance: Instance) -> float:
    """Lower bound from the two largest circles.

    Disc containers must span the two largest circles placed side by side;
    strips must be long enough for the largest circle's diameter.
    """
    radii = instance.radii
    if instance.is_strip:
        return 2.0 * radii[0]
    if len(radii) == 1:
        return radii[0]
    return radii[0] + radii[1]


def lb2(instance: Instance) -> float:
    """Lower bound from total area.

    The circles jointly cover ``sum(pi * r^2)``, so a disc container needs
    radius at least ``sqrt(sum(r^2))`` and a strip of fixed width ``W`` needs
    length at least ``sum(pi * r^2) / W``.
    """
    area = sum(r * r for r in instance.radii)
    if instance.is_strip:
        return math.pi * area / instance.container.width
    return math.sqrt(area)


def lb3(
    instance: Instance,
    delta_r: float | None = None,
    tolerance: float | None = None,
    *,
    upper_seed: float | None = None,
) -> float:
    """Lower bound from bisection on the region-elimination test.

    Searches for the largest container size at which the conservative region
    test already certifies infeasibility.  Sizes where the test passes prove
    nothing and shrink the search interval from above; only certified-empty
    sizes raise the returned bound, so the result is always valid.
    """
    base = max(lb1(instance), lb2(instance))
    if delta_r is None:
        delta_r = 0.45 * instance.min_radius
    delta_r = min(delta_r, 0.45 * instance.min_radius)
    if tolerance is None:
        tolerance = 1e-3 * base
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    high = trivial_bounds(instance)[1] if upper_seed is None else upper_seed
    certified = base
    while high - certified > tolerance:
        mid = 0.5 * (certified + high)
        if region_feasible(instance, mid, delta_r):
            high = mid
        else:
            certified = mid
    return max(base, certified)


def idle_area_triple(r_c: float, r_k: float, r_l: float) -> float:
    """Area of the pocket enclosed by three mutually tangent circles.

    The circle centers form a triangle with side lengths equal to the radius
    sums; the pocket is that triangle minus the three circular sectors cut
    off at its corners.
    """
    if min(r_c, r_k, r_l) <= 0:
        raise ValueError("radii must be positive")
    s = r_c + r_k + r_l
    total = math.sqrt(s * r_c * r_k * r_l)
    for a, b, c in ((r_c, r_k, r_l), (r_k, r_l, r_c), (r_l, r_c, r_k)):
        cos_angle = (a * s - b * c) / ((a + b) * (a + c))
        cos_angle = max(-1.0, min(1.0, cos_angle))
        total -= 0.5 * a * a * math.acos(cos_angle)
    return total


def idle_area_with_container(r_c: float, r_k: float, R_eval: float) -> float:
    """Area of the cusp between two tangent circles and the container wall.

    Both circles are internally tangent to a disc container of radius
    ``R_eval`` and tangent to each other; the cusp is the region between
    them and the wall.  It is computed from the triangle of the three
    tangency points, plus the container-side circular segment, minus the two
    circle-side segments.  Degenerate or impossible configurations
    (``R_eval <= r_c + r_k``, where the circle centers become collinear with
    the container center) return 0, which is always a valid underestimate.

    The area shrinks as ``R_eval`` grows (a flatter wall leaves a thinner
    cusp), so evaluating at an upper bound of the true container size
    underestimates the true cusp area, keeping derived lower bounds valid.
    """
    if min(r_c, r_k) <= 0:
        raise ValueError("radii must be positive")
    if R_eval <= r_c + r_k:
        return 0.0
    dist_c = R_eval - r_c
    dist_k = R_eval - r_k
    cos_phi = (dist_c * dist_c + dist_k * dist_k - (r_c + r_k) ** 2) / (
        2.0 * dist_c * dist_k
    )
    cos_phi = max(-1.0, min(1.0, cos_phi))
    phi = math.acos(cos_phi)
    center_c = (dist_c, 0.0)
    center_k = (dist_k * math.cos(phi), dist_k * math.sin(phi))
    touch_wall_c = (R_eval, 0.0)
    touch_wall_k = (R_eval * math.cos(phi), R_eval * math.sin(phi))
    gap = (center_k[0] - center_c[0], center_k[1] - center_c[1])
    gap_len = math.hypot(*gap)
    touch_pair = (
        center_c[0] + r_c * gap[0] / gap_len,
        center_c[1] + r_c * gap[1] / gap_len,
    )

    def _triangle(a: tuple, b: tuple, c: tuple) -> float:
        return (
            abs(
                a[0] * (b[1] - c[1])
                + b[0] * (c[1] - a[1])
                + c[0] * (a[1] - b[1])
            )
            / 2.0
        )

    def _segment(center: tuple, radius: float, p: tuple, q: tuple) -> float:
        v1 = (p[0] - center[0], p[1] - center[1])
        v2 = (q[0] - center[0], q[1] - center[1])
        cos_psi = (v1[0] * v2[0] + v1[1] * v2[1]) / (radius * radius)
        cos_psi = max(-1.0, min(1.0, cos_psi))
        psi = math.acos(cos_psi)
        return 0.5 * radius * radius * (psi - math.sin(psi))

    area = _triangle(touch_wall_c, touch_wall_k, touch_pair)
    area += 0.5 * R_eval * R_eval * (phi - math.sin(phi))
    area -= _segment(center_c, r_c, touch_wall_c, touch_pair)
    area -= _segment(center_k, r_k, touch_wall_k, touch_pair)
    return max(0.0, area)


def _kissing_limit(r_c: float, r_min: float) -> int:
    """Maximum number of circles of radius >= r_min tangent to one of radius r_c."""
    ratio = r_min / (r_c + r_min)
    return int(math.floor(2.0 * math.pi / (2.0 * math.asin(ratio))))


def _normalize_kappa(
    value: int | Mapping[int, int] | None,
    nodes: Sequence[int],
    default: Mapping[int, int],
) -> dict[int, int]:
    if value is None:
        return dict(default)
    if isinstance(value, int):
        return {node: value for node in nodes}
    out = dict(default)
    for node, bound in value.items():
        out[int(node)] = int(bound)
    return out


def lb4(
    instance: Instance,
    ub_hint: float,
    *,
    kappa_lower: int | Mapping[int, int] | None = None,
    kappa_upper: int | Mapping[int, int] | None = None,
    max_circles: int = 12,
    node_budget: int = 2_000_000,
) -> float | None:
    """Lower bound from an exact selection of tangent-triple pocket areas.

    Builds the triple-selection model over all circles plus a pseudo-node 0
    for the container wall.  Selecting a triple claims its pocket area as
    provably uncovered; per-node selection counts are constrained between
    ``kappa_lower`` and ``kappa_upper``.  Overlap corrections apply when a
    circle triple and all three surrounding wall pairs are selected at once.
    The model is minimized exactly by depth-first enumeration, so the
    resulting idle-area total is a certified minimum; the bound is
    ``sqrt((total circle area + minimum idle area) / pi)``.

    With the default ``kappa_lower = 0`` the empty selection is feasible and
    the bound degenerates to ``max(lb1, lb2)``; positive lower counts are a
    caller-supplied structural assumption.  Wall-adjacent pocket areas are
    evaluated at ``ub_hint`` because they shrink as the container grows.
    Returns None when the model is skipped (strip containers, more than
    ``max_circles`` circles, or enumeration exceeding ``node_budget``).
    """
    if instance.is_strip:
        return None
    n = instance.n
    if n > max_circles:
        return None
    base = max(lb1(instance), lb2(instance))
    radii = {c.id: c.radius for c in instance.circles}
    r_min = instance.min_radius
    nodes = list(range(0, n + 1))
    default_upper = {0: max(1, n)}
    for cid in range(1, n + 1):
        limit = _kissing_limit(radii[cid], r_min)
        default_upper[cid] = max(1, limit * (limit - 1) // 2)
    kappa_lo = _normalize_kappa(kappa_lower, nodes, {node: 0 for node in nodes})
    kappa_hi = _normalize_kappa(kappa_upper, nodes, default_upper)

    circle_area = math.pi * sum(r * r for r in instance.radii)
    if all(kappa_lo[node] == 0 for node in nodes):
        # The empty selection is feasible with zero idle area, and overlap
        # corrections can push the minimum below zero, which clamps to zero.
        return max(base, math.sqrt(circle_area / math.pi))

    triples = list(combinations(nodes, 3))
    if not triples:
        return max(base, math.sqrt(circle_area / math.pi))

    def pocket_area(triple: tuple[int, int, int]) -> float:
        c, k, l = triple
        if c == 0:
            return idle_area_with_container(radii[k], radii[l], ub_hint)
        return idle_area_triple(radii[c], radii[k], radii[l])

    delta = {t: pocket_area(t) for t in triples}
    index_of = {t: i for i, t in enumerate(triples)}
    # Overlap corrections: when circles c, k, l are mutually tangent and the
    # wall pairs (c,k), (k,l), (c,l) are all selected, the wide wall pocket
    # of (c,l) already contains circle k and the three smaller pockets.
    corrections = []
    for c, k, l in combinations(range(1, n + 1), 3):
        quad = (
            index_of[(c, k, l)],
            index_of[(0, c, k)],
            index_of[(0, k, l)],
            index_of[(0, c, l)],
        )
        rho = (
            delta[(0, c, k)]
            + delta[(0, k, l)]
            + delta[(c, k, l)]
            + math.pi * radii[k] * radii[k]
        )
        corrections.append((quad, rho))

    remaining_per_node = []
    total_count = {node: 0 for node in nodes}
    for i in range(len(triples) + 1):
        counts = {node: 0 for node in nodes}
        for t in triples[i:]:
            for node in t:
                counts[node] += 1
        remaining_per_node.append(counts)

    chosen = [False] * len(triples)
    counts = {node: 0 for node in nodes}
    best = math.inf
    visited = 0
    budget_blown = False

    max_saving = sum(rho for _, rho in corrections)

    def correction_total() -> float:
        total = 0.0
        for quad, rho in corrections:
            if all(chosen[i] for i in quad):
                total -= rho
        return total

    def dfs(i: int, partial: float) -> None:
        nonlocal best, visited, budget_blown
        visited += 1
        if visited > node_budget:
            budget_blown = True
            return
        if budget_blown:
            return
        if partial - max_saving >= best:
            return
        for node in nodes:
            if counts[node] + remaining_per_node[i][node] < kappa_lo[node]:
                return
        if i == len(triples):
            value = partial + correction_total()
            if value < best:
                best = value
            return
        triple = triples[i]
        if all(counts[node] < kappa_hi[node] for node in triple):
            chosen[i] = True
            for node in triple:
                counts[node] += 1
            dfs(i + 1, partial + delta[triple])
            for node in triple:
                counts[node] -= 1
            chosen[i] = False
        dfs(i + 1, partial)

    dfs(0, 0.0)
    if budget_blown or math.isinf(best):
        return None
    idle_min = max(0.0, best)
    return max(base, math.sqrt((circle_area + idle_min) / math.pi))


# ---------------------------------------------------------------------------
# Constructive upper bounds
# ---------------------------------------------------------------------------


def _exact_pair_scale(instance: Instance, centers: dict[int, tuple[float, float]]) -> float | None:
    """Smallest float factor that removes all exact pairwise overlaps, or None."""
    worst = Fraction(0)
    for a, b in combinations(instance.circles, 2):
        ax, ay = centers[a.id]
        bx, by = centers[b.id]
        dx = Fraction(ax) - Fraction(bx)
        dy = Fraction(ay) - Fraction(by)
        dist_sq = dx * dx + dy * dy
        min_sq = (Fraction(a.radius) + Fraction(b.radius)) ** 2
        if dist_sq == 0:
            return None
        ratio = min_sq / dist_sq
        if ratio > worst:
            worst = ratio
    if worst <= 1:
        return 1.0
    scale = math.sqrt(float(worst))
    for _ in range(4):
        if Fraction(scale) ** 2 >= worst:
            break
        scale = math.nextafter(scale, math.inf)
    return scale


def _certify_disc_placement(
    instance: Instance, centers: dict[int, tuple[float, float]]
) -> tuple[float, Placement]:
    """Repair float rounding and return an exactly verified (radius, placement)."""
    pts = {cid: (float(x), float(y)) for cid, (x, y) in centers.items()}
    for _ in range(_REPAIR_ATTEMPTS):
        scale = _exact_pair_scale(instance, pts)
        if scale is None:
            raise RuntimeError("coincident centers in constructed placement")
        if scale > 1.0:
            # A bare minimal scale can be cancelled by float rounding; grow
            # by at least 1e-12 relative so one application clears all dirt.
            scale = max(scale, 1.0 + 1e-12)
            pts = {cid: (x * scale, y * scale) for cid, (x, y) in pts.items()}
            continue
        size = max(
            math.hypot(x, y) + c.radius
            for c, (x, y) in ((c, pts[c.id]) for c in instance.circles)
        )
        placement = Placement(centers=pts, container_size=size)
        for _ in range(64):
            report = verify_placement(instance, placement, tolerance=0.0)
            if report.feasible:
                return placement.container_size, placement
            if report.worst_overlap_violation > 0:
                break
            size = math.nextafter(size, math.inf)
            placement = Placement(centers=pts, container_size=size)
        else:
            break
        # Overlap resurfaced after scaling: nudge outward slightly more.
        pts = {cid: (x * (1.0 + 2e-16), y * (1.0 + 2e-16)) for cid, (x, y) in pts.items()}
    raise RuntimeError("failed to certify constructed placement")


def _certify_strip_placement(
    instance: Instance, centers: dict[int, tuple[float, float]]
) -> tuple[float, Placement]:
    """Repair float rounding for a strip placement; returns (length, placement)."""
    width = instance.container.width
    width_exact = Fraction(width)
    pts = {}
    for circle in instance.circles:
        x, y = centers[circle.id]
        x = float(x)
        y = float(y)
        r = Fraction(circle.radius)
        for _ in range(8):
            if Fraction(y) - r >= 0:
                break
            y = math.nextafter(y, math.inf)
        for _ in range(8):
            if Fraction(y) + r <= width_exact:
                break
            y = math.nextafter(y, -math.inf)
        if Fraction(y) - r < 0 or Fraction(y) + r > width_exact:
            raise RuntimeError("circle cannot satisfy strip width exactly")
        pts[circle.id] = (x, y)
    for _ in range(_REPAIR_ATTEMPTS):
        worst = Fraction(0)
        for a, b in combinations(instance.circles, 2):
            ax, ay = pts[a.id]
            bx, by = pts[b.id]
            dx = Fraction(ax) - Fraction(bx)
            dy = Fraction(ay) - Fraction(by)
            dist_sq = dx * dx + dy * dy
            min_sq = (Fraction(a.radius) + Fraction(b.radius)) ** 2
            gap = min_sq - dist_sq
            if gap > worst:
                worst = gap
        if worst > 0:
            # Stretch along the strip axis only; width stays feasible.
            pts = {cid: (x * (1.0 + 1e-12), y) for cid, (x, y) in pts.items()}
            shift = min(x - c.radius for c, (x, _) in ((c, pts[c.id]) for c in instance.circles))
            if shift < 0:
                pts = {cid: (x - shift, y) for cid, (x, y) in pts.items()}
            continue
        for circle in instance.circles:
            x, y = pts[circle.id]
            r = Fraction(circle.radius)
            while Fraction(x) - r < 0:
                x = math.nextafter(x, math.inf)
            pts[circle.id] = (x, y)
        length = max(x + c.radius for c, (x, _) in ((c, pts[c.id]) for c in instance.circles))
        length = max(length, 2.0 * instance.max_radius)
        placement = Placement(centers=dict(pts), container_size=length)
        for _ in range(64):
            report = verify_placement(instance, placement, tolerance=0.0)
            if report.feasible:
                return placement.container_size, placement
            length = math.nextafter(length, math.inf)
            placement = Placement(centers=dict(pts), container_size=length)
        break
    raise RuntimeError("failed to certify constructed strip placement")


def _enclosing_reach(
    circles: Sequence, positions: dict[int, tuple[float, float]], center: tuple[float, float]
) -> float:
    return max(
        math.hypot(positions[c.id][0] - center[0], positions[c.id][1] - center[1]) + c.radius
        for c in circles
    )


def _pair_tangent_positions(
    p: tuple[float, float], rp: float, q: tuple[float, float], rq: float, r: float
) -> list[tuple[float, float]]:
    """Centers of a circle of radius r tangent to two placed circles."""
    d1 = rp + r
    d2 = rq + r
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    dist = math.hypot(dx, dy)
    if dist < 1e-12 or dist > d1 + d2 or dist < abs(d1 - d2):
        return []
    a = (d1 * d1 - d2 * d2 + dist * dist) / (2.0 * dist)
    h_sq = d1 * d1 - a * a
    if h_sq < 0:
        return []
    h = math.sqrt(max(0.0, h_sq))
    mx = p[0] + a * dx / dist
    my = p[1] + a * dy / dist
    ux, uy = -dy / dist, dx / dist
    return [(mx + h * ux, my + h * uy), (mx - h * ux, my - h * uy)]


def _greedy_disc_centers(instance: Instance, angles: int = 24) -> dict[int, tuple[float, float]]:
    """Place circles in decreasing radius, each minimizing the enclosing reach."""
    circles = instance.circles
    positions: dict[int, tuple[float, float]] = {circles[0].id: (0.0, 0.0)}
    placed = [circles[0]]
    slack = 1e-9
    for circle in circles[1:]:
        r = circle.radius
        candidates: list[tuple[float, float]] = []
        for other in placed:
            ox, oy = positions[other.id]
            dist = other.radius + r
            for k in range(angles):
                ang = 2.0 * math.pi * k / angles
                candidates.append((ox + dist * math.cos(ang), oy + dist * math.sin(ang)))
        for first, second in combinations(placed, 2):
            candidates.extend(
                _pair_tangent_positions(
                    positions[first.id],
                    first.radius,
                    positions[second.id],
                    second.radius,
                    r,
                )
            )
        feasible = []
        for x, y in candidates:
            ok = True
            for other in placed:
                ox, oy = positions[other.id]
                need = other.radius + r
                if (x - ox) ** 2 + (y - oy) ** 2 < need * need - slack:
                    ok = False
                    break
            if ok:
                feasible.append((x, y))
        if not feasible:
            reach = _enclosing_reach(placed, positions, (0.0, 0.0))
            feasible = [(reach + r, 0.0)]
        current = _enclosing_reach(placed, positions, (0.0, 0.0))
        best = min(
            feasible,
            key=lambda pos: (
                round(max(current, math.hypot(pos[0], pos[1]) + r), 9),
                round(pos[0], 9),
                round(pos[1], 9),
            ),
        )
        positions[circle.id] = best
        placed.append(circle)
    return positions


def _recenter(instance: Instance, positions: dict[int, tuple[float, float]]) -> dict[int, tuple[float, float]]:
    """Shift centers so the enclosing reach around the origin is minimized."""
    from scipy.optimize import minimize

    circles = instance.circles

    def objective(z):
        return _enclosing_reach(circles, positions, (z[0], z[1]))

    starts = [(0.0, 0.0)]
    starts.append(
        (
            sum(positions[c.id][0] for c in circles) / len(circles),
            sum(positions[c.id][1] for c in circles) / len(circles),
        )
    )
    best_z = (0.0, 0.0)
    best_val = objective((0.0, 0.0))
    for start in starts:
        result = minimize(objective, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
        z = (float(result.x[0]), float(result.x[1]))
        for digits in (None, 12, 9, 6, 3):
            snapped = z if digits is None else (round(z[0], digits), round(z[1], digits))
            val = objective(snapped)
            if val < best_val - 1e-15 or (abs(val - best_val) <= 1e-15 and digits is not None):
                best_val = val
                best_z = snapped
    return {cid: (x - best_z[0], y - best_z[1]) for cid, (x, y) in positions.items()}


def _refine_disc(instance: Instance, positions: dict[int, tuple[float, float]]) -> dict[int, tuple[float, float]]:
    """One coordinate-wise pass pulling circles inward when strictly improving."""
    pts = dict(positions)
    circles = instance.circles
    for circle in circles:
        r = circle.radius
        for axis in (0, 1):
            step = 0.25 * instance.min_radius
            while step > 1e-9:
                x, y = pts[circle.id]
                current = _enclosing_reach(circles, pts, (0.0, 0.0))
                for sign in (-1.0, 1.0):
                    trial = (x + sign * step, y) if axis == 0 else (x, y + sign * step)
                    ok = True
                    for other in circles:
                        if other.id == circle.id:
                            continue
                        ox, oy = pts[other.id]
                        need = other.radius + r
                        if (trial[0] - ox) ** 2 + (trial[1] - oy) ** 2 < need * need:
                            ok = False
                            break
                    if not ok:
                        continue
                    pts[circle.id] = trial
                    if _enclosing_reach(circles, pts, (0.0, 0.0)) < current - 1e-13:
                        break
                    pts[circle.id] = (x, y)
                else:
                    step *= 0.5
    return pts


def _chain_disc_centers(instance: Instance) -> dict[int, tuple[float, float]]:
    """Tangent chain along the x-axis, centered around the origin."""
    total = sum(Fraction(r) for r in instance.radii)
    cursor = -total
    out: dict[int, tuple[float, float]] = {}
    for circle in instance.circles:
        r = Fraction(circle.radius)
        out[circle.id] = (float(cursor + r), 0.0)
        cursor += 2 * r
    return out


def _shelf_strip_centers(instance: Instance) -> dict[int, tuple[float, float]]:
    """Greedy left-to-right shelf placement alternating bottom and top rows."""
    width = instance.container.width
    out: dict[int, tuple[float, float]] = {}
    placed: list[tuple[float, float, float]] = []
    for circle in instance.circles:
        r = circle.radius
        y_options = [r]
        if width - r > r:
            y_options.append(width - r)
        best = None
        for y in y_options:
            x = r
            for px, py, pr in placed:
                min_dist = pr + r
                # Demand an explicit horizontal slack unless the pair is
                # vertically separated with margin; exact vertical tangency
                # cannot be repaired by stretching along the strip axis, and
                # the slack must dominate squared-distance float dirt.
                if abs(py - y) < min_dist * (1.0 + 1e-9):
                    need = max(min_dist * min_dist - (py - y) ** 2, 0.0)
                    x = max(x, px + math.sqrt(need) + 1e-6 * min_dist)
            if best is None or x < best[0] - 1e-15 or (
                abs(x - best[0]) <= 1e-15 and y < best[1]
            ):
                best = (x, y)
        assert best is not None
        out[circle.id] = best
        placed.append((best[0], best[1], r))
    return out


def initial_upper_bound(
    instance: Instance,
    best_known_table: Mapping[str, float] | None = None,
) -> tuple[float, Placement | None]:
    """Initial upper bound from a bundled table or a certified greedy placement.

    Returns the smaller of (a) the table value for this instance name, with
    no placement, and (b) a constructive placement (greedy tangent
    candidates for discs, shelf rows for strips, with a tangent-chain
    fallback) repaired until it passes exact verification.  The returned
    placement, when present, verifies feasibly at the returned size.
    """
    table_value: float | None = None
    if best_known_table and instance.name in best_known_table:
        table_value = float(best_known_table[instance.name])

    if instance.n == 1:
        radius = instance.radii[0]
        if instance.is_strip:
            size, placement = _certify_strip_placement(
                instance, {instance.circles[0].id: (radius, radius)}
            )
        else:
            size, placement = _certify_disc_placement(
                instance, {instance.circles[0].id: (0.0, 0.0)}
            )
        if table_value is not None and table_value < size:
            return table_value, None
        return size, placement

    candidates: list[tuple[float, Placement]] = []
    if instance.is_strip:
        candidates.append(_certify_strip_placement(instance, _shelf_strip_centers(instance)))
    else:
        greedy = _greedy_disc_centers(instance)
        greedy = _recenter(instance, greedy)
        greedy = _refine_disc(instance, greedy)
        greedy = _recenter(instance, greedy)
        candidates.append(_certify_disc_placement(instance, greedy))
        candidates.append(_certify_disc_placement(instance, _chain_disc_centers(instance)))
    size, placement = min(candidates, key=lambda item: item[0])
    if table_value is not None and table_value < size:
        return table_value, None
    return size, placement


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Certified bounds for one instance, with per-method wall times."""

    lb1: float
    lb2: float
    lb3: float | None
    lb4: float | None
    chosen_lb: float
    ub: float
    ub_placement: Placement | None
    timings: Mapping[str, float]

    def as_dict(self) -> dict:
        return {
            "lb1": self.lb1,
            "lb2": self.lb2,
            "lb3": self.lb3,
            "lb4": self.lb4,
            "chosen_lb": self.chosen_lb,
            "ub": self.ub,
            "timings": dict(self.timings),
        }


def compute_bounds(
    instance: Instance,
    *,
    use_lb3: bool = True,
    use_lb4: bool = True,
    delta_r: float | None = None,
    lb3_tolerance: float | None = None,
    best_known_table: Mapping[str, float] | None = None,
) -> BoundReport:
    """Compute all enabled bounds and join them into a BoundReport.

    The upper bound is computed first because the bisection bound and the
    triple-selection bound both consume it; those two then run in parallel.
    """
    timings: dict[str, float] = {}

    start = time.perf_counter()
    value1 = lb1(instance)
    timings["lb1"] = time.perf_counter() - start

    start = time.perf_counter()
    value2 = lb2(instance)
    timings["lb2"] = time.perf_counter() - start

    start = time.perf_counter()
    ub, placement = initial_upper_bound(instance, best_known_table)
    timings["ub"] = time.perf_counter() - start

    value3: float | None = None
    value4: float | None = None
    run3 = use_lb3
    run4 = use_lb4 and not instance.is_strip
    with ThreadPoolExecutor(max_workers=2) as pool:
        future3 = (
            pool.submit(
                _timed, lb3, instance, delta_r, lb3_tolerance, upper_seed=ub
            )
            if run3
            else None
        )
        future4 = pool.submit(_timed, lb4, instance, ub) if run4 else None
        if future3 is not None:
            value3, timings["lb3"] = future3.result()
        if future4 is not None:
            value4, timings["lb4"] = future4.result()

    chosen = max(v for v in (value1, value2, value3, value4) if v is not None)
    return BoundReport(
        lb1=value1,
        lb2=value2,
        lb3=value3,
        lb4=value4,
        chosen_lb=chosen,
        ub=ub,
        ub_placement=placement,
        timings=timings,
    )


def _timed(func, *args, **kwargs):
    start = time.perf_counter()
    value = func(*args, **kwargs)
    return value, time.perf_counter() - start


def load_best_known(path: str | None = None) -> dict[str, float]:
    """Load the bundled (or user-supplied) best-known container size table."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    else:
        text = (
            resources.files("circlepack")
            .joinpath("data/best_known.txt")
            .read_text(encoding="utf-8")
        )
    table: dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, value = line.split()
        table[name] = float(value)
    return table
