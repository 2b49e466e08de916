# src/behaviormap/intervention_engine.py

"""Intervention paths across a behavior map.

An intervention is a piecewise-linear path in the normalized trait square
(``(gamma, p)`` with both axes scaled to [0, 1]). Each segment is sampled
uniformly and read off the map by nearest cell; every label change along
the way is one crossing of a behavior boundary.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .atlas_engine import (
    BehaviorMap,
    check_equivalent,
    edge_switch_positions,
    maybe_signature,
    nearest_index,
)
from .defaults import SAMPLES_PER_SEGMENT
from .errors import (
    InvalidParamsError,
    NoPathFoundError,
    NotEquivalentError,
    PathOutOfBoundsError,
)

Point = Tuple[float, float]


@dataclass(frozen=True)
class InterventionPath:
    waypoints: Tuple[Point, ...]

    def __post_init__(self):
        points = []
        for wp in self.waypoints:
            try:
                g, p = (float(x) for x in wp)
            except (TypeError, ValueError):
                raise PathOutOfBoundsError(f"waypoint {wp!r} is not a (gamma, p) pair") from None
            if not (math.isfinite(g) and math.isfinite(p) and 0.0 <= g <= 1.0 and 0.0 <= p <= 1.0):
                raise PathOutOfBoundsError(f"waypoint ({g}, {p}) lies outside the unit square")
            points.append((g, p))
        if len(points) < 2:
            raise PathOutOfBoundsError(f"a path needs at least 2 waypoints, got {len(points)}")
        object.__setattr__(self, "waypoints", tuple(points))

    def reversed(self) -> "InterventionPath":
        return InterventionPath(self.waypoints[::-1])

    def steps(self) -> List[Point]:
        """(delta gamma, delta p) of each segment."""
        return [(b[0] - a[0], b[1] - a[1]) for a, b in zip(self.waypoints, self.waypoints[1:])]


@dataclass(frozen=True)
class CrossingReport:
    crossings: int
    crossing_points: Tuple[Point, ...]
    labels_sequence: Tuple[str, ...]


def _sample_path(path: InterventionPath, samples_per_segment: int) -> np.ndarray:
    n = samples_per_segment - 1
    k = np.arange(samples_per_segment, dtype=float)[:, None]
    chunks = []
    for s, (a, b) in enumerate(zip(path.waypoints, path.waypoints[1:])):
        # integer weights keep a reversed segment bit-identical to the forward one
        pts = (np.asarray(a) * (n - k) + np.asarray(b) * k) / n
        chunks.append(pts if s == 0 else pts[1:])
    return np.concatenate(chunks)


def path_crossings(
    m: BehaviorMap,
    path: InterventionPath,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
) -> CrossingReport:
    if samples_per_segment < 2:
        raise InvalidParamsError(f"samples_per_segment must be at least 2, got {samples_per_segment}")
    points = _sample_path(path, samples_per_segment)
    g_unit, p_unit = m.spec.gamma_unit, m.spec.p_unit
    labels = np.array(
        [m.labels[nearest_index(p_unit, p), nearest_index(g_unit, g)] for g, p in points]
    )
    changes = np.flatnonzero(labels[1:] != labels[:-1])
    crossing_points = tuple(
        (float((points[k, 0] + points[k + 1, 0]) / 2), float((points[k, 1] + points[k + 1, 1]) / 2))
        for k in changes
    )
    runs = [labels[0]] + [labels[k + 1] for k in changes]
    return CrossingReport(
        int(changes.size), crossing_points, tuple(m.palette[int(x)] for x in runs)
    )


# --- transfer between equivalent maps ---


def _axis_map(src_knots: Sequence[float], dst_knots: Sequence[float]):
    xp = np.concatenate([[0.0], src_knots, [1.0]])
    fp = np.concatenate([[0.0], dst_knots, [1.0]])
    return lambda x: float(np.interp(x, xp, fp))


def align_path(src: BehaviorMap, path: InterventionPath, dst: BehaviorMap) -> InterventionPath:
    """Reparameterize both axes so the maps' edge switch positions coincide.

    Gamma is warped by the bottom and top edges, blended by ``p``; ``p`` is
    warped by the left and right edges, blended by ``gamma``.
    """
    a, b = edge_switch_positions(src), edge_switch_positions(dst)
    warp = {edge: _axis_map(a[edge], b[edge]) for edge in a}
    out = []
    for g, p in path.waypoints:
        g2 = (1 - p) * warp["bottom"](g) + p * warp["top"](g)
        p2 = (1 - g) * warp["left"](p) + g * warp["right"](p)
        out.append((min(max(g2, 0.0), 1.0), min(max(p2, 0.0), 1.0)))
    return InterventionPath(tuple(out))


def _line_candidates(dst: BehaviorMap, anchor: Point) -> Iterable[InterventionPath]:
    """Axis-parallel grid segments, nearest the anchor first."""
    L = dst.labels
    g_unit, p_unit = dst.spec.gamma_unit, dst.spec.p_unit
    i0 = nearest_index(p_unit, anchor[1])
    j0 = nearest_index(g_unit, anchor[0])
    rows = sorted(range(L.shape[0]), key=lambda i: abs(i - i0))
    cols = sorted(range(L.shape[1]), key=lambda j: abs(j - j0))
    for i in rows:
        for j in cols:
            for j1 in range(L.shape[1]):
                if j1 != j:
                    yield InterventionPath(((g_unit[j], p_unit[i]), (g_unit[j1], p_unit[i])))
    for j in cols:
        for i in rows:
            for i1 in range(L.shape[0]):
                if i1 != i:
                    yield InterventionPath(((g_unit[j], p_unit[i]), (g_unit[j], p_unit[i1])))


def _line_changes(dst: BehaviorMap, cand: InterventionPath) -> int:
    (g0, p0), (g1, p1) = cand.waypoints
    g_unit, p_unit = dst.spec.gamma_unit, dst.spec.p_unit
    i0, i1 = sorted((nearest_index(p_unit, p0), nearest_index(p_unit, p1)))
    j0, j1 = sorted((nearest_index(g_unit, g0), nearest_index(g_unit, g1)))
    cells = dst.labels[i0 : i1 + 1, j0 : j1 + 1].ravel()
    return int(np.count_nonzero(cells[1:] != cells[:-1]))


def transfer_strategy(
    src: BehaviorMap,
    path: InterventionPath,
    dst: BehaviorMap,
    samples_per_segment: int = SAMPLES_PER_SEGMENT,
) -> InterventionPath:
    """A path in ``dst`` with as many boundary crossings as ``path`` has in ``src``."""
    a, b = maybe_signature(src), maybe_signature(dst)
    if a is None or b is None or not check_equivalent(a, b):
        raise NotEquivalentError(
            f"'{src.world_id}' ({_describe(a)}) and '{dst.world_id}' ({_describe(b)}) "
            "are not equivalent; strategies cannot be transferred"
        )
    wanted = path_crossings(src, path, samples_per_segment).crossings

    aligned = align_path(src, path, dst)
    if path_crossings(dst, aligned, samples_per_segment).crossings == wanted:
        return aligned

    for cand in _line_candidates(dst, aligned.waypoints[0]):
        if _line_changes(dst, cand) != wanted:
            continue
        if path_crossings(dst, cand, samples_per_segment).crossings == wanted:
            return cand
    raise NoPathFoundError(
        f"no path with {wanted} crossing(s) found in map '{dst.world_id}'"
    )


def _describe(sig) -> str:
    if sig is None:
        return "no signature"
    return f"{sig.num_behaviors}, {list(sig.edge_switches)}"


# --- files ---


def parse_point(text: str) -> Point:
    """Parse ``"gamma,p"`` shorthand."""
    try:
        g, p = (float(x) for x in text.split(","))
    except ValueError:
        raise InvalidParamsError(f"expected 'gamma,p', got '{text}'") from None
    return g, p


def path_to_json(path: InterventionPath) -> str:
    return json.dumps([list(wp) for wp in path.waypoints])


def path_from_json(text: str) -> InterventionPath:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidParamsError(f"path JSON is not valid: {e}") from e
    if not isinstance(data, list):
        raise InvalidParamsError("path JSON must be a list of [gamma, p] pairs")
    return InterventionPath(tuple(tuple(wp) if isinstance(wp, list) else wp for wp in data))


def save_path(path: InterventionPath, dest: Path) -> Path:
    dest = Path(dest)
    dest.write_text(path_to_json(path) + "\n", encoding="utf-8")
    return dest


def load_path(src: Path) -> InterventionPath:
    return path_from_json(Path(src).read_text(encoding="utf-8"))


def report_to_dict(report: CrossingReport, path: Optional[InterventionPath] = None) -> dict:
    data = {
        "crossings": report.crossings,
        "crossing_points": [list(pt) for pt in report.crossing_points],
        "labels_sequence": list(report.labels_sequence),
    }
    if path is not None:
        data["waypoints"] = [list(wp) for wp in path.waypoints]
    return data
