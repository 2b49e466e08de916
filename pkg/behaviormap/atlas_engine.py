# src/behaviormap/atlas_engine.py

"""Behavior maps over the (gamma, p) trait square.

A map is computed one confidence row at a time: the perceived transitions
depend only on ``p``, so each row is a single batched solve over every
discount sample. Rows are fanned out to a thread pool and written back by
position, so the label grid does not depend on scheduling.

Labels are stored p-major: ``labels[i, j]`` is the behavior at
``p_samples[i]``, ``gamma_samples[j]``.
"""

import csv
import itertools
import json
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from tqdm import tqdm

from .behavior import WANDER, classify_behavior, label_names
from .defaults import GAMMA_RANGE, MAX_ITER, P_RANGE, RESOLUTION, TOL
from .errors import (
    BehaviorMapError,
    InvalidParamsError,
    MalformedMapError,
    MapComputationError,
    WanderOnEdgeError,
)
from .perception import perceived_transitions
from .planner import Policy, batched_value_iteration
from .utils import default_workers
from .world_zoo import World

EDGES = ("bottom", "right", "top", "left")
CSV_HEADER = ["gamma", "p", "label_index", "label_name"]

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


def _frozen_axis(values, name: str, upper_open: bool) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size < 3:
        raise InvalidParamsError(f"{name} needs at least 3 points, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(np.diff(arr) <= 0):
        raise InvalidParamsError(f"{name} must be finite and strictly increasing")
    hi_ok = arr[-1] < 1.0 if upper_open else arr[-1] <= 1.0
    if arr[0] < 0.0 or not hi_ok:
        bound = "[0, 1)" if upper_open else "[0, 1]"
        raise InvalidParamsError(f"{name} must lie in {bound}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridSpec:
    gamma_samples: np.ndarray
    p_samples: np.ndarray

    def __post_init__(self):
        gammas = _frozen_axis(self.gamma_samples, "gamma_samples", upper_open=True)
        object.__setattr__(self, "gamma_samples", gammas)
        object.__setattr__(self, "p_samples", _frozen_axis(self.p_samples, "p_samples", False))

    @classmethod
    def linspace(
        cls,
        res: int = RESOLUTION,
        gamma_range: Tuple[float, float] = GAMMA_RANGE,
        p_range: Tuple[float, float] = P_RANGE,
        p_res: Optional[int] = None,
    ) -> "GridSpec":
        p_res = res if p_res is None else p_res
        if res < 3 or p_res < 3:
            raise InvalidParamsError(f"resolution must be at least 3, got {min(res, p_res)}")
        return cls(np.linspace(*gamma_range, res), np.linspace(*p_range, p_res))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.p_samples.size, self.gamma_samples.size)

    @property
    def gamma_unit(self) -> np.ndarray:
        g = self.gamma_samples
        return (g - g[0]) / (g[-1] - g[0])

    @property
    def p_unit(self) -> np.ndarray:
        p = self.p_samples
        return (p - p[0]) / (p[-1] - p[0])

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return np.array_equal(self.gamma_samples, other.gamma_samples) and np.array_equal(
            self.p_samples, other.p_samples
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BehaviorMap:
    spec: GridSpec
    labels: np.ndarray
    world_id: str
    palette: Tuple[str, ...]

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64)
        if labels.shape != self.spec.shape:
            raise InvalidParamsError(f"labels shape {labels.shape} does not match grid {self.spec.shape}")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.palette)):
            raise InvalidParamsError("labels reference indices outside the palette")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "palette", tuple(self.palette))

    @property
    def present_labels(self) -> Tuple[int, ...]:
        return tuple(int(x) for x in np.unique(self.labels))

    @property
    def num_behaviors(self) -> int:
        return len(self.present_labels)

    def name_at(self, i: int, j: int) -> str:
        return self.palette[self.labels[i, j]]

    def edge_sequences(self) -> Dict[str, np.ndarray]:
        """Counterclockwise edge walks starting at the bottom-left corner."""
        L = self.labels
        return {
            "bottom": L[0, :],
            "right": L[:, -1],
            "top": L[-1, ::-1],
            "left": L[::-1, 0],
        }


@dataclass(frozen=True)
class EquivalenceSignature:
    num_behaviors: int
    edge_switches: Tuple[int, int, int, int]

    @property
    def total_switches(self) -> int:
        return sum(self.edge_switches)

    def to_dict(self, world_id: str) -> Dict[str, object]:
        return {
            "world": world_id,
            "num_behaviors": self.num_behaviors,
            "edge_switches": list(self.edge_switches),
        }


TopologyReport = namedtuple("TopologyReport", ["components_per_label", "interior_loops", "warnings"])
TraitRegion = namedtuple("TraitRegion", ["label", "name", "area_fraction", "gamma_range", "p_range"])
IdentifiabilityReport = namedtuple(
    "IdentifiabilityReport",
    ["gamma_fraction", "p_fraction", "gamma_identifiable", "p_identifiable", "regions"],
)
AxisRecommendation = namedtuple(
    "AxisRecommendation",
    ["axis", "current", "gamma_distance", "p_distance", "gamma_target", "p_target"],
)


# --- computation ---


def _solve_row(w: World, spec: GridSpec, row: int, tol: float, max_iter: int):
    p = float(spec.p_samples[row])
    failures = []
    try:
        T = perceived_transitions(w, p)
        R = np.einsum("ijk,ijk->ij", T, w.rewards)
        sol = batched_value_iteration(T, R, w.available, spec.gamma_samples, tol, max_iter)
    except BehaviorMapError as e:
        reason = str(e)
        return None, [(float(g), p, reason) for g in spec.gamma_samples]
    labels = np.empty(spec.gamma_samples.size, dtype=np.int64)
    for j, actions in enumerate(sol.policies):
        labels[j] = classify_behavior(w, Policy.from_actions(actions)).label
        if not sol.converged[j]:
            failures.append(
                (float(spec.gamma_samples[j]), p, f"no convergence after {sol.iterations[j]} sweeps")
            )
    return labels, failures


def compute_behavior_map(
    w: World,
    spec: Optional[GridSpec] = None,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    workers: Optional[int] = None,
    show_progress: bool = False,
) -> BehaviorMap:
    spec = spec or GridSpec.linspace()
    if not tol > 0 or max_iter < 1:
        raise InvalidParamsError(f"solver needs tol > 0 and max_iter >= 1, got {tol}, {max_iter}")
    workers = default_workers() if workers is None else max(1, int(workers))
    P, G = spec.shape
    grid = np.zeros((P, G), dtype=np.int64)
    failures = []

    def job(row):
        return _solve_row(w, spec, row, tol, max_iter)

    progress = tqdm(total=P, desc=f"{w.id} map", unit="row", disable=not show_progress, leave=False)
    try:
        if workers == 1:
            results = (job(i) for i in range(P))
            for i, (labels, row_failures) in enumerate(results):
                _place(grid, i, labels, row_failures, failures)
                progress.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for i, (labels, row_failures) in enumerate(pool.map(job, range(P))):
                    _place(grid, i, labels, row_failures, failures)
                    progress.update(1)
    finally:
        progress.close()

    if failures:
        raise MapComputationError(
            f"{len(failures)} of {P * G} cells failed for world '{w.id}'", failures
        )
    return BehaviorMap(spec, grid, w.id, label_names(w))


def _place(grid, i, labels, row_failures, failures) -> None:
    if labels is not None:
        grid[i] = labels
    failures.extend(row_failures)


# --- signatures ---


def _filter_runs(seq: Sequence[int], min_run: int) -> List[int]:
    """Absorb runs shorter than ``min_run`` into their predecessor."""
    runs = [[label, len(list(group))] for label, group in itertools.groupby(seq)]
    k = 0
    while len(runs) > 1 and k < len(runs):
        if runs[k][1] >= min_run:
            k += 1
            continue
        runs[k - 1 if k > 0 else 1][1] += runs[k][1]
        del runs[k]
        runs = [
            [label, sum(r[1] for r in group)]
            for label, group in itertools.groupby(runs, key=lambda r: r[0])
        ]
        k = 0
    return [label for label, size in runs for _ in range(size)]


def _check_edges(m: BehaviorMap) -> None:
    if WANDER not in m.palette:
        return
    wander = m.palette.index(WANDER)
    L = m.labels
    P, G = L.shape
    border = np.zeros_like(L, dtype=bool)
    border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    hits = np.argwhere(border & (L == wander))
    if hits.size:
        cells = [(float(m.spec.gamma_samples[j]), float(m.spec.p_samples[i])) for i, j in hits]
        g, p = cells[0]
        raise WanderOnEdgeError(
            f"Map for '{m.world_id}' has {len(cells)} 'wander' cell(s) on its edges "
            f"(first at gamma={g:.4g}, p={p:.4g}); no signature can be extracted",
            cells,
        )


def edge_switch_counts(m: BehaviorMap, min_run: int = 1) -> Tuple[int, int, int, int]:
    _check_edges(m)
    counts = []
    for edge in EDGES:
        seq = m.edge_sequences()[edge]
        if min_run > 1:
            seq = np.asarray(_filter_runs(seq, min_run))
        counts.append(int(np.count_nonzero(seq[1:] != seq[:-1])))
    return tuple(counts)


def edge_switch_positions(m: BehaviorMap) -> Dict[str, List[float]]:
    """Unit-square positions of every switch, ascending along each edge's axis.

    Bottom and top edges report gamma coordinates, right and left report p.
    """
    L = m.labels
    g, p = m.spec.gamma_unit, m.spec.p_unit
    mid_g, mid_p = (g[1:] + g[:-1]) / 2, (p[1:] + p[:-1]) / 2
    lines = {
        "bottom": (L[0, :], mid_g),
        "right": (L[:, -1], mid_p),
        "top": (L[-1, :], mid_g),
        "left": (L[:, 0], mid_p),
    }
    return {
        edge: [float(x) for x in mids[seq[1:] != seq[:-1]]]
        for edge, (seq, mids) in lines.items()
    }


def signature(m: BehaviorMap, min_run: int = 1) -> EquivalenceSignature:
    return EquivalenceSignature(m.num_behaviors, edge_switch_counts(m, min_run))


def check_equivalent(a: EquivalenceSignature, b: EquivalenceSignature) -> bool:
    return a.num_behaviors == b.num_behaviors and tuple(a.edge_switches) == tuple(b.edge_switches)


def signature_json(sig: EquivalenceSignature, world_id: str) -> str:
    switches = ",".join(str(n) for n in sig.edge_switches)
    return (
        f'{{"world": {json.dumps(world_id)}, "num_behaviors": {sig.num_behaviors}, '
        f'"edge_switches": [{switches}]}}'
    )


# --- topology ---


def interior_topology_report(m: BehaviorMap) -> TopologyReport:
    components = {}
    loops = 0
    for idx in m.present_labels:
        regions, count = ndimage.label(m.labels == idx, structure=_FOUR_CONNECTED)
        components[m.palette[idx]] = int(count)
        border = np.concatenate([regions[0], regions[-1], regions[:, 0], regions[:, -1]])
        on_border = set(np.unique(border).tolist())
        loops += sum(1 for k in range(1, count + 1) if k not in on_border)

    warnings = []
    if loops:
        warnings.append(f"{loops} region(s) touch no map edge; edge counts do not capture them")
    try:
        total = signature(m).total_switches
    except WanderOnEdgeError:
        warnings.append("'wander' on the map edge; edge switch counts unavailable")
    else:
        if total >= 4:
            warnings.append(
                f"{total} edge switches: more than one valid way to connect the boundary points"
            )
    return TopologyReport(components, loops, tuple(warnings))


# --- trait queries ---


def nearest_index(unit_samples: np.ndarray, x: float) -> int:
    """Nearest sample index on a normalized axis; exact halfway picks the lower."""
    i = int(np.searchsorted(unit_samples, x))
    if i <= 0:
        return 0
    if i >= unit_samples.size:
        return unit_samples.size - 1
    return i - 1 if x - unit_samples[i - 1] <= unit_samples[i] - x else i


def nearest_cell(m: BehaviorMap, gamma_u: float, p_u: float) -> Tuple[int, int]:
    """(p index, gamma index) of the cell nearest a unit-square point."""
    return nearest_index(m.spec.p_unit, p_u), nearest_index(m.spec.gamma_unit, gamma_u)


def trait_identifiability(m: BehaviorMap) -> IdentifiabilityReport:
    """How much an observed behavior says about each trait.

    An axis is identifiable when behavior changes along at least one grid
    line parallel to it; each label's region bounds the traits of a user
    seen behaving that way.
    """
    L = m.labels
    gamma_fraction = float(np.mean(np.any(L[:, 1:] != L[:, :-1], axis=1)))
    p_fraction = float(np.mean(np.any(L[1:, :] != L[:-1, :], axis=0)))
    regions = []
    for idx in m.present_labels:
        mask = L == idx
        gs = m.spec.gamma_samples[np.any(mask, axis=0)]
        ps = m.spec.p_samples[np.any(mask, axis=1)]
        regions.append(
            TraitRegion(
                idx,
                m.palette[idx],
                float(mask.mean()),
                (float(gs.min()), float(gs.max())),
                (float(ps.min()), float(ps.max())),
            )
        )
    return IdentifiabilityReport(
        gamma_fraction, p_fraction, gamma_fraction > 0, p_fraction > 0, tuple(regions)
    )


def warm_start_axis(m: BehaviorMap, point: Tuple[float, float]) -> AxisRecommendation:
    """Shortest single-axis move from ``point`` (unit square) to a new behavior."""
    gamma_u, p_u = point
    i, j = nearest_cell(m, gamma_u, p_u)
    L = m.labels
    here = L[i, j]
    g_unit, p_unit = m.spec.gamma_unit, m.spec.p_unit

    def closest(line, unit, pos):
        ks = np.flatnonzero(line != here)
        if ks.size == 0:
            return math.inf, None
        k = ks[np.argmin(np.abs(unit[ks] - unit[pos]))]
        return float(abs(unit[k] - unit[pos])), m.palette[line[k]]

    dg, tg = closest(L[i, :], g_unit, j)
    dp, tp = closest(L[:, j], p_unit, i)
    if math.isinf(dg) and math.isinf(dp):
        axis = None
    else:
        axis = "gamma" if dg <= dp else "p"
    return AxisRecommendation(axis, m.palette[here], dg, dp, tg, tp)


# --- files ---


def write_map_csv(m: BehaviorMap, path: Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp)
        writer.writerow(CSV_HEADER)
        for i, p in enumerate(m.spec.p_samples):
            for j, g in enumerate(m.spec.gamma_samples):
                idx = int(m.labels[i, j])
                writer.writerow([f"{g:.17g}", f"{p:.17g}", idx, m.palette[idx]])
    return path


def read_map_csv(path: Path, world_id: Optional[str] = None) -> BehaviorMap:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fp:
        rows = list(csv.reader(fp))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise MalformedMapError(f"{path}: expected header {','.join(CSV_HEADER)}")
    body = [r for r in rows[1:] if r]
    try:
        parsed = [(float(g), float(p), int(idx), name) for g, p, idx, name in body]
    except ValueError as e:
        raise MalformedMapError(f"{path}: {e}") from e
    if not parsed:
        raise MalformedMapError(f"{path}: no map rows")

    p_values = sorted({r[1] for r in parsed})
    gamma_values = sorted({r[0] for r in parsed})
    P, G = len(p_values), len(gamma_values)
    if len(parsed) != P * G:
        raise MalformedMapError(f"{path}: {len(parsed)} rows do not form a {P}x{G} grid")

    names: Dict[int, str] = {}
    grid = np.zeros((P, G), dtype=np.int64)
    for k, (g, p, idx, name) in enumerate(parsed):
        i, j = divmod(k, G)
        if g != gamma_values[j] or p != p_values[i]:
            raise MalformedMapError(f"{path}: row {k + 2} is out of p-major, gamma-minor order")
        if idx < 0 or names.setdefault(idx, name) != name:
            raise MalformedMapError(f"{path}: label index {idx} has inconsistent names")
        grid[i, j] = idx
    palette = tuple(names.get(i, f"label{i}") for i in range(max(names) + 1))
    try:
        spec = GridSpec(gamma_values, p_values)
    except InvalidParamsError as e:
        raise MalformedMapError(f"{path}: {e}") from e
    return BehaviorMap(spec, grid, world_id or path.stem, palette)


def maybe_signature(m: BehaviorMap, min_run: int = 1) -> Optional[EquivalenceSignature]:
    """Signature of ``m``, or None when "wander" sits on its edge."""
    try:
        return signature(m, min_run)
    except WanderOnEdgeError:
        return None
