# src/behaviormap/sweep_engine.py

"""Parameter-perturbation sweeps and composite-world experiments.

A sweep varies some constructor parameters over the Cartesian product of
their value lists, computes each world's map and signature, and reports
whether every cell stayed in one equivalence class. Cells are evaluated
on a worker pool and assembled by position, so reports are reproducible.
"""

import csv
import itertools
import json
from collections import Counter, namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from tqdm import tqdm

from .atlas_engine import (
    EquivalenceSignature,
    GridSpec,
    compute_behavior_map,
    interior_topology_report,
    signature,
)
from .defaults import MAX_ITER, SWEEP_CAP, TOL, WORLD_DEFAULTS
from .errors import BehaviorMapError, CapExceededError, InvalidParamsError
from .utils import default_workers
from .world_zoo import (
    WorldParams,
    accepted_params,
    make_composite,
    make_world,
    normalize_kind,
)

# Derived keys a sweep may vary in place of raw constructor fields.
DERIVED_KEYS = {"big_small": {"reward_ratio"}}

PRESETS: Dict[str, Dict[str, Dict[str, object]]] = {
    "paper-b": {
        "big_small": {
            "base": {"height": 7, "reward_big": 300.0},
            "varied": {"width": [4, 5, 6, 7, 8], "reward_ratio": [0.17, 0.33]},
        },
        "cliff": {
            "base": {},
            "varied": {"width": [6, 8, 10], "height": [3, 4, 5], "reward_goal": [50.0, 100.0]},
        },
        "wall": {
            "base": {},
            "varied": {"width": [5, 6], "height": [5, 6, 7], "reward_wall": [-20.0, -25.0]},
        },
        "chain": {
            "base": {},
            "varied": {"length": [3, 4, 5, 7], "reward_disengage": [5.0, 10.0, 20.0]},
        },
        "riverswim": {
            "base": {},
            "varied": {"length": [5, 6, 8], "reward_big": [500.0, 1000.0, 2000.0]},
        },
        "gamblers_v1": {
            "base": {},
            "varied": {"length": [5, 6, 7, 8], "p_f": [0.8, 0.85, 0.9]},
        },
        "gamblers_v2": {
            "base": {},
            "varied": {"length": [5, 6, 7, 8], "p_c": [0.55, 0.6, 0.65, 0.7]},
        },
        "cafe": {
            "base": {},
            "varied": {"reward_donut": [30.0, 50.0, 70.0], "reward_noodle": [100.0, 150.0]},
        },
    }
}


@dataclass(frozen=True)
class SweepCell:
    params: Tuple[Tuple[str, object], ...]
    signature: Optional[EquivalenceSignature] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepReport:
    kind: str
    axes: Tuple[Tuple[str, Tuple[object, ...]], ...]
    cells: Tuple[SweepCell, ...]
    verdict: bool
    modal_signature: Optional[EquivalenceSignature]

    @property
    def failures(self) -> List[SweepCell]:
        return [c for c in self.cells if not c.ok]

    def to_dict(self) -> Dict[str, object]:
        modal = self.modal_signature
        return {
            "kind": self.kind,
            "axes": {name: list(values) for name, values in self.axes},
            "verdict": self.verdict,
            "modal_signature": None
            if modal is None
            else {"num_behaviors": modal.num_behaviors, "edge_switches": list(modal.edge_switches)},
            "cells": [
                {
                    "params": dict(c.params),
                    "num_behaviors": c.signature.num_behaviors if c.signature else None,
                    "edge_switches": list(c.signature.edge_switches) if c.signature else None,
                    "error": c.error,
                }
                for c in self.cells
            ],
        }


CompositionResult = namedtuple("CompositionResult", ["map", "signature", "topology"])


def preset(name: str, kind: str) -> Tuple[WorldParams, Dict[str, List[object]]]:
    """(base params, varied grid) of a shipped preset."""
    kind = normalize_kind(kind)
    try:
        entry = PRESETS[name][kind]
    except KeyError:
        raise InvalidParamsError(f"No preset '{name}' for world kind '{kind}'") from None
    return WorldParams.from_dict(entry["base"]), {k: list(v) for k, v in entry["varied"].items()}


def cell_params(kind: str, base: WorldParams, values: Mapping[str, object]) -> WorldParams:
    """Apply one sweep cell's values (including derived keys) to ``base``."""
    values = dict(values)
    ratio = values.pop("reward_ratio", None)
    params = base.with_changes(**values)
    if ratio is not None:
        big = params.resolved(kind).reward_big
        params = params.with_changes(reward_small=float(ratio) * big)
    return params


def _check_varied(kind: str, varied: Mapping[str, Sequence[object]], cap: int) -> None:
    allowed = accepted_params(kind) | DERIVED_KEYS.get(kind, set())
    unknown = set(varied) - allowed
    if unknown:
        raise InvalidParamsError(
            f"Parameter(s) {', '.join(sorted(unknown))} cannot be swept for world kind '{kind}'"
        )
    size = 1
    for name, values in varied.items():
        if not values:
            raise InvalidParamsError(f"sweep axis '{name}' has no values")
        size *= len(values)
    if size > cap:
        raise CapExceededError(f"sweep of {size} cells exceeds the cap of {cap}")


def _run_cell(kind, base, combo, spec, tol, max_iter) -> SweepCell:
    items = tuple(combo)
    try:
        w = make_world(kind, cell_params(kind, base, dict(items)))
        m = compute_behavior_map(w, spec, tol=tol, max_iter=max_iter, workers=1)
        return SweepCell(items, signature(m))
    except BehaviorMapError as e:
        return SweepCell(items, error=f"{type(e).__name__}: {e}")


def perturbation_sweep(
    kind: str,
    base: Optional[WorldParams] = None,
    varied: Optional[Mapping[str, Sequence[object]]] = None,
    spec: Optional[GridSpec] = None,
    cap: int = SWEEP_CAP,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    workers: Optional[int] = None,
    show_progress: bool = False,
) -> SweepReport:
    kind = normalize_kind(kind)
    if kind not in WORLD_DEFAULTS:
        raise InvalidParamsError(f"Unknown world kind: {kind}")
    base = base or WorldParams()
    varied = dict(varied or {})
    _check_varied(kind, varied, cap)
    spec = spec or GridSpec.linspace()
    workers = default_workers() if workers is None else max(1, int(workers))

    names = list(varied)
    combos = [
        tuple(zip(names, values)) for values in itertools.product(*(varied[n] for n in names))
    ]

    def job(combo):
        return _run_cell(kind, base, combo, spec, tol, max_iter)

    bar = tqdm(total=len(combos), desc=f"{kind} sweep", unit="cell", disable=not show_progress, leave=False)
    cells: List[SweepCell] = []
    try:
        if workers == 1:
            results = map(job, combos)
            for cell in results:
                cells.append(cell)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for cell in pool.map(job, combos):
                    cells.append(cell)
                    bar.update(1)
    finally:
        bar.close()

    signatures = [c.signature for c in cells if c.ok]
    modal = Counter(signatures).most_common(1)[0][0] if signatures else None
    verdict = len(signatures) == len(cells) and len(set(signatures)) == 1
    axes = tuple((n, tuple(varied[n])) for n in names)
    return SweepReport(kind, axes, tuple(cells), verdict, modal)


def composition_experiment(
    kind: str,
    params: Optional[WorldParams] = None,
    spec: Optional[GridSpec] = None,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    workers: Optional[int] = None,
    show_progress: bool = False,
) -> CompositionResult:
    w = make_composite(kind, params)
    m = compute_behavior_map(w, spec, tol=tol, max_iter=max_iter, workers=workers, show_progress=show_progress)
    return CompositionResult(m, signature(m), interior_topology_report(m))


# --- reports ---


def report_json(report: SweepReport) -> str:
    return json.dumps(report.to_dict(), indent=2)


def write_report(report: SweepReport, path: Path) -> Tuple[Path, Path]:
    """Write the JSON report and the per-cell index CSV beside it."""
    path = Path(path)
    path.write_text(report_json(report) + "\n", encoding="utf-8")
    index = path.with_suffix(".csv")
    names = [name for name, _ in report.axes]
    with index.open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp)
        writer.writerow(names + ["n1", "n2", "n3", "n4", "num_behaviors", "error"])
        for c in report.cells:
            values = [dict(c.params)[n] for n in names]
            if c.signature is None:
                writer.writerow(values + ["", "", "", "", "", c.error])
            else:
                writer.writerow(values + list(c.signature.edge_switches) + [c.signature.num_behaviors, ""])
    return path, index
