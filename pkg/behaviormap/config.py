# src/behaviormap/config.py

"""Run configuration.

A config file is a JSON object using the same names as the command-line
flags (``{"world": "wall", "width": 6, "res": 51, "gamma_range": "0.01:0.99"}``).
Flags given on the command line win over file values.
"""

import dataclasses
import json
from argparse import Namespace
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from .atlas_engine import GridSpec
from .defaults import GAMMA_RANGE, MAX_ITER, P_RANGE, RESOLUTION, TOL
from .errors import InvalidParamsError
from .world_zoo import WorldParams

PARAM_KEYS = tuple(f.name for f in dataclasses.fields(WorldParams))
GRID_KEYS = ("res", "p_res", "gamma_range", "p_range")
RUN_KEYS = ("tol", "max_iter", "min_run", "workers")
PATH_KEYS = ("out", "svg", "report", "palette_out", "log_file")
CONFIG_KEYS = frozenset(("world", "palette") + PARAM_KEYS + GRID_KEYS + RUN_KEYS + PATH_KEYS)


def parse_range(value) -> Tuple[float, float]:
    """``"lo:hi"`` or a two-element list."""
    try:
        if isinstance(value, str):
            lo, hi = (float(x) for x in value.split(":"))
        else:
            lo, hi = (float(x) for x in value)
    except (TypeError, ValueError):
        raise InvalidParamsError(f"expected a range 'lo:hi', got {value!r}") from None
    if not lo < hi:
        raise InvalidParamsError(f"range {lo}:{hi} must be increasing")
    return lo, hi


@dataclass
class RunConfig:
    world: Optional[str] = None
    params: WorldParams = field(default_factory=WorldParams)
    spec: GridSpec = field(default_factory=GridSpec.linspace)
    tol: float = TOL
    max_iter: int = MAX_ITER
    min_run: int = 1
    workers: Optional[int] = None
    out: Optional[Path] = None
    svg: Optional[Path] = None
    report: Optional[Path] = None
    palette_out: Optional[Path] = None
    log_file: Optional[Path] = None
    palette: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParamsError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParamsError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.min_run < 1:
            raise InvalidParamsError(f"min_run must be at least 1, got {self.min_run}")
        if self.workers is not None and self.workers < 1:
            raise InvalidParamsError(f"workers must be at least 1, got {self.workers}")

    @classmethod
    def from_mapping(cls, data: Mapping[str, object]) -> "RunConfig":
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise InvalidParamsError(f"Unknown config key(s): {', '.join(sorted(unknown))}")
        params = WorldParams.from_dict({k: data[k] for k in PARAM_KEYS if data.get(k) is not None})
        palette = data.get("palette") or {}
        if not isinstance(palette, Mapping):
            raise InvalidParamsError("palette must map label names to colors")
        try:
            return cls(
                world=data.get("world"),
                params=params,
                spec=_grid_from(data),
                tol=float(data.get("tol", TOL)),
                max_iter=int(data.get("max_iter", MAX_ITER)),
                min_run=int(data.get("min_run", 1)),
                workers=None if data.get("workers") is None else int(data["workers"]),
                palette={str(k): str(v) for k, v in palette.items()},
                **{k: Path(data[k]) for k in PATH_KEYS if data.get(k) is not None},
            )
        except InvalidParamsError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidParamsError(f"Invalid config value: {e}") from e


def _grid_from(data: Mapping[str, object], fallback: Optional[GridSpec] = None) -> GridSpec:
    if fallback is None:
        res, p_res, g_range, p_range = RESOLUTION, None, GAMMA_RANGE, P_RANGE
    else:
        g, p = fallback.gamma_samples, fallback.p_samples
        res, p_res = g.size, p.size
        g_range, p_range = (float(g[0]), float(g[-1])), (float(p[0]), float(p[-1]))
    if data.get("res") is not None:
        res, p_res = int(data["res"]), None
    if data.get("p_res") is not None:
        p_res = int(data["p_res"])
    if data.get("gamma_range") is not None:
        g_range = parse_range(data["gamma_range"])
    if data.get("p_range") is not None:
        p_range = parse_range(data["p_range"])
    return GridSpec.linspace(res, g_range, p_range, p_res)


def load_run_config(path: Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidParamsError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidParamsError(f"{path}: config must be a JSON object")
    return RunConfig.from_mapping(data)


def merge_cli_args(config: RunConfig, namespace: Namespace) -> RunConfig:
    """Override ``config`` with every flag the user actually set (non-None)."""
    given = {k: v for k, v in vars(namespace).items() if k in CONFIG_KEYS and v is not None}
    changes: Dict[str, object] = {}
    if "world" in given:
        changes["world"] = given["world"]
    params = {k: given[k] for k in PARAM_KEYS if k in given}
    if params:
        changes["params"] = config.params.with_changes(**params)
    if any(k in given for k in GRID_KEYS):
        changes["spec"] = _grid_from(given, fallback=config.spec)
    for k in RUN_KEYS:
        if k in given:
            changes[k] = given[k]
    for k in PATH_KEYS:
        if k in given:
            changes[k] = Path(given[k])
    if "palette" in given:
        changes["palette"] = {**config.palette, **dict(given["palette"])}
    return dataclasses.replace(config, **changes)
