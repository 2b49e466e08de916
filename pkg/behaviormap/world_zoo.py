# src/behaviormap/world_zoo.py

"""Parameterized environments.

Every constructor returns an immutable :class:`World`: the task tuple
(states, actions, rewards) plus the intended-outcome table the perceived
model is built from. Gridworld rows are numbered from the top, so "down"
increases the row index.
"""

import dataclasses
import json
import math
from collections import deque, namedtuple
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .defaults import (
    COMPOSITE_KINDS,
    GRID_ACTIONS,
    LITERATURE_KINDS,
    WORLD_DEFAULTS,
    WORLD_KINDS,
)
from .errors import InvalidParamsError, UnavailableActionError

Cell = Tuple[int, int]

_GRID_DELTAS = ((-1, 0), (0, 1), (1, 0), (0, -1))

# Parameters a kind accepts beyond the ones it has defaults for.
_OPTIONAL_FIELDS = {
    "wall": {"wall_length"},
    "gamblers_v1": {"start"},
    "gamblers_v2": {"start"},
}


def normalize_kind(kind: str) -> str:
    """Accept CLI spellings such as ``big-small``."""
    return kind.strip().lower().replace("-", "_")


def accepted_params(kind: str) -> frozenset:
    """Constructor parameters a world kind accepts."""
    kind = normalize_kind(kind)
    if kind not in WORLD_DEFAULTS:
        raise InvalidParamsError(f"Unknown world kind: {kind}")
    return frozenset(WORLD_DEFAULTS[kind]) | _OPTIONAL_FIELDS.get(kind, frozenset())


@dataclass(frozen=True)
class WorldParams:
    width: Optional[int] = None
    height: Optional[int] = None
    length: Optional[int] = None
    start: Optional[int] = None
    reward_small: Optional[float] = None
    reward_big: Optional[float] = None
    reward_goal: Optional[float] = None
    reward_cliff: Optional[float] = None
    reward_wall: Optional[float] = None
    reward_end: Optional[float] = None
    reward_disengage: Optional[float] = None
    reward_dead: Optional[float] = None
    reward_donut: Optional[float] = None
    reward_noodle: Optional[float] = None
    reward_vegan: Optional[float] = None
    step_reward: Optional[float] = None
    p_c: Optional[float] = None
    p_f: Optional[float] = None
    wall_row: Optional[int] = None
    wall_length: Optional[int] = None
    reflect_walk: Optional[bool] = None

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "reflect_walk":
                if not isinstance(value, bool):
                    raise InvalidParamsError("reflect_walk must be a boolean")
            elif f.name in _INT_FIELDS:
                if isinstance(value, bool) or not float(value).is_integer():
                    raise InvalidParamsError(f"{f.name} must be an integer, got {value!r}")
                object.__setattr__(self, f.name, int(value))
            else:
                value = float(value)
                if not math.isfinite(value):
                    raise InvalidParamsError(f"{f.name} must be finite, got {value!r}")
                object.__setattr__(self, f.name, value)
        for name in ("p_c", "p_f"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise InvalidParamsError(f"{name} must lie in [0, 1], got {value}")

    def to_dict(self) -> Dict[str, object]:
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "WorldParams":
        unknown = set(data) - _FIELD_NAMES
        if unknown:
            raise InvalidParamsError(f"Unknown world parameter(s): {', '.join(sorted(unknown))}")
        return cls(**dict(data))

    def with_changes(self, **changes) -> "WorldParams":
        return dataclasses.replace(self, **changes)

    def resolved(self, kind: str) -> "WorldParams":
        """Fill the kind's defaults and reject parameters the kind does not use."""
        kind = normalize_kind(kind)
        if kind not in WORLD_DEFAULTS:
            raise InvalidParamsError(f"Unknown world kind: {kind}")
        given = self.to_dict()
        allowed = set(WORLD_DEFAULTS[kind]) | _OPTIONAL_FIELDS.get(kind, set())
        stray = set(given) - allowed
        if stray:
            raise InvalidParamsError(
                f"Parameter(s) {', '.join(sorted(stray))} do not apply to world kind '{kind}'"
            )
        merged = dict(WORLD_DEFAULTS[kind])
        merged.update(given)
        return WorldParams(**merged)


_FIELD_NAMES = {f.name for f in dataclasses.fields(WorldParams)}
_INT_FIELDS = {"width", "height", "length", "start", "wall_row", "wall_length"}


@dataclass(frozen=True)
class FixedRow:
    """World-constant dynamics for one (state, action) pair.

    The success outcome gets ``constants[key]`` (or the user's confidence
    when ``key`` is the world's confidence key), the failure outcome the
    rest. ``key=None`` means deterministic.
    """

    success: int
    failure: int
    key: Optional[str] = None


@dataclass(frozen=True)
class GridLayout:
    width: int
    height: int
    cells: Tuple[Cell, ...]
    _index: Mapping[Cell, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", MappingProxyType({c: s for s, c in enumerate(self.cells)})
        )

    def state_at(self, row: int, col: int) -> Optional[int]:
        return self._index.get((row, col))

    def cell_of(self, state: int) -> Cell:
        return self.cells[state]


@dataclass(frozen=True, eq=False)
class World:
    id: str
    kind: str
    classifier_id: str
    params: WorldParams
    state_names: Tuple[str, ...]
    action_names: Tuple[str, ...]
    available: np.ndarray
    intended: np.ndarray
    alternates: Tuple[Tuple[Tuple[int, ...], ...], ...]
    rewards: np.ndarray
    start: int
    terminals: Tuple[int, ...]
    tags: Mapping[str, Tuple[int, ...]] = field(default_factory=dict)
    fixed_rows: Mapping[Tuple[int, int], FixedRow] = field(default_factory=dict)
    constants: Mapping[str, float] = field(default_factory=dict)
    confidence_key: Optional[str] = None
    layout: Optional[GridLayout] = None

    def __post_init__(self):
        for name in ("available", "intended", "rewards"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        for name in ("tags", "fixed_rows", "constants"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))
        object.__setattr__(self, "terminals", tuple(sorted(self.terminals)))

    @property
    def num_states(self) -> int:
        return len(self.state_names)

    @property
    def num_actions(self) -> int:
        return len(self.action_names)

    @property
    def terminal_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_states, dtype=bool)
        mask[list(self.terminals)] = True
        return mask

    def is_terminal(self, state: int) -> bool:
        return state in self.terminals

    def tagged(self, tag: str) -> Tuple[int, ...]:
        return self.tags.get(tag, ())

    def action_index(self, name: str) -> int:
        try:
            return self.action_names.index(name)
        except ValueError:
            raise UnavailableActionError(f"World '{self.id}' has no action '{name}'") from None


def generic_alternates(
    intended_row: Sequence[int], available_row: Sequence[bool], state: int, action: int
) -> Tuple[int, ...]:
    """Intended outcomes of the other available actions, plus staying put,
    minus this action's own intended outcome. Order follows action index."""
    target = int(intended_row[action])
    out = []
    for b, ok in enumerate(available_row):
        if b == action or not ok:
            continue
        t = int(intended_row[b])
        if t != target and t not in out:
            out.append(t)
    if state != target and state not in out:
        out.append(state)
    return tuple(out)


def build_world(
    kind: str,
    classifier_id: str,
    params: WorldParams,
    state_names: Sequence[str],
    action_names: Sequence[str],
    intended: np.ndarray,
    start: int,
    terminals: Iterable[int],
    entry_rewards: Sequence[float],
    step_reward: float = 0.0,
    available: Optional[np.ndarray] = None,
    tags: Optional[Mapping[str, Iterable[int]]] = None,
    fixed_rows: Optional[Mapping[Tuple[int, int], FixedRow]] = None,
    constants: Optional[Mapping[str, float]] = None,
    confidence_key: Optional[str] = None,
    layout: Optional[GridLayout] = None,
) -> World:
    """Assemble a World from its intended-outcome table.

    Rewards are paid on entry: ``entry_rewards[t]`` when the successor ``t``
    is terminal, otherwise ``step_reward + entry_rewards[t]``. Terminal rows
    are self-loops with reward 0.
    """
    S, A = len(state_names), len(action_names)
    intended = np.asarray(intended, dtype=np.int64).reshape(S, A)
    if available is None:
        available = np.ones((S, A), dtype=bool)
    available = np.asarray(available, dtype=bool).reshape(S, A)
    terminals = tuple(sorted(set(int(t) for t in terminals)))
    fixed_rows = dict(fixed_rows or {})
    entry = np.asarray(entry_rewards, dtype=float).reshape(S)

    term_mask = np.zeros(S, dtype=bool)
    term_mask[list(terminals)] = True
    intended = intended.copy()
    intended[term_mask, :] = np.flatnonzero(term_mask)[:, None]

    on_entry = np.where(term_mask, entry, step_reward + entry)
    rewards = np.zeros((S, A, S))
    rewards[~term_mask] = on_entry

    alternates = []
    for s in range(S):
        row = []
        for a in range(A):
            if term_mask[s] or not available[s, a]:
                row.append(())
                continue
            fixed = fixed_rows.get((s, a))
            if fixed is not None and fixed.key is not None and fixed.failure != fixed.success:
                row.append((fixed.failure,))
            else:
                row.append(generic_alternates(intended[s], available[s], s, a))
        alternates.append(tuple(row))

    return World(
        id=kind,
        kind=kind,
        classifier_id=classifier_id,
        params=params,
        state_names=tuple(state_names),
        action_names=tuple(action_names),
        available=available,
        intended=intended,
        alternates=tuple(alternates),
        rewards=rewards,
        start=int(start),
        terminals=terminals,
        tags={k: tuple(sorted(set(int(s) for s in v))) for k, v in (tags or {}).items()},
        fixed_rows=fixed_rows,
        constants=dict(constants or {}),
        confidence_key=confidence_key,
        layout=layout,
    )


# --- gridworlds ---


def _grid_world(
    kind: str,
    classifier_id: str,
    params: WorldParams,
    width: int,
    height: int,
    start: Cell,
    terminals: Mapping[Cell, float],
    penalties: Optional[Mapping[Cell, float]] = None,
    blocked: Iterable[Cell] = (),
    tags: Optional[Mapping[str, Iterable[Cell]]] = None,
) -> World:
    blocked = set(blocked)
    cells = tuple((r, c) for r in range(height) for c in range(width) if (r, c) not in blocked)
    layout = GridLayout(width, height, cells)
    S = len(cells)
    intended = np.zeros((S, len(GRID_ACTIONS)), dtype=np.int64)
    for s, (r, c) in enumerate(cells):
        for a, (dr, dc) in enumerate(_GRID_DELTAS):
            t = layout.state_at(r + dr, c + dc)
            intended[s, a] = s if t is None else t
    entry = np.zeros(S)
    for cell, value in {**(penalties or {}), **terminals}.items():
        entry[layout.state_at(*cell)] = value
    return build_world(
        kind,
        classifier_id,
        params,
        state_names=[f"r{r}c{c}" for r, c in cells],
        action_names=GRID_ACTIONS,
        intended=intended,
        start=layout.state_at(*start),
        terminals=[layout.state_at(*cell) for cell in terminals],
        entry_rewards=entry,
        step_reward=params.step_reward or 0.0,
        tags={
            k: [layout.state_at(*c) for c in v if layout.state_at(*c) is not None]
            for k, v in (tags or {}).items()
        },
        layout=layout,
    )


def _grid_neighbors(cell: Cell, width: int, height: int):
    r, c = cell
    for dr, dc in _GRID_DELTAS:
        if 0 <= r + dr < height and 0 <= c + dc < width:
            yield (r + dr, c + dc)


def _grid_distances(start: Cell, width: int, height: int, passable) -> Dict[Cell, int]:
    """BFS distances over cells accepted by ``passable``; ``start`` always counts."""
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        for nxt in _grid_neighbors(cell, width, height):
            if nxt not in dist and passable(nxt):
                dist[nxt] = dist[cell] + 1
                queue.append(nxt)
    return dist


def _entry_distance(dist: Mapping[Cell, int], target: Cell, width: int, height: int) -> float:
    """Steps needed to enter ``target`` from the BFS region ``dist``."""
    steps = [dist[n] + 1 for n in _grid_neighbors(target, width, height) if n in dist]
    return min(steps) if steps else math.inf


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParamsError(message)


def make_big_small(params: Optional[WorldParams] = None) -> World:
    p = (params or WorldParams()).resolved("big_small")
    W, H = p.width, p.height
    _require(W >= 2 and H >= 2, f"big_small needs width >= 2 and height >= 2, got {W}x{H}")
    _require(p.reward_small > 0 and p.reward_big > 0, "big_small rewards must be positive")
    _require(
        p.reward_small < p.reward_big,
        f"big_small needs reward_small < reward_big, got {p.reward_small} >= {p.reward_big}",
    )
    small, big = (H - 1, 0), (H - 1, W - 1)
    return _grid_world(
        "big_small",
        "big_small",
        p,
        W,
        H,
        start=(0, 0),
        terminals={small: p.reward_small, big: p.reward_big},
        tags={"small": [small], "big": [big]},
    )


def _cliff_cells(W: int, H: int):
    return [(H - 1, c) for c in range(1, W - 1)]


def _cliff_tags(cliff, start: Cell, terminal_cells, W: int, H: int):
    skip = set(cliff) | set(terminal_cells) | {start}
    adjacent = {n for cell in cliff for n in _grid_neighbors(cell, W, H)} - skip
    return {"cliff": cliff, "cliff_adjacent": sorted(adjacent)}


def _check_cliff(p: WorldParams) -> None:
    _require(
        p.width >= 3 and p.height >= 2,
        f"cliff needs width >= 3 and height >= 2, got {p.width}x{p.height}",
    )
    _require(p.reward_goal > 0, f"cliff goal reward must be positive, got {p.reward_goal}")
    _require(p.reward_cliff < 0, f"cliff penalty must be negative, got {p.reward_cliff}")


def make_cliff(params: Optional[WorldParams] = None) -> World:
    p = (params or WorldParams()).resolved("cliff")
    _check_cliff(p)
    W, H = p.width, p.height
    start, goal = (H - 1, 0), (H - 1, W - 1)
    cliff = _cliff_cells(W, H)
    terminals = {goal: p.reward_goal}
    terminals.update({cell: p.reward_cliff for cell in cliff})
    tags = _cliff_tags(cliff, start, terminals, W, H)
    tags["goal"] = [goal]
    return _grid_world("cliff", "cliff", p, W, H, start=start, terminals=terminals, tags=tags)


def make_wall(params: Optional[WorldParams] = None) -> World:
    p = (params or WorldParams()).resolved("wall")
    W, H, row = p.width, p.height, p.wall_row
    _require(W >= 3 and H >= 3, f"wall needs width >= 3 and height >= 3, got {W}x{H}")
    _require(p.reward_wall < 0, f"wall penalty must be negative, got {p.reward_wall}")
    _require(p.reward_goal > 0, f"wall goal reward must be positive, got {p.reward_goal}")
    _require(1 <= row <= H - 2, f"wall_row must lie in [1, {H - 2}], got {row}")
    span = W - 1 if p.wall_length is None else p.wall_length
    _require(span >= 1, "wall_length must be at least 1")
    p = p.with_changes(wall_length=span)

    penalty, start, goal = (row, 0), (row - 1, 0), (row + 1, 0)
    blocked = {(row, c) for c in range(1, min(span, W))}
    around = _grid_distances(
        start, W, H, lambda cell: cell not in blocked and cell != penalty
    )
    _require(
        goal in around,
        f"wall of length {span} in a grid of width {W} leaves no path around the penalty cell",
    )
    return _grid_world(
        "wall",
        "wall",
        p,
        W,
        H,
        start=start,
        terminals={goal: p.reward_goal},
        penalties={penalty: p.reward_wall},
        blocked=blocked,
        tags={"penalty": [penalty], "goal": [goal]},
    )


def _cafe_layout(W: int, H: int):
    wall_row, gap = H - 4, W // 2
    return {
        "wall_row": wall_row,
        "gap": (wall_row, gap),
        "donuts": [(wall_row, gap - 1), (wall_row, gap + 1)],
        "noodle": (wall_row - 2, gap),
        "vegan": (0, W - 1),
        "start": (H - 1, gap),
    }


def _make_cafe(p: WorldParams, threeway: bool) -> World:
    kind = "cafe_threeway" if threeway else "cafe"
    W, H = p.width, p.height
    _require(W >= 5 and H >= 6, f"cafe layout needs at least 5x6 cells, got {W}x{H}")
    for name in ("reward_donut", "reward_noodle", "reward_vegan"):
        _require(getattr(p, name) > 0, f"cafe {name} must be positive")
    lay = _cafe_layout(W, H)
    open_cells = {lay["gap"], *lay["donuts"]}
    blocked = {(lay["wall_row"], c) for c in range(W)} - open_cells
    terminals = {d: p.reward_donut for d in lay["donuts"]}
    terminals[lay["noodle"]] = p.reward_noodle
    terminals[lay["vegan"]] = p.reward_vegan

    def free(cell):
        return cell not in blocked and cell not in terminals

    dist = _grid_distances(lay["start"], W, H, free)
    _require(
        _entry_distance(dist, lay["noodle"], W, H) < _entry_distance(dist, lay["vegan"], W, H),
        "cafe layout must place the noodle shop nearer than the vegan cafe",
    )
    near_donut = {n for d in lay["donuts"] for n in _grid_neighbors(d, W, H)}
    sneaky = _grid_distances(lay["start"], W, H, lambda c: free(c) and c not in near_donut)
    _require(
        math.isinf(_entry_distance(sneaky, lay["noodle"], W, H))
        and math.isinf(_entry_distance(sneaky, lay["vegan"], W, H)),
        "cafe layout must force every healthy route past a donut store",
    )
    return _grid_world(
        kind,
        kind,
        p,
        W,
        H,
        start=lay["start"],
        terminals=terminals,
        blocked=blocked,
        tags={"donut": lay["donuts"], "noodle": [lay["noodle"]], "vegan": [lay["vegan"]]},
    )


def _make_cliff_disengage(p: WorldParams) -> World:
    _check_cliff(p)
    _require(
        0 < p.reward_disengage < p.reward_goal,
        f"disengage reward must satisfy 0 < R_d < R_g, got R_d={p.reward_disengage}",
    )
    W, H = p.width, p.height
    start, goal, exit_cell = (H - 1, 0), (H - 1, W - 1), (H, 0)
    cliff = _cliff_cells(W, H)
    terminals = {goal: p.reward_goal, exit_cell: p.reward_disengage}
    terminals.update({cell: p.reward_cliff for cell in cliff})
    tags = _cliff_tags(cliff, start, terminals, W, H + 1)
    tags.update(goal=[goal], disengage=[exit_cell])
    return _grid_world(
        "cliff_disengage",
        "cliff_disengage",
        p,
        W,
        H + 1,
        start=start,
        terminals=terminals,
        blocked={(H, c) for c in range(1, W)},
        tags=tags,
    )


# --- literature worlds ---


def _make_chain(p: WorldParams) -> World:
    L = p.length
    _require(L >= 3, f"chain length must be at least 3, got {L}")
    _require(
        0 < p.reward_disengage < p.reward_end,
        "chain rewards must satisfy 0 < reward_disengage < reward_end",
    )
    end, out = L, L + 1
    intended = np.array([[s + 1, out] for s in range(L)] + [[end, end], [out, out]])
    entry = np.zeros(L + 2)
    entry[end], entry[out] = p.reward_end, p.reward_disengage
    return build_world(
        "chain",
        "chain",
        p,
        state_names=[f"x{s}" for s in range(L)] + ["end", "disengaged"],
        action_names=("exercise", "disengage"),
        intended=intended,
        start=0,
        terminals=(end, out),
        entry_rewards=entry,
        step_reward=p.step_reward or 0.0,
        tags={"end": [end], "disengage": [out]},
    )


def _make_riverswim(p: WorldParams) -> World:
    L, start = p.length, p.start
    _require(L >= 3, f"riverswim length must be at least 3, got {L}")
    _require(0 <= start < L, f"riverswim start must lie in [0, {L - 1}], got {start}")
    _require(
        0 < p.reward_small < p.reward_big,
        "riverswim rewards must satisfy 0 < reward_small < reward_big",
    )
    intended = np.array([[min(s + 1, L - 1), max(s - 1, 0)] for s in range(L)])
    entry = np.zeros(L)
    entry[0], entry[L - 1] = p.reward_small, p.reward_big
    fixed = {(s, 1): FixedRow(int(intended[s, 1]), int(intended[s, 1])) for s in range(L)}
    return build_world(
        "riverswim",
        "riverswim",
        p,
        state_names=[f"x{s}" for s in range(L)],
        action_names=("upstream", "downstream"),
        intended=intended,
        start=start,
        terminals=(),
        entry_rewards=entry,
        fixed_rows=fixed,
    )


def _make_gamblers(p: WorldParams, variant: str) -> World:
    L = p.length
    _require(L >= 3, f"gamblers length must be at least 3, got {L}")
    _require(p.reward_goal > 0, "gamblers goal reward must be positive")
    _require(p.reward_dead < p.reward_goal, "gamblers dead-end reward must be below the goal reward")
    start = max(1, L - 3) if p.start is None else p.start
    _require(1 <= start <= L - 2, f"gamblers start must lie in [1, {L - 2}], got {start}")
    p = p.with_changes(start=start)

    dead, goal = 0, L - 1
    intended = np.array([[min(s + 1, goal), goal] for s in range(L)])
    fixed = {}
    for s in range(1, goal):
        back = s if (p.reflect_walk and s - 1 == dead) else s - 1
        fixed[(s, 0)] = FixedRow(s + 1, back, "p_c")
        fixed[(s, 1)] = FixedRow(goal, dead, "p_f")
    entry = np.zeros(L)
    entry[dead], entry[goal] = p.reward_dead, p.reward_goal
    kind = f"gamblers_{variant}"
    return build_world(
        kind,
        "gamblers",
        p,
        state_names=["dead"] + [f"x{s}" for s in range(1, goal)] + ["goal"],
        action_names=("continue", "finish"),
        intended=intended,
        start=start,
        terminals=(dead, goal),
        entry_rewards=entry,
        fixed_rows=fixed,
        constants={"p_c": p.p_c, "p_f": p.p_f},
        confidence_key="p_c" if variant == "v1" else "p_f",
        tags={"dead": [dead], "goal": [goal]},
    )


def make_literature_world(kind: str, params: Optional[WorldParams] = None) -> World:
    kind = normalize_kind(kind)
    if kind not in LITERATURE_KINDS:
        raise InvalidParamsError(
            f"Unknown literature world '{kind}'; expected one of {', '.join(LITERATURE_KINDS)}"
        )
    p = (params or WorldParams()).resolved(kind)
    if kind == "chain":
        return _make_chain(p)
    if kind == "riverswim":
        return _make_riverswim(p)
    if kind == "cafe":
        return _make_cafe(p, threeway=False)
    return _make_gamblers(p, kind.rsplit("_", 1)[1])


def make_composite(kind: str, params: Optional[WorldParams] = None) -> World:
    kind = normalize_kind(kind)
    if kind not in COMPOSITE_KINDS:
        raise InvalidParamsError(
            f"Unknown composite world '{kind}'; expected one of {', '.join(COMPOSITE_KINDS)}"
        )
    p = (params or WorldParams()).resolved(kind)
    if kind == "cliff_disengage":
        return _make_cliff_disengage(p)
    return _make_cafe(p, threeway=True)


def make_world(kind: str, params: Optional[WorldParams] = None) -> World:
    """Dispatch to the constructor for ``kind``."""
    kind = normalize_kind(kind)
    if kind == "big_small":
        return make_big_small(params)
    if kind == "cliff":
        return make_cliff(params)
    if kind == "wall":
        return make_wall(params)
    if kind in LITERATURE_KINDS:
        return make_literature_world(kind, params)
    if kind in COMPOSITE_KINDS:
        return make_composite(kind, params)
    raise InvalidParamsError(f"Unknown world kind '{kind}'; expected one of {', '.join(WORLD_KINDS)}")


# --- validation ---

Finding = namedtuple("Finding", ["code", "state", "detail"])
ValidationReport = namedtuple("ValidationReport", ["ok", "findings"])


def _support_reachable(w: World) -> set:
    seen = {w.start}
    queue = deque([w.start])
    while queue:
        s = queue.popleft()
        for a in range(w.num_actions):
            if not w.available[s, a]:
                continue
            targets = [int(w.intended[s, a]), *w.alternates[s][a]]
            fixed = w.fixed_rows.get((s, a))
            if fixed is not None:
                targets += [fixed.success, fixed.failure]
            for t in targets:
                if 0 <= t < w.num_states and t not in seen:
                    seen.add(t)
                    queue.append(t)
    return seen


def validate_world(w: World) -> ValidationReport:
    """Check the World invariants; never raises."""
    findings = []
    S = w.num_states
    if not 0 <= w.start < S:
        findings.append(Finding("start-out-of-range", w.start, f"start {w.start} not in [0, {S})"))
        return ValidationReport(False, findings)

    for s in range(S):
        if not w.available[s].any():
            findings.append(Finding("no-available-action", s, "state has no available action"))
        for a in range(w.num_actions):
            if not w.available[s, a]:
                continue
            target = int(w.intended[s, a])
            if w.is_terminal(s):
                if target != s:
                    findings.append(Finding("non-absorbing", s, f"action {a} leaves the terminal"))
                if w.rewards[s, a, s] != 0:
                    findings.append(
                        Finding("non-absorbing-reward", s, f"self-transition reward {w.rewards[s, a, s]:g}")
                    )
                continue
            if not 0 <= target < S:
                findings.append(Finding("dangling-intended", s, f"action {a} points to {target}"))
            alts = w.alternates[s][a]
            if not alts:
                findings.append(Finding("empty-alternates", s, f"action {a} has no alternate outcome"))
            if target in alts:
                findings.append(Finding("intended-in-alternates", s, f"action {a}"))
            if any(not 0 <= t < S for t in alts):
                findings.append(Finding("dangling-alternate", s, f"action {a} alternates {alts}"))

    if not findings:
        reachable = _support_reachable(w)
        for s in range(S):
            if s not in reachable:
                findings.append(Finding("unreachable", s, f"state {w.state_names[s]} is unreachable"))
    return ValidationReport(not findings, findings)


# --- JSON ---


def world_to_dict(w: World) -> Dict[str, object]:
    return {"kind": w.kind, "params": w.params.to_dict()}


def world_from_dict(data: Mapping[str, object]) -> World:
    if not isinstance(data, Mapping) or "kind" not in data:
        raise InvalidParamsError("World document must be an object with a 'kind' field")
    return make_world(str(data["kind"]), WorldParams.from_dict(data.get("params") or {}))


def world_to_json(w: World) -> str:
    return json.dumps(world_to_dict(w), sort_keys=True)


def world_from_json(text: str) -> World:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidParamsError(f"Invalid world JSON: {e}") from e
    return world_from_dict(data)


def save_world(w: World, path: Path) -> Path:
    path = Path(path)
    path.write_text(world_to_json(w) + "\n", encoding="utf-8")
    return path


def load_world(path: Path) -> World:
    return world_from_json(Path(path).read_text(encoding="utf-8"))
