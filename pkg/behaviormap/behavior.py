# src/behaviormap/behavior.py

"""Policy -> behavior classification.

Policies are rolled out under intended (deterministic) dynamics and the
trajectory is named per the world's classifier. Gridworld rollouts that
never reach a terminal get the reserved label ``wander``.
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .defaults import PALETTE, WANDER_COLOR
from .errors import InvalidParamsError
from .planner import Policy
from .world_zoo import World

WANDER = "wander"

LABEL_SETS: Dict[str, Tuple[str, ...]] = {
    "big_small": ("small", "big", WANDER),
    "cliff": ("risky", "safe", WANDER),
    "wall": ("through-wall", "around-wall", WANDER),
    "chain": ("exercise", "disengage"),
    "riverswim": ("upstream", "downstream"),
    "gamblers": ("continue", "finish"),
    "cafe": ("donut", "healthy", WANDER),
    "cafe_threeway": ("donut", "noodle", "vegan", WANDER),
    "cliff_disengage": ("risky", "safe", "disengage", WANDER),
}


@dataclass(frozen=True)
class Trajectory:
    visited: Tuple[int, ...]
    actions: Tuple[int, ...]
    terminated: bool

    @property
    def steps(self) -> int:
        return len(self.actions)

    @property
    def last(self) -> int:
        return self.visited[-1]


@dataclass(frozen=True)
class BehaviorLabel:
    label: int
    name: str


def label_names(w: Union[World, str]) -> Tuple[str, ...]:
    classifier_id = w if isinstance(w, str) else w.classifier_id
    try:
        return LABEL_SETS[classifier_id]
    except KeyError:
        raise InvalidParamsError(f"Unknown behavior classifier '{classifier_id}'") from None


def rollout(w: World, pi: Policy, horizon: Optional[int] = None) -> Trajectory:
    horizon = 4 * w.num_states if horizon is None else horizon
    if horizon < 1:
        raise InvalidParamsError(f"horizon must be at least 1, got {horizon}")
    s = w.start
    visited, actions = [s], []
    while not w.is_terminal(s) and len(actions) < horizon:
        a = pi[s]
        s = int(w.intended[s, a])
        actions.append(a)
        visited.append(s)
    return Trajectory(tuple(visited), tuple(actions), w.is_terminal(s))


def _name_trajectory(w: World, traj: Trajectory) -> str:
    cid = w.classifier_id
    if cid == "chain":
        disengage = w.action_index("disengage")
        return "disengage" if disengage in traj.actions else "exercise"
    if not traj.terminated:
        return WANDER
    last = traj.last
    if cid == "big_small":
        return "big" if last in w.tagged("big") else "small"
    if cid in ("cliff", "cliff_disengage"):
        if last in w.tagged("disengage"):
            return "disengage"
        near = set(w.tagged("cliff_adjacent"))
        if last in w.tagged("cliff") or any(s in near for s in traj.visited[1:]):
            return "risky"
        return "safe"
    if cid == "wall":
        penalty = set(w.tagged("penalty"))
        return "through-wall" if any(s in penalty for s in traj.visited) else "around-wall"
    if cid == "cafe":
        return "donut" if last in w.tagged("donut") else "healthy"
    if cid == "cafe_threeway":
        for name in ("donut", "noodle", "vegan"):
            if last in w.tagged(name):
                return name
    raise InvalidParamsError(f"Classifier '{cid}' cannot name trajectory ending in state {last}")


def classify_behavior(w: World, pi: Policy) -> BehaviorLabel:
    names = label_names(w)
    if w.classifier_id in ("riverswim", "gamblers"):
        name = w.action_names[pi[w.start]]
    else:
        name = _name_trajectory(w, rollout(w, pi))
    return BehaviorLabel(names.index(name), name)


def label_palette(
    names: Sequence[str], overrides: Optional[Mapping[str, str]] = None
) -> List[Dict[str, object]]:
    """Index -> name -> display color; ``overrides`` maps label names to colors."""
    overrides = dict(overrides or {})
    entries = []
    for i, name in enumerate(names):
        default = WANDER_COLOR if name == WANDER else PALETTE[i % len(PALETTE)]
        entries.append({"index": i, "name": name, "color": overrides.get(name, default)})
    return entries


def palette_json(names: Sequence[str], overrides: Optional[Mapping[str, str]] = None) -> str:
    return json.dumps(label_palette(names, overrides), indent=2)
