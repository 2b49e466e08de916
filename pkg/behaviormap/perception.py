# src/behaviormap/perception.py

"""The user's perceived MDP.

A user with confidence ``p`` believes each action reaches its intended
outcome with probability ``p`` and spreads the remaining ``1 - p`` evenly
over the action's alternate outcomes. World-constant rows (RiverSwim's
downstream drift, Gambler's Ruin bets) keep their own probabilities unless
the world binds confidence to one of its constants.
"""

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import FrozenSet

import numpy as np

from .errors import InvalidTraitsError, UnavailableActionError
from .world_zoo import World


@dataclass(frozen=True)
class UserTraits:
    gamma: float
    p: float

    def __post_init__(self):
        gamma, p = float(self.gamma), float(self.p)
        if not (math.isfinite(gamma) and 0.0 <= gamma < 1.0):
            raise InvalidTraitsError(f"gamma must lie in [0, 1), got {self.gamma}")
        if not (math.isfinite(p) and 0.0 <= p <= 1.0):
            raise InvalidTraitsError(f"p must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class UserMdp:
    world: World
    traits: UserTraits
    transitions: np.ndarray = field(repr=False)

    @property
    def gamma(self) -> float:
        return self.traits.gamma

    @property
    def rewards(self) -> np.ndarray:
        return self.world.rewards

    @cached_property
    def expected_rewards(self) -> np.ndarray:
        """Expected one-step reward per (state, action)."""
        return np.einsum("ijk,ijk->ij", self.transitions, self.world.rewards)


def _check_query(w: World, s: int, a: int) -> None:
    if not (0 <= s < w.num_states and 0 <= a < w.num_actions) or not w.available[s, a]:
        raise UnavailableActionError(f"Action {a} is not available at state {s} in world '{w.id}'")


def intended_outcome(w: World, s: int, a: int) -> int:
    _check_query(w, s, a)
    return int(w.intended[s, a])


def alternate_outcomes(w: World, s: int, a: int) -> FrozenSet[int]:
    _check_query(w, s, a)
    return frozenset(w.alternates[s][a])


def _row_probability(w: World, key, p: float) -> float:
    if key is None:
        return 1.0
    if key == w.confidence_key:
        return p
    return float(w.constants[key])


def perceived_transitions(w: World, p: float) -> np.ndarray:
    """Dense (S, A, S) transition table for confidence ``p``; read-only."""
    p = float(p)
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise InvalidTraitsError(f"p must lie in [0, 1], got {p}")
    S, A = w.num_states, w.num_actions
    T = np.zeros((S, A, S))
    idle = w.terminal_mask[:, None] | ~w.available
    for s in range(S):
        for a in range(A):
            if idle[s, a]:
                T[s, a, s] = 1.0
                continue
            fixed = w.fixed_rows.get((s, a))
            if fixed is not None:
                q = _row_probability(w, fixed.key, p)
                T[s, a, fixed.success] = q
                T[s, a, fixed.failure] += 1.0 - q
                continue
            alts = w.alternates[s][a]
            T[s, a, w.intended[s, a]] = p
            share = (1.0 - p) / len(alts)
            for t in alts:
                T[s, a, t] = share
    T.setflags(write=False)
    return T


def build_user_mdp(w: World, t: UserTraits) -> UserMdp:
    return UserMdp(world=w, traits=t, transitions=perceived_transitions(w, t.p))


def dump_transitions_csv(m: UserMdp, path: Path) -> int:
    """Write nonzero transition entries; returns the number of rows."""
    w = m.world
    rows = 0
    with Path(path).open("w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp)
        writer.writerow(["state", "action", "next_state", "probability"])
        for s, a, t in zip(*np.nonzero(m.transitions)):
            writer.writerow(
                [
                    w.state_names[s],
                    w.action_names[a],
                    w.state_names[t],
                    f"{m.transitions[s, a, t]:.17g}",
                ]
            )
            rows += 1
    return rows
