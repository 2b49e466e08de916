# src/behaviormap/planner.py

"""Exact tabular planning on a perceived MDP.

``value_iteration`` runs synchronous Bellman sweeps until the max-norm
residual drops to ``tol`` (and at least one sweep per state has run, so
values have propagated across the whole state space). Greedy extraction
treats actions within a relative ``TIE_RTOL`` of the best as tied and picks
the lowest index among them.
"""

import itertools
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .defaults import BRUTE_FORCE_CAP, MAX_ITER, TIE_RTOL, TOL
from .errors import (
    CapExceededError,
    InvalidParamsError,
    NonFiniteValueError,
    UnavailableActionError,
)
from .perception import UserMdp


@dataclass(frozen=True, eq=False)
class ValueFunction:
    values: np.ndarray
    converged: bool = True
    iterations: int = 0
    residuals: Tuple[float, ...] = ()

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else 0.0


@dataclass(frozen=True)
class Policy:
    action_of: Tuple[int, ...]

    def __getitem__(self, state: int) -> int:
        return self.action_of[state]

    def __len__(self) -> int:
        return len(self.action_of)

    @classmethod
    def from_actions(cls, actions: Sequence[int]) -> "Policy":
        return cls(tuple(int(a) for a in actions))


BatchSolution = namedtuple("BatchSolution", ["values", "policies", "converged", "iterations"])


def _check_solver_args(tol: float, max_iter: int) -> None:
    if not tol > 0:
        raise InvalidParamsError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise InvalidParamsError(f"max_iter must be at least 1, got {max_iter}")


def greedy_actions(q: np.ndarray, available: np.ndarray, rtol: float = TIE_RTOL) -> np.ndarray:
    """Lowest-index near-maximal action along axis 1 of ``q`` (S, A, ...)."""
    mask = available.reshape(available.shape + (1,) * (q.ndim - 2))
    q = np.where(mask, q, -np.inf)
    best = q.max(axis=1, keepdims=True)
    tied = q >= best - rtol * np.abs(best)
    return np.argmax(tied, axis=1)


def q_values(m: UserMdp, values: np.ndarray) -> np.ndarray:
    S, A = m.world.num_states, m.world.num_actions
    future = (m.transitions.reshape(S * A, S) @ values).reshape(S, A)
    return m.expected_rewards + m.gamma * future


def value_iteration(
    m: UserMdp,
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    min_sweeps: Optional[int] = None,
) -> ValueFunction:
    _check_solver_args(tol, max_iter)
    w = m.world
    S, A = w.num_states, w.num_actions
    min_sweeps = S if min_sweeps is None else min_sweeps
    T2 = m.transitions.reshape(S * A, S)
    R = m.expected_rewards
    unavailable = ~w.available
    V = np.zeros(S)
    residuals = []
    for k in range(1, max_iter + 1):
        Q = R + m.gamma * (T2 @ V).reshape(S, A)
        Q[unavailable] = -np.inf
        new_v = Q.max(axis=1)
        if not np.all(np.isfinite(new_v)):
            raise NonFiniteValueError(
                f"Non-finite value at sweep {k} in world '{w.id}' (gamma={m.gamma}, p={m.traits.p})"
            )
        residuals.append(float(np.max(np.abs(new_v - V))))
        V = new_v
        if residuals[-1] <= tol and k >= min_sweeps:
            return ValueFunction(V, True, k, tuple(residuals))
    return ValueFunction(V, False, max_iter, tuple(residuals))


def extract_policy(m: UserMdp, v: ValueFunction, rtol: float = TIE_RTOL) -> Policy:
    q = q_values(m, v.values)
    return Policy.from_actions(greedy_actions(q, m.world.available, rtol))


def _check_policy(m: UserMdp, pi: Policy) -> np.ndarray:
    w = m.world
    actions = np.asarray(pi.action_of, dtype=np.int64)
    if actions.shape != (w.num_states,):
        raise InvalidParamsError(f"Policy covers {actions.size} states, world has {w.num_states}")
    if np.any(actions < 0) or np.any(actions >= w.num_actions):
        raise UnavailableActionError("Policy uses an action index outside the world's action set")
    bad = ~w.available[np.arange(w.num_states), actions]
    if bad.any():
        s = int(np.flatnonzero(bad)[0])
        raise UnavailableActionError(f"Policy action {actions[s]} is not available at state {s}")
    return actions


def policy_evaluation(m: UserMdp, pi: Policy) -> ValueFunction:
    """Solve (I - gamma P_pi) V = r_pi exactly."""
    actions = _check_policy(m, pi)
    S = m.world.num_states
    rows = np.arange(S)
    P = m.transitions[rows, actions]
    r = m.expected_rewards[rows, actions]
    V = linalg.solve(np.eye(S) - m.gamma * P, r)
    residual = float(np.max(np.abs(V - (r + m.gamma * P @ V)))) if S else 0.0
    return ValueFunction(V, True, 1, (residual,))


def brute_force_optimal(m: UserMdp, cap: int = BRUTE_FORCE_CAP) -> Tuple[ValueFunction, Policy]:
    """Enumerate every deterministic policy and keep the best at the start state.

    Terminal states are absorbing whatever the action, so only non-terminal
    choices are enumerated; ties keep the lexicographically first policy.
    """
    w = m.world
    choices = []
    for s in range(w.num_states):
        allowed = tuple(int(a) for a in np.flatnonzero(w.available[s]))
        choices.append(allowed[:1] if w.is_terminal(s) else allowed)
    total = 1
    for options in choices:
        total *= len(options)
        if total > cap:
            raise CapExceededError(f"Policy enumeration exceeds cap of {cap} in world '{w.id}'")

    best_v, best_pi = None, None
    for actions in itertools.product(*choices):
        pi = Policy(actions)
        v = policy_evaluation(m, pi)
        if best_v is None or v.values[w.start] > best_v.values[w.start] + 1e-12:
            best_v, best_pi = v, pi
    return best_v, best_pi


def batched_value_iteration(
    transitions: np.ndarray,
    expected_rewards: np.ndarray,
    available: np.ndarray,
    gammas: Sequence[float],
    tol: float = TOL,
    max_iter: int = MAX_ITER,
    min_sweeps: Optional[int] = None,
    rtol: float = TIE_RTOL,
) -> BatchSolution:
    """Value iteration for many discounts sharing one transition table.

    Each discount stops on its own criterion, so every column matches a
    separate ``value_iteration`` call.
    """
    _check_solver_args(tol, max_iter)
    S, A = expected_rewards.shape
    gammas = np.asarray(gammas, dtype=float)
    G = gammas.size
    min_sweeps = S if min_sweeps is None else min_sweeps
    T2 = transitions.reshape(S * A, S)
    R = expected_rewards[:, :, None]
    unavailable = ~available

    V = np.zeros((S, G))
    converged = np.zeros(G, dtype=bool)
    iterations = np.full(G, max_iter, dtype=np.int64)
    active = np.arange(G)
    for k in range(1, max_iter + 1):
        Va = V[:, active]
        Q = R + (T2 @ Va).reshape(S, A, active.size) * gammas[active]
        Q[unavailable] = -np.inf
        new_v = Q.max(axis=1)
        if not np.all(np.isfinite(new_v)):
            bad = gammas[active][~np.all(np.isfinite(new_v), axis=0)]
            raise NonFiniteValueError(f"Non-finite value at sweep {k} for gamma={bad[0]}")
        residual = np.max(np.abs(new_v - Va), axis=0)
        V[:, active] = new_v
        if k >= min_sweeps:
            done = residual <= tol
            converged[active[done]] = True
            iterations[active[done]] = k
            active = active[~done]
            if active.size == 0:
                break

    future = (T2 @ V).reshape(S, A, G) * gammas
    policies = greedy_actions(R + future, available, rtol).T
    return BatchSolution(V.T.copy(), policies, converged, iterations)
