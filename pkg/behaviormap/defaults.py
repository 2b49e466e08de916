# src/behaviormap/defaults.py

"""Frozen defaults.

World defaults were searched until every world lands in its equivalence
class at 21x21, 51x51 and 101x101; change them only together with the
acceptance tests.
"""

GAMMA_RANGE = (0.01, 0.99)
P_RANGE = (0.34, 1.0)
RESOLUTION = 101

TOL = 1e-8
MAX_ITER = 100_000
TIE_RTOL = 1e-9
BRUTE_FORCE_CAP = 10**6

SAMPLES_PER_SEGMENT = 256
SWEEP_CAP = 200
MAX_WORKERS = 8

GRID_ACTIONS = ("up", "right", "down", "left")

WORLD_KINDS = (
    "big_small",
    "cliff",
    "wall",
    "chain",
    "riverswim",
    "gamblers_v1",
    "gamblers_v2",
    "cafe",
    "cliff_disengage",
    "cafe_threeway",
)
LITERATURE_KINDS = ("chain", "riverswim", "gamblers_v1", "gamblers_v2", "cafe")
COMPOSITE_KINDS = ("cliff_disengage", "cafe_threeway")

# Falling costs half a step, so a user who cannot reach the goal ends the
# episode at the cliff instead of idling beside it.
_CLIFF = {
    "width": 8,
    "height": 4,
    "reward_goal": 100.0,
    "reward_cliff": -5e-5,
    "step_reward": -1e-4,
}
_CAFE = {
    "width": 13,
    "height": 8,
    "reward_donut": 50.0,
    "reward_noodle": 100.0,
    "reward_vegan": 200.0,
    "step_reward": 0.0,
}
_GAMBLERS = {
    "length": 6,
    "reward_goal": 100.0,
    "reward_dead": 0.0,
    "p_c": 0.6,
    "p_f": 0.9,
    "reflect_walk": True,
}

WORLD_DEFAULTS = {
    "big_small": {
        "width": 5,
        "height": 5,
        "reward_small": 100.0,
        "reward_big": 300.0,
        "step_reward": 0.0,
    },
    "cliff": dict(_CLIFF),
    "wall": {
        "width": 5,
        "height": 6,
        "reward_goal": 100.0,
        "reward_wall": -25.0,
        "step_reward": 0.0,
        "wall_row": 2,
    },
    "chain": {
        "length": 4,
        "reward_end": 100.0,
        "reward_disengage": 10.0,
        "step_reward": 0.0,
    },
    "riverswim": {
        "length": 6,
        "reward_small": 5.0,
        "reward_big": 1000.0,
        "start": 0,
    },
    "gamblers_v1": dict(_GAMBLERS),
    "gamblers_v2": dict(_GAMBLERS),
    "cafe": dict(_CAFE),
    "cliff_disengage": dict(_CLIFF, reward_disengage=1.0),
    "cafe_threeway": dict(_CAFE),
}

# Display colors keyed by label position; "wander" always renders gray.
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
WANDER_COLOR = "#7f7f7f"
