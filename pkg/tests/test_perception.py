# tests/test_perception.py

import csv

import numpy as np
import pytest

from behaviormap.defaults import WORLD_KINDS
from behaviormap.errors import InvalidTraitsError, UnavailableActionError
from behaviormap.perception import (
    UserTraits,
    alternate_outcomes,
    build_user_mdp,
    dump_transitions_csv,
    intended_outcome,
    perceived_transitions,
)
from behaviormap.world_zoo import make_big_small, make_world


class TestUserTraits:
    def test_valid(self):
        t = UserTraits(0.5, 1)
        assert t.gamma == 0.5 and t.p == 1.0

    @pytest.mark.parametrize("gamma", [1.0, -0.1, float("nan")])
    def test_bad_gamma(self, gamma):
        with pytest.raises(InvalidTraitsError):
            UserTraits(gamma, 0.5)

    @pytest.mark.parametrize("p", [1.01, -0.5])
    def test_bad_p(self, p):
        with pytest.raises(InvalidTraitsError):
            UserTraits(0.5, p)


class TestOutcomes:
    def test_intended_and_alternates(self):
        w = make_big_small()
        up = w.action_index("up")
        assert intended_outcome(w, w.start, up) == w.start
        right_of_start = w.layout.state_at(0, 1)
        below_start = w.layout.state_at(1, 0)
        assert alternate_outcomes(w, w.start, up) == {right_of_start, below_start}

    def test_out_of_range_action(self):
        w = make_big_small()
        with pytest.raises(UnavailableActionError):
            intended_outcome(w, 0, 7)
        with pytest.raises(UnavailableActionError):
            alternate_outcomes(w, 99, 0)


class TestPerceivedTransitions:
    @pytest.mark.parametrize("kind", WORLD_KINDS)
    @pytest.mark.parametrize("p", [0.0, 0.34, 0.7, 1.0])
    def test_rows_sum_to_one(self, kind, p):
        T = perceived_transitions(make_world(kind), p)
        np.testing.assert_allclose(T.sum(axis=2), 1.0, atol=1e-12)
        assert np.all(T >= 0)

    def test_equal_split(self):
        w = make_big_small()
        p = 0.7
        T = perceived_transitions(w, p)
        up = w.action_index("up")
        assert T[w.start, up, w.start] == pytest.approx(p)
        for t in alternate_outcomes(w, w.start, up):
            assert T[w.start, up, t] == pytest.approx((1 - p) / 2)

    def test_terminals_absorb(self):
        w = make_big_small()
        T = perceived_transitions(w, 0.5)
        for s in w.terminals:
            assert np.all(T[s, :, s] == 1.0)

    def test_gamblers_confidence_binding(self):
        v1 = make_world("gamblers_v1")
        v2 = make_world("gamblers_v2")
        s = v1.start
        T1 = perceived_transitions(v1, 0.8)
        T2 = perceived_transitions(v2, 0.8)
        # v1: continue follows p, finish keeps p_f
        assert T1[s, 0, s + 1] == pytest.approx(0.8)
        assert T1[s, 1, v1.tagged("goal")[0]] == pytest.approx(0.9)
        # v2: continue keeps p_c, finish follows p
        assert T2[s, 0, s + 1] == pytest.approx(0.6)
        assert T2[s, 1, v2.tagged("goal")[0]] == pytest.approx(0.8)

    def test_riverswim_downstream_is_deterministic(self):
        w = make_world("riverswim")
        T = perceived_transitions(w, 0.4)
        assert T[3, 1, 2] == 1.0
        assert T[3, 0, 4] == pytest.approx(0.4)

    def test_read_only(self):
        T = perceived_transitions(make_big_small(), 0.5)
        with pytest.raises(ValueError):
            T[0, 0, 0] = 0.0

    def test_bad_p(self):
        with pytest.raises(InvalidTraitsError):
            perceived_transitions(make_big_small(), 1.5)


class TestUserMdp:
    def test_expected_rewards(self):
        w = make_world("chain")
        m = build_user_mdp(w, UserTraits(0.9, 0.5))
        end = w.tagged("end")[0]
        # x3 exercise: end with p, disengaged or stay with (1 - p) / 2 each
        assert m.expected_rewards[3, 0] == pytest.approx(0.5 * 100.0 + 0.25 * 10.0)
        assert m.gamma == 0.9
        assert m.rewards is w.rewards
        assert m.transitions[3, 0, end] == pytest.approx(0.5)

    def test_dump_csv(self, tmp_path):
        w = make_world("chain")
        m = build_user_mdp(w, UserTraits(0.9, 0.8))
        out = tmp_path / "t.csv"
        rows = dump_transitions_csv(m, out)
        with out.open() as fp:
            data = list(csv.reader(fp))
        assert data[0] == ["state", "action", "next_state", "probability"]
        assert len(data) == rows + 1
        assert rows == int(np.count_nonzero(m.transitions))
        assert ["x0", "exercise", "x1", "0.80000000000000004"] in data
