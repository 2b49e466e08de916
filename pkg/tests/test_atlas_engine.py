# tests/test_atlas_engine.py

import json

import numpy as np
import pytest

from behaviormap.atlas_engine import (
    BehaviorMap,
    EquivalenceSignature,
    GridSpec,
    _filter_runs,
    check_equivalent,
    compute_behavior_map,
    edge_switch_counts,
    edge_switch_positions,
    interior_topology_report,
    maybe_signature,
    nearest_cell,
    nearest_index,
    read_map_csv,
    signature,
    signature_json,
    trait_identifiability,
    warm_start_axis,
    write_map_csv,
)
from behaviormap.errors import (
    InvalidParamsError,
    MalformedMapError,
    MapComputationError,
    WanderOnEdgeError,
)
from behaviormap.world_zoo import WorldParams, make_world


def synthetic(labels, palette=("A", "B")):
    labels = np.asarray(labels)
    P, G = labels.shape
    spec = GridSpec.linspace(G, p_res=P)
    return BehaviorMap(spec, labels, "synthetic", palette)


def vertical_boundary(n=5, at=3):
    labels = np.zeros((n, n), dtype=int)
    labels[:, at:] = 1
    return synthetic(labels)


class TestGridSpec:
    def test_linspace_defaults(self):
        spec = GridSpec.linspace()
        assert spec.shape == (101, 101)
        assert spec.gamma_samples[0] == pytest.approx(0.01)
        assert spec.gamma_samples[-1] == pytest.approx(0.99)
        assert spec.p_samples[0] == pytest.approx(0.34)
        assert spec.p_samples[-1] == pytest.approx(1.0)

    def test_rectangular(self):
        assert GridSpec.linspace(7, p_res=4).shape == (4, 7)

    def test_unit_axes(self):
        spec = GridSpec.linspace(5)
        np.testing.assert_allclose(spec.gamma_unit, [0, 0.25, 0.5, 0.75, 1])
        np.testing.assert_allclose(spec.p_unit, [0, 0.25, 0.5, 0.75, 1])

    def test_equality(self):
        assert GridSpec.linspace(5) == GridSpec.linspace(5)
        assert GridSpec.linspace(5) != GridSpec.linspace(7)

    @pytest.mark.parametrize(
        "gammas,ps",
        [
            ([0.1, 0.2], [0.4, 0.5, 0.6]),
            ([0.1, 0.5, 1.0], [0.4, 0.5, 0.6]),
            ([0.1, 0.5, 0.3], [0.4, 0.5, 0.6]),
            ([0.1, 0.5, 0.9], [0.4, 0.5, 1.2]),
        ],
    )
    def test_rejects_bad_axes(self, gammas, ps):
        with pytest.raises(InvalidParamsError):
            GridSpec(gammas, ps)

    def test_rejects_low_resolution(self):
        with pytest.raises(InvalidParamsError):
            GridSpec.linspace(2)


class TestBehaviorMap:
    def test_shape_mismatch(self):
        with pytest.raises(InvalidParamsError):
            BehaviorMap(GridSpec.linspace(3), np.zeros((3, 4)), "x", ("A",))

    def test_label_outside_palette(self):
        with pytest.raises(InvalidParamsError):
            synthetic(np.full((3, 3), 2))

    def test_edges_walk_counterclockwise(self):
        labels = np.arange(9).reshape(3, 3)
        m = synthetic(labels, palette=tuple("abcdefghi"))
        edges = m.edge_sequences()
        assert edges["bottom"].tolist() == [0, 1, 2]
        assert edges["right"].tolist() == [2, 5, 8]
        assert edges["top"].tolist() == [8, 7, 6]
        assert edges["left"].tolist() == [6, 3, 0]

    def test_read_only(self):
        m = vertical_boundary()
        with pytest.raises(ValueError):
            m.labels[0, 0] = 1


class TestSignature:
    def test_uniform(self):
        sig = signature(synthetic(np.zeros((5, 5), dtype=int)))
        assert sig == EquivalenceSignature(1, (0, 0, 0, 0))

    def test_vertical_boundary(self):
        m = vertical_boundary()
        assert signature(m) == EquivalenceSignature(2, (1, 0, 1, 0))
        assert signature(m).total_switches == 2
        positions = edge_switch_positions(m)
        assert positions["bottom"] == [pytest.approx(0.625)]
        assert positions["top"] == [pytest.approx(0.625)]
        assert positions["left"] == [] and positions["right"] == []

    def test_diagonal_boundary(self):
        i, j = np.indices((5, 5))
        m = synthetic((j > i + 2).astype(int))
        assert edge_switch_counts(m) == (1, 1, 0, 0)

    def test_corner_cell(self):
        labels = np.zeros((5, 5), dtype=int)
        labels[0, -1] = 1
        assert edge_switch_counts(synthetic(labels)) == (1, 1, 0, 0)

    def test_min_run_filters_blips(self):
        labels = np.zeros((5, 5), dtype=int)
        labels[0, 2] = 1
        m = synthetic(labels)
        assert edge_switch_counts(m) == (2, 0, 0, 0)
        assert edge_switch_counts(m, min_run=2) == (0, 0, 0, 0)

    def test_filter_runs(self):
        assert _filter_runs([0, 0, 1, 0, 0], 2) == [0, 0, 0, 0, 0]
        assert _filter_runs([1, 0, 0, 0], 2) == [0, 0, 0, 0]
        assert _filter_runs([0, 0, 1, 1], 2) == [0, 0, 1, 1]

    def test_wander_on_edge(self):
        labels = np.zeros((3, 3), dtype=int)
        labels[2, 1] = 1
        m = synthetic(labels, palette=("A", "wander"))
        with pytest.raises(WanderOnEdgeError) as exc:
            signature(m)
        assert len(exc.value.cells) == 1
        assert maybe_signature(m) is None

    def test_check_equivalent(self):
        a = EquivalenceSignature(2, (1, 0, 1, 0))
        assert check_equivalent(a, EquivalenceSignature(2, (1, 0, 1, 0)))
        assert not check_equivalent(a, EquivalenceSignature(2, (1, 1, 0, 0)))
        assert not check_equivalent(a, EquivalenceSignature(3, (1, 0, 1, 0)))

    def test_signature_json(self):
        text = signature_json(EquivalenceSignature(2, (1, 0, 1, 0)), "chain")
        assert text == '{"world": "chain", "num_behaviors": 2, "edge_switches": [1,0,1,0]}'
        assert json.loads(text) == EquivalenceSignature(2, (1, 0, 1, 0)).to_dict("chain")


class TestTopology:
    def test_interior_disk(self):
        labels = np.zeros((7, 7), dtype=int)
        labels[2:5, 3] = 1
        labels[3, 2:5] = 1
        report = interior_topology_report(synthetic(labels))
        assert report.interior_loops == 1
        assert report.components_per_label == {"A": 1, "B": 1}
        assert any("touch no map edge" in w for w in report.warnings)

    def test_clean_map(self):
        report = interior_topology_report(vertical_boundary())
        assert report.interior_loops == 0
        assert report.warnings == ()

    def test_many_switches_warns(self):
        labels = np.zeros((5, 5), dtype=int)
        labels[:, 2] = 1
        report = interior_topology_report(synthetic(labels))
        assert any("more than one valid way" in w for w in report.warnings)


class TestTraitQueries:
    @pytest.mark.parametrize("x,expected", [(0.25, 0), (0.26, 1), (-1.0, 0), (2.0, 2), (0.5, 1)])
    def test_nearest_index(self, x, expected):
        assert nearest_index(np.array([0.0, 0.5, 1.0]), x) == expected

    def test_nearest_cell(self):
        m = vertical_boundary()
        assert nearest_cell(m, 0.8, 0.1) == (0, 3)

    def test_identifiability(self):
        report = trait_identifiability(vertical_boundary())
        assert report.gamma_fraction == 1.0
        assert report.p_fraction == 0.0
        assert report.gamma_identifiable and not report.p_identifiable
        a, b = report.regions
        assert a.name == "A" and a.area_fraction == pytest.approx(0.6)
        assert b.gamma_range[0] == pytest.approx(GridSpec.linspace(5).gamma_samples[3])

    def test_warm_start(self):
        rec = warm_start_axis(vertical_boundary(), (0.0, 0.0))
        assert rec.axis == "gamma"
        assert rec.current == "A"
        assert rec.gamma_distance == pytest.approx(0.75)
        assert rec.p_distance == float("inf")
        assert rec.gamma_target == "B" and rec.p_target is None

    def test_warm_start_uniform(self):
        rec = warm_start_axis(synthetic(np.zeros((3, 3), dtype=int)), (0.5, 0.5))
        assert rec.axis is None


class TestMapFiles:
    def test_round_trip(self, tmp_path):
        m = vertical_boundary()
        path = write_map_csv(m, tmp_path / "m.csv")
        again = read_map_csv(path, world_id="synthetic")
        assert again.spec == m.spec
        np.testing.assert_array_equal(again.labels, m.labels)
        assert again.palette == m.palette

    def test_world_id_defaults_to_stem(self, tmp_path):
        path = write_map_csv(vertical_boundary(), tmp_path / "wall-map.csv")
        assert read_map_csv(path).world_id == "wall-map"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b,c,d\n0.1,0.5,0,A\n")
        with pytest.raises(MalformedMapError):
            read_map_csv(path)

    def test_incomplete_grid(self, tmp_path):
        path = write_map_csv(vertical_boundary(), tmp_path / "m.csv")
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(MalformedMapError):
            read_map_csv(path)

    def test_bad_number(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("gamma,p,label_index,label_name\nx,0.5,0,A\n")
        with pytest.raises(MalformedMapError):
            read_map_csv(path)


class TestComputeBehaviorMap:
    def test_chain_labels(self):
        m = compute_behavior_map(make_world("chain"), GridSpec.linspace(5), workers=1)
        expected = [
            [1, 1, 1, 1, 0],
            [1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0],
            [1, 1, 0, 0, 0],
        ]
        assert m.labels.tolist() == expected
        assert m.palette == ("exercise", "disengage")
        assert m.world_id == "chain"

    def test_big_small_labels(self):
        m = compute_behavior_map(make_world("big_small"), GridSpec.linspace(5), workers=1)
        assert m.labels.tolist() == [[0, 0, 0, 0, 1]] * 5

    @pytest.mark.parametrize(
        "kind,expected",
        [
            ("big_small", (2, (1, 0, 1, 0))),
            ("wall", (2, (2, 0, 2, 0))),
            ("chain", (2, (1, 0, 1, 0))),
            ("riverswim", (2, (1, 0, 1, 0))),
            ("gamblers_v1", (2, (1, 0, 1, 0))),
            ("gamblers_v2", (2, (1, 1, 0, 0))),
            ("cliff", (2, (1, 1, 0, 0))),
            ("cafe", (2, (1, 0, 1, 0))),
        ],
    )
    def test_signatures(self, kind, expected):
        m = compute_behavior_map(make_world(kind), GridSpec.linspace(21))
        sig = signature(m)
        assert (sig.num_behaviors, sig.edge_switches) == expected

    def test_cliff_labels(self):
        m = compute_behavior_map(make_world("cliff"), GridSpec.linspace(3), workers=1)
        assert m.labels.tolist() == [[0, 0, 1], [0, 0, 1], [0, 0, 0]]
        assert signature(m) == EquivalenceSignature(2, (1, 1, 0, 0))

    def test_costly_cliff_wanders_on_edge(self):
        params = WorldParams(reward_cliff=-1000.0, step_reward=0.0)
        m = compute_behavior_map(make_world("cliff", params), GridSpec.linspace(3), workers=1)
        assert m.labels.tolist() == [[2, 2, 1], [2, 2, 1], [0, 0, 0]]
        with pytest.raises(WanderOnEdgeError):
            signature(m)

    def test_serial_matches_parallel(self):
        w = make_world("wall")
        spec = GridSpec.linspace(9)
        serial = compute_behavior_map(w, spec, workers=1)
        parallel = compute_behavior_map(w, spec, workers=4, show_progress=True)
        np.testing.assert_array_equal(serial.labels, parallel.labels)

    def test_non_convergence_is_reported(self):
        with pytest.raises(MapComputationError) as exc:
            compute_behavior_map(make_world("chain"), GridSpec.linspace(3), max_iter=1)
        assert len(exc.value.failures) == 9
        assert "no convergence" in exc.value.failures[0][2]

    def test_bad_solver_args(self):
        with pytest.raises(InvalidParamsError):
            compute_behavior_map(make_world("chain"), GridSpec.linspace(3), tol=0)


FIG_CLASSES = {
    "big_small": (1, 0, 1, 0),
    "cliff": (1, 1, 0, 0),
    "wall": (2, 0, 2, 0),
    "chain": (1, 0, 1, 0),
    "riverswim": (1, 0, 1, 0),
    "gamblers_v1": (1, 0, 1, 0),
    "gamblers_v2": (1, 1, 0, 0),
    "cafe": (1, 0, 1, 0),
}


@pytest.fixture(scope="module")
def full_maps():
    spec = GridSpec.linspace()
    return {kind: compute_behavior_map(make_world(kind), spec) for kind in FIG_CLASSES}


@pytest.mark.slow
class TestDefaultWorlds:
    @pytest.mark.parametrize("kind", sorted(FIG_CLASSES))
    def test_equivalence_class(self, full_maps, kind):
        assert signature(full_maps[kind]) == EquivalenceSignature(2, FIG_CLASSES[kind])

    @pytest.mark.parametrize("kind", sorted(FIG_CLASSES))
    def test_stable_under_resolution(self, full_maps, kind):
        coarse = compute_behavior_map(make_world(kind), GridSpec.linspace(51))
        assert signature(coarse) == signature(full_maps[kind])

    @pytest.mark.parametrize("kind", sorted(FIG_CLASSES))
    def test_no_interior_regions(self, full_maps, kind):
        report = interior_topology_report(full_maps[kind])
        assert report.interior_loops == 0

    @pytest.mark.parametrize("kind", sorted(FIG_CLASSES))
    def test_two_behaviors_switch_an_even_number_of_times(self, full_maps, kind):
        sig = signature(full_maps[kind])
        assert sig.num_behaviors == 2
        assert sig.total_switches % 2 == 0

    def test_big_small_rows_switch_once(self, full_maps):
        rows = full_maps["big_small"].labels
        assert [int(np.count_nonzero(r[1:] != r[:-1])) for r in rows] == [1] * len(rows)
