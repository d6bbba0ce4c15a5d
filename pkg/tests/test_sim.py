import numpy as np
import pytest

from vorocover import sim
from vorocover.control import Gains
from vorocover.geometry import InspectionRegion, parse_mesh
from vorocover.sim import (
    Scenario,
    ScenarioError,
    decode_rle,
    encode_rle,
    facet_status,
    log_bytes,
)

# Small facet 10 m above the region floor, wound +z; four tightly grouped
# targets so a converged agent clears the whole cluster.
SMALL_MESH = """\
v 20 20 10
v 24 20 10
v 20 24 10
f 1 2 3
"""


def small_scenario(tmp_path, **overrides):
    mesh_path = tmp_path / "facet.obj"
    mesh_path.write_text(SMALL_MESH)
    base = dict(
        region=InspectionRegion(np.zeros(3), np.array([60.0, 60.0, 60.0])),
        mesh_path=str(mesh_path),
        d_proj=5.0,
        n_agents=1,
        starts=np.array([[40.0, 40.0, 30.0]]),
        gains=Gains(k_p=0.32, k_d=0.86, mu_o=10.0, d_o=3.0, r=10.0),
        alpha=1e-3,
        beta=0.02,
        dt=0.05,
        t_max=120.0,
        grid_h=2.0,
        u_max=20.0,
        v_max=None,
        log_path="run.jsonl",
    )
    base.update(overrides)
    return Scenario(**base)


class TestRle:
    def test_all_ones(self):
        assert encode_rle(np.ones(7, dtype=np.uint8)) == [7]

    def test_all_zeros(self):
        assert encode_rle(np.zeros(5, dtype=np.uint8)) == [0, 5]

    def test_mixed_roundtrip(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            bits = (rng.random(rng.integers(1, 40)) < 0.5).astype(np.uint8)
            assert np.array_equal(decode_rle(encode_rle(bits)), bits)

    def test_leading_zero_run(self):
        bits = np.array([0, 0, 1, 1, 1, 0], dtype=np.uint8)
        assert encode_rle(bits) == [0, 2, 3, 1]


class TestFacetStatus:
    def test_examples(self):
        members = np.array([[0, 1, 2, 4], [1, 2, 3, 5]], dtype=np.int32)
        all_ones = np.ones(6, dtype=np.uint8)
        assert facet_status(all_ones, members).tolist() == [0, 0]
        all_zero = np.zeros(6, dtype=np.uint8)
        assert facet_status(all_zero, members).tolist() == [1, 1]
        partial = np.array([0, 0, 0, 1, 0, 1], dtype=np.uint8)
        assert facet_status(partial, members).tolist() == [1, 0]


class TestRun:
    def test_precleared_mission_terminates_at_round_zero(self, tmp_path):
        sc = small_scenario(tmp_path)
        log = sim.run(sc, initial_status=np.zeros(4, dtype=np.uint8))
        assert log.success
        assert log.completion_time == 0.0
        assert len(log.records) == 1
        rec = log.records[0]
        assert rec["t"] == 0.0
        assert rec["status_popcount"] == 0
        assert rec["facets_done"] == 1

    def test_single_agent_single_facet_completes(self, tmp_path):
        sc = small_scenario(tmp_path)
        log = sim.run(sc)
        assert log.success
        assert log.completion_time is not None
        assert 0 < log.completion_time < sc.t_max
        assert log.records[-1]["status_popcount"] == 0
        assert log.records[-1]["facets_done"] == 1

    def test_popcount_non_increasing(self, tmp_path):
        log = sim.run(small_scenario(tmp_path))
        pops = [r["status_popcount"] for r in log.records]
        assert all(a >= b for a, b in zip(pops, pops[1:]))

    def test_timeout(self, tmp_path):
        sc = small_scenario(tmp_path, t_max=0.1)
        log = sim.run(sc)
        assert not log.success
        assert log.timed_out
        assert log.completion_time is None

    def test_positions_stay_in_region(self, tmp_path):
        sc = small_scenario(tmp_path)
        log = sim.run(sc)
        region = sc.region
        for rec in log.records:
            for agent in rec["agents"]:
                assert region.contains(np.array(agent["p"]))

    def test_determinism_same_scenario(self, tmp_path):
        sc = small_scenario(tmp_path)
        a = sim.run(sc)
        b = sim.run(sc)
        assert log_bytes(a) == log_bytes(b)

    def test_determinism_across_worker_counts(self, tmp_path):
        sc = small_scenario(
            tmp_path, n_agents=3,
            starts=np.array([[40.0, 40.0, 30.0], [45.0, 35.0, 25.0], [35.0, 45.0, 28.0]]),
            t_max=30.0)
        a = sim.run(sc, workers=1)
        b = sim.run(sc, workers=4)
        assert log_bytes(a) == log_bytes(b)

    def test_agent_permutation_leaves_global_curves_unchanged(self, tmp_path):
        starts = np.array([[40.0, 40.0, 30.0], [45.0, 35.0, 25.0]])
        sc = small_scenario(tmp_path, n_agents=2, starts=starts, t_max=30.0)
        sc_perm = small_scenario(tmp_path, n_agents=2, starts=starts[::-1].copy(),
                                 t_max=30.0)
        a = sim.run(sc)
        b = sim.run(sc_perm)
        assert len(a.records) == len(b.records)
        for ra, rb in zip(a.records, b.records):
            assert ra["status_popcount"] == rb["status_popcount"]
            assert ra["lyapunov"] == pytest.approx(rb["lyapunov"], rel=1e-9)
            # agent-wise data is permuted
            assert ra["agents"][0]["p"] == rb["agents"][1]["p"]
            assert ra["agents"][1]["p"] == rb["agents"][0]["p"]

    def test_log_schema_fixed_fields(self, tmp_path):
        log = sim.run(small_scenario(tmp_path, t_max=1.0))
        for rec in log.records:
            assert set(rec) == {"t", "agents", "status_popcount", "status_bits",
                                "lyapunov", "facets_done"}
            for agent in rec["agents"]:
                assert set(agent) == {"p", "v", "uc", "uo", "centroid", "mass",
                                      "neighbors"}

    def test_summary_fields(self, tmp_path):
        log = sim.run(small_scenario(tmp_path))
        s = log.summary()
        assert set(s) == {"completion_time_s", "success", "min_pairwise_dist_m",
                          "min_target_dist_m"}
        assert s["success"] is True
        assert s["min_pairwise_dist_m"] is None  # single agent
        assert s["min_target_dist_m"] > 0

    def test_lyapunov_logged_and_nonnegative(self, tmp_path):
        log = sim.run(small_scenario(tmp_path, t_max=5.0))
        for rec in log.records:
            assert rec["lyapunov"] >= 0.0

    def test_lyapunov_non_increasing_in_damped_phase(self, tmp_path):
        # The small mission leaves saturation once the agent nears its
        # centroid; over those rounds the monitor must actually decrease
        # (the acceptance run is saturated throughout, so the property is
        # only exercised here).
        sc = small_scenario(tmp_path)
        log = sim.run(sc)
        y0 = log.records[0]["lyapunov"]
        tol = 1e-6 * y0
        eligible = 0
        for prev, cur in zip(log.records, log.records[1:]):
            if prev["status_bits"] != cur["status_bits"]:
                continue
            sat = False
            for rec in (prev, cur):
                for a in rec["agents"]:
                    u = np.abs(np.array(a["uc"]) + np.array(a["uo"]))
                    if np.any(u > sc.u_max):
                        sat = True
            if sat:
                continue
            eligible += 1
            assert cur["lyapunov"] <= prev["lyapunov"] + tol
        assert eligible > 0  # the property must not hold vacuously here


class TestValidation:
    def test_overlapping_starts_rejected(self, tmp_path):
        sc = small_scenario(tmp_path, n_agents=2,
                            starts=np.array([[40.0, 40.0, 30.0], [40.0, 40.0, 30.0]]))
        with pytest.raises(ScenarioError, match="same position"):
            sim.run(sc)

    def test_start_outside_region_rejected(self, tmp_path):
        sc = small_scenario(tmp_path, starts=np.array([[400.0, 40.0, 30.0]]))
        with pytest.raises(ScenarioError, match="inside the region"):
            sim.run(sc)

    def test_start_inside_safety_ball_rejected(self, tmp_path):
        sc = small_scenario(tmp_path, starts=np.array([[20.0, 20.0, 11.0]]))
        with pytest.raises(ScenarioError, match="safety distance"):
            sim.run(sc)

    def test_agent_count_mismatch(self, tmp_path):
        sc = small_scenario(tmp_path, n_agents=2)
        with pytest.raises(ScenarioError, match="start positions"):
            sim.run(sc)

    def test_projected_outside_region_rejected(self, tmp_path):
        # standoff pushes projected points above the region ceiling
        sc = small_scenario(tmp_path, d_proj=55.0)
        with pytest.raises(ScenarioError, match="projected"):
            sim.run(sc)
