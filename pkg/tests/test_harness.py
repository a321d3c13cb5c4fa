import json
import os
from dataclasses import replace

import numpy as np
import pytest

from crspectrum.config import default_config
from crspectrum.harness import (
    DecisionMetrics,
    _simulate_access,
    emit_outputs,
    run_scenario,
    summary_to_csv,
    summary_to_json,
)


def small_config(scenario, **overrides):
    """Trimmed scenario defaults so each test run stays under a second."""
    trims = {
        "prediction": dict(n_slots=1500, bp_epochs=20, reps=1),
        "fusion": dict(n_slots=2000, reps=1),
        "recommendation": dict(n_slots=300, reps=2),
        "decision-1": dict(n_slots=300, k_min=3, k_max=4, reps=2),
        "decision-2": dict(n_slots=300, k_min=3, k_max=4, reps=2),
    }
    cfg = replace(default_config(scenario), **trims[scenario])
    return replace(cfg, **overrides) if overrides else cfg


class TestDeterminism:
    @pytest.mark.parametrize(
        "scenario",
        ["prediction", "fusion", "recommendation", "decision-1", "decision-2"],
    )
    def test_repeat_run_is_byte_identical(self, scenario):
        cfg = small_config(scenario, seed=11)
        first = run_scenario(cfg)
        second = run_scenario(cfg)
        assert summary_to_json(first) == summary_to_json(second)
        assert summary_to_csv(first) == summary_to_csv(second)

    def test_seed_changes_rows(self):
        a = run_scenario(small_config("recommendation", seed=1))
        b = run_scenario(small_config("recommendation", seed=2))
        assert summary_to_json(a) != summary_to_json(b)

    def test_timings_stay_out_of_exports(self):
        summary = run_scenario(small_config("prediction", seed=3))
        assert summary.timings  # collected for reporting
        assert "train_s" not in summary_to_json(summary)


class TestMetricRows:
    def setup_method(self):
        self.summary = run_scenario(small_config("decision-1", seed=7))

    def test_row_count_is_methods_by_k_by_reps(self):
        # 3 methods x 2 K values x 2 reps
        assert len(self.summary.rows) == 12

    def test_counts_partition_and_ratios_recompute(self):
        for row in self.summary.rows:
            assert row["n_collision"] + row["d_success"] == row["n_total"]
            if row["n_total"] > 0:
                assert row["p_collision"] == row["n_collision"] / row["n_total"]
                assert row["d_e"] == row["d_success"] / row["n_total"]
            else:
                assert row["p_collision"] is None
                assert row["d_e"] is None

    def test_aggregates_match_row_means(self):
        rows = self.summary.rows
        for method in ("q", "mdp", "random"):
            for k in (3, 4):
                vals = [
                    r["p_collision"]
                    for r in rows
                    if r["method"] == method and r["k"] == k
                    and r["p_collision"] is not None
                ]
                agg = self.summary.aggregates[f"mean_p_collision_{method}_{k}"]
                if vals:
                    np.testing.assert_allclose(agg, np.mean(vals))
                else:
                    assert agg is None

    def test_total_success_sums_methods(self):
        agg = self.summary.aggregates
        parts = sum(
            agg[f"total_success_{m}"] for m in ("q", "mdp", "random")
        )
        assert agg["total_success"] == parts

    def test_undefined_metrics_are_none_not_zero(self):
        empty = DecisionMetrics(n_total=0, n_collision=0, d_success=0)
        assert empty.p_collision is None
        assert empty.d_e is None


class TestEngineInvariants:
    def test_busy_held_free_partition_every_slot(self):
        cfg = small_config("decision-1", n_su=8, n_channels=4, n_slots=400)
        rng = np.random.default_rng(3)
        pu = (rng.random((4, 400)) < 0.3).astype(np.int64)
        audit = []
        _simulate_access(
            cfg, pu, "random", k=3, env_seed=5, act_seed=6, audit=audit
        )
        assert len(audit) == 400
        for entry in audit:
            assert entry["pu_busy"] + entry["held"] + entry["free"] == 4
            assert entry["held"] >= 0 and entry["free"] >= 0

    def test_events_describe_every_counted_access(self):
        cfg = small_config("decision-1", n_su=8, n_channels=4, n_slots=400)
        rng = np.random.default_rng(4)
        pu = (rng.random((4, 400)) < 0.3).astype(np.int64)
        res = _simulate_access(
            cfg, pu, "q", k=3, env_seed=5, act_seed=6, collect_events=True
        )
        counted = [ev for ev in res["events"] if ev["counted"]]
        assert len(counted) == res["n_total"]
        collisions = sum(1 for ev in counted if ev["collision"])
        assert collisions == res["n_collision"]
        for ev in res["events"]:
            assert 0 <= ev["action"] < 4
            assert ev["A"] in (0, 1) and ev["B"] in (0, 1)

    def test_grants_fit_horizon(self):
        # every counted access must have started k slots before the end
        cfg = small_config("decision-1", n_su=8, n_channels=4, n_slots=120)
        rng = np.random.default_rng(5)
        pu = (rng.random((4, 120)) < 0.2).astype(np.int64)
        res = _simulate_access(
            cfg, pu, "random", k=7, env_seed=1, act_seed=2, collect_events=True
        )
        for ev in res["events"]:
            assert ev["t0"] + 7 <= 120


class TestDegenerateTraces:
    def test_always_idle_channel_is_perfectly_predictable(self):
        cfg = small_config(
            "prediction", n_channels=1, last_channel_idle=True, seed=9
        )
        summary = run_scenario(cfg)
        elm_rows = [r for r in summary.rows if r["method"] == "elm"]
        for row in elm_rows:
            assert row["accuracy"] == 1.0
            assert row["p_fa"] == 0.0
            assert row["p_d"] is None  # no busy slot ever occurs
            assert row["mse"] < 1e-10
        assert summary.aggregates["mean_p_d_elm"] is None

    def test_all_idle_decision_run_never_collides(self):
        cfg = small_config("decision-1", seed=9)
        cfg = replace(
            cfg, n_channels=4, n_su=6, holding_range=None, interarrival_range=None,
            last_channel_idle=True, mean_holding=1.0, mean_interarrival=10.0,
        )
        pu = np.zeros((4, cfg.n_slots), dtype=np.int64)
        res = _simulate_access(cfg, pu, "random", k=3, env_seed=2, act_seed=3)
        assert res["n_collision"] == 0
        assert res["d_success"] == res["n_total"] > 0


class TestOutputs:
    def test_emit_writes_requested_formats(self, tmp_path):
        summary = run_scenario(small_config("decision-1", seed=13))
        written = emit_outputs(
            summary, ["json", "csv", "svg"], str(tmp_path), verbose=False
        )
        names = sorted(os.path.basename(p) for p in written)
        assert names == [
            "decision-1_seed13_d_e_vs_k.svg",
            "decision-1_seed13_metrics.csv",
            "decision-1_seed13_p_collision_vs_k.svg",
            "decision-1_seed13_summary.json",
        ]
        payload = json.loads((tmp_path / "decision-1_seed13_summary.json").read_text())
        assert payload["config"]["seed"] == 13
        assert "timings" not in payload
        svg_text = (tmp_path / "decision-1_seed13_p_collision_vs_k.svg").read_text()
        assert svg_text.startswith("<svg") and "</svg>" in svg_text

    def test_csv_has_header_plus_row_lines(self, tmp_path):
        summary = run_scenario(small_config("decision-1", seed=13))
        text = summary_to_csv(summary)
        lines = text.strip().split("\n")
        assert len(lines) == 1 + len(summary.rows)
        assert lines[0].startswith("method,")

    def test_scenario_without_series_skips_svg(self, tmp_path):
        summary = run_scenario(small_config("recommendation", seed=13))
        written = emit_outputs(
            summary, ["json", "csv", "svg"], str(tmp_path), verbose=False
        )
        assert not [p for p in written if p.endswith(".svg")]
        json.loads((tmp_path / "recommendation_seed13_summary.json").read_text())

    def test_verbose_event_log_round_trips(self, tmp_path):
        cfg = small_config("recommendation", seed=13, reps=1)
        summary = run_scenario(cfg, collect_events=True)
        assert summary.events
        written = emit_outputs(summary, ["json"], str(tmp_path), verbose=True)
        event_path = [p for p in written if p.endswith("events.jsonl")][0]
        with open(event_path, "r", encoding="utf-8") as fh:
            parsed = [json.loads(line) for line in fh]
        assert len(parsed) == len(summary.events)
        assert {ev["method"] for ev in parsed} == {"cf", "random"}

    def test_unknown_format_rejected(self, tmp_path):
        summary = run_scenario(small_config("recommendation", seed=13))
        with pytest.raises(ValueError):
            emit_outputs(summary, ["json", "gif"], str(tmp_path))
