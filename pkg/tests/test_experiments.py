"""Tests for experiment configs, deterministic runs, and writers."""

import csv
import io
import json
import math

import pytest

from artifact.experiments import (
    ExperimentConfig,
    ResultRecord,
    run_experiment,
    trial_rng,
    write_csv,
    write_json_lines,
)
from artifact.graphs import complete_graph, triangle_strip
from artifact.mbqc import MeasurementPattern, PatternStep, reference_run

THETA = math.pi / 4
K3 = complete_graph(3)
PATTERN = MeasurementPattern(
    (PatternStep(0, THETA), PatternStep(1, THETA, x_deps=(0,))),
    output_bits=(1,))


def _cfg(kind="selftest", **overrides):
    base = dict(kind=kind, graph=K3, theta=THETA, strategy=None,
                pattern=None, labels=None, trials=6, seed=11, options={})
    if kind in ("mbqc", "protocol"):
        base["pattern"] = PATTERN
    if kind == "bounds":
        base = dict(kind="bounds", graph=K3, theta=None, strategy=None,
                    pattern=None, labels=None, trials=None, seed=None,
                    options={"eps": 1e-3, "delta": 0.1})
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_round_trip_and_digest_stability(self):
        cfg = _cfg("isometry", labels=("I", ("X", 0)),
                   strategy={"kind": "perturbed", "eta": 0.05})
        again = ExperimentConfig.from_json(cfg.to_json())
        assert again.to_json() == cfg.to_json()
        assert again.digest() == cfg.digest()
        assert len(cfg.digest()) == 12

    def test_digest_changes_with_the_config(self):
        assert _cfg(seed=11).digest() != _cfg(seed=12).digest()
        assert _cfg(trials=6).digest() != _cfg(trials=7).digest()

    def test_json_survives_a_real_serializer(self):
        cfg = _cfg("protocol", options={"delta": 0.1})
        text = json.dumps(cfg.to_json())
        again = ExperimentConfig.from_json(json.loads(text))
        assert again.digest() == cfg.digest()

    @pytest.mark.parametrize("kwargs", [
        {"kind": "unknown"},
        {"trials": 0},
        {"seed": None},
        {"graph": None},
    ])
    def test_invalid_stochastic_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            _cfg(**kwargs)

    def test_mbqc_requires_a_pattern(self):
        with pytest.raises(ValueError):
            _cfg("mbqc", pattern=None)

    def test_bounds_rejects_trials(self):
        with pytest.raises(ValueError):
            _cfg("bounds", trials=5)

    def test_trial_rng_streams_are_distinct(self):
        a = trial_rng(5, 0).random(4).tolist()
        b = trial_rng(5, 1).random(4).tolist()
        c = trial_rng(5, 0).random(4).tolist()
        assert a == c
        assert a != b


class TestDeterminism:
    @pytest.mark.parametrize("kind", ["selftest", "mbqc", "protocol"])
    def test_same_config_same_record(self, kind):
        first = run_experiment(_cfg(kind))
        second = run_experiment(_cfg(kind))
        assert first.to_json() == second.to_json()

    def test_parallel_matches_serial(self):
        cfg = _cfg("selftest", trials=8)
        assert run_experiment(cfg, jobs=2).to_json() == \
            run_experiment(cfg, jobs=1).to_json()

    def test_parallel_matches_serial_for_stochastic_strategies(self):
        cfg = _cfg("isometry", trials=4,
                   strategy={"kind": "perturbed", "eta": 0.04},
                   labels=("I", ("X", 0)))
        assert run_experiment(cfg, jobs=2).to_json() == \
            run_experiment(cfg, jobs=1).to_json()

    def test_record_round_trip(self):
        record = run_experiment(_cfg("selftest"))
        again = ResultRecord.from_json(record.to_json())
        assert again.to_json() == record.to_json()


class TestRowsAndSummaries:
    def test_selftest_rows_and_summary(self):
        cfg = _cfg("selftest", trials=40)
        record = run_experiment(cfg)
        assert record.kind == "selftest"
        assert record.config_digest == cfg.digest()
        assert len(record.rows) == 40
        for i, row in enumerate(record.rows):
            assert row["trial"] == i
            assert isinstance(row["accepted"], bool)
            assert isinstance(row["subtest"], str)
        rate = sum(r["accepted"] for r in record.rows) / 40
        assert math.isclose(record.summary["accept_rate"], rate,
                            abs_tol=1e-12)
        assert 0.8 < record.summary["c_test"] < 1.0

    def test_mbqc_summary_recomputable_from_rows(self):
        cfg = _cfg("mbqc", trials=30)
        record = run_experiment(cfg)
        counts = {0: 0, 1: 0}
        for row in record.rows:
            counts[row["output"]] += 1
        for bit in (0, 1):
            assert math.isclose(record.summary["distribution"][str(bit)],
                                counts[bit] / 30, abs_tol=1e-12)
        ref = reference_run(K3, PATTERN)
        for bit in (0, 1):
            assert math.isclose(record.summary["reference"][str(bit)],
                                ref.get(bit, 0.0), abs_tol=1e-12)
        assert record.summary["total_variation"] >= 0

    def test_isometry_rows_carry_label_reports(self):
        cfg = _cfg("isometry", trials=2, labels=("I", ("Z", 1)))
        record = run_experiment(cfg)
        for row in record.rows:
            assert row["all_satisfied"] is True
            assert len(row["labels"]) == 2
            assert {r["label"] for r in row["labels"]} == {"I", "Z(1)"}
        assert record.summary["violations"] == 0
        assert record.summary["all_satisfied"] is True

    def test_protocol_summary_records_the_setup(self):
        cfg = _cfg("protocol", trials=2,
                   options={"delta": 0.1, "n_rounds": 12})
        record = run_experiment(cfg)
        meta = record.summary
        assert meta["n_rounds"] == 12
        assert 0 < meta["q"] <= 1
        assert meta["c_test"] > meta["s_test"]
        assert meta["c_ip"] > meta["s_ip"]
        for row in record.rows:
            assert 0 <= row["accept_count"] <= 12
        assert math.isclose(
            meta["accept_fraction"],
            sum(r["accepted"] for r in record.rows) / 2, abs_tol=1e-12)

    def test_bounds_record_lists_formulas(self):
        record = run_experiment(_cfg("bounds"))
        assert record.kind == "bounds"
        assert record.rows == ()
        table = record.summary["table"]
        kinds = [entry["kind"] for entry in table]
        assert "thm2" in kinds and "hoeffdingn" in kinds
        for entry in table:
            assert set(entry) >= {"kind", "value", "formula"}
        assert record.summary["chain"][0]["stage"] == "thm2"
        assert record.summary["inputs"]["n"] == 3


class TestWriters:
    def test_json_lines_layout(self):
        record = run_experiment(_cfg("selftest", trials=5))
        buf = io.StringIO()
        write_json_lines(record, buf)
        lines = buf.getvalue().strip().split("\n")
        assert len(lines) == 6
        for i, line in enumerate(lines[:-1]):
            assert json.loads(line)["trial"] == i
        footer = json.loads(lines[-1])
        assert footer["config_digest"] == record.config_digest
        assert footer["kind"] == "selftest"
        assert footer["summary"] == json.loads(
            json.dumps(record.summary, sort_keys=True))

    def test_csv_layout(self):
        record = run_experiment(_cfg("selftest", trials=5))
        buf = io.StringIO()
        write_csv(record, buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert len(rows) == 5
        assert set(rows[0]) == {"trial", "subtest", "accepted"}
        assert rows[0]["accepted"] in ("true", "false")

    def test_csv_nested_values_are_json(self):
        record = run_experiment(_cfg("isometry", trials=1, labels=("I",)))
        buf = io.StringIO()
        write_csv(record, buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        nested = json.loads(rows[0]["labels"])
        assert nested[0]["label"] == "I"
