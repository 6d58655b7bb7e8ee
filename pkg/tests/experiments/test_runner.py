import pytest

from stability_arena.dominating.verdict import Verdict
from stability_arena.experiments import runner
from stability_arena.experiments.config import load_experiment_config, load_registry
from stability_arena.experiments.runner import ReplicationLedger, recount_verdicts, run_replications


def _verdict(decision="not-rejected", seed=1):
    f, q = (5.0, 4.0) if decision == "unstable" else (3.0, 4.0)
    return Verdict(decision, 10, f, q, 0.05, 100, seed=seed)


class TestLedger:
    def test_lifecycle(self, tmp_path):
        ledger = ReplicationLedger([(0, 0), (0, 1)], verdict_dir=tmp_path)
        assert ledger.pending_count() == 2
        ledger.lease((0, 0))
        assert ledger.pending_count() == 1
        ledger.complete((0, 0), _verdict("unstable", seed=11))
        assert ledger.completed_count() == 1
        items = ledger.items_for(0)
        assert [it.status for it in items] == ["completed", "pending"]
        assert items[0].seed == 11
        assert (tmp_path / "replication_000_00000.json").exists()

    def test_double_lease(self):
        ledger = ReplicationLedger([(0, 0)])
        ledger.lease((0, 0))
        with pytest.raises(RuntimeError, match="not pending"):
            ledger.lease((0, 0))

    def test_complete_without_lease(self):
        ledger = ReplicationLedger([(0, 0)])
        with pytest.raises(RuntimeError, match="not in progress"):
            ledger.complete((0, 0), _verdict())

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="Unknown replication"):
            ReplicationLedger([(0, 0)]).lease((3, 3))

    def test_failure_recorded(self, tmp_path):
        ledger = ReplicationLedger([(1, 0)], verdict_dir=tmp_path)
        ledger.lease((1, 0))
        ledger.fail((1, 0), "EngineError: boom", seed=42)
        (item,) = ledger.items_for(1)
        assert item.status == "failed"
        assert item.error == "EngineError: boom"
        assert recount_verdicts(tmp_path) == {1: (0, 1)}


class TestRunReplications:
    def test_single_replication_proportion(self, small_doc):
        cfg = load_experiment_config(small_doc(replications=1))
        (record,) = run_replications(cfg).records
        assert record.replications == 1
        assert record.proportion in (0.0, 1.0)
        assert record.n_failed == 0

    def test_same_seed_same_summary(self, small_doc):
        cfg = load_experiment_config(small_doc(sweep={"key": "set.upper", "values": [0.4, 0.6]}))
        first, second = run_replications(cfg), run_replications(cfg)
        strip = lambda rs: [(r.sweep_value, r.n_unstable, r.proportion, r.mean_drift_ratio) for r in rs]
        assert strip(first.records) == strip(second.records)

    def test_worker_count_does_not_matter(self, small_doc, tmp_path):
        cfg = load_experiment_config(small_doc(replications=4))
        inline = run_replications(cfg, workers=1, verdict_dir=tmp_path / "a")
        pooled = run_replications(cfg, workers=2, verdict_dir=tmp_path / "b")
        assert [r.n_unstable for r in inline.records] == [r.n_unstable for r in pooled.records]
        for path in sorted((tmp_path / "a").iterdir()):
            assert path.read_text() == (tmp_path / "b" / path.name).read_text()

    def test_recount_matches_summary(self, small_doc, tmp_path):
        cfg = load_experiment_config(small_doc(sweep={"key": "set.upper", "values": [0.3, 0.7]}))
        result = run_replications(cfg, verdict_dir=tmp_path)
        recount = recount_verdicts(tmp_path)
        assert recount == {s: (r.n_unstable, r.replications) for s, r in enumerate(result.records)}

    def test_replications_use_distinct_seeds(self, small_doc):
        cfg = load_experiment_config(small_doc(replications=5))
        result = run_replications(cfg)
        seeds = [it.seed for it in result.ledger.items_for(0)]
        assert len(set(seeds)) == 5

    def test_keep_trajectories(self, small_doc):
        cfg = load_experiment_config(small_doc(replications=2))
        result = run_replications(cfg, keep_trajectories=True)
        assert sorted(result.trajectories) == [(0, 0), (0, 1)]
        assert len(result.trajectories[(0, 0)].k) > 1
        assert set(result.quantiles) == {0}

    def test_failures_counted(self, small_doc, monkeypatch):
        real = runner.run_annealer
        calls = {"n": 0}

        def flaky(*args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 2:
                raise RuntimeError("model blew up")
            return real(*args, **kwargs)

        monkeypatch.setattr(runner, "run_annealer", flaky)
        cfg = load_experiment_config(small_doc(replications=3))
        result = run_replications(cfg, workers=1)
        (record,) = result.records
        assert record.n_failed == 1
        assert record.replications == 3
        failed = [it for it in result.ledger.items_for(0) if it.status == "failed"]
        assert failed[0].error == "RuntimeError: model blew up"

    def test_empty_sweep(self, small_doc):
        cfg = load_experiment_config(small_doc(sweep={"key": "set.upper", "values": []}))
        assert run_replications(cfg).records == []


class TestPresets:
    def test_every_preset_loads(self, registry_path):
        names = list(load_registry(registry_path))
        assert {"fig1_local", "fig3_local", "fig7_local"} <= set(names)
        for name in names:
            cfg = load_experiment_config(name, registry_path=registry_path)
            assert cfg.replications >= 1

    @pytest.mark.parametrize("name", ["fig1_local", "fig3_local", "fig7_local"])
    def test_local_presets_use_local_search(self, preset, name):
        cfg = preset(name)
        assert cfg.to_document()["engine"]["algorithm"] == "local"
        assert cfg.to_document()["set"]["kind"] == "grid"

    def test_local_preset_runs_end_to_end(self, preset):
        cfg = preset("fig1_local", engine={"k_star": 2_000}, dominating={"n_reps": 100}, replications=2)
        result = run_replications(cfg, keep_trajectories=True)
        assert [r.sweep_value for r in result.records] == [0.4, 0.6]
        assert all(r.n_failed == 0 and r.replications == 2 for r in result.records)
        for traj in result.trajectories.values():
            assert traj.meta["algorithm"] == "local"
            assert traj.meta["simulated_steps"] == 2 * traj.t[-1]
