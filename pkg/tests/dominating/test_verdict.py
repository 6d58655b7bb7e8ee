import numpy as np
import pytest
from scipy import stats

from stability_arena.dominating.sampler import advance_w
from stability_arena.dominating.tail import DominatingConfig
from stability_arena.dominating.verdict import Verdict, instability_test, verdict_for, write_verdict_csv
from stability_arena.engine.annealer import EngineConfig, run_annealer
from stability_arena.engine.params import ParameterSet
from stability_arena.engine.schedule import TauSchedule
from stability_arena.models.queues import SimpleQueue


def _make_verdict(**kw) -> Verdict:
    base = dict(decision="unstable", k_compare=10, f_value=5.0, quantile=3.0, alpha=0.05, k_star=100)
    base.update(kw)
    return Verdict(**base)


class TestVerdict:
    def test_decision_consistency(self):
        assert _make_verdict().unstable
        with pytest.raises(ValueError):
            _make_verdict(decision="not-rejected")
        with pytest.raises(ValueError):
            _make_verdict(f_value=3.0)

    def test_tie_is_not_rejected(self):
        assert not _make_verdict(decision="not-rejected", f_value=3.0).unstable

    def test_dict_round_trip(self):
        v = _make_verdict(seed=9)
        assert Verdict.from_dict(v.to_dict()) == v

    def test_csv(self, tmp_path):
        lines = write_verdict_csv(_make_verdict(seed=4), tmp_path / "verdict.csv").read_text().splitlines()
        assert lines[0] == "decision,k,f_Y,q,alpha,k_star,seed"
        assert lines[1] == "unstable,10,5,3,0.050000000000000003,100,4"


class TestVerdictFor:
    def test_compares_at_last_iteration(self):
        traj = run_annealer(SimpleQueue(), ParameterSet.box((0.0,), (0.6,)), EngineConfig(k_star=300))
        q = np.full(traj.last_k + 1, -1.0)
        v = verdict_for(traj, q, DominatingConfig(), 300)
        assert v.k_compare == traj.last_k
        assert v.decision == ("unstable" if traj.f_y[-1] > -1.0 else "not-rejected")
        assert v.w_star == pytest.approx(36.0)

    def test_short_table_rejected(self):
        traj = run_annealer(SimpleQueue(), ParameterSet.box((0.0,), (0.6,)), EngineConfig(k_star=300))
        with pytest.raises(ValueError):
            verdict_for(traj, np.zeros(traj.last_k), DominatingConfig(), 300)


class TestInstabilityTest:
    def test_degenerate_set_never_rejected(self):
        v, _ = instability_test(
            SimpleQueue(), ParameterSet.box((0.0,), (0.0,)), EngineConfig(k_star=2_000), DominatingConfig(),
            n_reps=200,
        )
        assert v.decision == "not-rejected"
        assert v.f_value == 0.0

    def test_tau_must_match(self):
        with pytest.raises(ValueError, match="tau"):
            instability_test(
                SimpleQueue(), ParameterSet.box((0.0,), (0.4,)), EngineConfig(k_star=100),
                DominatingConfig(tau=TauSchedule(c=0.7)), n_reps=200,
            )

    def test_clearly_unstable_set_is_flagged(self):
        v, _ = instability_test(
            SimpleQueue(), ParameterSet.box((0.9,), (1.0,)), EngineConfig(k_star=50_000, seed=1),
            DominatingConfig(), n_reps=200,
        )
        assert v.unstable


@pytest.mark.slow
class TestDominance:
    def test_w_dominates_stable_chain(self):
        # f(Y_k) on a stable set sits stochastically below W_k at a shared k
        pset = ParameterSet.box((0.0,), (0.3,))
        dom = DominatingConfig()
        trajs = [run_annealer(SimpleQueue(), pset, EngineConfig(k_star=20_000, seed=s)) for s in range(200)]
        k = min(t.last_k for t in trajs)
        f_at_k = [t.f_y[k] for t in trajs]

        rng = np.random.Generator(np.random.Philox(77))
        w = np.zeros(200)
        for _ in range(k):
            w = advance_w(w, dom, rng)
        # alternative "less": f has the smaller CDF somewhere, i.e. f is larger
        res = stats.ks_2samp(f_at_k, w, alternative="less")
        assert res.pvalue > 0.01
