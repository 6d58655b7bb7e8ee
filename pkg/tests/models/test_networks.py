import math

import numpy as np
import pytest

from stability_arena.models.ran import EDGES, CorruptStateError, RandomAccessNetwork, RanState, psi, ran_step
from stability_arena.models.rybko_stolyar import RybkoStolyar, rybko_stolyar_step
from stability_arena.models.switch import N_QUEUES, ROUTES, SWITCH_QUEUES, SwitchNetwork, switch_step
from stability_arena.models import tandem
from stability_arena.models.tandem import TandemMM1, TandemRenewal, tandem_mm1_step


def _rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))


# ── Tandem ───────────────────────────────────────────────


class TestTandemMM1:
    def test_only_arrival_enabled_when_empty(self, stub_rng):
        assert tandem_mm1_step((0, 0), (1.0, 1.0), stub_rng([0.99])) == (1, 0)

    def test_zero_mean_completes_immediately(self, stub_rng):
        assert tandem_mm1_step((2, 0), (0.0, 1.0), stub_rng([0.0])) == (1, 1)

    def test_rates_are_inverse_means(self, stub_rng):
        # rates (1, 2, 1): u = 0.5 lands in the station-1 slot
        assert tandem_mm1_step((1, 1), (0.5, 1.0), stub_rng([0.5])) == (0, 2)
        assert tandem_mm1_step((1, 1), (0.5, 1.0), stub_rng([0.9])) == (1, 0)

    def test_station_one_completion_probability(self):
        model = TandemMM1()
        rng = _rng(5)
        hits = sum(model.step((1, 0), (1.0, 1.0), rng) == (0, 1) for _ in range(20_000))
        assert hits / 20_000 == pytest.approx(0.5, abs=0.02)

    def test_stationary_mean_per_station(self):
        # each visited state is weighted by its mean holding time 1/q(x)
        model = TandemMM1()
        rng = _rng(6)
        state = model.run((0, 0), (0.5, 0.5), 1_000, rng)
        totals = [0.0, 0.0]
        weight = 0.0
        for _ in range(200_000):
            q = 1.0 + 2.0 * (state[0] > 0) + 2.0 * (state[1] > 0)
            weight += 1.0 / q
            totals[0] += state[0] / q
            totals[1] += state[1] / q
            state = model.step(state, (0.5, 0.5), rng)
        assert totals[0] / weight == pytest.approx(1.0, abs=0.1)
        assert totals[1] / weight == pytest.approx(1.0, abs=0.1)

    def test_unstable_when_mean_exceeds_interarrival(self):
        model = TandemMM1()
        end = model.run((0, 0), (1.5, 0.5), 30_000, _rng(3))
        assert sum(end) > 1_000


class TestTandemRenewal:
    def test_renewal_means(self):
        rng = _rng(7)
        services = [tandem._service(rng, 1.0, 2.0) for _ in range(50_000)]
        arrivals = [tandem._interarrival(rng, 2, 1.0) for _ in range(50_000)]
        assert np.mean(services) == pytest.approx(math.gamma(1.5), abs=0.01)
        assert math.gamma(1.5) == pytest.approx(0.8862, abs=1e-4)
        assert np.mean(arrivals) == pytest.approx(1.0, abs=0.015)

    def test_first_step_is_an_arrival(self):
        model = TandemRenewal()
        state = model.step(model.initial_state(), (0.5, 0.5), _rng())
        assert state.x == (1, 0)
        assert math.isfinite(state.clocks[0]) and math.isfinite(state.clocks[1])
        assert state.clocks[2] == math.inf

    def test_population_changes_by_one(self):
        model = TandemRenewal()
        rng = _rng(4)
        state = model.initial_state()
        for _ in range(2_000):
            nxt = model.step(state, (0.9, 0.9), rng)
            assert abs(model.f(nxt) - model.f(state)) <= 1
            assert min(nxt.x) >= 0
            state = nxt


# ── Rybko–Stolyar ────────────────────────────────────────


class TestRybkoStolyar:
    def test_arrivals(self, stub_rng):
        assert rybko_stolyar_step((0, 0, 0, 0), (1.0, 1.5, 4.0), stub_rng([0.1])) == (1, 0, 0, 0)
        assert rybko_stolyar_step((0, 0, 0, 0), (1.0, 1.5, 4.0), stub_rng([0.6])) == (0, 0, 1, 0)

    def test_left_station_prioritises_second_stage(self, stub_rng):
        # rates (1, 1, 1.5, 0): u = 0.7 picks the left station
        assert rybko_stolyar_step((1, 0, 0, 1), (1.0, 1.5, 4.0), stub_rng([0.7])) == (1, 0, 0, 0)

    def test_right_station_prioritises_second_stage(self, stub_rng):
        assert rybko_stolyar_step((0, 1, 1, 0), (1.0, 1.5, 4.0), stub_rng([0.9])) == (0, 0, 1, 0)

    def test_first_stage_moves_on(self, stub_rng):
        assert rybko_stolyar_step((1, 0, 0, 0), (1.0, 1.5, 4.0), stub_rng([0.9])) == (0, 1, 0, 0)

    def test_model_passes_mu_l(self, stub_rng):
        model = RybkoStolyar(mu_r=4.0)
        assert model.step((1, 0, 0, 0), (1.5,), stub_rng([0.9])) == (0, 1, 0, 0)


# ── Switch network ───────────────────────────────────────


class TestSwitchNetwork:
    def test_layout(self):
        assert N_QUEUES == 52
        assert sum(len(q) for q in SWITCH_QUEUES) == 52
        assert [len(q) for q in SWITCH_QUEUES[:4]] == [12] * 4
        assert [len(q) for q in SWITCH_QUEUES[4:]] == [1] * 4

    def test_route_of_low_external_queue(self):
        x = [0] * N_QUEUES
        x[0] = 1
        rng = _rng()
        path = []
        state = tuple(x)
        for _ in range(3):
            state = switch_step(state, 0.0, rng)
            path.append([i for i, v in enumerate(state) if v])
        # external (A, 0) -> auxiliary A' -> internal (B, 0) -> leaves
        assert path == [[48], [42], []]

    def test_route_of_high_external_queue(self):
        assert ROUTES[7] == 40 + 2 * 2 + 1
        assert ROUTES[40 + 2 * 2 + 1] is None

    def test_one_packet_per_switch(self):
        state = tuple([3] * 40 + [0] * 12)
        nxt = switch_step(state, 0.0, _rng())
        # each main switch forwards one packet; the auxiliaries started empty
        assert sum(state) - sum(nxt[:40]) == 4
        assert sum(nxt) == sum(state)

    def test_phi(self):
        assert SwitchNetwork().phi_f() == 40.0


# ── Random access network ────────────────────────────────


class TestRandomAccessNetwork:
    def test_psi(self):
        assert psi(1) == 1.0
        assert psi(3) == pytest.approx(1 / 16)

    def test_interference_graph(self):
        assert (2, 5) in EDGES and len(EDGES) == 8

    def test_adjacent_active_nodes_corrupt(self):
        state = RanState((1, 0, 1, 0, 0, 0), (1, 0, 1, 0, 0, 0))
        with pytest.raises(CorruptStateError):
            ran_step(state, [0.0] * 6, [1.0] * 6, [1.0] * 6, _rng())

    def test_active_empty_node_corrupt(self):
        state = RanState((0,) * 6, (1, 0, 0, 0, 0, 0))
        with pytest.raises(CorruptStateError):
            ran_step(state, [0.0] * 6, [1.0] * 6, [1.0] * 6, _rng())

    def test_no_enabled_event_keeps_state(self):
        state = RanState((0,) * 6, (0,) * 6)
        assert ran_step(state, [0.0] * 6, [1.0] * 6, [1.0] * 6, _rng()) is state

    def test_activate_then_release(self, stub_rng):
        model = RandomAccessNetwork()
        state = RanState((1, 0, 0, 0, 0, 0), (0,) * 6)
        active = model.step(state, (0.0,), stub_rng([0.5]))
        assert active.u == (1, 0, 0, 0, 0, 0)
        # psi(1) = 1, so the last packet always releases the medium
        done = model.step(active, (0.0,), stub_rng([0.5]))
        assert done == RanState((0,) * 6, (0,) * 6)

    def test_blocked_neighbour_cannot_activate(self, stub_rng):
        state = RanState((0, 0, 2, 0, 0, 1), (0, 0, 1, 0, 0, 0))
        # node 5 (0-based) neighbours active node 2; only node 2 completions are enabled
        nxt = ran_step(state, [0.0] * 6, [1.0] * 6, [1.0] * 6, stub_rng([0.0]))
        assert nxt.u[5] == 0

    def test_adjacent_nodes_never_active_together(self):
        model = RandomAccessNetwork()
        rng = _rng(8)
        state = model.initial_state()
        for _ in range(20_000):
            state = model.step(state, (1.2,), rng)
            assert not any(state.u[a] and state.u[b] for a, b in EDGES)
            assert all(x >= u for x, u in zip(state.x, state.u))

    def test_load_vector(self):
        model = RandomAccessNetwork(alpha_split=0.1)
        assert model.relative_load() == pytest.approx((0.4, 0.4, 0.4, 0.3, 0.1, 0.2))

    def test_bad_constants(self):
        with pytest.raises(ValueError):
            RandomAccessNetwork(mu=(1.0,) * 5)
