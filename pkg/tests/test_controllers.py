"""Controller behaviour: selection procedures, guards, cost rules."""

import random

import pytest

from gridsignals import (
    ControllerParams,
    Interval,
    Network,
    NetworkConfig,
    NS,
    WE,
    build_frame,
    expected_delay_cost,
    expected_delay_cost_interval,
    make_agent,
    queue_clear_time,
    select_by_center,
    select_interval,
)
from gridsignals.network import FAST, SETUP
from gridsignals.sensing import RVD, VSN


class NeverBrake:
    def random(self):
        return 1.0


def quiet_net(**kw):
    base = dict(q=0.0, seed=1)
    base.update(kw)
    return Network(NetworkConfig(**base))


def run_second(net, agents, scenario=RVD):
    net.step(NeverBrake())
    frame = build_frame(net, scenario, net.now)
    for agent in agents:
        agent.ingest(frame, net.now)
    switches = []
    for agent in agents:
        target = agent.decide(net.now)
        if target is not None:
            net.begin_setup(agent.node, target)
            switches.append((agent.node, target))
    return switches


# --------------------------------------------------------- interval selection


def test_select_interval_keeps_current_on_overlap():
    costs = {1: Interval(4, 6), 2: Interval(3, 7)}
    assert select_interval(costs, 1) == 1


def test_select_interval_two_pass_refinement():
    costs = {1: Interval(8, 10), 2: Interval(3, 6), 3: Interval(2, 4)}
    assert select_interval(costs, 1) == 3


def test_select_interval_equal_costs_keep_current():
    costs = {1: Interval(5, 5), 2: Interval(5, 5)}
    assert select_interval(costs, 1) == 1


def test_select_interval_never_certainly_dominated():
    """Exhaustive-oracle comparison over random cost maps."""
    rng = random.Random(1234)
    for _ in range(3000):
        m = rng.randint(2, 4)
        costs = {}
        for a in range(1, m + 1):
            lo = rng.randint(0, 9)
            costs[a] = Interval(lo, rng.randint(lo, 9))
        current = rng.randint(1, m)
        chosen = select_interval(costs, current)
        assert not any(
            costs[b].certainly_below(costs[chosen]) for b in costs
        ), (costs, current, chosen)
        if chosen != current:
            assert any(costs[b].certainly_below(costs[current]) for b in costs)


def test_select_by_center():
    assert select_by_center({1: Interval(8, 14), 2: Interval(7, 13)}, 1) == 2
    assert select_by_center({1: Interval(9, 11), 2: Interval(8, 12)}, 2) == 2  # tie
    assert select_by_center({1: Interval(3, 4)}, 1) == 1


# ------------------------------------------------------------- scalar pieces


def test_expected_delay_cost_examples():
    assert expected_delay_cost(5, 5, 10, 0) == 75
    assert expected_delay_cost(0, 5, 10, 7) == 7
    assert expected_delay_cost(3, 0, 8, 0) == 24


def test_expected_delay_cost_interval_examples():
    assert expected_delay_cost_interval(
        Interval(2, 3), 5, Interval(4, 6), 0
    ) == Interval(18, 33)
    assert expected_delay_cost_interval(
        Interval(0, 0), 5, Interval(4, 6), 7
    ) == Interval(7, 7)
    assert expected_delay_cost_interval(
        Interval(1, 1), 0, Interval(10, 10), 7
    ) == Interval(17, 17)


def test_queue_clear_time():
    assert queue_clear_time(0, 0, 0.5, 1.5) == 0
    assert queue_clear_time(6, 0, 0.5, 1.5) == 12
    assert queue_clear_time(0, 30, 0.5, 1.5) == pytest.approx(22)


# ------------------------------------------------------------ decision shell


def test_decisions_skipped_during_setup():
    net = quiet_net(grid_size=1)
    params = ControllerParams()
    agent = make_agent("SOC_2M", net, 0, params, RVD)
    net.begin_setup(0, WE)
    run_second(net, [agent])
    assert net.signals[0].phase == SETUP  # nothing decided, setup continues


def test_forced_service_on_long_red():
    net = quiet_net(grid_size=1)
    params = ControllerParams()
    agent = make_agent("SOC_2M", net, 0, params, RVD)
    net.hold_green(0, NS)
    sig = net.signals[0]
    sig.red_elapsed[WE] = 130  # past the critical window
    switches = run_second(net, [agent])
    assert switches == [(0, WE)]
    assert agent.forcing_violations == 0


def test_tie_keeps_current_action():
    net = quiet_net(grid_size=1)
    agent = make_agent("SOC_2M", net, 0, ControllerParams(), RVD)
    switches = run_second(net, [agent])  # empty network: all costs [0, 0]
    assert switches == []


# --------------------------------------------------------------------- SOTL


def sotl_net_with_queue(n_waiting, green_band_count=0):
    """Queue on a red approach plus vehicles near the green stop lines.

    The green-side vehicles alternate between the two served approaches so
    that aggregate counts above the per-lane band capacity are reachable.
    """
    net = quiet_net()
    net.hold_green(0, NS)
    stop = net.config.link_cells - 1
    lid_red = net.approaches[0]["E"]
    for k in range(n_waiting):
        net.place_vehicle(lid_red, cell=stop - k, vclass=FAST, v=0)
    green_lanes = (net.approaches[0]["N"], net.approaches[0]["S"])
    for k in range(green_band_count):
        net.place_vehicle(green_lanes[k % 2], cell=stop - k // 2, vclass=FAST, v=0)
    return net


def test_sotl_counter_below_threshold_keeps():
    net = sotl_net_with_queue(7)
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    net.signals[0].green_elapsed = 10
    for _ in range(7):  # kappa reaches 49, threshold is 50
        agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.kappa[WE] == 49
    assert agent.decide(0) is None


def test_sotl_threshold_triggers_switch():
    net = sotl_net_with_queue(10)
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    net.signals[0].green_elapsed = 5
    for _ in range(5):
        agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.kappa[WE] == 50
    assert agent.decide(0) == WE


def test_sotl_minimum_green_blocks_switch():
    net = sotl_net_with_queue(10)
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    net.signals[0].green_elapsed = 4  # below the minimum green of 5 s
    for _ in range(6):
        agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.kappa[WE] >= 50
    assert agent.decide(0) is None


def test_sotl_platoon_constraint_blocks_switch():
    net = sotl_net_with_queue(10, green_band_count=2)
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    net.signals[0].green_elapsed = 10
    for _ in range(8):
        agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.kappa[WE] >= 50
    assert agent.decide(0) is None  # 2 vehicles near the green stop line


def test_sotl_large_platoon_may_be_cut():
    net = sotl_net_with_queue(10, green_band_count=4)  # above mu = 3
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    net.signals[0].green_elapsed = 10
    for _ in range(8):
        agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.decide(0) == WE


def test_sotl_kappa_resets_on_green():
    net = sotl_net_with_queue(10)
    agent = make_agent("SOTL", net, 0, ControllerParams(), RVD)
    agent.kappa[WE] = 60
    net.hold_green(0, WE)
    agent.ingest(build_frame(net, RVD, 0), 0)
    assert agent.kappa[WE] == 0


def test_sotl_rejected_under_vsn():
    net = quiet_net()
    with pytest.raises(ValueError):
        make_agent("SOTL", net, 0, ControllerParams(), VSN)


# ----------------------------------------------------------------- SOC family


def queued_red_approach(net, node, n, direction="E"):
    stop = net.config.link_cells - 1
    lid = net.approaches[node][direction]
    for k in range(n):
        net.place_vehicle(lid, cell=stop - k, vclass=FAST, v=0)
    return lid


def test_soc_switches_to_serve_waiting_queue_under_vsn():
    net = quiet_net(grid_size=1)
    net.hold_green(0, NS)
    queued_red_approach(net, 0, 4)
    agent = make_agent("SOC", net, 0, ControllerParams(), VSN)
    switches = []
    for _ in range(3):
        switches += run_second(net, [agent], VSN)
    assert (0, WE) in switches


def test_soc_point_model_tracks_rvd_events():
    net = quiet_net(grid_size=1, q=3600.0, f=0.0)
    net.hold_green(0, NS)
    agent = make_agent("SOC", net, 0, ControllerParams(), RVD)
    for _ in range(4):
        run_second(net, [agent], RVD)
    lid = net.approaches[0]["E"]
    assert agent.point_lanes[lid].count() == len(net.links[lid].vehicles)


def test_soc2m_certain_improvement_switches():
    net = quiet_net(grid_size=1)
    net.hold_green(0, NS)
    queued_red_approach(net, 0, 5)
    agent = make_agent("SOC_2M", net, 0, ControllerParams(), VSN)
    switches = run_second(net, [agent], VSN)
    assert switches == [(0, WE)]


def test_soc2m_uncertain_improvement_keeps():
    costs = {NS: Interval(10, 20), WE: Interval(9, 21)}
    assert select_interval(costs, NS) == NS


def test_socm_interval_cost_path_switches_on_queue():
    net = quiet_net(grid_size=1)
    net.hold_green(0, NS)
    queued_red_approach(net, 0, 5)
    agent = make_agent("SOC_M", net, 0, ControllerParams(), VSN)
    switches = run_second(net, [agent], VSN)
    assert switches == [(0, WE)]


def test_soc2_center_comparison_switches_on_queue():
    net = quiet_net(grid_size=1)
    net.hold_green(0, NS)
    queued_red_approach(net, 0, 5)
    agent = make_agent("SOC_2", net, 0, ControllerParams(), VSN)
    switches = run_second(net, [agent], VSN)
    assert switches == [(0, WE)]


def test_unknown_controller_rejected():
    net = quiet_net(grid_size=1)
    with pytest.raises(ValueError):
        make_agent("SOC_3M", net, 0, ControllerParams(), RVD)


def test_sotl_minimum_green_property_over_run():
    """No SOTL green phase ever ends before the minimum green time."""
    net = Network(NetworkConfig(q=1500.0, f=0.3, seed=55))
    params = ControllerParams()
    agents = [make_agent("SOTL", net, node, params, RVD) for node in range(net.n_nodes)]
    rng = random.Random(55)
    green_started = {node: 0 for node in range(net.n_nodes)}
    for t in range(1, 900):
        net.step(rng)
        frame = build_frame(net, RVD, t)
        for agent in agents:
            agent.ingest(frame, t)
        for agent in agents:
            target = agent.decide(t)
            if target is not None:
                assert net.signals[agent.node].green_elapsed >= params.phi_min
                net.begin_setup(agent.node, target)
