"""Detection scenarios: event content, completeness, grouping, logging."""

import io
import json
import random

from gridsignals import FAST, WE, Network, NetworkConfig, build_frame, observe_rvd, observe_vsn
from gridsignals.sensing import ENTRY, STOPLINE_CROSS, VSN_POSITION


class NeverBrake:
    """Suppresses dawdling but lets certain (p = 1) arrivals through."""

    def random(self):
        return 0.9999


def test_rvd_empty_when_nothing_happens():
    net = Network(NetworkConfig(q=0.0, seed=1))
    net.step(NeverBrake())
    assert observe_rvd(net, net.now) == []


def test_rvd_reports_admissions_and_crossings_without_identity():
    net = Network(NetworkConfig(q=0.0, seed=1))
    for node in range(net.n_nodes):
        net.hold_green(node, WE)
    lid = net.approaches[0]["E"]
    stop = net.config.link_cells - 1
    net.place_vehicle(lid, cell=stop, vclass=FAST, v=2)
    net.config.q = 3600.0  # every entry admits one vehicle this second
    net.step(NeverBrake())
    dets = observe_rvd(net, net.now)
    entries = [d for d in dets if d.kind == ENTRY]
    crossings = [d for d in dets if d.kind == STOPLINE_CROSS]
    assert len(entries) == len(net.entry_links)
    assert all(d.cell == 0 and d.vehicle is None for d in entries)
    assert [(d.link, d.cell) for d in crossings] == [(lid, stop)]


def test_vsn_reports_every_vehicle_exactly():
    net = Network(NetworkConfig(q=600.0, f=0.4, seed=8))
    rng = random.Random(8)
    for _ in range(120):
        net.step(rng)
        dets = observe_vsn(net, net.now)
        assert len(dets) == net.vehicles_in_network()
        truth = {
            (lk.lid, veh.cell): veh.vid for lk in net.links for veh in lk.vehicles
        }
        for d in dets:
            assert d.kind == VSN_POSITION
            assert truth[(d.link, d.cell)] == d.vehicle


def test_rvd_is_a_restriction_of_vsn():
    """Everything road-side detection sees is visible in the full snapshot."""
    net = Network(NetworkConfig(q=900.0, f=0.3, seed=12))
    rng = random.Random(12)
    for _ in range(60):
        net.step(rng)
        rvd = observe_rvd(net, net.now)
        vsn_cells = {(d.link, d.cell) for d in observe_vsn(net, net.now)}
        for d in rvd:
            if d.kind == ENTRY:
                assert (d.link, 0) in vsn_cells
            # crossing events describe vehicles that already left the link,
            # so they carry no current-position counterpart


def test_frame_grouping_and_event_log():
    net = Network(NetworkConfig(q=3600.0, f=0.0, seed=3))
    log = io.StringIO()
    net.step(NeverBrake())
    frame = build_frame(net, "RVD", net.now, log)
    assert frame.kind == "RVD"
    assert sum(frame.entries.values()) == len(net.entry_links)
    lines = [json.loads(line) for line in log.getvalue().splitlines()]
    assert len(lines) == len(net.entry_links)
    assert all(line["kind"] == ENTRY and line["id"] is None for line in lines)

    frame = build_frame(net, "VSN", net.now)
    assert frame.kind == "VSN"
    assert sum(len(v) for v in frame.positions.values()) == net.vehicles_in_network()
    for cells in frame.positions.values():
        assert cells == sorted(cells)


def test_time_is_monotone_within_a_stream():
    net = Network(NetworkConfig(q=1200.0, seed=4))
    rng = random.Random(4)
    times = []
    for _ in range(30):
        net.step(rng)
        times.extend(d.time for d in observe_rvd(net, net.now))
    assert times == sorted(times)
