"""Vehicle detection scenarios: road-side detectors and a full sensor network.

Road-side vehicle detection (RVD) reports a vehicle only when it enters the
network or crosses a stop line, without identity. The vehicular sensor network
(VSN) reports the exact link and cell of every vehicle once per second, keyed
by vehicle id. Both observers are pure, lossless and noiseless extractions
from the ground-truth state; they never mutate the network.
"""

from __future__ import annotations

import json
from typing import IO, NamedTuple, Optional

from .network import Network

RVD = "RVD"
VSN = "VSN"

ENTRY = "entry"
STOPLINE_CROSS = "stopline_cross"
VSN_POSITION = "vsn_position"


class Detection(NamedTuple):
    time: int
    kind: str
    link: int
    cell: int
    vehicle: Optional[int]  # vehicle id under VSN; RVD events carry None


def observe_rvd(net: Network, t: int) -> list[Detection]:
    """Entry and stop-line-crossing events of the second just simulated."""
    stop_cell = net.config.link_cells - 1
    out = [Detection(t, ENTRY, lid, 0, None) for lid, _vid in net.admissions]
    out.extend(
        Detection(t, STOPLINE_CROSS, lid, stop_cell, None) for lid, _vid in net.crossings
    )
    return out


def observe_vsn(net: Network, t: int) -> list[Detection]:
    """One position report per in-network vehicle, in (link, cell) order."""
    out = []
    for lk in net.links:
        for veh in lk.vehicles:
            out.append(Detection(t, VSN_POSITION, lk.lid, veh.cell, veh.vid))
    return out


class SensorFrame(NamedTuple):
    """One second of detections, grouped by link for the control agents."""

    kind: str
    entries: dict[int, int]  # link id -> number of admissions
    crossings: dict[int, int]  # link id -> number of stop-line crossings
    positions: dict[int, list[tuple[int, int]]]  # link id -> [(cell, id)] ascending


def build_frame(net: Network, scenario: str, t: int, log: Optional[IO[str]] = None) -> SensorFrame:
    """Observe the network under `scenario` and group events by link."""
    if scenario == RVD:
        dets = observe_rvd(net, t)
        entries: dict[int, int] = {}
        crossings: dict[int, int] = {}
        for d in dets:
            if d.kind == ENTRY:
                entries[d.link] = entries.get(d.link, 0) + 1
            else:
                crossings[d.link] = crossings.get(d.link, 0) + 1
        frame = SensorFrame(RVD, entries, crossings, {})
    elif scenario == VSN:
        dets = observe_vsn(net, t)
        positions: dict[int, list[tuple[int, int]]] = {}
        for d in dets:
            positions.setdefault(d.link, []).append((d.cell, d.vehicle))
        frame = SensorFrame(VSN, {}, {}, positions)
    else:
        raise ValueError(f"unknown scenario: {scenario}")
    if log is not None:
        write_detections(log, dets)
    return frame


def write_detections(fh: IO[str], dets: list[Detection]) -> None:
    """Append detections to a newline-delimited JSON event log."""
    for d in dets:
        fh.write(
            json.dumps(
                {"time": d.time, "kind": d.kind, "link": d.link, "cell": d.cell, "id": d.vehicle},
                separators=(",", ":"),
            )
        )
        fh.write("\n")
