"""Interval-valued traffic image of an intersection and rolling predictions.

Each approach lane is mirrored by a list of interval vehicles. A vehicle's
position is the closed cell interval [x_lo, x_hi]; its velocity is the ordered
pair (v_lo, v_hi) whose entries belong to the respective position endpoints
(v_lo <= v_hi is NOT required). The lane evolves as two independent endpoint
configurations of the same deterministic cell dynamics: the lo configuration
uses the lower free-flow bound, the hi configuration the upper one, and each
configuration computes gaps from its own positions. Every feasible uniform
point trajectory then lies between the two configurations, which is what makes
the summed stopped-step counts of the two configurations usable as a delay
enclosure.

Conventions fixed here (and relied on by the bundled worked example, which
reproduces the reference delay intervals [8, 14] and [7, 13] exactly):

* the stop-line cell itself is occupiable under red but never passed;
* gaps are computed from the positions of the previous step for every vehicle
  (synchronous update);
* a prediction step counts one unit of delay for every vehicle whose endpoint
  velocity is zero after the update of that step;
* predictions are deterministic; randomisation lives only in ground truth.

The real-time image is synchronised once per second: it first advances one
step under the signal state that was actually displayed, then merges detector
data. Under road-side detection the image holds vehicles at the stop line
until their crossing is confirmed, so the per-lane vehicle count always equals
ground truth. Under the full sensor network every position interval collapses
to the reported cell each second; velocity pairs persist per vehicle id.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence

from .intervals import Interval

log = logging.getLogger(__name__)

LO = 0
HI = 1

_BIG = 1 << 30


class IntervalVehicle:
    """One modelled vehicle: position interval plus endpoint velocity pair."""

    __slots__ = ("x_lo", "x_hi", "v_lo", "v_hi", "vid")

    def __init__(self, x_lo: int, x_hi: int, v_lo: int, v_hi: int, vid: Optional[int] = None):
        if x_lo > x_hi:
            raise ValueError(f"position interval inverted: [{x_lo}, {x_hi}]")
        self.x_lo = x_lo
        self.x_hi = x_hi
        self.v_lo = v_lo
        self.v_hi = v_hi
        self.vid = vid

    def position(self) -> Interval:
        return Interval(self.x_lo, self.x_hi)


class IntervalLane:
    """Interval image of one approach; vehicles sorted back-to-front."""

    __slots__ = ("length", "stop_cell", "vmax_lo", "vmax_hi", "vehicles", "unmatched")

    def __init__(self, length: int = 40, vmax: tuple[int, int] = (1, 2)):
        self.length = length
        self.stop_cell = length - 1
        self.vmax_lo, self.vmax_hi = vmax
        if not 1 <= self.vmax_lo or not self.vmax_lo <= self.vmax_hi:
            raise ValueError(f"bad free-flow velocity interval {vmax}")
        self.vehicles: list[IntervalVehicle] = []
        self.unmatched = 0

    # --------------------------------------------------------------- updates

    def advance_endpoint(self, which: int, green: bool) -> None:
        """One step of the endpoint configuration `which` (LO or HI)."""
        vs = self.vehicles
        n = len(vs)
        stop = self.stop_cell
        if which == LO:
            vmax = self.vmax_lo
            for i in range(n):
                veh = vs[i]
                v = veh.v_lo + 1
                if v > vmax:
                    v = vmax
                g = (vs[i + 1].x_lo - veh.x_lo - 1) if i + 1 < n else (
                    _BIG if green else stop - veh.x_lo
                )
                if v > g:
                    v = g
                if v < 0:
                    v = 0
                veh.v_lo = v
                veh.x_lo += v
        else:
            vmax = self.vmax_hi
            for i in range(n):
                veh = vs[i]
                v = veh.v_hi + 1
                if v > vmax:
                    v = vmax
                g = (vs[i + 1].x_hi - veh.x_hi - 1) if i + 1 < n else (
                    _BIG if green else stop - veh.x_hi
                )
                if v > g:
                    v = g
                if v < 0:
                    v = 0
                veh.v_hi = v
                veh.x_hi += v

    def advance(self, green: bool, hold_at_stop: bool = False) -> None:
        """Advance both configurations one step under the displayed signal.

        `hold_at_stop` keeps vehicles at the stop line even on green, for use
        with event-based detection where the real crossing event performs the
        removal. Without it, vehicles whose whole position interval has passed
        the stop line leave the image.
        """
        self.advance_endpoint(LO, green)
        self.advance_endpoint(HI, green)
        stop = self.stop_cell
        for veh in self.vehicles:
            if veh.x_hi < veh.x_lo:  # ordering clamp
                veh.x_hi = veh.x_lo
        if hold_at_stop:
            for veh in self.vehicles:
                if veh.x_lo > stop:
                    veh.x_lo = stop
                if veh.x_hi > stop:
                    veh.x_hi = stop
        else:
            while self.vehicles and self.vehicles[-1].x_lo > stop:
                self.vehicles.pop()

    # ----------------------------------------------------- detector merging

    def pop_front(self) -> Optional[IntervalVehicle]:
        """Remove the front vehicle (confirmed stop-line crossing)."""
        if not self.vehicles:
            self.unmatched += 1
            log.debug("crossing event with empty lane image")
            return None
        return self.vehicles.pop()

    def insert_back(self, cell: int = 0, moving: bool = True, vid: Optional[int] = None) -> IntervalVehicle:
        """Insert a freshly detected vehicle at the upstream end of the lane.

        The position interval is degenerate at the detection cell. If the back
        of the image already reaches that cell the newcomer is placed just
        behind it, which may give a transient virtual position below zero.
        """
        if self.vehicles:
            back = self.vehicles[0]
            limit = min(back.x_lo, back.x_hi) - 1
            if cell > limit:
                cell = limit
        if moving:
            veh = IntervalVehicle(cell, cell, self.vmax_lo, self.vmax_hi, vid)
        else:
            veh = IntervalVehicle(cell, cell, 0, 0, vid)
        self.vehicles.insert(0, veh)
        return veh

    def collapse_to(self, reported: Sequence[tuple[int, int]]) -> None:
        """Rebuild the lane from exact (cell, id) reports, ascending by cell.

        Position intervals collapse to the reported cells; velocity pairs of
        vehicles already tracked persist, newcomers start at the free-flow
        velocity bounds.
        """
        old = {veh.vid: veh for veh in self.vehicles if veh.vid is not None}
        vs: list[IntervalVehicle] = []
        for cell, vid in reported:
            veh = old.get(vid)
            if veh is None:
                veh = IntervalVehicle(cell, cell, self.vmax_lo, self.vmax_hi, vid)
            else:
                veh.x_lo = cell
                veh.x_hi = cell
            vs.append(veh)
        self.vehicles = vs

    # -------------------------------------------------------------- queries

    def snapshot(self, which: int) -> tuple[list[int], list[int]]:
        """Copy of (positions, velocities) of one endpoint configuration."""
        if which == LO:
            return [v.x_lo for v in self.vehicles], [v.v_lo for v in self.vehicles]
        return [v.x_hi for v in self.vehicles], [v.v_hi for v in self.vehicles]

    def __len__(self) -> int:
        return len(self.vehicles)


# ----------------------------------------------------------------- predictors


def _run_stops(lane: IntervalLane, which: int, red_steps: int, green_steps: int) -> int:
    """Total stopped vehicle-steps of one endpoint configuration.

    Simulates `red_steps` seconds of red followed by `green_steps` seconds of
    green. Vehicles whose position passes the stop line leave the simulated
    lane and stop accumulating delay.
    """
    pos, vel = lane.snapshot(which)
    if not pos:
        return 0
    vmax = lane.vmax_lo if which == LO else lane.vmax_hi
    stop = lane.stop_cell
    total = 0
    for phase_steps, green in ((red_steps, False), (green_steps, True)):
        step = 0
        while step < phase_steps:
            n = len(pos)
            if n == 0:
                return total
            step += 1
            zeros = 0
            for i in range(n):
                v = vel[i] + 1
                if v > vmax:
                    v = vmax
                g = (pos[i + 1] - pos[i] - 1) if i + 1 < n else (
                    _BIG if green else stop - pos[i]
                )
                if v > g:
                    v = g
                if v < 0:
                    v = 0
                vel[i] = v
                pos[i] += v
                if v == 0:
                    zeros += 1
            total += zeros
            if green:
                while pos and pos[-1] > stop:
                    pos.pop()
                    vel.pop()
            elif zeros == n and pos[-1] == stop and pos[-1] - pos[0] == n - 1:
                # compacted standing queue: a fixed point under red, every
                # remaining step of this phase adds n stopped-steps
                total += n * (phase_steps - step)
                break
    return total


def _clear_time(lane: IntervalLane, which: int, cap: int) -> int:
    """Seconds of green until the configuration has emptied, capped."""
    pos, vel = lane.snapshot(which)
    vmax = lane.vmax_lo if which == LO else lane.vmax_hi
    stop = lane.stop_cell
    t = 0
    while pos:
        if t >= cap:
            return cap
        t += 1
        n = len(pos)
        for i in range(n):
            v = vel[i] + 1
            if v > vmax:
                v = vmax
            g = (pos[i + 1] - pos[i] - 1) if i + 1 < n else _BIG
            if v > g:
                v = g
            if v < 0:
                v = 0
            vel[i] = v
            pos[i] += v
        while pos and pos[-1] > stop:
            pos.pop()
            vel.pop()
    return t


def _stopped_vehicle_count(lane: IntervalLane, which: int, horizon: int) -> int:
    """Vehicles registering at least one stopped step under red."""
    pos, vel = lane.snapshot(which)
    if not pos:
        return 0
    vmax = lane.vmax_lo if which == LO else lane.vmax_hi
    stop = lane.stop_cell
    n = len(pos)
    flagged = [False] * n
    for _ in range(horizon):
        zeros = 0
        for i in range(n):
            v = vel[i] + 1
            if v > vmax:
                v = vmax
            g = (pos[i + 1] - pos[i] - 1) if i + 1 < n else stop - pos[i]
            if v > g:
                v = g
            if v < 0:
                v = 0
            vel[i] = v
            pos[i] += v
            if v == 0:
                zeros += 1
                flagged[i] = True
        if zeros == n:
            break  # standing queue at the line: nothing changes any more
    return sum(flagged)


def predict_cost(lane_plans: Iterable[tuple[IntervalLane, int, int]]) -> Interval:
    """Delay-cost interval for a set of lanes under per-lane signal plans.

    Each entry is (lane, red_steps, green_steps): the lane sees that many
    seconds of red followed by that many seconds of green. The stopped-step
    totals of the two endpoint configurations are summed over all lanes and
    the interval spans the two sums.
    """
    s_lo = 0
    s_hi = 0
    for lane, red_steps, green_steps in lane_plans:
        if lane.vehicles:
            s_lo += _run_stops(lane, LO, red_steps, green_steps)
            s_hi += _run_stops(lane, HI, red_steps, green_steps)
    return Interval(min(s_lo, s_hi), max(s_lo, s_hi))


def predict_green_time(lanes: Iterable[IntervalLane], cap: int = 60) -> Interval:
    """Green seconds needed for every currently imaged vehicle to cross.

    Both endpoint configurations are simulated under immediate green; for each
    configuration the clearing time is the slowest of the given lanes. The
    result interval spans the two configurations and is capped so that a jam
    that never clears cannot stall the prediction.
    """
    t_lo = 0
    t_hi = 0
    for lane in lanes:
        if lane.vehicles:
            a = _clear_time(lane, LO, cap)
            if a > t_lo:
                t_lo = a
            b = _clear_time(lane, HI, cap)
            if b > t_hi:
                t_hi = b
    return Interval(min(t_lo, t_hi), max(t_lo, t_hi))


def predict_waiting_count(lanes: Iterable[IntervalLane], horizon: int) -> Interval:
    """How many vehicles will register waiting time under red, as an interval."""
    c_lo = 0
    c_hi = 0
    for lane in lanes:
        if lane.vehicles:
            c_lo += _stopped_vehicle_count(lane, LO, horizon)
            c_hi += _stopped_vehicle_count(lane, HI, horizon)
    return Interval(min(c_lo, c_hi), max(c_lo, c_hi))


def predict_time_window(
    lanes: Iterable[IntervalLane], red_elapsed_s: float, tau_s: float, cap: int = 60
) -> Interval:
    """Service window for an action: elapsed red + setup + required green."""
    g = predict_green_time(lanes, cap)
    return Interval(red_elapsed_s + tau_s + g.lo, red_elapsed_s + tau_s + g.hi)


# ------------------------------------------------------------------ the image


class IntersectionModel:
    """Real-time interval image of the four approaches of one intersection."""

    def __init__(
        self,
        lane_links: dict[str, int],
        feeders: dict[int, int],
        length: int = 40,
        vmax: tuple[int, int] = (1, 2),
        hold_at_stop: bool = True,
    ):
        # movement direction -> approach link id, as wired in the network
        self.lane_links = dict(lane_links)
        self.lanes: dict[int, IntervalLane] = {
            lid: IntervalLane(length, vmax) for lid in self.lane_links.values()
        }
        self.feeders = {lid: feeders.get(lid) for lid in self.lanes}
        self.hold_at_stop = hold_at_stop

    def lanes_for(self, directions: Iterable[str]) -> list[IntervalLane]:
        return [self.lanes[self.lane_links[d]] for d in directions if d in self.lane_links]

    def sync(self, frame, green_links: set[int]) -> None:
        """One real-time step: advance under the displayed signal, then merge."""
        for lid, lane in self.lanes.items():
            lane.advance(lid in green_links, hold_at_stop=self.hold_at_stop and frame.kind == "RVD")
        if frame.kind == "RVD":
            for lid, lane in self.lanes.items():
                for _ in range(frame.crossings.get(lid, 0)):
                    lane.pop_front()
            for lid, lane in self.lanes.items():
                arrivals = frame.entries.get(lid, 0)
                feeder = self.feeders.get(lid)
                if feeder is not None:
                    arrivals += frame.crossings.get(feeder, 0)
                for _ in range(arrivals):
                    lane.insert_back(0, moving=True)
        else:
            for lid, lane in self.lanes.items():
                lane.collapse_to(frame.positions.get(lid, ()))
