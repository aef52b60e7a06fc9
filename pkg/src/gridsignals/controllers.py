"""Per-intersection signal control agents.

Five controllers share one decision shell: once per second, outside setup
periods, an agent either keeps the running action or initiates a switch. The
predictive controllers first check the service-window guard: if the window
T(a) = elapsed red + setup + required green of a waiting action reaches the
critical limit, that action is executed immediately and costs are ignored.
Otherwise the controller-specific selection runs.

SOTL    threshold rule on red-time-weighted vehicle counts, no prediction.
SOC     scalar expected-delay cost from a constant-speed point model.
SOC_2   simulated cost intervals compared by their centers.
SOC_M   interval arithmetic on predicted green time and waiting counts.
SOC_2M  simulated cost intervals compared by the interval order relations.

Switching between the two actions of an intersection is decided on interval
costs with the rule "switch only when the improvement is certain": a candidate
replaces the running action only if its cost interval lies certainly below;
among several certain improvements the componentwise order picks the winner.
Ties always keep the running action, then prefer the lowest action index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .intervals import Interval
from .network import GREEN, NS, WE, Network
from .prediction import (
    IntersectionModel,
    predict_cost,
    predict_green_time,
    predict_waiting_count,
)
from .sensing import SensorFrame

CONTROLLERS = ("SOTL", "SOC", "SOC_2", "SOC_M", "SOC_2M")

_ACTION_DIRECTIONS = {NS: ("N", "S"), WE: ("E", "W")}


@dataclass
class ControllerParams:
    """Numeric knobs of the controllers; defaults follow the experiment setup."""

    theta: float = 50.0  # SOTL switching threshold
    phi_min: int = 5  # SOTL minimum green, seconds
    mu: int = 3  # SOTL platoon-size upper bound
    count_band_cells: int = 11  # SOTL red-count band (80 m at 7.5 m cells)
    platoon_band_cells: int = 3  # SOTL green platoon band (25 m)
    saturation_flow: float = 0.5  # vehicles per second of green
    free_flow_speed: float = 1.5  # cells per second, point model
    # Horizon of a green stream's cost window; red streams add one setup
    # duration. Values near the minimum green proved too short on congested
    # grids (switch decisions degenerate into one-second hairline savings),
    # so the default looks a bit further ahead.
    h_green: int = 12
    max_green: int = 60  # cap of the required-green prediction
    vmax_lo: int = 1
    vmax_hi: int = 2


def select_interval(costs: dict[int, Interval], current: int) -> int:
    """Pick an action from interval costs; uncertain improvements never switch.

    First pass scans the actions in index order until one is certainly below
    the running action's cost. The second pass continues over the remaining
    actions and replaces the candidate whenever a later cost precedes the
    candidate's componentwise. If nothing is certainly better, the running
    action stands.
    """
    actions = sorted(costs)
    best = current
    i = 0
    while i < len(actions) and best == current:
        a = actions[i]
        i += 1
        if costs[a].certainly_below(costs[current]):
            best = a
    while i < len(actions):
        a = actions[i]
        i += 1
        if costs[a].precedes(costs[best]):
            best = a
    return best


def select_by_center(costs: dict[int, Interval], current: int) -> int:
    """Pick the action with the lowest interval center; ties keep current."""
    best = current
    best_c = costs[current].center
    for a in sorted(costs):
        c = costs[a].center
        if c < best_c:
            best = a
            best_c = c
    return best


def expected_delay_cost(n: float, tau_s: float, green_s: float, extra: float) -> float:
    """Scalar switching cost: waiting vehicles times blocked time, plus extra."""
    return n * (tau_s + green_s) + extra


def expected_delay_cost_interval(
    n: Interval, tau_s: float, green_s: Interval, extra: float
) -> Interval:
    """Interval switching cost with the same structure as the scalar rule."""
    return n * (Interval.point(tau_s) + green_s) + Interval.point(extra)


def queue_clear_time(
    n_queued: float, furthest_cells: float, saturation_flow: float, free_flow_speed: float
) -> float:
    """Green seconds to discharge a queue and pass the last approaching vehicle."""
    if n_queued <= 0 and furthest_cells <= 0:
        return 0.0
    g = n_queued / saturation_flow
    if furthest_cells > 0:
        g = max(g, furthest_cells / free_flow_speed + 1.0 / saturation_flow)
    return g


# --------------------------------------------------------------------- agents


class Agent:
    """Decision shell shared by every controller."""

    uses_time_window = True

    def __init__(self, net: Network, node: int, params: ControllerParams, scenario: str):
        self.net = net
        self.node = node
        self.params = params
        self.scenario = scenario
        self.approaches = net.approaches[node]  # direction -> link id
        self.tau = net.config.tau_s
        self.t_crit = net.config.t_crit_s
        self.forcing_violations = 0

    # Links served when `action` holds green.
    def action_links(self, action: int) -> list[int]:
        return [self.approaches[d] for d in _ACTION_DIRECTIONS[action] if d in self.approaches]

    def ingest(self, frame: SensorFrame, t: int) -> None:  # pragma: no cover - overridden
        raise NotImplementedError

    def decide(self, t: int) -> Optional[int]:
        """Return the action to switch to, or None to keep the current one."""
        sig = self.net.signals[self.node]
        if sig.phase != GREEN:
            return None
        current = sig.action
        other = 1 - current
        target: Optional[int] = None
        window = None
        if self.uses_time_window:
            red = sig.red_elapsed[other]
            # the required green is capped, so the window cannot reach the
            # critical limit until the red time alone comes close enough
            if red + self.tau + self.params.max_green >= self.t_crit:
                g_upper = self._required_green_upper(other)
                window = red + self.tau + g_upper
                if window >= self.t_crit:
                    target = other  # forced service, costs ignored
        if target is None:
            sel = self._select(current, other)
            target = None if sel == current else sel
        if window is not None and window > self.t_crit + 1 and target != other:
            self.forcing_violations += 1
        return target

    def _required_green_upper(self, action: int) -> float:  # pragma: no cover
        raise NotImplementedError

    def _select(self, current: int, other: int) -> int:  # pragma: no cover
        raise NotImplementedError


class SotlAgent(Agent):
    """Threshold controller on red-signal vehicle counts with platoon guards.

    Each action that is not green integrates the number of vehicles within the
    counting band of its approaches, once per second. The integral switches
    the signal when it reaches the threshold, provided the green has lasted
    its minimum and the green approaches do not hold a small platoon near the
    stop line. Counts come from presence detectors in the two distance bands,
    so the controller is usable in the road-side detection scenario only.
    """

    uses_time_window = False

    def __init__(self, net, node, params, scenario):
        super().__init__(net, node, params, scenario)
        self.kappa = [0.0, 0.0]

    def _band_count(self, action: int, band_cells: int) -> int:
        first = self.net.config.link_cells - band_cells
        total = 0
        for lid in self.action_links(action):
            for veh in self.net.links[lid].vehicles:
                if veh.cell >= first:
                    total += 1
        return total

    def ingest(self, frame: SensorFrame, t: int) -> None:
        sig = self.net.signals[self.node]
        for action in (NS, WE):
            if sig.is_green_for(action):
                self.kappa[action] = 0.0
            else:
                self.kappa[action] += self._band_count(action, self.params.count_band_cells)

    def decide(self, t: int) -> Optional[int]:
        sig = self.net.signals[self.node]
        if sig.phase != GREEN:
            return None
        current = sig.action
        other = 1 - current
        if self.kappa[other] < self.params.theta:
            return None
        if sig.green_elapsed < self.params.phi_min:
            return None
        near = self._band_count(current, self.params.platoon_band_cells)
        if 1 <= near <= self.params.mu:  # keep small platoons together
            return None
        return other


class _PointLane:
    """Constant-speed point estimate of one approach for the SOC controller.

    Approaching vehicles advance at the assumed free-flow speed and join a
    stop-line queue; confirmed crossings discharge the queue. Exact position
    reports, when available, rebuild the estimate each second.
    """

    __slots__ = ("length", "positions", "n_queued")

    def __init__(self, length: int):
        self.length = length
        self.positions: list[float] = []  # ascending, movers only
        self.n_queued = 0

    def count(self) -> int:
        return self.n_queued + len(self.positions)

    def furthest_distance(self) -> float:
        if not self.positions:
            return 0.0
        return (self.length - 1) - self.positions[0]

    def advance(self, speed: float) -> None:
        back = (self.length - 1) - self.n_queued
        kept = []
        for pos in reversed(self.positions):  # front joins the queue first
            pos += speed
            if pos >= back:
                self.n_queued += 1
                back -= 1
            else:
                kept.append(pos)
        kept.reverse()
        self.positions = kept

    def discharge(self) -> None:
        if self.n_queued > 0:
            self.n_queued -= 1
        elif self.positions:
            self.positions.pop()

    def insert(self, cell: float = 0.0) -> None:
        self.positions.insert(0, cell)

    def rebuild(self, cells: list[int]) -> None:
        threshold = self.length - 1
        queued = 0
        movers: list[float] = []
        for cell in reversed(cells):  # front to back
            if cell == threshold - queued:
                queued += 1
            else:
                movers.append(float(cell))
        movers.reverse()
        self.positions = movers
        self.n_queued = queued


class SocAgent(Agent):
    """Expected-delay controller on a constant-speed point model."""

    def __init__(self, net, node, params, scenario):
        super().__init__(net, node, params, scenario)
        length = net.config.link_cells
        self.point_lanes = {lid: _PointLane(length) for lid in self.approaches.values()}

    def ingest(self, frame: SensorFrame, t: int) -> None:
        if frame.kind == "RVD":
            for lid, lane in self.point_lanes.items():
                lane.advance(self.params.free_flow_speed)
            for lid, lane in self.point_lanes.items():
                for _ in range(frame.crossings.get(lid, 0)):
                    lane.discharge()
                arrivals = frame.entries.get(lid, 0)
                feeder = self.net.feeder.get(lid)
                if feeder is not None:
                    arrivals += frame.crossings.get(feeder, 0)
                for _ in range(arrivals):
                    lane.insert(0.0)
        else:
            for lid, lane in self.point_lanes.items():
                lane.rebuild([cell for cell, _vid in frame.positions.get(lid, ())])

    def _required_green(self, action: int) -> float:
        g = 0.0
        for lid in self.action_links(action):
            lane = self.point_lanes[lid]
            if lane.count() == 0:
                continue
            g_lane = queue_clear_time(
                lane.n_queued,
                lane.furthest_distance(),
                self.params.saturation_flow,
                self.params.free_flow_speed,
            )
            g = max(g, g_lane)
        return min(g, float(self.params.max_green))

    def _required_green_upper(self, action: int) -> float:
        return self._required_green(action)

    def _count(self, action: int) -> int:
        return sum(self.point_lanes[lid].count() for lid in self.action_links(action))

    def _select(self, current: int, other: int) -> int:
        n_current = self._count(current)
        costs = {}
        for action in (NS, WE):
            tau = 0.0 if action == current else float(self.tau)
            extra = 0.0 if action == current else n_current * self.tau
            blocked = self._count(1 - action)
            # Executing an action always occupies at least the one-second
            # decision cycle, so an idle green cannot hold a waiting queue
            # for free until the service-window guard fires.
            green_s = max(self._required_green(action), 1.0 - tau)
            costs[action] = expected_delay_cost(blocked, tau, green_s, extra)
        best = current
        best_cost = costs[current]
        for action in (NS, WE):
            if costs[action] < best_cost:
                best = action
                best_cost = costs[action]
        return best


class _IntervalModelAgent(Agent):
    """Shared machinery of the controllers driven by the interval image."""

    def __init__(self, net, node, params, scenario):
        super().__init__(net, node, params, scenario)
        self.model = IntersectionModel(
            self.approaches,
            net.feeder,
            length=net.config.link_cells,
            vmax=(params.vmax_lo, params.vmax_hi),
        )

    def ingest(self, frame: SensorFrame, t: int) -> None:
        sig = self.net.signals[self.node]
        green_links = {
            lid
            for lid in self.approaches.values()
            if sig.is_green_for(self.net.links[lid].action)
        }
        self.model.sync(frame, green_links)

    def _lanes(self, action: int):
        return [self.model.lanes[lid] for lid in self.action_links(action)]

    def _required_green_interval(self, action: int) -> Interval:
        return predict_green_time(self._lanes(action), self.params.max_green)

    def _required_green_upper(self, action: int) -> float:
        return self._required_green_interval(action).hi

    def _cost_interval(self, action: int, current: int) -> Interval:
        """Simulated delay cost of `action` over the rolling horizon.

        The scoring window of a lane depends on its current signal state
        only: green streams are scored over the green horizon, red streams
        over the green horizon extended by one setup duration. Both action
        evaluations use the same window per lane, so the comparison isolates
        the effect of the signal plan. Under a switch, the currently green
        lanes spend their window on red (setup, then the other action), and
        the currently red lanes wait out the setup before clearing.
        """
        h = self.params.h_green
        tau = self.tau
        plans = []
        for lane in self._lanes(current):
            plans.append((lane, 0, h) if action == current else (lane, h, 0))
        for lane in self._lanes(1 - current):
            plans.append((lane, h + tau, 0) if action == current else (lane, tau, h))
        return predict_cost(plans)

    def _model_count(self, action: int) -> int:
        return sum(len(lane) for lane in self._lanes(action))


class Soc2Agent(_IntervalModelAgent):
    """Simulated cost intervals reduced to their centers before comparison."""

    def _select(self, current: int, other: int) -> int:
        costs = {a: self._cost_interval(a, current) for a in (NS, WE)}
        return select_by_center(costs, current)


class SocMAgent(_IntervalModelAgent):
    """Interval arithmetic on predicted green time and waiting counts."""

    def _select(self, current: int, other: int) -> int:
        n_current = self._model_count(current)
        costs = {}
        for action in (NS, WE):
            tau = 0.0 if action == current else float(self.tau)
            extra = 0.0 if action == current else n_current * self.tau
            g = self._required_green_interval(action)
            # Same one-second execution floor as the scalar rule: an idle
            # green must not tie at zero cost against a waiting queue.
            g = Interval(max(g.lo, 1.0 - tau), max(g.hi, 1.0 - tau))
            horizon = max(int(math.ceil(tau + g.hi)), 1)
            n = predict_waiting_count(self._lanes(1 - action), horizon)
            costs[action] = expected_delay_cost_interval(n, tau, g, extra)
        return select_interval(costs, current)


class Soc2MAgent(_IntervalModelAgent):
    """Simulated cost intervals compared directly by the interval orders."""

    def _select(self, current: int, other: int) -> int:
        costs = {a: self._cost_interval(a, current) for a in (NS, WE)}
        return select_interval(costs, current)


_AGENT_CLASSES = {
    "SOTL": SotlAgent,
    "SOC": SocAgent,
    "SOC_2": Soc2Agent,
    "SOC_M": SocMAgent,
    "SOC_2M": Soc2MAgent,
}


def make_agent(
    controller: str, net: Network, node: int, params: ControllerParams, scenario: str
) -> Agent:
    """Instantiate the agent of one intersection."""
    name = controller.upper()
    if name not in _AGENT_CLASSES:
        raise ValueError(f"unknown controller {controller!r}; pick one of {CONTROLLERS}")
    if name == "SOTL" and scenario.upper() == "VSN":
        raise ValueError("SOTL is defined for the road-side detection scenario only")
    return _AGENT_CLASSES[name](net, node, params, scenario.upper())
