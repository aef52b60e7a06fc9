"""Ground-truth simulation of a signalised grid road network.

The network is a square lattice of two-directional roads. Every link is a
one-lane stretch of ``link_cells`` cells that ends at the stop line of exactly
one intersection; vehicles travel straight through intersections and leave the
network when they cross the stop line of a boundary intersection. Two vehicle
classes share the roads and differ only in their braking probability.

Dynamics advance in synchronous one-second steps. Each step applies the
classic four-stage cell update to every vehicle (accelerate, brake to the gap
or the stop line, randomise, move) using the positions of the previous second,
so the update order inside a step has no effect on the outcome. Random draws
are made once per vehicle per step, in (link id, cell) order, which pins down
the full event sequence for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

FAST = 0
SLOW = 1

NS = 0
WE = 1
ACTION_NAMES = ("NS", "WE")

GREEN = 0
SETUP = 1

_BIG = 1 << 30


def action_for_direction(direction: str) -> int:
    """Signal action serving an approach that moves in `direction`."""
    return NS if direction in ("N", "S") else WE


@dataclass
class NetworkConfig:
    """Static parameters of one simulation run."""

    grid_size: int = 4
    link_cells: int = 40
    cell_length_m: float = 7.5
    vmax: int = 2
    p_fast: float = 0.2
    p_slow: float = 0.8
    q: float = 540.0  # entry flow per entry point, vehicles/hour
    f: float = 0.2  # slow-vehicle fraction
    tau_s: int = 5  # setup (intergreen) duration
    t_crit_s: int = 120  # critical service window
    duration_s: int = 3600
    seed: int = 0

    def __post_init__(self) -> None:
        if self.grid_size < 1:
            raise ValueError("grid_size must be >= 1")
        if self.link_cells < 2:
            raise ValueError("link_cells must be >= 2")
        if self.vmax < 1:
            raise ValueError("vmax must be >= 1")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError("f must lie in [0, 1]")
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        if self.tau_s < 0 or self.t_crit_s < 0:
            raise ValueError("durations must be nonnegative")


class Vehicle:
    """One vehicle, either queued at an entry or occupying a cell."""

    __slots__ = (
        "vid",
        "vclass",
        "link",
        "cell",
        "v",
        "stopped_steps",
        "created_s",
        "admitted_s",
        "exit_s",
    )

    def __init__(self, vid: int, vclass: int, created_s: int):
        self.vid = vid
        self.vclass = vclass
        self.link = -1
        self.cell = -1
        self.v = 0
        self.stopped_steps = 0
        self.created_s = created_s
        self.admitted_s = -1
        self.exit_s = -1

    @property
    def entry_wait(self) -> int:
        return self.admitted_s - self.created_s


class Link:
    """One directed link; `vehicles` is kept sorted by cell, ascending."""

    __slots__ = (
        "lid",
        "direction",
        "action",
        "from_node",
        "to_node",
        "downstream",
        "is_entry",
        "vehicles",
        "entry_queue",
    )

    def __init__(self, lid: int, direction: str, from_node: Optional[int], to_node: int):
        self.lid = lid
        self.direction = direction
        self.action = action_for_direction(direction)
        self.from_node = from_node
        self.to_node = to_node
        self.downstream: Optional[int] = None
        self.is_entry = from_node is None
        self.vehicles: list[Vehicle] = []
        self.entry_queue: list[Vehicle] = []


class SignalState:
    """Signal head of one intersection: current action, phase and timers."""

    __slots__ = (
        "action",
        "phase",
        "setup_remaining",
        "pending",
        "green_elapsed",
        "red_elapsed",
        "switch_count",
    )

    def __init__(self) -> None:
        self.action = NS
        self.phase = GREEN
        self.setup_remaining = 0
        self.pending = NS
        self.green_elapsed = 0
        self.red_elapsed = [0, 0]
        self.switch_count = 0

    def is_green_for(self, action: int) -> bool:
        return self.phase == GREEN and self.action == action


class Network:
    """Mutable simulation state plus the one-second update rule."""

    def __init__(self, config: NetworkConfig):
        self.config = config
        self.now = 0
        g = config.grid_size
        self.n_nodes = g * g
        self.links: list[Link] = []
        self.entry_links: list[int] = []
        # per node: movement direction -> approach link id
        self.approaches: list[dict[str, int]] = [{} for _ in range(self.n_nodes)]
        # link id -> id of the link feeding it across the upstream intersection
        self.feeder: dict[int, int] = {}
        self.signals = [SignalState() for _ in range(self.n_nodes)]
        self._next_vid = 0
        self.created = 0
        self.admitted = 0
        self.exited = 0
        # (created_s, entry_wait, stopped_steps, exit_s) per retired vehicle
        self.exited_records: list[tuple[int, int, int, int]] = []
        # events of the most recent step, consumed by the detector layer
        self.admissions: list[tuple[int, int]] = []  # (link id, vehicle id)
        self.crossings: list[tuple[int, int]] = []  # (link id, vehicle id)
        self._build()

    # ------------------------------------------------------------------ setup

    def _node(self, r: int, c: int) -> int:
        return r * self.config.grid_size + c

    def _build(self) -> None:
        g = self.config.grid_size

        def chain(nodes: list[int], direction: str) -> None:
            prev: Optional[Link] = None
            for k, node in enumerate(nodes):
                from_node = nodes[k - 1] if k > 0 else None
                link = Link(len(self.links), direction, from_node, node)
                self.links.append(link)
                self.approaches[node][direction] = link.lid
                if link.is_entry:
                    self.entry_links.append(link.lid)
                if prev is not None:
                    prev.downstream = link.lid
                    self.feeder[link.lid] = prev.lid
                prev = link
            # last link ends at a boundary intersection; downstream stays None

        for r in range(g):
            chain([self._node(r, c) for c in range(g)], "E")
        for r in range(g):
            chain([self._node(r, c) for c in range(g - 1, -1, -1)], "W")
        for c in range(g):
            chain([self._node(r, c) for r in range(g)], "S")
        for c in range(g):
            chain([self._node(r, c) for r in range(g - 1, -1, -1)], "N")

    # ------------------------------------------------------------------ step

    def step(self, rng) -> None:
        """Advance the whole network by one second."""
        self.now += 1
        self.admissions = []
        self.crossings = []
        self._advance_signals()
        self._move(rng)
        self._spawn(rng)

    def _advance_signals(self) -> None:
        for sig in self.signals:
            if sig.phase == SETUP:
                if sig.setup_remaining == 0:
                    sig.phase = GREEN
                    sig.action = sig.pending
                    sig.green_elapsed = 0
                else:
                    sig.setup_remaining -= 1
            if sig.phase == GREEN:
                sig.green_elapsed += 1
            red = sig.red_elapsed
            for a in (NS, WE):
                if sig.phase == GREEN and sig.action == a:
                    red[a] = 0
                else:
                    red[a] += 1

    def _move(self, rng) -> None:
        cfg = self.config
        last = cfg.link_cells - 1
        vmax = cfg.vmax
        p_by_class = (cfg.p_fast, cfg.p_slow)
        links = self.links
        signals = self.signals
        rand = rng.random

        # Positions of the previous second, frozen before anything moves.
        old_first = [lk.vehicles[0].cell if lk.vehicles else -1 for lk in links]
        transfers: list[tuple[int, Vehicle]] = []

        for lk in links:
            vs = lk.vehicles
            if not vs:
                continue
            n = len(vs)
            green = signals[lk.to_node].is_green_for(lk.action)
            crossed = False
            for i in range(n):
                veh = vs[i]
                v = veh.v + 1
                if v > vmax:
                    v = vmax
                if i + 1 < n:
                    gap = vs[i + 1].cell - veh.cell - 1
                else:
                    gap = last - veh.cell
                    if green:
                        dl = lk.downstream
                        if dl is None:
                            gap += vmax + 1
                        else:
                            head = old_first[dl]
                            gap += head if head >= 0 else cfg.link_cells
                if v > gap:
                    v = gap
                if rand() < p_by_class[veh.vclass]:
                    if v > 0:
                        v -= 1
                veh.v = v
                if v == 0:
                    veh.stopped_steps += 1
                    continue
                nc = veh.cell + v
                if nc <= last:
                    veh.cell = nc
                else:
                    # front vehicle crosses the stop line on green
                    self.crossings.append((lk.lid, veh.vid))
                    crossed = True
                    dl = lk.downstream
                    if dl is None:
                        veh.exit_s = self.now
                        self.exited += 1
                        self.exited_records.append(
                            (veh.created_s, veh.entry_wait, veh.stopped_steps, self.now)
                        )
                    else:
                        veh.link = dl
                        veh.cell = nc - cfg.link_cells
                        transfers.append((dl, veh))
            if crossed:
                vs.pop()

        for dl, veh in transfers:
            links[dl].vehicles.insert(0, veh)

    def _spawn(self, rng) -> None:
        cfg = self.config
        p_arrival = cfg.q / 3600.0
        for lid in self.entry_links:
            lk = self.links[lid]
            if p_arrival > 0.0 and rng.random() < p_arrival:
                vclass = SLOW if rng.random() < cfg.f else FAST
                veh = Vehicle(self._next_vid, vclass, self.now)
                self._next_vid += 1
                lk.entry_queue.append(veh)
                self.created += 1
            if lk.entry_queue and (not lk.vehicles or lk.vehicles[0].cell > 0):
                veh = lk.entry_queue.pop(0)
                veh.link = lid
                veh.cell = 0
                veh.v = 0
                veh.admitted_s = self.now
                lk.vehicles.insert(0, veh)
                self.admitted += 1
                self.admissions.append((lid, veh.vid))

    # ------------------------------------------------------------- signalling

    def begin_setup(self, node: int, target: int) -> None:
        """Start switching `node` to `target`: tau_s seconds of all-red."""
        sig = self.signals[node]
        sig.phase = SETUP
        sig.setup_remaining = self.config.tau_s
        sig.pending = target
        sig.switch_count += 1

    def hold_green(self, node: int, action: int) -> None:
        """Pin a signal to one action (test helper)."""
        sig = self.signals[node]
        sig.phase = GREEN
        sig.action = action

    # ------------------------------------------------------------ accounting

    def route(self, link_id: int) -> Optional[int]:
        """Downstream link for straight-through travel; None exits the grid."""
        return self.links[link_id].downstream

    def vehicles_in_network(self) -> int:
        return sum(len(lk.vehicles) for lk in self.links)

    def vehicles_queued(self) -> int:
        return sum(len(self.links[lid].entry_queue) for lid in self.entry_links)

    def avg_delay(self) -> float:
        """Mean delay (stopped seconds + entry wait) over retired vehicles."""
        if not self.exited_records:
            raise RuntimeError("average delay is undefined: no vehicle has exited")
        total = sum(wait + stopped for _, wait, stopped, _ in self.exited_records)
        return total / len(self.exited_records)

    def switch_count_total(self) -> int:
        return sum(sig.switch_count for sig in self.signals)

    # --------------------------------------------------------------- auditing

    def assert_conserved(self) -> None:
        in_net = self.vehicles_in_network()
        queued = self.vehicles_queued()
        if self.created != self.exited + in_net + queued:
            raise AssertionError(
                f"conservation violated at t={self.now}: created={self.created} "
                f"exited={self.exited} in_network={in_net} queued={queued}"
            )
        if self.admitted - self.exited != in_net:
            raise AssertionError(f"admission accounting violated at t={self.now}")

    def assert_well_formed(self) -> None:
        last = self.config.link_cells - 1
        for lk in self.links:
            prev = -1
            for veh in lk.vehicles:
                if not prev < veh.cell <= last:
                    raise AssertionError(
                        f"cell order violated on link {lk.lid} at t={self.now}"
                    )
                prev = veh.cell

    # ------------------------------------------------------------ test hooks

    def place_vehicle(self, link_id: int, cell: int, vclass: int = FAST, v: int = 0) -> Vehicle:
        """Insert a vehicle directly (test helper); keeps counters consistent."""
        lk = self.links[link_id]
        veh = Vehicle(self._next_vid, vclass, self.now)
        self._next_vid += 1
        veh.link = link_id
        veh.cell = cell
        veh.v = v
        veh.admitted_s = self.now
        lk.vehicles.append(veh)
        lk.vehicles.sort(key=lambda x: x.cell)
        self.created += 1
        self.admitted += 1
        return veh
