"""Batch experiment runner: sweeps, replication, statistics, CSV persistence.

A plan is the cross product of controllers, detection scenarios, entry flows
and slow-vehicle fractions; every cell is replicated with independent seeds
derived by stable hashing, so any subset of cells reruns to identical bytes.
One run simulates the network second by second (step, observe, decide) and
reports the average delay of vehicles that entered after the warm-up period
and left the network before the end of the run.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

from scipy.stats import t as student_t

from .controllers import CONTROLLERS, ControllerParams, make_agent
from .network import Network, NetworkConfig
from .sensing import RVD, VSN, build_frame

import random

RESULTS_HEADER = (
    "controller,scenario,q,f,run,seed,avg_delay_s,vehicles_entered,"
    "vehicles_exited,mean_entry_wait_s,switch_count"
)
SUMMARY_HEADER = (
    "controller,scenario,q,f,n_runs,mean_delay_s,sd_delay_s,ci95_half_width_s"
)


@dataclass
class ExperimentPlan:
    controllers: tuple[str, ...] = ("SOC_2M",)
    scenarios: tuple[str, ...] = (RVD,)
    q_values: tuple[float, ...] = (540.0,)
    f_values: tuple[float, ...] = (0.2,)
    runs_per_cell: int = 30
    duration_s: int = 3600
    warmup_s: int = 600
    base_seed: int = 1
    network: dict = field(default_factory=dict)  # NetworkConfig overrides
    control: dict = field(default_factory=dict)  # ControllerParams overrides

    def __post_init__(self) -> None:
        self.controllers = tuple(c.upper() for c in self.controllers)
        self.scenarios = tuple(s.upper() for s in self.scenarios)
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if self.duration_s < 1:
            raise ValueError("duration_s must be >= 1")
        if self.warmup_s < 0:
            raise ValueError("warmup_s must be >= 0")
        for c in self.controllers:
            if c not in CONTROLLERS:
                raise ValueError(f"unknown controller {c!r}")
        for s in self.scenarios:
            if s not in (RVD, VSN):
                raise ValueError(f"unknown scenario {s!r}")

    def cells(self) -> list[tuple[str, str, float, float]]:
        """All (controller, scenario, q, f) cells; SOTL never runs under VSN."""
        out = []
        for controller in self.controllers:
            for scenario in self.scenarios:
                if controller == "SOTL" and scenario == VSN:
                    continue
                for q in self.q_values:
                    for f in self.f_values:
                        out.append((controller, scenario, q, f))
        return out


@dataclass
class RunResult:
    controller: str
    scenario: str
    q: float
    f: float
    run: int
    seed: int
    avg_delay_s: Optional[float]
    vehicles_entered: int
    vehicles_exited: int
    mean_entry_wait_s: Optional[float]
    switch_count: int
    forcing_violations: int = 0  # audit counter, not part of the CSV schema

    def csv_row(self) -> str:
        return ",".join(
            (
                self.controller,
                self.scenario,
                _num(self.q),
                _num(self.f),
                str(self.run),
                str(self.seed),
                _opt(self.avg_delay_s),
                str(self.vehicles_entered),
                str(self.vehicles_exited),
                _opt(self.mean_entry_wait_s),
                str(self.switch_count),
            )
        )


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _opt(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6f}"


def derive_seed(base_seed: int, controller: str, scenario: str, q: float, f: float, run: int) -> int:
    """Stable 64-bit seed for one replication, independent of run order."""
    key = f"{base_seed}|{controller}|{scenario}|{_num(q)}|{_num(f)}|{run}"
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def run_cell(
    plan: ExperimentPlan,
    controller: str,
    scenario: str,
    q: float,
    f: float,
    run_index: int,
    audit: bool = False,
    detection_log: Optional[IO[str]] = None,
) -> RunResult:
    """Simulate one replication and aggregate its delay statistics."""
    seed = derive_seed(plan.base_seed, controller, scenario, q, f, run_index)
    cfg = NetworkConfig(**{**plan.network, "q": q, "f": f, "seed": seed, "duration_s": plan.duration_s})
    params = ControllerParams(**plan.control)
    net = Network(cfg)
    agents = [make_agent(controller, net, node, params, scenario) for node in range(net.n_nodes)]
    rng = random.Random(seed)

    for t in range(1, plan.duration_s + 1):
        net.step(rng)
        frame = build_frame(net, scenario, t, detection_log)
        for agent in agents:
            agent.ingest(frame, t)
        for agent in agents:
            target = agent.decide(t)
            if target is not None:
                net.begin_setup(agent.node, target)
        if audit:
            net.assert_conserved()
            net.assert_well_formed()

    counted = [
        (wait, stopped)
        for created, wait, stopped, _exit in net.exited_records
        if created > plan.warmup_s
    ]
    if counted:
        avg_delay = sum(w + s for w, s in counted) / len(counted)
        mean_wait = sum(w for w, _ in counted) / len(counted)
    else:
        avg_delay = None
        mean_wait = None
    return RunResult(
        controller=controller,
        scenario=scenario,
        q=q,
        f=f,
        run=run_index,
        seed=seed,
        avg_delay_s=avg_delay,
        vehicles_entered=net.admitted,
        vehicles_exited=net.exited,
        mean_entry_wait_s=mean_wait,
        switch_count=net.switch_count_total(),
        forcing_violations=sum(a.forcing_violations for a in agents),
    )


def _run_task(args) -> RunResult:
    plan, controller, scenario, q, f, run_index, audit = args
    return run_cell(plan, controller, scenario, q, f, run_index, audit)


def run_plan(
    plan: ExperimentPlan,
    workers: int = 1,
    audit: bool = False,
    progress=None,
    detection_log_path: Optional[str] = None,
) -> list[RunResult]:
    """Execute every replication of the plan; output order is canonical.

    The optional detection log (newline-delimited JSON, one record per
    detection) forces single-process execution.
    """
    tasks = [
        (plan, controller, scenario, q, f, run, audit)
        for controller, scenario, q, f in plan.cells()
        for run in range(plan.runs_per_cell)
    ]
    results: list[RunResult] = []
    if detection_log_path is not None:
        with open(detection_log_path, "w", encoding="ascii") as log:
            for plan_, c, s, q, f, run, audit_ in tasks:
                res = run_cell(plan_, c, s, q, f, run, audit_, detection_log=log)
                results.append(res)
                if progress is not None:
                    progress(res)
    elif workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_run_task, tasks, chunksize=1):
                results.append(res)
                if progress is not None:
                    progress(res)
    else:
        for task in tasks:
            res = _run_task(task)
            results.append(res)
            if progress is not None:
                progress(res)
    results.sort(key=lambda r: (r.controller, r.scenario, r.q, r.f, r.run))
    return results


@dataclass
class CellSummary:
    controller: str
    scenario: str
    q: float
    f: float
    n_runs: int
    mean_delay_s: Optional[float]
    sd_delay_s: Optional[float]
    ci95_half_width_s: Optional[float]

    def csv_row(self) -> str:
        return ",".join(
            (
                self.controller,
                self.scenario,
                _num(self.q),
                _num(self.f),
                str(self.n_runs),
                _opt(self.mean_delay_s),
                _opt(self.sd_delay_s),
                _opt(self.ci95_half_width_s),
            )
        )


def aggregate(results: Iterable[RunResult]) -> CellSummary:
    """Mean, sample standard deviation and 95% CI half-width of one cell.

    The standard deviation uses the unbiased (n-1) estimator; a single run
    reports zero spread. The half-width uses the Student t quantile.
    """
    rows = list(results)
    if not rows:
        raise ValueError("aggregate needs at least one result row")
    first = rows[0]
    delays = [r.avg_delay_s for r in rows if r.avg_delay_s is not None]
    n = len(delays)
    if n == 0:
        return CellSummary(first.controller, first.scenario, first.q, first.f, 0, None, None, None)
    mean = statistics.fmean(delays)
    if n == 1:
        sd = 0.0
        half = 0.0
    else:
        sd = statistics.stdev(delays)
        half = float(student_t.ppf(0.975, n - 1)) * sd / math.sqrt(n)
    return CellSummary(first.controller, first.scenario, first.q, first.f, n, mean, sd, half)


def summarize(results: Iterable[RunResult]) -> list[CellSummary]:
    """Aggregate a result list per cell, in canonical cell order."""
    by_cell: dict[tuple, list[RunResult]] = {}
    for r in results:
        by_cell.setdefault((r.controller, r.scenario, r.q, r.f), []).append(r)
    return [aggregate(by_cell[key]) for key in sorted(by_cell)]


def write_results_csv(path: str, results: Iterable[RunResult]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for r in results:
            fh.write(r.csv_row() + "\n")


def write_summary_csv(path: str, summaries: Iterable[CellSummary]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in summaries:
            fh.write(s.csv_row() + "\n")
