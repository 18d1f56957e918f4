"""n-level partitioning runs, trial trees, presets and run statistics."""

from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .coarsen import ContractionQueue, coarsen, weight_cap
from .graph import DynGraph
from .initpart import attempts_for, initial_partition
from .partition import BalanceBound, Partition, compute_l_max, cut_weight
from .refine import Refiner

log = logging.getLogger(__name__)

PRESETS = {
    "fast": {"alpha": 1.0, "trial_factor": 8.0, "attempts_base": 25},
    "strong": {"alpha": 4.0, "trial_factor": 2.5, "attempts_base": 100},
}


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    k: int
    epsilon: float = 0.03
    preset: str = "strong"
    alpha: float = 4.0
    trial_factor: float = 2.5
    attempts: int = 1
    seed: int = 0
    coarsest_factor: int = 20
    weight_cap_factor: float = 1.5

    @classmethod
    def from_preset(cls, k: int, preset: str = "strong", **overrides) -> "Config":
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r} (expected fast or strong)")
        p = PRESETS[preset]
        if not isinstance(k, int) or k < 1:
            raise ConfigError(f"k must be a positive integer, got {k}")
        values = dict(k=k, preset=preset, alpha=p["alpha"], trial_factor=p["trial_factor"],
                      attempts=attempts_for(p["attempts_base"], k))
        overrides = {name: v for name, v in overrides.items() if v is not None}
        values.update(overrides)
        if overrides.keys() & {"alpha", "trial_factor", "attempts"}:
            values["preset"] = "custom"
        cfg = cls(**values)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigError(f"k must be a positive integer, got {self.k}")
        if self.epsilon == 0:
            raise ConfigError("epsilon=0 is not supported; use a positive imbalance such as 0.03")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.alpha < 0:
            raise ConfigError("alpha must be nonnegative")
        if self.trial_factor < 0:
            raise ConfigError("trial factor must be 0 (disabled) or positive")
        if self.attempts < 1:
            raise ConfigError("attempts must be at least 1")


@dataclass
class RunStats:
    cut: float = 0
    feasible: bool = True
    empty_blocks: int = 0
    level_steps: list = field(default_factory=list)
    total_steps: int = 0
    searches: int = 0
    avg_search_length: float = 0.0
    contractions: int = 0
    edges_created: int = 0
    initial_attempt_cuts: list = field(default_factory=list)
    initial_infeasible: int = 0
    trials: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_json(self, full: bool = False) -> str:
        d = asdict(self)
        if not full:
            del d["level_steps"]
        return json.dumps(d, sort_keys=True)


def child_seed(seed: int, depth: int, branch: int) -> int:
    """Deterministic, well-mixed seed for one branch of a trial tree."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFF, depth, branch])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class _Run:
    def __init__(self, g: DynGraph, cfg: Config, on_level=None, debug=False):
        self.g = g
        self.cfg = cfg
        self.bound = compute_l_max(g, cfg.k, cfg.epsilon)
        self.cap = weight_cap(g.n, cfg.k, cfg.weight_cap_factor, cfg.coarsest_factor)
        self.beta = math.log(g.n) if g.n > 1 else 0.0
        self.stats = RunStats()
        self.on_level = on_level
        self.debug = debug

    def solve(self, seed: int, depth: int = 0) -> Partition:
        g, cfg = self.g, self.cfg
        rng = random.Random(seed)
        c = cfg.trial_factor
        start_n = g.n
        checkpoint = start_n / c if c > 0 else 0
        queue = ContractionQueue(g, self.cap, rng)
        mementos = coarsen(g, cfg.k, self.cap, rng, checkpoint, cfg.coarsest_factor, queue)
        self.stats.contractions += len(mementos)
        floor = cfg.coarsest_factor * cfg.k
        at_checkpoint = (
            c > 0 and checkpoint > floor and g.n <= checkpoint
            and g.m >= g.n and queue.peek() is not None
        )
        if at_checkpoint:
            P = self._trials(seed, depth)
        else:
            res = initial_partition(g, cfg.k, self.bound, cfg.attempts, rng)
            self.stats.initial_attempt_cuts.extend(res.attempt_cuts)
            if not res.feasible:
                self.stats.initial_infeasible += 1
            P = res.partition
        if self.on_level is not None:
            self.on_level(g, P)
        refiner = Refiner(g, P, [self.bound.l_max] * cfg.k, cfg.alpha, self.beta, rng,
                          debug=self.debug)
        level_steps = self.stats.level_steps
        for m in reversed(mementos):
            g.uncontract(m)
            P.project(m)
            _, steps = refiner.local_search((m.u, m.v))
            level_steps.append(steps)
            if self.on_level is not None:
                self.on_level(g, P)
        self.stats.searches += refiner.searches
        return P

    def _trials(self, seed: int, depth: int) -> Partition:
        g = self.g
        results = []
        for branch in (0, 1):
            P = self.solve(child_seed(seed, depth, branch), depth + 1)
            results.append(P)
        cuts = [P.cut for P in results]
        feas = [P.is_feasible(self.bound) for P in results]
        pick = min((0, 1), key=lambda i: (not feas[i], cuts[i], i))
        self.stats.trials.append({"depth": depth, "nodes": g.n, "cuts": cuts,
                                  "feasible": feas, "chosen": pick})
        return results[pick]


def n_gp(g: DynGraph, cfg: Config, *, on_level: Callable | None = None,
         debug: bool = False) -> tuple[Partition, RunStats]:
    """Partition ``g`` into ``cfg.k`` blocks; ``g`` is restored on return."""
    cfg.validate()
    if cfg.k > g.n:
        raise ConfigError(f"k={cfg.k} exceeds the number of nodes ({g.n})")
    if 0 < cfg.trial_factor <= 2:
        log.warning("trial factor %.3g <= 2: contraction work is no longer linear",
                    cfg.trial_factor)
    t0 = time.perf_counter()
    created0 = g.created_edges
    run = _Run(g, cfg, on_level, debug)
    P = run.solve(cfg.seed)
    stats = run.stats
    stats.wall_time = time.perf_counter() - t0
    stats.edges_created = g.created_edges - created0
    recomputed = cut_weight(g, P.block)
    if recomputed != P.cut:
        raise AssertionError(f"cached cut {P.cut} != recomputed {recomputed}")
    stats.cut = P.cut
    stats.feasible = P.is_feasible(run.bound)
    stats.empty_blocks = P.empty_blocks()
    stats.total_steps = sum(stats.level_steps)
    stats.avg_search_length = stats.total_steps / stats.searches if stats.searches else 0.0
    return P, stats


def run_with_trials(g: DynGraph, cfg: Config) -> Partition:
    return n_gp(g, cfg)[0]


def balance_bound(g: DynGraph, cfg: Config) -> BalanceBound:
    return compute_l_max(g, cfg.k, cfg.epsilon)


@dataclass
class InstanceSummary:
    instance: str
    runs: int
    best: float
    mean: float
    mean_time: float


def geometric_mean(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("geometric mean of no values")
    if any(v == 0 for v in values):
        return 0.0
    return math.exp(sum(math.log(v) for v in values) / len(values))


def aggregate(runs: Mapping[str, Sequence[tuple[float, float]]]):
    """Per-instance best/mean cut and mean time; geometric means across instances.

    ``runs`` maps instance name to ``(cut, seconds)`` pairs.
    """
    if not runs:
        raise ValueError("nothing to aggregate")
    per = []
    for name, rows in runs.items():
        if not rows:
            raise ValueError(f"instance {name!r} has no runs")
        cuts = [c for c, _ in rows]
        times = [t for _, t in rows]
        per.append(InstanceSummary(name, len(rows), min(cuts),
                                   sum(cuts) / len(cuts), sum(times) / len(times)))
    overall = {
        "best": geometric_mean([s.best for s in per]),
        "mean": geometric_mean([s.mean for s in per]),
        "mean_time": geometric_mean([s.mean_time for s in per]),
    }
    return per, overall
