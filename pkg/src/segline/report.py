"""Monte Carlo replication harness and aggregate reporting.

Each replication draws its own dataset from seed base_seed + rep, runs the
requested detectors, and contributes one record per algorithm. Aggregation
is a fold over per-rep records that is associative and order-independent,
so reports are identical at any worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .detect import DetectorConfig, detect
from .simulate import Scenario, simulate_dataset

__all__ = [
    "TOLERANCES",
    "AlgorithmSummary",
    "ReplicationReport",
    "hit_count",
    "run_replications",
    "resolve_workers",
]

log = logging.getLogger(__name__)

TOLERANCES = (0, 5, 10)


def hit_count(locations: tuple[int, ...], target: int, tolerance: int) -> bool:
    """Whether any detected location lands within tolerance of the target."""
    return any(abs(a - target) <= tolerance for a in locations)


@dataclass(frozen=True)
class AlgorithmSummary:
    """Aggregates for one detector across all replications."""

    algorithm: str
    correct_k: int
    failures: int
    mean_runtime_s: float
    k_hat_histogram: dict[int, int]
    hit_counts: dict[int, tuple[int, ...]]  # tolerance -> per-change count

    def __post_init__(self) -> None:
        for lo, hi in zip(TOLERANCES[:-1], TOLERANCES[1:]):
            if any(
                a > b for a, b in zip(self.hit_counts[lo], self.hit_counts[hi])
            ):
                raise ValueError("hit counts must be monotone in tolerance")


@dataclass(frozen=True)
class ReplicationReport:
    scenario: str
    reps: int
    base_seed: int
    truth_locations: tuple[int, ...]
    algorithms: tuple[AlgorithmSummary, ...]

    def __post_init__(self) -> None:
        for s in self.algorithms:
            if s.correct_k > self.reps or s.failures > self.reps:
                raise ValueError("per-algorithm counts cannot exceed replications")

    @property
    def seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + r for r in range(self.reps))

    def summary(self, algorithm: str) -> AlgorithmSummary:
        for s in self.algorithms:
            if s.algorithm == algorithm:
                return s
        raise KeyError(algorithm)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "reps": self.reps,
            "base_seed": self.base_seed,
            "seeds": list(self.seeds),
            "tolerances": list(TOLERANCES),
            "truth_locations": list(self.truth_locations),
            "algorithms": [
                {
                    "algorithm": s.algorithm,
                    "correct_k": s.correct_k,
                    "failures": s.failures,
                    "mean_runtime_s": s.mean_runtime_s,
                    "k_hat_histogram": {
                        str(k): v for k, v in sorted(s.k_hat_histogram.items())
                    },
                    "hit_counts": {
                        str(t): list(c) for t, c in s.hit_counts.items()
                    },
                }
                for s in self.algorithms
            ],
        }


def _run_one(args: tuple[Scenario, tuple[str, ...], DetectorConfig, int]) -> dict:
    """One replication: per-algorithm (k_hat, locations, runtime, failed)."""
    scenario, algorithms, config, seed = args
    data, _ = simulate_dataset(scenario, seed)
    out: dict[str, tuple[int, tuple[int, ...], float, bool]] = {}
    for name in algorithms:
        try:
            res = detect(data, config, name)
            out[name] = (res.k_hat, res.locations, res.runtime, False)
        except Exception:
            log.exception("seed %d: %s failed; recorded as incorrect", seed, name)
            out[name] = (-1, (), 0.0, True)
    return out


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, then SEGLINE_WORKERS, then 1."""
    if workers is not None:
        return max(int(workers), 1)
    env = os.environ.get("SEGLINE_WORKERS")
    if env:
        return max(int(env), 1)
    return 1


def run_replications(
    scenario: Scenario,
    algorithms: tuple[str, ...] | list[str],
    reps: int,
    base_seed: int,
    *,
    config: DetectorConfig | None = None,
    workers: int | None = None,
) -> ReplicationReport:
    """Run each algorithm on reps independent datasets and aggregate."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    algorithms = tuple(algorithms)
    config = config or DetectorConfig()
    workers = resolve_workers(workers)
    truth = scenario.truth
    k0 = truth.k0 if truth else 0
    targets = truth.locations if truth else ()

    jobs = [(scenario, algorithms, config, base_seed + r) for r in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=1))
    else:
        records = []
        for i, job in enumerate(jobs):
            records.append(_run_one(job))
            if (i + 1) % 10 == 0 or i + 1 == reps:
                log.info("scenario %s: %d/%d replications", scenario.name, i + 1, reps)

    summaries = []
    for name in algorithms:
        correct = 0
        failures = 0
        runtimes: list[float] = []
        hist: dict[int, int] = {}
        hits = {t: [0] * len(targets) for t in TOLERANCES}
        for rec in records:
            k_hat, locations, runtime, failed = rec[name]
            if failed:
                failures += 1
                continue
            hist[k_hat] = hist.get(k_hat, 0) + 1
            runtimes.append(runtime)
            if k_hat == k0:
                correct += 1
            for t in TOLERANCES:
                for j, a in enumerate(targets):
                    if hit_count(locations, a, t):
                        hits[t][j] += 1
        summaries.append(
            AlgorithmSummary(
                algorithm=name,
                correct_k=correct,
                failures=failures,
                mean_runtime_s=sum(runtimes) / len(runtimes) if runtimes else 0.0,
                k_hat_histogram=hist,
                hit_counts={t: tuple(v) for t, v in hits.items()},
            )
        )
    return ReplicationReport(
        scenario=scenario.name,
        reps=reps,
        base_seed=base_seed,
        truth_locations=targets,
        algorithms=tuple(summaries),
    )
