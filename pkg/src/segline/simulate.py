"""Synthetic segmented-regression sequences for the Monte Carlo harness.

A scenario fixes the sequence length, base coefficients, predictor law and
change schedule; `simulate_dataset` turns one (scenario, seed) pair into a
reproducible Dataset. Streams use the counter-based Philox generator so
replication r of a study is seeded independently as base_seed + r without
any serial draw order to preserve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import ChangePointTruth, Dataset

__all__ = [
    "Scenario",
    "SCENARIO_NAMES",
    "scenario_none",
    "scenario_cpl1",
    "scenario_cpl2",
    "scenario_from_json",
    "build_scenario",
    "simulate_dataset",
]

_DELTA_ODD = (0.5, -0.7, 0.4)
_DELTA_EVEN = (-0.5, 0.7, -0.4)


@dataclass(frozen=True)
class Scenario:
    """A simulation design: y_i = x_i' beta(i) + eps_i.

    The first predictor column is the constant 1; the remaining q-1 columns
    are i.i.d. normal with mean x_mean and variance x_var. Coefficients
    start at beta0 and add delta_j after location a_j (rows a_j+1 onward).
    """

    name: str
    n: int
    beta0: tuple[float, ...]
    locations: tuple[int, ...] = ()
    deltas: tuple[tuple[float, ...], ...] = ()
    noise_sd: float = 1.0
    x_mean: float = 1.0
    x_var: float = 2.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if len(self.beta0) < 1:
            raise ValueError("beta0 must be nonempty")
        if len(self.locations) != len(self.deltas):
            raise ValueError("locations and deltas must have equal length")
        if any(len(d) != len(self.beta0) for d in self.deltas):
            raise ValueError("every delta must match the length of beta0")
        if any(not (1 < a < self.n) for a in self.locations):
            raise ValueError("change locations must lie strictly inside (1, n)")
        if any(b >= a for a, b in zip(self.locations[1:], self.locations[:-1])):
            raise ValueError("change locations must be strictly increasing")
        if self.noise_sd <= 0 or self.x_var <= 0:
            raise ValueError("noise_sd and x_var must be positive")

    @property
    def q(self) -> int:
        return len(self.beta0)

    @property
    def truth(self) -> ChangePointTruth | None:
        if not self.locations:
            return None
        return ChangePointTruth(locations=self.locations, deltas=self.deltas, n=self.n)


def _alternating_deltas(k: int) -> tuple[tuple[float, ...], ...]:
    return tuple(_DELTA_ODD if i % 2 == 0 else _DELTA_EVEN for i in range(k))


def scenario_none(n: int = 5000) -> Scenario:
    """Null sequence: no change, beta0 = (1, 1.4, 0.7)."""
    return Scenario(name="none", n=n, beta0=(1.0, 1.4, 0.7))


def scenario_cpl1() -> Scenario:
    """Nine equally spaced changes at 500, 1000, ..., 4500 with alternating jumps."""
    locations = tuple(500 * i for i in range(1, 10))
    return Scenario(
        name="cpl1",
        n=5000,
        beta0=(1.0, 1.4, 0.7),
        locations=locations,
        deltas=_alternating_deltas(9),
    )


def scenario_cpl2() -> Scenario:
    """Nine unevenly spaced changes with the same alternating jumps."""
    locations = (503, 923, 1471, 2077, 2334, 2890, 3410, 3909, 4546)
    return Scenario(
        name="cpl2",
        n=5000,
        beta0=(1.0, 1.4, 0.7),
        locations=locations,
        deltas=_alternating_deltas(9),
    )


SCENARIO_NAMES = ("none", "cpl1", "cpl2")


def scenario_from_json(path: str | Path) -> Scenario:
    """Load a scenario from a JSON file with the Scenario field names."""
    raw = json.loads(Path(path).read_text())
    try:
        return Scenario(
            name=str(raw.get("name", Path(path).stem)),
            n=int(raw["n"]),
            beta0=tuple(float(v) for v in raw["beta0"]),
            locations=tuple(int(a) for a in raw.get("locations", ())),
            deltas=tuple(tuple(float(v) for v in d) for d in raw.get("deltas", ())),
            noise_sd=float(raw.get("noise_sd", 1.0)),
            x_mean=float(raw.get("x_mean", 1.0)),
            x_var=float(raw.get("x_var", 2.0)),
        )
    except KeyError as exc:
        raise ValueError(f"scenario file {path} missing field {exc}") from exc


def build_scenario(spec: str) -> Scenario:
    """Resolve a scenario by built-in name or JSON file path."""
    if spec == "none":
        return scenario_none()
    if spec == "cpl1":
        return scenario_cpl1()
    if spec == "cpl2":
        return scenario_cpl2()
    path = Path(spec)
    if path.exists():
        return scenario_from_json(path)
    raise ValueError(
        f"unknown scenario {spec!r}: expected one of {SCENARIO_NAMES} or a JSON file"
    )


def simulate_dataset(
    scenario: Scenario, seed: int
) -> tuple[Dataset, ChangePointTruth | None]:
    """Draw one sequence from the scenario, reproducibly from the seed."""
    rng = np.random.Generator(np.random.Philox(seed))
    n, q = scenario.n, scenario.q
    x = np.empty((n, q))
    x[:, 0] = 1.0
    if q > 1:
        x[:, 1:] = rng.normal(
            scenario.x_mean, np.sqrt(scenario.x_var), size=(n, q - 1)
        )
    eps = rng.normal(0.0, scenario.noise_sd, size=n)

    beta = np.tile(np.asarray(scenario.beta0), (n, 1))
    for a, d in zip(scenario.locations, scenario.deltas):
        beta[a:] += np.asarray(d)
    y = np.einsum("ij,ij->i", x, beta) + eps
    return Dataset(x=x, y=y), scenario.truth
