"""Probability-revision benchmark against the Bayesian optimum.

A sequence of draws comes from one of two bins with complementary success
ratios; after each draw a responder states the probability that the favorable
bin is the source. The Bayesian posterior is the normative standard. Three
simulated responders are compared: an exact Bayesian, a conservative reviser
who under-updates in log-odds space, and a verbal responder who reports
words from a lexicon instead of numbers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .fuzzy import UnitFuzzyNumber, crisp, median
from .lexicon import Lexicon, nearest_label

OBSERVATIONS = ("A", "B")


@dataclass(frozen=True)
class BenchConfig:
    """Bin composition and sequence layout of one benchmark run."""

    success_ratio: float = 0.7
    draws: int = 20
    prior: float = 0.5
    trials: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.success_ratio < 1.0:
            raise ValueError(f"success_ratio must lie in (0, 1), got {self.success_ratio}")
        if not 0.0 < self.prior < 1.0:
            raise ValueError(f"prior must lie in (0, 1), got {self.prior}")
        if self.draws < 1:
            raise ValueError(f"draws must be >= 1, got {self.draws}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    def to_dict(self) -> dict:
        return {
            "success_ratio": self.success_ratio,
            "draws": self.draws,
            "prior": self.prior,
            "trials": self.trials,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        return cls(
            success_ratio=float(data.get("success_ratio", 0.7)),
            draws=int(data.get("draws", 20)),
            prior=float(data.get("prior", 0.5)),
            trials=int(data.get("trials", 200)),
            seed=int(data.get("seed", 0)),
        )


def bayes_posterior(config: BenchConfig, observations: Sequence[str]) -> float:
    """Posterior probability of the A bin after the given draws.

    Only the net count of A minus B draws matters: posterior odds are
    prior odds times (r/(1-r))^d.
    """
    pos = neg = 0
    for obs in observations:
        if obs == "A":
            pos += 1
        elif obs == "B":
            neg += 1
        else:
            raise ValueError(f"observations must be 'A' or 'B', got {obs!r}")
    r = config.success_ratio
    num = config.prior * r**pos * (1.0 - r) ** neg
    alt = (1.0 - config.prior) * (1.0 - r) ** pos * r**neg
    if num + alt > 0.0 and not math.isinf(num + alt):
        return num / (num + alt)
    # extremely long sequences: fall back to log-odds
    d = pos - neg
    log_odds = math.log(config.prior / (1.0 - config.prior)) + d * math.log(r / (1.0 - r))
    return _sigmoid(log_odds)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-min(x, 745.0)))
    e = math.exp(max(x, -745.0))
    return e / (1.0 + e)


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


@dataclass(frozen=True)
class Bayesian:
    name: str = "bayesian"


@dataclass(frozen=True)
class Conservative:
    """Under-revises: reported log-odds are kappa times the Bayesian ones."""

    kappa: float = 0.5

    def __post_init__(self) -> None:
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def name(self) -> str:
        return f"conservative({self.kappa:g})"


@dataclass(frozen=True)
class Verbal:
    """Reports the nearest label's fuzzy meaning instead of a number."""

    lexicon: Lexicon

    @property
    def name(self) -> str:
        return f"verbal({self.lexicon.owner})"


ResponderKind = Union[Bayesian, Conservative, Verbal]


@dataclass(frozen=True)
class RevisionStep:
    observation: str
    bayes: float
    reported: UnitFuzzyNumber
    label: Optional[str] = None

    @property
    def reported_median(self) -> float:
        return median(self.reported)


@dataclass(frozen=True)
class RevisionTrace:
    kind: str
    steps: tuple[RevisionStep, ...]


def draw_observations(config: BenchConfig, trial: int) -> list[str]:
    """Deterministic draw sequence for one trial of the benchmark."""
    rng = np.random.default_rng([config.seed, trial])
    return ["A" if u < config.success_ratio else "B" for u in rng.uniform(size=config.draws)]


def _report(kind: ResponderKind, bayes: float) -> tuple[UnitFuzzyNumber, Optional[str]]:
    if isinstance(kind, Bayesian):
        return crisp(bayes), None
    if isinstance(kind, Conservative):
        if kind.kappa == 1.0:
            # kappa 1 is Bayesian revision; skip the log-odds round trip so
            # the equivalence holds bit-exactly
            return crisp(bayes), None
        return crisp(_sigmoid(kind.kappa * _logit(bayes))), None
    if isinstance(kind, Verbal):
        label = nearest_label(crisp(bayes), kind.lexicon)
        return label.meaning, label.name
    raise TypeError(f"unknown responder kind {kind!r}")


def simulate_responder(
    kind: ResponderKind,
    config: BenchConfig,
    trial: int = 0,
    observations: Optional[Sequence[str]] = None,
) -> RevisionTrace:
    """Run one revision sequence and record what the responder reports.

    ``observations`` overrides the drawn sequence, for fixed-evidence tests.
    """
    obs = list(observations) if observations is not None else draw_observations(config, trial)
    steps = []
    for i in range(len(obs)):
        bayes = bayes_posterior(config, obs[: i + 1])
        reported, label = _report(kind, bayes)
        steps.append(RevisionStep(obs[i], bayes, reported, label))
    return RevisionTrace(kind=_kind_name(kind), steps=tuple(steps))


def _kind_name(kind: ResponderKind) -> str:
    return kind.name


def conservatism_coefficient(trace: RevisionTrace) -> float:
    """Through-origin least-squares slope of reported vs Bayesian log-odds.

    1.0 is Bayesian revision; values below 1 quantify conservatism. Steps
    whose posterior or reported median sits on 0 or 1 carry no finite
    log-odds and are skipped.
    """
    xs = []
    ys = []
    for step in trace.steps:
        m = step.reported_median
        if 0.0 < step.bayes < 1.0 and 0.0 < m < 1.0:
            xs.append(_logit(step.bayes))
            ys.append(_logit(m))
    if len(xs) < 2:
        raise ValueError("need at least 2 steps with posteriors strictly inside (0, 1)")
    sxx = sum(x * x for x in xs)
    if sxx == 0.0:
        raise ValueError("conservatism undefined: all Bayesian log-odds are zero")
    return sum(x * y for x, y in zip(xs, ys)) / sxx


@dataclass(frozen=True)
class BenchmarkRow:
    step: int
    kind: str
    mean_abs_deviation: float


@dataclass(frozen=True)
class BenchmarkResult:
    config: BenchConfig
    rows: tuple[BenchmarkRow, ...]

    def curve(self, kind_name: str) -> list[float]:
        """Per-step mean absolute deviation for one responder kind."""
        values = [row.mean_abs_deviation for row in self.rows if row.kind == kind_name]
        if not values:
            raise KeyError(f"no benchmark rows for kind {kind_name!r}")
        return values

    def kinds(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.kind, None)
        return tuple(seen)


def run_benchmark(config: BenchConfig, kinds: Iterable[ResponderKind]) -> BenchmarkResult:
    """Mean |reported median - Bayesian posterior| per step for each kind.

    All kinds see the same drawn sequences, so differences between rows come
    from the reporting policies alone.
    """
    kind_list = list(kinds)
    if not kind_list:
        raise ValueError("need at least one responder kind")
    totals = np.zeros((len(kind_list), config.draws))
    for trial in range(config.trials):
        obs = draw_observations(config, trial)
        for k, kind in enumerate(kind_list):
            trace = simulate_responder(kind, config, observations=obs)
            for i, step in enumerate(trace.steps):
                totals[k, i] += abs(step.reported_median - step.bayes)
    totals /= config.trials
    rows = [
        BenchmarkRow(step=i + 1, kind=kind.name, mean_abs_deviation=float(totals[k, i]))
        for i in range(config.draws)
        for k, kind in enumerate(kind_list)
    ]
    return BenchmarkResult(config=config, rows=tuple(rows))


def write_benchmark_csv(result: BenchmarkResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["step", "kind", "mean_abs_deviation"])
        for row in result.rows:
            writer.writerow([row.step, row.kind, repr(row.mean_abs_deviation)])
