"""Robbins-Monro elicitation of a label's applicability boundaries.

Each label is probed with proportion stimuli (between 5 and 95 percent); the
responder accepts or rejects the label for the shown proportion. A stochastic
approximation chain steers the stimulus toward the level where acceptance
occurs with a target probability; four chains (targets 0.1 and 0.9 on each
ramp) locate the corners of the label's trapezoid.

The chains themselves are deterministic: all randomness lives in the
responder, so a fixed responder seed makes an entire elicitation
bit-reproducible, and chains for different labels can run concurrently.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Protocol, Sequence

from .fuzzy import UnitFuzzyNumber, membership
from .lexicon import Lexicon, LexiconError, LinguisticLabel

STIMULUS_MIN = 0.05
STIMULUS_MAX = 0.95
DEFAULT_STEP_C = 0.2
DEFAULT_TRIALS = 400
ORDER_TOLERANCE = 0.05

# corner index -> (ramp, acceptance target); rising chains estimate a and b,
# falling chains estimate c and d
CHAIN_PLAN: tuple[tuple[str, float], ...] = (
    ("rising", 0.1),
    ("rising", 0.9),
    ("falling", 0.9),
    ("falling", 0.1),
)


class ResponderDisconnected(RuntimeError):
    """A live responder went away mid-elicitation."""


class ElicitationAborted(RuntimeError):
    """Elicitation could not finish; carries the partial history."""

    def __init__(self, message: str, history: Sequence[tuple[float, bool]]):
        super().__init__(message)
        self.history = list(history)


class InconsistentResponderError(ValueError):
    """Chain results violate the corner ordering beyond tolerance."""


class CalibrationFailedError(ValueError):
    """Elicited labels cannot form a valid lexicon."""


class Responder(Protocol):
    def respond(self, label: str, stimulus: float, key: str, trial: int) -> bool:
        """Whether the label applies to the shown proportion."""


def _unit_uniform(seed: int, label: str, key: str, trial: int) -> float:
    digest = hashlib.sha256(f"{seed}|{label}|{key}|{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


@dataclass(frozen=True)
class SimulatedResponder:
    """Stands in for a human subject: accepts with probability mu_truth(x).

    Randomness is derived statelessly from (seed, label, chain, trial), so
    answers do not depend on the order in which chains interleave.
    """

    truth: Mapping[str, UnitFuzzyNumber]
    rng_seed: int = 0

    def respond(self, label: str, stimulus: float, key: str, trial: int) -> bool:
        p = membership(self.truth[label], stimulus)
        return _unit_uniform(self.rng_seed, label, key, trial) < p


@dataclass(frozen=True)
class CallbackResponder:
    """Adapter for a live answer source; raises ResponderDisconnected on failure."""

    callback: Callable[[str, float], bool]

    def respond(self, label: str, stimulus: float, key: str, trial: int) -> bool:
        return self.callback(label, stimulus)


@dataclass(frozen=True)
class RMChain:
    """State of one Robbins-Monro chain.

    ``direction`` is +1 when tracking a rising acceptance ramp and -1 on a
    falling ramp, where the stimulus must move with the response rather than
    against it. ``lo``/``hi`` confine the chain to its own side of the
    label's provisional median so it cannot latch onto the opposite ramp.
    """

    target: float
    step_c: float
    x: float
    n: int = 0
    history: tuple[tuple[float, bool], ...] = ()
    lo: float = STIMULUS_MIN
    hi: float = STIMULUS_MAX
    direction: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.target < 1.0:
            raise ValueError(f"target must lie in (0, 1), got {self.target}")
        if self.step_c <= 0.0:
            raise ValueError(f"step_c must be positive, got {self.step_c}")
        if not STIMULUS_MIN <= self.x <= STIMULUS_MAX:
            raise ValueError(f"stimulus must lie in [{STIMULUS_MIN}, {STIMULUS_MAX}], got {self.x}")


def rm_update(chain: RMChain, accepted: bool) -> RMChain:
    """Advance the chain one trial with harmonically decaying steps."""
    y = 1.0 if accepted else 0.0
    x_new = chain.x - chain.direction * (chain.step_c / (chain.n + 1)) * (y - chain.target)
    x_new = max(max(STIMULUS_MIN, chain.lo), min(min(STIMULUS_MAX, chain.hi), x_new))
    return replace(
        chain,
        x=x_new,
        n=chain.n + 1,
        history=chain.history + ((chain.x, accepted),),
    )


def chain_estimate(chain: RMChain) -> float:
    """Mean visited stimulus over the final quarter of trials."""
    if chain.n == 0:
        raise ValueError("chain has no completed trials")
    stimuli = [s for s, _ in chain.history]
    tail = max(1, math.ceil(0.25 * len(stimuli)))
    return sum(stimuli[-tail:]) / tail


def _pilot_grid(reps: int) -> list[float]:
    grid = [round(0.05 * i, 2) for i in range(1, 20)]
    return [x for x in grid for _ in range(reps)]


def _monotone_rates(rates: Sequence[float], counts: Sequence[int], increasing: bool) -> list[float]:
    """Isotonic (pool-adjacent-violators) smoothing of noisy acceptance rates."""
    vals = list(rates) if increasing else [-r for r in rates]
    blocks: list[list[float]] = []  # running [mean, weight, length]
    for v, w in zip(vals, counts):
        blocks.append([v, float(w), 1])
        while len(blocks) > 1 and blocks[-2][0] > blocks[-1][0] + 1e-12:
            m2, w2, l2 = blocks.pop()
            m1, w1, l1 = blocks.pop()
            blocks.append([(m1 * w1 + m2 * w2) / (w1 + w2), w1 + w2, l1 + l2])
    fitted: list[float] = []
    for m, _, length in blocks:
        fitted.extend([m] * int(length))
    return fitted if increasing else [-m for m in fitted]


@dataclass
class ElicitationQuery:
    label: str
    stimulus: float
    key: str
    trial: int


@dataclass
class ChainTranscript:
    ramp: str
    target: float
    stimuli: list[float]
    responses: list[bool]
    estimate: float

    def to_dict(self) -> dict:
        return {
            "ramp": self.ramp,
            "target": self.target,
            "stimuli": self.stimuli,
            "responses": self.responses,
            "estimate": self.estimate,
        }


@dataclass
class LabelTranscript:
    label: str
    provisional_median: float
    pilot_stimuli: list[float]
    pilot_responses: list[bool]
    chains: list[ChainTranscript]
    result: Optional[UnitFuzzyNumber] = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "provisional_median": self.provisional_median,
            "pilot": {"stimuli": self.pilot_stimuli, "responses": self.pilot_responses},
            "chains": [ch.to_dict() for ch in self.chains],
            "result": self.result.to_dict() if self.result is not None else None,
        }


class LabelElicitor:
    """Stepwise elicitation of one label: ask ``query()``, feed ``submit()``.

    Runs a coarse pilot sweep to place the provisional median, then the four
    corner chains. Keeping the stimulus schedule free of internal randomness
    means a service can persist and resume the elicitor at any point.
    """

    def __init__(
        self,
        label: str,
        trials: int = DEFAULT_TRIALS,
        step_c: float = DEFAULT_STEP_C,
        provisional_median: Optional[float] = None,
        pilot_reps: int = 5,
    ):
        if trials < 1:
            raise ValueError(f"trials must be >= 1, got {trials}")
        self.label = label
        self.trials = trials
        self.step_c = step_c
        self.pilot_plan = [] if provisional_median is not None else _pilot_grid(pilot_reps)
        self.pilot_accepts: list[bool] = []
        self.provisional_median = provisional_median
        self.chain_index = 0
        self.chain: Optional[RMChain] = None
        self.estimates: list[float] = []
        self.chain_records: list[ChainTranscript] = []
        self.result: Optional[UnitFuzzyNumber] = None
        self._advance()

    @property
    def done(self) -> bool:
        return self.result is not None

    def query(self) -> Optional[ElicitationQuery]:
        if self.done:
            return None
        if self.provisional_median is None:
            i = len(self.pilot_accepts)
            return ElicitationQuery(self.label, self.pilot_plan[i], "pilot", i)
        assert self.chain is not None
        ramp, target = CHAIN_PLAN[self.chain_index]
        return ElicitationQuery(self.label, self.chain.x, f"{ramp}:{target}", self.chain.n)

    def submit(self, accepted: bool) -> None:
        if self.done:
            raise ValueError("elicitation already finished")
        if self.provisional_median is None:
            self.pilot_accepts.append(accepted)
        else:
            assert self.chain is not None
            self.chain = rm_update(self.chain, accepted)
        self._advance()

    def _advance(self) -> None:
        if self.done:
            return
        if self.provisional_median is None:
            if len(self.pilot_accepts) < len(self.pilot_plan):
                return
            self.provisional_median = self._centroid()
            self._start_chain()
            return
        if self.chain is None:
            self._start_chain()
            return
        if self.chain.n >= self.trials:
            ramp, target = CHAIN_PLAN[self.chain_index]
            estimate = chain_estimate(self.chain)
            self.estimates.append(estimate)
            self.chain_records.append(
                ChainTranscript(
                    ramp,
                    target,
                    [s for s, _ in self.chain.history],
                    [acc for _, acc in self.chain.history],
                    estimate,
                )
            )
            self.chain_index += 1
            self.chain = None
            if self.chain_index >= len(CHAIN_PLAN):
                self._finish()
            else:
                self._start_chain()

    def _centroid(self) -> float:
        weight = sum(x for x, acc in zip(self.pilot_plan, self.pilot_accepts) if acc)
        count = sum(1 for acc in self.pilot_accepts if acc)
        return weight / count if count else 0.5

    def _start_chain(self) -> None:
        assert self.provisional_median is not None
        m = min(STIMULUS_MAX, max(STIMULUS_MIN, self.provisional_median))
        ramp, target = CHAIN_PLAN[self.chain_index]
        if ramp == "rising":
            lo, hi, direction = STIMULUS_MIN, m, 1
        else:
            lo, hi, direction = m, STIMULUS_MAX, -1
        x0, blo, bhi = self._pilot_start(ramp, target, lo, hi)
        self.chain = RMChain(
            target=target,
            step_c=self.step_c,
            x=x0,
            lo=max(lo, blo),
            hi=min(hi, bhi),
            direction=direction,
        )

    def _pilot_start(self, ramp: str, target: float, lo: float, hi: float) -> tuple[float, float, float]:
        """Locate the pilot bracket where acceptance crosses the chain's
        target; returns (start, bound_lo, bound_hi).

        A chain stranded in a flat response region creeps toward the ramp in
        steps of step_c*target/(n+1) from the always-reject side (or
        step_c*(1-target)/(n+1) from the always-accept side); harmonic decay
        means such a crawl covers only ~step_c*ln(n). Starting mid-bracket and
        bounding the chain to the bracket plus one grid step keeps both the
        start and any early large-step excursion within crawl range of the
        crossing.
        """
        if not self.pilot_accepts:
            return (lo + hi) / 2.0, lo, hi
        totals: dict[float, list[int]] = {}
        for x, acc in zip(self.pilot_plan, self.pilot_accepts):
            tally = totals.setdefault(x, [0, 0])
            tally[0] += int(acc)
            tally[1] += 1
        xs = sorted(x for x in totals if lo <= x <= hi)
        if not xs:
            return (lo + hi) / 2.0, lo, hi
        step = 0.05
        rates = _monotone_rates(
            [totals[x][0] / totals[x][1] for x in xs],
            [totals[x][1] for x in xs],
            increasing=(ramp == "rising"),
        )
        if ramp == "falling":
            xs, rates = xs[::-1], rates[::-1]
        # rates now ascend along the walk; the crossing sits between the last
        # point at-or-below target and the first point above it
        below = [x for x, r in zip(xs, rates) if r <= target]
        above = [x for x, r in zip(xs, rates) if r > target]
        if below and above:
            x0 = (below[-1] + above[0]) / 2.0
            bracket = (below[-1], above[0])
        elif below:
            x0 = below[-1]
            bracket = (x0, x0)
        else:
            x0 = above[0]
            bracket = (x0, x0)
        b_lo, b_hi = min(bracket) - step, max(bracket) + step
        return min(hi, max(lo, x0)), b_lo, b_hi

    def _finish(self) -> None:
        ordered = list(self.estimates)
        for left, right in zip(ordered, ordered[1:]):
            if left - right > ORDER_TOLERANCE:
                raise InconsistentResponderError(
                    f"label {self.label!r}: corner estimates {ordered} out of order "
                    f"beyond tolerance {ORDER_TOLERANCE}"
                )
        # the two crossings measured on each ramp determine the ramp line;
        # the corners sit where that line reaches applicability 0 and 1
        x10r, x90r, x90f, x10f = ordered
        a = x10r - (x90r - x10r) / 8.0
        b = x90r + (x90r - x10r) / 8.0
        c = x90f - (x10f - x90f) / 8.0
        d = x10f + (x10f - x90f) / 8.0
        a, b, c, d = sorted(min(1.0, max(0.0, v)) for v in (a, b, c, d))
        self.result = UnitFuzzyNumber(a, b, c, d)

    def transcript(self) -> LabelTranscript:
        assert self.provisional_median is not None
        return LabelTranscript(
            self.label,
            self.provisional_median,
            list(self.pilot_plan[: len(self.pilot_accepts)]),
            list(self.pilot_accepts),
            list(self.chain_records),
            self.result,
        )

    def to_state(self) -> dict:
        state = {
            "label": self.label,
            "trials": self.trials,
            "step_c": self.step_c,
            "pilot_plan": self.pilot_plan,
            "pilot_accepts": self.pilot_accepts,
            "provisional_median": self.provisional_median,
            "chain_index": self.chain_index,
            "estimates": self.estimates,
            "chains": [ch.to_dict() for ch in self.chain_records],
            "result": self.result.to_dict() if self.result else None,
        }
        if self.chain is not None:
            state["chain"] = {
                "target": self.chain.target,
                "step_c": self.chain.step_c,
                "x": self.chain.x,
                "n": self.chain.n,
                "history": [[s, acc] for s, acc in self.chain.history],
                "lo": self.chain.lo,
                "hi": self.chain.hi,
                "direction": self.chain.direction,
            }
        return state

    @classmethod
    def from_state(cls, state: dict) -> "LabelElicitor":
        obj = cls.__new__(cls)
        obj.label = state["label"]
        obj.trials = state["trials"]
        obj.step_c = state["step_c"]
        obj.pilot_plan = list(state["pilot_plan"])
        obj.pilot_accepts = list(state["pilot_accepts"])
        obj.provisional_median = state["provisional_median"]
        obj.chain_index = state["chain_index"]
        obj.estimates = list(state["estimates"])
        obj.chain_records = [
            ChainTranscript(ch["ramp"], ch["target"], ch["stimuli"], ch["responses"], ch["estimate"])
            for ch in state["chains"]
        ]
        obj.result = UnitFuzzyNumber.from_dict(state["result"]) if state["result"] else None
        chain = state.get("chain")
        obj.chain = (
            RMChain(
                target=chain["target"],
                step_c=chain["step_c"],
                x=chain["x"],
                n=chain["n"],
                history=tuple((s, acc) for s, acc in chain["history"]),
                lo=chain["lo"],
                hi=chain["hi"],
                direction=chain["direction"],
            )
            if chain
            else None
        )
        return obj


def _drive(elicitor: LabelElicitor, responder: Responder) -> None:
    while not elicitor.done:
        query = elicitor.query()
        assert query is not None
        try:
            accepted = responder.respond(query.label, query.stimulus, query.key, query.trial)
        except ResponderDisconnected as exc:
            history = elicitor.chain.history if elicitor.chain is not None else ()
            raise ElicitationAborted(
                f"responder disconnected while eliciting {query.label!r}", history
            ) from exc
        elicitor.submit(accepted)


def run_chain(
    responder: Responder,
    label: str,
    target: float,
    ramp: str = "rising",
    trials: int = DEFAULT_TRIALS,
    step_c: float = DEFAULT_STEP_C,
    lo: float = STIMULUS_MIN,
    hi: float = STIMULUS_MAX,
    x0: Optional[float] = None,
) -> float:
    """Run one chain to completion and return its tail-averaged estimate."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    direction = 1 if ramp == "rising" else -1
    chain = RMChain(
        target=target,
        step_c=step_c,
        x=x0 if x0 is not None else (lo + hi) / 2.0,
        lo=lo,
        hi=hi,
        direction=direction,
    )
    key = f"{ramp}:{target}"
    for trial in range(trials):
        try:
            accepted = responder.respond(label, chain.x, key, trial)
        except ResponderDisconnected as exc:
            raise ElicitationAborted(
                f"responder disconnected while eliciting {label!r}", chain.history
            ) from exc
        chain = rm_update(chain, accepted)
    return chain_estimate(chain)


def elicit_label(
    responder: Responder,
    label: str,
    trials: int = DEFAULT_TRIALS,
    step_c: float = DEFAULT_STEP_C,
    provisional_median: Optional[float] = None,
    pilot_reps: int = 5,
) -> UnitFuzzyNumber:
    """Elicit a label's trapezoid via four corner chains."""
    elicitor = LabelElicitor(label, trials, step_c, provisional_median, pilot_reps)
    _drive(elicitor, responder)
    assert elicitor.result is not None
    return elicitor.result


def elicit_label_with_transcript(
    responder: Responder,
    label: str,
    trials: int = DEFAULT_TRIALS,
    step_c: float = DEFAULT_STEP_C,
    provisional_median: Optional[float] = None,
    pilot_reps: int = 5,
) -> tuple[UnitFuzzyNumber, LabelTranscript]:
    elicitor = LabelElicitor(label, trials, step_c, provisional_median, pilot_reps)
    _drive(elicitor, responder)
    assert elicitor.result is not None
    return elicitor.result, elicitor.transcript()


def elicit_lexicon(
    responder: Responder,
    label_names: Sequence[str],
    owner: str = "subject",
    trials: int = DEFAULT_TRIALS,
    step_c: float = DEFAULT_STEP_C,
    pilot_reps: int = 5,
) -> Lexicon:
    """Elicit every label and assemble them into a median-ordered lexicon."""
    if len(label_names) < 2:
        raise ValueError(f"need at least 2 labels, got {len(label_names)}")
    if len(set(label_names)) != len(label_names):
        raise ValueError("label names must be unique")
    labels = [
        LinguisticLabel(name, elicit_label(responder, name, trials, step_c, None, pilot_reps))
        for name in label_names
    ]
    labels.sort(key=lambda lab: (lab.meaning.b + lab.meaning.c) / 2.0)
    try:
        return Lexicon(owner, tuple(labels))
    except LexiconError as exc:
        raise CalibrationFailedError(f"elicited labels do not form a valid lexicon: {exc}") from exc


class LexiconElicitor:
    """Sequential label elicitors behind one query/submit interface."""

    def __init__(
        self,
        label_names: Sequence[str],
        owner: str = "subject",
        trials: int = DEFAULT_TRIALS,
        step_c: float = DEFAULT_STEP_C,
        pilot_reps: int = 5,
    ):
        if len(label_names) < 2:
            raise ValueError(f"need at least 2 labels, got {len(label_names)}")
        if len(set(label_names)) != len(label_names):
            raise ValueError("label names must be unique")
        self.owner = owner
        self.label_names = list(label_names)
        self.trials = trials
        self.step_c = step_c
        self.pilot_reps = pilot_reps
        self.current = 0
        self.elicitor = LabelElicitor(self.label_names[0], trials, step_c, None, pilot_reps)
        self.meanings: list[UnitFuzzyNumber] = []

    @property
    def done(self) -> bool:
        return self.current >= len(self.label_names)

    def query(self) -> Optional[ElicitationQuery]:
        return None if self.done else self.elicitor.query()

    def submit(self, accepted: bool) -> None:
        if self.done:
            raise ValueError("elicitation already finished")
        self.elicitor.submit(accepted)
        if self.elicitor.done:
            assert self.elicitor.result is not None
            self.meanings.append(self.elicitor.result)
            self.current += 1
            if not self.done:
                self.elicitor = LabelElicitor(
                    self.label_names[self.current], self.trials, self.step_c, None, self.pilot_reps
                )

    def result(self) -> Lexicon:
        if not self.done:
            raise ValueError("elicitation not finished")
        labels = [
            LinguisticLabel(name, meaning) for name, meaning in zip(self.label_names, self.meanings)
        ]
        labels.sort(key=lambda lab: (lab.meaning.b + lab.meaning.c) / 2.0)
        try:
            return Lexicon(self.owner, tuple(labels))
        except LexiconError as exc:
            raise CalibrationFailedError(
                f"elicited labels do not form a valid lexicon: {exc}"
            ) from exc

    def to_state(self) -> dict:
        return {
            "owner": self.owner,
            "label_names": self.label_names,
            "trials": self.trials,
            "step_c": self.step_c,
            "pilot_reps": self.pilot_reps,
            "current": self.current,
            "elicitor": self.elicitor.to_state() if not self.done else None,
            "meanings": [m.to_dict() for m in self.meanings],
        }

    @classmethod
    def from_state(cls, state: dict) -> "LexiconElicitor":
        obj = cls.__new__(cls)
        obj.owner = state["owner"]
        obj.label_names = list(state["label_names"])
        obj.trials = state["trials"]
        obj.step_c = state["step_c"]
        obj.pilot_reps = state["pilot_reps"]
        obj.current = state["current"]
        obj.meanings = [UnitFuzzyNumber.from_dict(m) for m in state["meanings"]]
        if state["elicitor"] is not None:
            obj.elicitor = LabelElicitor.from_state(state["elicitor"])
        return obj
