"""Toulmin-style argument graphs evaluated by fuzzy syllogistic propagation.

An argument holds a claim, grounds with fuzzy credibilities, quantified
warrants linking grounds to the claim, optional backings, and rebuttals.
Credibility propagates multiplicatively along each warrant line; lines
aggregate into the claim credibility, which is then verbalized against an
output lexicon. Quantifier words carry fuzzy proportions on [0,1] (the
0..100% scale divided by 100) and may be ambiguous, in which case
evaluation stops and reports the pending senses for interactive resolution.

The reference structure is grounds -> warrants -> claim with no other edge
kinds, so graphs are acyclic by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .fuzzy import (
    UnitFuzzyNumber,
    complement,
    distance,
    fuzzy_max,
    fuzzy_min,
    median,
    mul,
    sub_bounded,
)
from .lexicon import Lexicon, LinguisticLabel, nearest_label

DEFAULT_AGREEMENT_TOLERANCE = 0.15
DEFAULT_OVERLAP_THRESHOLD = 0.5


class UnknownQuantifierError(KeyError):
    """The quantifier term has no stored senses; it must be defined first."""


class GraphStructureError(ValueError):
    """The argument graph violates a structural invariant."""


@dataclass(frozen=True)
class QuantifierSense:
    """One reading of a quantifier word as a fuzzy proportion."""

    term: str
    description: str
    meaning: UnitFuzzyNumber


@dataclass(frozen=True)
class QuantifierLexicon:
    """Stored quantifier senses; a term with several senses is ambiguous."""

    senses: tuple[QuantifierSense, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "senses", tuple(self.senses))

    def terms(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for sense in self.senses:
            seen.setdefault(sense.term, None)
        return tuple(seen)

    def senses_for(self, term: str) -> tuple[QuantifierSense, ...]:
        return tuple(s for s in self.senses if s.term == term)

    def with_sense(self, sense: QuantifierSense) -> "QuantifierLexicon":
        return QuantifierLexicon(self.senses + (sense,))

    def to_dict(self) -> dict:
        return {
            "senses": [
                {"term": s.term, "description": s.description, "meaning": s.meaning.to_dict()}
                for s in self.senses
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "QuantifierLexicon":
        return cls(
            tuple(
                QuantifierSense(
                    str(item["term"]),
                    str(item.get("description", "")),
                    UnitFuzzyNumber.from_dict(item["meaning"]),
                )
                for item in data.get("senses", [])
            )
        )


def default_quantifier_lexicon() -> QuantifierLexicon:
    """Starter vocabulary; "usually" is deliberately ambiguous."""
    def q(term, description, a, b, c, d):
        return QuantifierSense(term, description, UnitFuzzyNumber(a, b, c, d))

    return QuantifierLexicon(
        (
            q("never", "a vanishing share of cases", 0.0, 0.0, 0.02, 0.05),
            q("seldom", "clearly a minority of cases", 0.05, 0.1, 0.2, 0.3),
            q("sometimes", "a substantial minority", 0.2, 0.3, 0.4, 0.5),
            q("often", "more than half the cases", 0.5, 0.6, 0.7, 0.8),
            q("usually", "most of the time", 0.65, 0.75, 0.85, 0.95),
            q("usually", "nearly without exception", 0.85, 0.9, 0.95, 1.0),
            q("always", "every case", 0.95, 1.0, 1.0, 1.0),
        )
    )


@dataclass(frozen=True)
class Resolved:
    meaning: UnitFuzzyNumber


@dataclass(frozen=True)
class Ambiguous:
    """Several stored senses; ordered by median, least to greatest."""

    term: str
    senses: tuple[QuantifierSense, ...]


def lookup_quantifier(term: str, qlex: QuantifierLexicon) -> Union[Resolved, Ambiguous]:
    senses = qlex.senses_for(term)
    if not senses:
        raise UnknownQuantifierError(term)
    if len(senses) == 1:
        return Resolved(senses[0].meaning)
    ordered = tuple(sorted(senses, key=lambda s: median(s.meaning)))
    return Ambiguous(term, ordered)


def resolve_ambiguity(
    pending: Ambiguous, choice: Union[int, UnitFuzzyNumber]
) -> Resolved:
    """Pick one stored sense by index, or supply a custom trapezoid."""
    if isinstance(choice, UnitFuzzyNumber):
        return Resolved(choice)
    if isinstance(choice, bool) or not isinstance(choice, int):
        raise TypeError(f"choice must be a sense index or UnitFuzzyNumber, got {choice!r}")
    if not 0 <= choice < len(pending.senses):
        raise IndexError(
            f"sense index {choice} out of range for {len(pending.senses)} senses of {pending.term!r}"
        )
    return Resolved(pending.senses[choice].meaning)


def chain(q1: UnitFuzzyNumber, q2: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Multiplicative chaining syllogism for fuzzy proportions."""
    return mul(q1, q2)


@dataclass(frozen=True)
class Ground:
    ref: str
    statement: str
    credibility: UnitFuzzyNumber
    support: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "support", tuple(self.support))


@dataclass(frozen=True)
class Warrant:
    """An if-grounds-then-claim rule, qualified by a quantifier.

    The quantifier is either a term to look up or an explicit fuzzy number.
    """

    ref: str
    ground_refs: tuple[str, ...]
    quantifier: Union[str, UnitFuzzyNumber]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ground_refs", tuple(self.ground_refs))
        if not self.ground_refs:
            raise GraphStructureError(f"warrant {self.ref!r} references no grounds")


@dataclass(frozen=True)
class Backing:
    warrant_ref: str
    reliability: UnitFuzzyNumber


@dataclass(frozen=True)
class Rebuttal:
    """Discounts one warrant line, or the aggregated claim."""

    target_kind: str  # "warrant" or "claim"
    target_ref: Optional[str]
    strength: UnitFuzzyNumber

    def __post_init__(self) -> None:
        if self.target_kind not in ("warrant", "claim"):
            raise GraphStructureError(f"rebuttal target_kind must be 'warrant' or 'claim', got {self.target_kind!r}")
        if self.target_kind == "claim" and self.target_ref is not None:
            raise GraphStructureError("claim rebuttals carry no target_ref")
        if self.target_kind == "warrant" and not self.target_ref:
            raise GraphStructureError("warrant rebuttals need a target_ref")


@dataclass(frozen=True)
class ArgumentGraph:
    claim: str
    grounds: tuple[Ground, ...]
    warrants: tuple[Warrant, ...]
    backings: tuple[Backing, ...] = ()
    rebuttals: tuple[Rebuttal, ...] = ()
    qualifier: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "grounds", tuple(self.grounds))
        object.__setattr__(self, "warrants", tuple(self.warrants))
        object.__setattr__(self, "backings", tuple(self.backings))
        object.__setattr__(self, "rebuttals", tuple(self.rebuttals))
        if not self.grounds:
            raise GraphStructureError("an argument needs at least one ground")
        if not self.warrants:
            raise GraphStructureError("an argument needs at least one warrant")
        ground_refs = [g.ref for g in self.grounds]
        if len(set(ground_refs)) != len(ground_refs):
            raise GraphStructureError("duplicate ground refs")
        warrant_refs = [w.ref for w in self.warrants]
        if len(set(warrant_refs)) != len(warrant_refs):
            raise GraphStructureError("duplicate warrant refs")
        known_grounds = set(ground_refs)
        known_warrants = set(warrant_refs)
        for w in self.warrants:
            missing = [r for r in w.ground_refs if r not in known_grounds]
            if missing:
                raise GraphStructureError(f"warrant {w.ref!r} references unknown grounds {missing}")
        backed = set()
        for b in self.backings:
            if b.warrant_ref not in known_warrants:
                raise GraphStructureError(f"backing references unknown warrant {b.warrant_ref!r}")
            if b.warrant_ref in backed:
                raise GraphStructureError(f"warrant {b.warrant_ref!r} has more than one backing")
            backed.add(b.warrant_ref)
        for r in self.rebuttals:
            if r.target_kind == "warrant" and r.target_ref not in known_warrants:
                raise GraphStructureError(f"rebuttal references unknown warrant {r.target_ref!r}")


@dataclass(frozen=True)
class EvalConfig:
    """Aggregation and rebuttal operators; defaults follow the main design."""

    aggregation: str = "max"  # "max" | "min" across warrant lines
    rebuttal_style: str = "complement"  # "complement" | "bounded-difference"

    def __post_init__(self) -> None:
        if self.aggregation not in ("max", "min"):
            raise ValueError(f"aggregation must be 'max' or 'min', got {self.aggregation!r}")
        if self.rebuttal_style not in ("complement", "bounded-difference"):
            raise ValueError(
                f"rebuttal_style must be 'complement' or 'bounded-difference', got {self.rebuttal_style!r}"
            )


@dataclass(frozen=True)
class TraceStep:
    op: str
    target: str
    result: UnitFuzzyNumber


@dataclass(frozen=True)
class Evaluation:
    claim_credibility: UnitFuzzyNumber
    lines: tuple[tuple[str, UnitFuzzyNumber], ...]
    label: LinguisticLabel
    trace: tuple[TraceStep, ...]

    def line(self, warrant_ref: str) -> UnitFuzzyNumber:
        for ref, credibility in self.lines:
            if ref == warrant_ref:
                return credibility
        raise KeyError(warrant_ref)


@dataclass(frozen=True)
class PendingQuantifier:
    warrant_ref: str
    ambiguous: Ambiguous


@dataclass(frozen=True)
class PendingAmbiguities:
    """Evaluation halted: these warrants need their quantifier disambiguated."""

    items: tuple[PendingQuantifier, ...]


def _discount(value: UnitFuzzyNumber, strength: UnitFuzzyNumber, config: EvalConfig) -> UnitFuzzyNumber:
    if config.rebuttal_style == "complement":
        return mul(value, complement(strength))
    return sub_bounded(value, strength)


def evaluate(
    graph: ArgumentGraph,
    qlex: QuantifierLexicon,
    output_lexicon: Lexicon,
    config: EvalConfig = EvalConfig(),
    resolutions: Optional[Mapping[str, UnitFuzzyNumber]] = None,
) -> Union[Evaluation, PendingAmbiguities]:
    """Propagate credibility through the graph, or report pending ambiguities.

    Per warrant: quantifier times the fuzzy-min of its ground credibilities,
    times the backing reliability (absent backing means no discount), then
    any warrant rebuttals. Lines aggregate into the claim, claim rebuttals
    discount the aggregate, and the result is labeled in ``output_lexicon``.

    ``resolutions`` maps warrant refs to already-chosen quantifier meanings
    for terms that are ambiguous in ``qlex``.
    """
    chosen = dict(resolutions or {})
    meanings: dict[str, UnitFuzzyNumber] = {}
    pending = []
    for w in graph.warrants:
        if isinstance(w.quantifier, UnitFuzzyNumber):
            meanings[w.ref] = w.quantifier
        elif w.ref in chosen:
            meanings[w.ref] = chosen[w.ref]
        else:
            looked = lookup_quantifier(w.quantifier, qlex)
            if isinstance(looked, Resolved):
                meanings[w.ref] = looked.meaning
            else:
                pending.append(PendingQuantifier(w.ref, looked))
    if pending:
        return PendingAmbiguities(tuple(pending))

    ground_by = {g.ref: g for g in graph.grounds}
    backing_by = {b.warrant_ref: b.reliability for b in graph.backings}
    trace: list[TraceStep] = []
    lines: list[tuple[str, UnitFuzzyNumber]] = []
    for w in graph.warrants:
        credibilities = [ground_by[r].credibility for r in w.ground_refs]
        base = credibilities[0]
        for cred in credibilities[1:]:
            base = fuzzy_min(base, cred)
        trace.append(TraceStep("grounds-min", w.ref, base))
        line = chain(meanings[w.ref], base)
        trace.append(TraceStep("chain-quantifier", w.ref, line))
        backing = backing_by.get(w.ref)
        if backing is not None:
            line = chain(line, backing)
            trace.append(TraceStep("chain-backing", w.ref, line))
        for rebuttal in graph.rebuttals:
            if rebuttal.target_kind == "warrant" and rebuttal.target_ref == w.ref:
                line = _discount(line, rebuttal.strength, config)
                trace.append(TraceStep(f"rebut-{config.rebuttal_style}", w.ref, line))
        lines.append((w.ref, line))

    aggregate = fuzzy_max if config.aggregation == "max" else fuzzy_min
    claim = lines[0][1]
    for _, line in lines[1:]:
        claim = aggregate(claim, line)
    trace.append(TraceStep(f"aggregate-{config.aggregation}", "claim", claim))
    for rebuttal in graph.rebuttals:
        if rebuttal.target_kind == "claim":
            claim = _discount(claim, rebuttal.strength, config)
            trace.append(TraceStep(f"rebut-{config.rebuttal_style}", "claim", claim))
    label = nearest_label(claim, output_lexicon)
    return Evaluation(claim, tuple(lines), label, tuple(trace))


@dataclass(frozen=True)
class Verbalization:
    label: LinguisticLabel
    credibility: UnitFuzzyNumber


def verbalize(evaluation: Evaluation, lexicon: Lexicon) -> Verbalization:
    """Nearest verbal label plus the raw trapezoid (the elastic constraints)."""
    return Verbalization(
        nearest_label(evaluation.claim_credibility, lexicon), evaluation.claim_credibility
    )


@dataclass(frozen=True)
class ComparisonResult:
    agree: bool
    distance: float
    median_gap: float  # analytic median minus subjective label median


def compare_evaluations(
    analytic: UnitFuzzyNumber,
    subjective_label: str,
    lexicon: Lexicon,
    tolerance: float = DEFAULT_AGREEMENT_TOLERANCE,
) -> ComparisonResult:
    """Agree when analytic and subjective meanings are within tolerance.

    The threshold is closed: a distance exactly at tolerance agrees. On
    disagreement the signed median gap tells which side should move.
    """
    label = lexicon[subjective_label]
    d = distance(analytic, label.meaning)
    gap = median(analytic) - median(label.meaning)
    return ComparisonResult(d <= tolerance, d, gap)


@dataclass(frozen=True)
class KnowledgeBase:
    """The grounds an expert's judgment rests on, with their credibilities."""

    expert: str
    entries: tuple[tuple[str, UnitFuzzyNumber], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError(f"knowledge base of {self.expert!r} is empty")
        refs = [ref for ref, _ in self.entries]
        if len(set(refs)) != len(refs):
            raise ValueError(f"knowledge base of {self.expert!r} has duplicate ground refs")

    @classmethod
    def from_mapping(cls, expert: str, credibilities: Mapping[str, UnitFuzzyNumber]) -> "KnowledgeBase":
        return cls(expert, tuple(credibilities.items()))

    def ground_ids(self) -> frozenset:
        return frozenset(ref for ref, _ in self.entries)


@dataclass(frozen=True)
class PoolingCheck:
    admissible: bool
    overlap: float


def pooling_admissible(
    kb1: KnowledgeBase, kb2: KnowledgeBase, theta: float = DEFAULT_OVERLAP_THRESHOLD
) -> PoolingCheck:
    """Overlap coefficient |common grounds| / |smaller base| against theta."""
    s1 = kb1.ground_ids()
    s2 = kb2.ground_ids()
    overlap = len(s1 & s2) / min(len(s1), len(s2))
    return PoolingCheck(overlap >= theta, overlap)


def pool(evaluations: Sequence[UnitFuzzyNumber]) -> UnitFuzzyNumber:
    """Corner-wise mean of the experts' claim credibilities."""
    if len(evaluations) < 2:
        raise ValueError(f"pooling needs at least 2 evaluations, got {len(evaluations)}")
    n = len(evaluations)
    return UnitFuzzyNumber(
        sum(e.a for e in evaluations) / n,
        sum(e.b for e in evaluations) / n,
        sum(e.c for e in evaluations) / n,
        sum(e.d for e in evaluations) / n,
    )


def _quantifier_to_json(q: Union[str, UnitFuzzyNumber]):
    return q if isinstance(q, str) else q.to_dict()


def _quantifier_from_json(data) -> Union[str, UnitFuzzyNumber]:
    return data if isinstance(data, str) else UnitFuzzyNumber.from_dict(data)


def graph_to_dict(graph: ArgumentGraph) -> dict:
    return {
        "claim": graph.claim,
        "qualifier": graph.qualifier,
        "grounds": [
            {
                "ref": g.ref,
                "statement": g.statement,
                "credibility": g.credibility.to_dict(),
                "support": list(g.support),
            }
            for g in graph.grounds
        ],
        "warrants": [
            {"ref": w.ref, "grounds": list(w.ground_refs), "quantifier": _quantifier_to_json(w.quantifier)}
            for w in graph.warrants
        ],
        "backings": [
            {"warrant": b.warrant_ref, "reliability": b.reliability.to_dict()} for b in graph.backings
        ],
        "rebuttals": [
            {"target_kind": r.target_kind, "target_ref": r.target_ref, "strength": r.strength.to_dict()}
            for r in graph.rebuttals
        ],
    }


def graph_from_dict(data: Mapping) -> ArgumentGraph:
    return ArgumentGraph(
        claim=str(data["claim"]),
        qualifier=data.get("qualifier"),
        grounds=tuple(
            Ground(
                ref=str(g["ref"]),
                statement=str(g.get("statement", "")),
                credibility=UnitFuzzyNumber.from_dict(g["credibility"]),
                support=tuple(g.get("support", [])),
            )
            for g in data.get("grounds", [])
        ),
        warrants=tuple(
            Warrant(
                ref=str(w["ref"]),
                ground_refs=tuple(w["grounds"]),
                quantifier=_quantifier_from_json(w["quantifier"]),
            )
            for w in data.get("warrants", [])
        ),
        backings=tuple(
            Backing(warrant_ref=str(b["warrant"]), reliability=UnitFuzzyNumber.from_dict(b["reliability"]))
            for b in data.get("backings", [])
        ),
        rebuttals=tuple(
            Rebuttal(
                target_kind=str(r["target_kind"]),
                target_ref=r.get("target_ref"),
                strength=UnitFuzzyNumber.from_dict(r["strength"]),
            )
            for r in data.get("rebuttals", [])
        ),
    )


def evaluation_to_dict(evaluation: Evaluation) -> dict:
    return {
        "claim_credibility": evaluation.claim_credibility.to_dict(),
        "lines": [{"warrant": ref, "credibility": cred.to_dict()} for ref, cred in evaluation.lines],
        "label": evaluation.label.to_dict(),
        "trace": [
            {"op": step.op, "target": step.target, "result": step.result.to_dict()}
            for step in evaluation.trace
        ],
    }
