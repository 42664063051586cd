"""Named verbal labels bound to fuzzy numbers.

A lexicon is an ordered set of linguistic labels, each carrying a trapezoidal
meaning on [0, 1]. Default lexicons are equidistant and equally shaped; that
is a convenient starting point, not an invariant, since individually
calibrated lexicons are typically irregular.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .fuzzy import Interval, UnitFuzzyNumber, distance, median

GAP_TOLERANCE = 1e-9


class LexiconError(ValueError):
    """Raised when labels cannot form a valid lexicon."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class LinguisticLabel:
    name: str
    meaning: UnitFuzzyNumber

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("label name must be nonempty")

    def to_dict(self) -> dict:
        return {"name": self.name, "meaning": self.meaning.to_dict()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LinguisticLabel":
        return cls(str(data["name"]), UnitFuzzyNumber.from_dict(data["meaning"]))


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        """Usable as a lexicon: free of errors (warnings permitted)."""
        return not self.errors

    @property
    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "error"]

    @property
    def warnings(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "warning"]


def coverage_gaps(labels: Sequence[LinguisticLabel]) -> tuple[Interval, ...]:
    """Open intervals of positive length where every label's membership is zero.

    Touching supports leave no gap; sub-nanoscale slivers from floating-point
    corner arithmetic are ignored.
    """
    supports = sorted((lab.meaning.a, lab.meaning.d) for lab in labels)
    gaps: list[Interval] = []
    covered_to = 0.0
    for lo, hi in supports:
        if lo > covered_to + GAP_TOLERANCE:
            gaps.append(Interval(covered_to, lo))
        covered_to = max(covered_to, hi)
    if covered_to < 1.0 - GAP_TOLERANCE:
        gaps.append(Interval(covered_to, 1.0))
    return tuple(gaps)


def validate_labels(labels: Sequence[LinguisticLabel]) -> ValidationReport:
    """Check ordering, name uniqueness, and coverage of a label list.

    Ordering and duplicate names are errors; coverage gaps are warnings,
    because a personal lexicon may genuinely not cover all of [0, 1].
    """
    violations: list[Violation] = []
    if len(labels) < 2:
        violations.append(Violation("error", f"lexicon needs at least 2 labels, got {len(labels)}"))
    seen: set[str] = set()
    for lab in labels:
        if lab.name in seen:
            violations.append(Violation("error", f"duplicate label name {lab.name!r}"))
        seen.add(lab.name)
    for prev, cur in zip(labels, labels[1:]):
        if median(cur.meaning) <= median(prev.meaning):
            violations.append(
                Violation(
                    "error",
                    f"labels must have strictly increasing medians: "
                    f"{prev.name!r} ({median(prev.meaning)}) >= {cur.name!r} ({median(cur.meaning)})",
                )
            )
    for gap in coverage_gaps(labels):
        violations.append(Violation("warning", f"coverage gap ({gap.lo}, {gap.hi})"))
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class Lexicon:
    """Ordered verbal labels of one owner; construction enforces the invariants."""

    owner: str
    labels: tuple[LinguisticLabel, ...]

    def __post_init__(self) -> None:
        errors = validate_labels(self.labels).errors
        if errors:
            raise LexiconError([v.message for v in errors])

    def __len__(self) -> int:
        return len(self.labels)

    def names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    def __getitem__(self, name: str) -> LinguisticLabel:
        for lab in self.labels:
            if lab.name == name:
                return lab
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(lab.name == name for lab in self.labels)

    def renamed(self, names: Union[Mapping[str, str], Sequence[str]]) -> "Lexicon":
        """New lexicon with labels renamed, meanings unchanged.

        Takes either a full positional name sequence or a mapping from
        current names to replacements (partial renames allowed).
        """
        if isinstance(names, Mapping):
            unknown = set(names) - set(self.names())
            if unknown:
                raise KeyError(f"cannot rename unknown labels: {sorted(unknown)}")
            new_names = [names.get(lab.name, lab.name) for lab in self.labels]
        else:
            new_names = list(names)
            if len(new_names) != len(self.labels):
                raise ValueError(f"expected {len(self.labels)} names, got {len(new_names)}")
        return Lexicon(
            self.owner,
            tuple(LinguisticLabel(n, lab.meaning) for n, lab in zip(new_names, self.labels)),
        )

    def to_dict(self) -> dict:
        return {"owner": self.owner, "labels": [lab.to_dict() for lab in self.labels]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Lexicon":
        return cls(str(data["owner"]), tuple(LinguisticLabel.from_dict(x) for x in data["labels"]))


def default_lexicon(k: int, owner: str = "default") -> Lexicon:
    """Equidistant, equally shaped k-label lexicon with medians (2i-1)/(2k).

    Each label is a symmetric trapezoid with core half-width 1/(4k) and
    support half-width 1/(2k), so adjacent supports meet while cores stay
    disjoint. Names are placeholders L1..Lk; rename via :meth:`Lexicon.renamed`.
    """
    if not 2 <= k <= 9:
        raise ValueError(f"label count must be between 2 and 9, got {k}")
    labels = []
    for i in range(1, k + 1):
        m = (2 * i - 1) / (2 * k)
        labels.append(
            LinguisticLabel(
                f"L{i}",
                UnitFuzzyNumber(
                    max(0.0, m - 1 / (2 * k)),
                    max(0.0, m - 1 / (4 * k)),
                    min(1.0, m + 1 / (4 * k)),
                    min(1.0, m + 1 / (2 * k)),
                ),
            )
        )
    return Lexicon(owner, tuple(labels))


def nearest_label(f: UnitFuzzyNumber, lex: Lexicon) -> LinguisticLabel:
    """The label whose meaning is closest to f; ties go to the smaller median."""
    best = None
    best_dist = float("inf")
    for lab in lex.labels:
        dist = distance(f, lab.meaning)
        if dist < best_dist:  # labels are in median order, so first win is the tie rule
            best, best_dist = lab, dist
    assert best is not None
    return best


def validate_lexicon(lex: Lexicon | Iterable[LinguisticLabel]) -> ValidationReport:
    """Validate a lexicon or a raw label list."""
    labels = tuple(lex.labels) if isinstance(lex, Lexicon) else tuple(lex)
    return validate_labels(labels)
