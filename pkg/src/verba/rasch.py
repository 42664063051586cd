"""One-parameter logistic (Rasch) model fitting.

Separates subject ability from item difficulty in a binary response matrix:
p(correct) = logistic(ability - difficulty). Difficulties are estimated by
conditional maximum likelihood (conditioning on raw scores via elementary
symmetric functions), which keeps them free of the ability distribution;
abilities follow by per-score maximum likelihood given the difficulties.

The difficulty-by-label machinery groups stated-confidence records by verbal
label and compares each label's meaning (its median) against the mean model
success probability of the answers it was attached to.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .lexicon import Lexicon, median as label_median

GRADIENT_TOL = 1e-8
MAX_ITERATIONS = 200


class UnfittableMatrixError(ValueError):
    """Fewer than 2 subjects or items remain after dropping degenerate lines."""


@dataclass(frozen=True)
class ResponseMatrix:
    """Dense binary response matrix, subjects by items."""

    x: np.ndarray
    subject_ids: tuple[str, ...]
    item_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        x = np.asarray(self.x)
        if x.ndim != 2:
            raise ValueError(f"response matrix must be 2-dimensional, got shape {x.shape}")
        if x.shape != (len(self.subject_ids), len(self.item_ids)):
            raise ValueError("id lists do not match matrix shape")
        if x.shape[0] < 2 or x.shape[1] < 2:
            raise ValueError(f"need at least 2 subjects and 2 items, got shape {x.shape}")
        if not np.isin(x, (0, 1)).all():
            raise ValueError("response matrix cells must be 0 or 1")
        object.__setattr__(self, "x", x.astype(np.int64))

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[int]],
        subject_ids: Optional[Sequence[str]] = None,
        item_ids: Optional[Sequence[str]] = None,
    ) -> "ResponseMatrix":
        x = np.asarray(rows)
        subjects = tuple(subject_ids) if subject_ids else tuple(f"S{i+1}" for i in range(x.shape[0]))
        items = tuple(item_ids) if item_ids else tuple(f"I{j+1}" for j in range(x.shape[1]))
        return cls(x, subjects, items)


@dataclass(frozen=True)
class RaschFit:
    """Estimated logits; +/-inf sentinels mark dropped subjects and items."""

    abilities: np.ndarray
    difficulties: np.ndarray
    converged: bool
    iterations: int
    subject_ids: tuple[str, ...]
    item_ids: tuple[str, ...]
    dropped_subjects: tuple[str, ...] = ()
    dropped_items: tuple[str, ...] = ()

    def ability(self, subject: Union[int, str]) -> float:
        return float(self.abilities[_index(subject, self.subject_ids, "subject")])

    def difficulty(self, item: Union[int, str]) -> float:
        return float(self.difficulties[_index(item, self.item_ids, "item")])


def _index(key: Union[int, str], ids: Sequence[str], kind: str) -> int:
    if isinstance(key, str):
        try:
            return ids.index(key)
        except ValueError:
            raise KeyError(f"unknown {kind} {key!r}") from None
    if not 0 <= key < len(ids):
        raise KeyError(f"{kind} index {key} out of range")
    return key


def rasch_probability(xi: float, delta: float) -> float:
    """p(correct) = logistic(xi - delta), stable for large |xi - delta|."""
    z = xi - delta
    if math.isnan(z):
        raise ValueError("ability and difficulty must not combine to NaN")
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-min(z, 745.0)))
    e = math.exp(max(z, -745.0))
    return e / (1.0 + e)


def elementary_symmetric(eps: np.ndarray) -> np.ndarray:
    """gamma[r] = sum over r-subsets of eps of the product of the subset."""
    gamma = np.zeros(len(eps) + 1)
    gamma[0] = 1.0
    for e in eps:
        gamma[1:] = gamma[1:] + e * gamma[:-1]
    return gamma


_esf = elementary_symmetric


def _esf_without(gamma: np.ndarray, eps_j: float) -> np.ndarray:
    """Deflate gamma by one element; forward recursion for small eps,
    backward for large, to avoid catastrophic cancellation."""
    n = len(gamma) - 1
    out = np.zeros(n)
    if eps_j <= 1.0:
        out[0] = 1.0
        for r in range(1, n):
            out[r] = gamma[r] - eps_j * out[r - 1]
    else:
        out[n - 1] = gamma[n] / eps_j
        for r in range(n - 2, -1, -1):
            out[r] = (gamma[r + 1] - out[r + 1]) / eps_j
    return out


def _filter_degenerate(matrix: ResponseMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Iteratively drop all-0/all-1 rows and columns; returns (x, row_keep, col_keep)."""
    x = matrix.x
    row_keep = np.ones(x.shape[0], dtype=bool)
    col_keep = np.ones(x.shape[1], dtype=bool)
    while True:
        sub = x[np.ix_(row_keep, col_keep)]
        if sub.size == 0:
            break
        col_sums = sub.sum(axis=0)
        bad_cols = (col_sums == 0) | (col_sums == sub.shape[0])
        if bad_cols.any():
            cols = np.flatnonzero(col_keep)
            col_keep[cols[bad_cols]] = False
            continue
        row_sums = sub.sum(axis=1)
        bad_rows = (row_sums == 0) | (row_sums == sub.shape[1])
        if bad_rows.any():
            rows = np.flatnonzero(row_keep)
            row_keep[rows[bad_rows]] = False
            continue
        break
    return x[np.ix_(row_keep, col_keep)], row_keep, col_keep


def _conditional_loglik(delta: np.ndarray, item_sums: np.ndarray, score_counts: np.ndarray) -> float:
    eps = np.exp(-delta)
    gamma = _esf(eps)
    ll = -float(item_sums @ delta)
    for r, n_r in enumerate(score_counts):
        if n_r > 0:
            ll -= n_r * math.log(gamma[r])
    return ll


def _cml_difficulties(x: np.ndarray) -> tuple[np.ndarray, bool, int]:
    """Newton maximization of the conditional likelihood, centered to sum 0."""
    n_subjects, n_items = x.shape
    item_sums = x.sum(axis=0).astype(float)
    scores = x.sum(axis=1)
    score_counts = np.bincount(scores, minlength=n_items + 1).astype(float)

    p = item_sums / n_subjects
    delta = np.log((1.0 - p) / p)
    delta -= delta.mean()
    ll = _conditional_loglik(delta, item_sums, score_counts)

    converged = False
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        eps = np.exp(-delta)
        gamma = _esf(eps)
        gm = np.array([_esf_without(gamma, eps[j]) for j in range(n_items)])

        # pi[r, j] = p(item j correct | raw score r)
        pi = np.zeros((n_items + 1, n_items))
        for r in range(1, n_items):
            pi[r] = eps * gm[:, r - 1] / gamma[r]

        present = [r for r in range(1, n_items) if score_counts[r] > 0]
        grad = -item_sums.copy()
        for r in present:
            grad += score_counts[r] * pi[r]

        if np.abs(grad).max() <= GRADIENT_TOL:
            converged = True
            break

        # W = sum_r n_r Cov_r(x_j, x_k), the conditional information matrix
        w = np.zeros((n_items, n_items))
        for r in present:
            pi_r = pi[r]
            w += score_counts[r] * (np.diag(pi_r) - np.outer(pi_r, pi_r))
        r2 = np.array([r for r in present if r >= 2], dtype=int)
        if r2.size:
            weight = score_counts[r2] / gamma[r2]
            for j in range(n_items):
                for k in range(j + 1, n_items):
                    gm_jk = _esf_without(gm[j], eps[k])
                    cross = eps[j] * eps[k] * float(weight @ gm_jk[r2 - 2])
                    w[j, k] += cross
                    w[k, j] += cross

        # the likelihood is shift-invariant, so W is singular along the ones
        # vector; a rank-1 ridge pins that direction and the step is recentered
        ridge = (np.trace(w) / n_items**2) if np.trace(w) > 0 else 1.0
        w_reg = w + ridge * np.ones((n_items, n_items)) / n_items
        try:
            step = np.linalg.solve(w_reg, grad)
        except np.linalg.LinAlgError:
            step = grad / max(np.trace(w) / n_items, 1e-8)
        step -= step.mean()

        t = 1.0
        while t > 1e-6:
            candidate = delta + t * step
            candidate -= candidate.mean()
            ll_new = _conditional_loglik(candidate, item_sums, score_counts)
            if ll_new >= ll - 1e-12:
                delta, ll = candidate, ll_new
                break
            t /= 2.0
        else:
            break

    delta -= delta.mean()
    return delta, converged, iterations


def _ability_for_score(r: int, delta: np.ndarray) -> float:
    """Solve sum_j logistic(xi - delta_j) = r for xi; strictly monotone."""
    n_items = len(delta)
    if r <= 0:
        return float("-inf")
    if r >= n_items:
        return float("inf")
    xi = math.log(r / (n_items - r))
    lo, hi = -35.0, 35.0
    for _ in range(100):
        p = 1.0 / (1.0 + np.exp(np.clip(delta - xi, -700, 700)))
        f = p.sum() - r
        if abs(f) < 1e-10:
            break
        if f > 0:
            hi = xi
        else:
            lo = xi
        fprime = (p * (1.0 - p)).sum()
        if fprime > 1e-12:
            xi_new = xi - f / fprime
        else:
            xi_new = (lo + hi) / 2.0
        xi = xi_new if lo < xi_new < hi else (lo + hi) / 2.0
    return float(xi)


def fit(matrix: ResponseMatrix) -> RaschFit:
    """Fit the model; degenerate rows/columns are dropped, not an error."""
    x_fit, row_keep, col_keep = _filter_degenerate(matrix)
    if x_fit.shape[0] < 2 or x_fit.shape[1] < 2:
        raise UnfittableMatrixError(
            f"matrix degenerate after filtering: {x_fit.shape[0]} subjects x {x_fit.shape[1]} items remain"
        )

    delta_fit, converged, iterations = _cml_difficulties(x_fit)

    difficulties = np.full(len(matrix.item_ids), np.nan)
    difficulties[col_keep] = delta_fit
    # dropped items: all-1 means too easy (-inf), all-0 too hard (+inf)
    for j in np.flatnonzero(~col_keep):
        difficulties[j] = -math.inf if matrix.x[:, j].sum() > matrix.x.shape[0] / 2 else math.inf

    score_ability = {
        r: _ability_for_score(r, delta_fit) for r in np.unique(matrix.x[:, col_keep].sum(axis=1))
    }
    abilities = np.array(
        [score_ability[r] for r in matrix.x[:, col_keep].sum(axis=1)], dtype=float
    )

    return RaschFit(
        abilities=abilities,
        difficulties=difficulties,
        converged=converged,
        iterations=iterations,
        subject_ids=matrix.subject_ids,
        item_ids=matrix.item_ids,
        dropped_subjects=tuple(s for s, keep in zip(matrix.subject_ids, row_keep) if not keep),
        dropped_items=tuple(s for s, keep in zip(matrix.item_ids, col_keep) if not keep),
    )


def expected_success(fit_result: RaschFit, subject: Union[int, str], item: Union[int, str]) -> float:
    """Model probability that the subject solves the item."""
    xi = fit_result.ability(subject)
    delta = fit_result.difficulty(item)
    if math.isinf(xi):
        return 1.0 if xi > 0 else 0.0
    if math.isinf(delta):
        return 0.0 if delta > 0 else 1.0
    return rasch_probability(xi, delta)


@dataclass(frozen=True)
class ConfidenceRecord:
    subject: str
    item: str
    label: str


@dataclass(frozen=True)
class CurveRow:
    label: str
    median: float
    mean_probability: float
    count: int


@dataclass(frozen=True)
class CalibrationCurve:
    rows: tuple[CurveRow, ...]
    skipped: int = 0


def difficulty_by_label(
    fit_result: RaschFit,
    records: Sequence[ConfidenceRecord],
    lexicons: Union[Lexicon, Mapping[str, Lexicon]],
) -> CalibrationCurve:
    """Per label: the label's median meaning vs mean model success probability.

    ``lexicons`` is either one shared lexicon or a mapping from subject id to
    that subject's personal lexicon. Records involving subjects or items that
    were dropped from the fit are skipped (their probabilities are 0/1
    sentinels, not estimates).
    """

    def lexicon_for(subject: str) -> Lexicon:
        if isinstance(lexicons, Lexicon):
            return lexicons
        try:
            return lexicons[subject]
        except KeyError:
            raise KeyError(f"no lexicon for subject {subject!r}") from None

    sums: dict[str, list[float]] = {}
    skipped = 0
    for rec in records:
        lex = lexicon_for(rec.subject)
        if rec.label not in lex:
            raise ValueError(f"label {rec.label!r} not in lexicon of subject {rec.subject!r}")
        xi = fit_result.ability(rec.subject)
        delta = fit_result.difficulty(rec.item)
        if math.isinf(xi) or math.isinf(delta) or math.isnan(xi) or math.isnan(delta):
            skipped += 1
            continue
        p = rasch_probability(xi, delta)
        m = label_median(lex[rec.label].meaning)
        bucket = sums.setdefault(rec.label, [0.0, 0.0, 0.0])
        bucket[0] += p
        bucket[1] += m
        bucket[2] += 1.0
    rows = [
        CurveRow(label, msum / count, psum / count, int(count))
        for label, (psum, msum, count) in sums.items()
    ]
    rows.sort(key=lambda row: row.median)
    return CalibrationCurve(tuple(rows), skipped)


@dataclass(frozen=True)
class CalibrationGaps:
    gaps: tuple[tuple[str, float], ...]  # label -> median minus mean probability
    max_abs_gap: float
    monotone: bool


def calibration_gap(curve: CalibrationCurve) -> CalibrationGaps:
    """Signed per-label gaps and whether mean probability rises with the labels."""
    if not curve.rows:
        raise ValueError("calibration curve is empty")
    gaps = tuple((row.label, row.median - row.mean_probability) for row in curve.rows)
    max_abs = max(abs(g) for _, g in gaps)
    probs = [row.mean_probability for row in curve.rows]
    monotone = all(q >= p for p, q in zip(probs, probs[1:]))
    return CalibrationGaps(gaps, max_abs, monotone)


def read_response_matrix_csv(path) -> ResponseMatrix:
    """CSV with header ``subject,<item ids>`` and 0/1 cells."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if not header or header[0] != "subject":
            raise ValueError("response matrix CSV must start with a 'subject' header column")
        item_ids = tuple(header[1:])
        subject_ids = []
        rows = []
        for line in reader:
            if not line:
                continue
            subject_ids.append(line[0])
            rows.append([int(cell) for cell in line[1:]])
    return ResponseMatrix(np.asarray(rows), tuple(subject_ids), item_ids)


def write_response_matrix_csv(matrix: ResponseMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["subject", *matrix.item_ids])
        for sid, row in zip(matrix.subject_ids, matrix.x):
            writer.writerow([sid, *row.tolist()])


def read_records_csv(path) -> list[ConfidenceRecord]:
    """CSV with header ``subject,item,label``."""
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"subject", "item", "label"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError("records CSV must have columns subject,item,label")
        for row in reader:
            records.append(ConfidenceRecord(row["subject"], row["item"], row["label"]))
    return records


def write_curve_csv(curve: CalibrationCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label", "median", "mean_probability", "count"])
        for row in curve.rows:
            writer.writerow([row.label, repr(row.median), repr(row.mean_probability), row.count])
