"""Conditional maximum likelihood fitting of the one-parameter logistic model.

The frozen oracle values below were produced by a brute-force grid search
over the conditional log-likelihood (sum-zero constraint, grid step 0.005);
the Newton fit must land at least as high on the same surface and within
grid resolution of the arg max.
"""

import math

import numpy as np
import pytest

from verba.fuzzy import UnitFuzzyNumber
from verba.lexicon import Lexicon, LinguisticLabel, default_lexicon
from verba.rasch import (
    CalibrationCurve,
    ConfidenceRecord,
    CurveRow,
    ResponseMatrix,
    UnfittableMatrixError,
    calibration_gap,
    difficulty_by_label,
    elementary_symmetric,
    expected_success,
    fit,
    rasch_probability,
    read_records_csv,
    read_response_matrix_csv,
    write_curve_csv,
    write_response_matrix_csv,
)

SMALL_ROWS = [[1, 0, 0], [1, 1, 0], [0, 1, 1], [1, 0, 1]]
# grid-search arg max for SMALL_ROWS (step 0.005): delta = (-0.555, 0.275, 0.280)
SMALL_ORACLE_DELTA = (-0.555, 0.275, 0.280)
SMALL_ORACLE_LL = -4.128196998703568


def _conditional_ll(delta, x):
    item_sums = x.sum(axis=0).astype(float)
    scores = x.sum(axis=1)
    eps = np.exp(-np.asarray(delta, dtype=float))
    gamma = elementary_symmetric(eps)
    ll = -float(item_sums @ np.asarray(delta, dtype=float))
    for r in scores:
        ll -= math.log(gamma[r])
    return ll


def test_elementary_symmetric_small_cases():
    gamma = elementary_symmetric(np.array([2.0, 3.0]))
    assert gamma == pytest.approx([1.0, 5.0, 6.0])
    gamma = elementary_symmetric(np.array([1.0, 1.0, 1.0]))
    assert gamma == pytest.approx([1.0, 3.0, 3.0, 1.0])


def test_elementary_symmetric_matches_polynomial_expansion():
    rng = np.random.default_rng(3)
    for _ in range(10):
        eps = rng.uniform(0.05, 5.0, size=6)
        gamma = elementary_symmetric(eps)
        # np.poly(-eps) is t^n + g1 t^(n-1) + ... + gn, leading term first
        assert gamma == pytest.approx(np.poly(-eps))


def test_rasch_probability_basics():
    assert rasch_probability(0.0, 0.0) == pytest.approx(0.5)
    assert rasch_probability(2.0, 0.0) == pytest.approx(1 / (1 + math.exp(-2)))
    assert rasch_probability(-50.0, 50.0) == pytest.approx(0.0, abs=1e-30)
    assert rasch_probability(800.0, -800.0) == 1.0  # stable for huge gaps
    with pytest.raises(ValueError):
        rasch_probability(float("nan"), 0.0)


def test_fit_beats_grid_oracle_on_small_matrix():
    m = ResponseMatrix.from_rows(SMALL_ROWS)
    res = fit(m)
    assert res.converged
    assert res.difficulties.sum() == pytest.approx(0.0, abs=1e-9)
    assert _conditional_ll(res.difficulties, m.x) >= SMALL_ORACLE_LL
    for got, want in zip(res.difficulties, SMALL_ORACLE_DELTA):
        assert got == pytest.approx(want, abs=0.005)


def test_fit_recovers_simulated_difficulties():
    rng = np.random.default_rng(0)
    n_subjects, n_items = 300, 20
    true_delta = np.linspace(-2, 2, n_items)
    true_xi = rng.normal(0, 1.2, n_subjects)
    p = 1 / (1 + np.exp(-(true_xi[:, None] - true_delta[None, :])))
    x = (rng.uniform(size=p.shape) < p).astype(int)
    res = fit(ResponseMatrix.from_rows(x))
    kept = np.isfinite(res.difficulties)
    est = res.difficulties[kept]
    want = true_delta[kept] - true_delta[kept].mean()
    assert res.converged
    assert np.corrcoef(est, want)[0, 1] > 0.98
    assert np.sqrt(((est - want) ** 2).mean()) < 0.25


def test_fitted_row_sums_match_observed_scores():
    """Per-score abilities are defined by sum_j p(xi, delta_j) = score."""
    rng = np.random.default_rng(1)
    x = (rng.uniform(size=(60, 12)) < 0.5).astype(int)
    res = fit(ResponseMatrix.from_rows(x))
    kept = [j for j in range(12) if math.isfinite(res.difficulties[j])]
    for i in range(60):
        if not math.isfinite(res.abilities[i]):
            continue
        observed = sum(int(x[i, j]) for j in kept)
        fitted = sum(expected_success(res, i, j) for j in kept)
        assert fitted == pytest.approx(observed, abs=1e-6)


def test_degenerate_rows_and_columns_get_sentinels():
    rows = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 0], [1, 0, 0, 0], [1, 1, 0, 0]]
    res = fit(ResponseMatrix.from_rows(rows))
    assert res.difficulties[0] == -math.inf  # everyone solved it
    assert res.difficulties[3] == math.inf  # nobody solved it
    assert res.dropped_items == ("I1", "I4")
    assert res.abilities[2] == math.inf  # perfect on retained items
    assert res.abilities[3] == -math.inf
    assert expected_success(res, "S3", "I2") == 1.0
    assert expected_success(res, "S1", "I1") == 1.0
    assert expected_success(res, "S1", "I4") == 0.0


def test_unfittable_matrix_raises():
    with pytest.raises(UnfittableMatrixError):
        fit(ResponseMatrix.from_rows([[1, 0], [1, 0], [1, 0]]))
    with pytest.raises(UnfittableMatrixError):
        fit(ResponseMatrix.from_rows([[1, 1, 1], [0, 0, 0], [1, 1, 1]]))


def test_matrix_validation():
    with pytest.raises(ValueError):
        ResponseMatrix.from_rows([[1, 2], [0, 1]])
    with pytest.raises(ValueError):
        ResponseMatrix.from_rows([[1, 0]])
    with pytest.raises(KeyError):
        fit(ResponseMatrix.from_rows(SMALL_ROWS)).ability("nobody")


def test_shift_invariance_of_conditional_likelihood():
    m = ResponseMatrix.from_rows(SMALL_ROWS)
    res = fit(m)
    base = _conditional_ll(res.difficulties, m.x)
    shifted = _conditional_ll(res.difficulties + 0.7, m.x)
    assert shifted == pytest.approx(base)


def test_difficulty_by_label_groups_and_orders():
    rng = np.random.default_rng(5)
    n_subjects, n_items = 120, 15
    true_delta = np.linspace(-1.5, 1.5, n_items)
    true_xi = rng.normal(0, 1, n_subjects)
    p = 1 / (1 + np.exp(-(true_xi[:, None] - true_delta[None, :])))
    x = (rng.uniform(size=p.shape) < p).astype(int)
    matrix = ResponseMatrix.from_rows(x)
    res = fit(matrix)
    lex = default_lexicon(5)

    # a perfectly calibrated subject reports the label nearest the model p
    records = []
    medians = np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    for i, sid in enumerate(matrix.subject_ids):
        if not math.isfinite(res.abilities[i]):
            continue
        for j, iid in enumerate(matrix.item_ids):
            if not math.isfinite(res.difficulties[j]):
                continue
            prob = expected_success(res, i, j)
            label = lex.labels[int(np.argmin(np.abs(medians - prob)))].name
            records.append(ConfidenceRecord(sid, iid, label))

    curve = difficulty_by_label(res, records, lex)
    assert curve.skipped == 0
    assert [row.label for row in curve.rows] == sorted(
        (row.label for row in curve.rows), key=lambda n: int(n[1])
    )
    probs = [row.mean_probability for row in curve.rows]
    assert probs == sorted(probs)
    gaps = calibration_gap(curve)
    assert gaps.monotone
    assert gaps.max_abs_gap < 0.06


def test_difficulty_by_label_rejects_unknown_label():
    res = fit(ResponseMatrix.from_rows(SMALL_ROWS))
    lex = default_lexicon(3)
    with pytest.raises(ValueError):
        difficulty_by_label(res, [ConfidenceRecord("S1", "I1", "huge")], lex)


def test_difficulty_by_label_skips_sentinel_subjects():
    rows = [[1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 0], [1, 0, 0, 0], [1, 1, 0, 0]]
    matrix = ResponseMatrix.from_rows(rows)
    res = fit(matrix)
    lex = default_lexicon(3)
    records = [
        ConfidenceRecord("S1", "I2", "L1"),
        ConfidenceRecord("S3", "I2", "L2"),  # S3 has +inf ability
        ConfidenceRecord("S2", "I1", "L2"),  # I1 has -inf difficulty
    ]
    curve = difficulty_by_label(res, records, lex)
    assert curve.skipped == 2
    assert len(curve.rows) == 1


def test_difficulty_by_label_with_per_subject_lexicons():
    res = fit(ResponseMatrix.from_rows(SMALL_ROWS))
    lexicons = {
        sid: default_lexicon(3, owner=sid).renamed({"L1": f"low-{sid}"})
        for sid in res.subject_ids
    }
    records = [ConfidenceRecord("S2", "I2", "low-S2")]
    curve = difficulty_by_label(res, records, lexicons)
    assert curve.rows[0].label == "low-S2"
    with pytest.raises(KeyError):
        difficulty_by_label(res, [ConfidenceRecord("S9", "I2", "L2")], lexicons)


def test_calibration_gap_flags_anticalibration():
    curve = CalibrationCurve(
        rows=(
            CurveRow("low", 0.1, 0.62, 10),
            CurveRow("mid", 0.5, 0.55, 10),
            CurveRow("high", 0.9, 0.31, 10),
        )
    )
    gaps = calibration_gap(curve)
    assert not gaps.monotone
    assert gaps.max_abs_gap == pytest.approx(0.59)
    with pytest.raises(ValueError):
        calibration_gap(CalibrationCurve(rows=()))


def test_csv_round_trips(tmp_path):
    matrix = ResponseMatrix.from_rows(SMALL_ROWS, ["a", "b", "c", "d"], ["i1", "i2", "i3"])
    path = tmp_path / "matrix.csv"
    write_response_matrix_csv(matrix, path)
    back = read_response_matrix_csv(path)
    assert back.subject_ids == matrix.subject_ids
    assert back.item_ids == matrix.item_ids
    assert (back.x == matrix.x).all()

    rec_path = tmp_path / "records.csv"
    rec_path.write_text("subject,item,label\na,i1,L1\nb,i2,L3\n", encoding="utf-8")
    records = read_records_csv(rec_path)
    assert records == [ConfidenceRecord("a", "i1", "L1"), ConfidenceRecord("b", "i2", "L3")]

    curve = CalibrationCurve(rows=(CurveRow("L1", 0.1, 0.15, 4),))
    curve_path = tmp_path / "curve.csv"
    write_curve_csv(curve, curve_path)
    text = curve_path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "label,median,mean_probability,count"
    assert "L1,0.1,0.15,4" in text
