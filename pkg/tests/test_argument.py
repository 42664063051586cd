"""Tests for the argument engine."""

import numpy as np
import pytest

from verba.argument import (
    Ambiguous,
    ArgumentGraph,
    Backing,
    EvalConfig,
    Evaluation,
    GraphStructureError,
    Ground,
    KnowledgeBase,
    PendingAmbiguities,
    QuantifierLexicon,
    QuantifierSense,
    Rebuttal,
    Resolved,
    UnknownQuantifierError,
    Warrant,
    chain,
    compare_evaluations,
    default_quantifier_lexicon,
    evaluate,
    evaluation_to_dict,
    graph_from_dict,
    graph_to_dict,
    lookup_quantifier,
    pool,
    pooling_admissible,
    resolve_ambiguity,
    verbalize,
)
from verba.fuzzy import UnitFuzzyNumber, crisp, distance, median
from verba.lexicon import default_lexicon

OUT = default_lexicon(5)


def _crisp_graph(ground=0.9, quantifier=0.7, backing=1.0, claim_rebuttal=0.5):
    """The worked single-line argument, all values crisp."""
    return ArgumentGraph(
        claim="the batch will pass inspection",
        grounds=(Ground("g1", "supplier history is clean", crisp(ground)),),
        warrants=(Warrant("w1", ("g1",), crisp(quantifier)),),
        backings=(Backing("w1", crisp(backing)),),
        rebuttals=(Rebuttal("claim", None, crisp(claim_rebuttal)),),
    )


class TestQuantifierLookup:
    def test_single_sense_resolves(self):
        qlex = QuantifierLexicon(
            (QuantifierSense("most", "", UnitFuzzyNumber(0.6, 0.7, 0.8, 0.9)),)
        )
        out = lookup_quantifier("most", qlex)
        assert isinstance(out, Resolved)
        assert out.meaning == UnitFuzzyNumber(0.6, 0.7, 0.8, 0.9)

    def test_usually_is_ambiguous_with_senses_ordered_by_median(self):
        out = lookup_quantifier("usually", default_quantifier_lexicon())
        assert isinstance(out, Ambiguous)
        assert len(out.senses) == 2
        medians = [median(s.meaning) for s in out.senses]
        assert medians == sorted(medians)

    def test_unknown_term_raises(self):
        with pytest.raises(UnknownQuantifierError):
            lookup_quantifier("zillions", default_quantifier_lexicon())

    def test_resolve_by_index_and_custom(self):
        pending = lookup_quantifier("usually", default_quantifier_lexicon())
        first = resolve_ambiguity(pending, 0)
        assert first.meaning == pending.senses[0].meaning
        custom = resolve_ambiguity(pending, UnitFuzzyNumber(0.5, 0.6, 0.7, 0.8))
        assert custom.meaning == UnitFuzzyNumber(0.5, 0.6, 0.7, 0.8)

    def test_resolve_index_out_of_range(self):
        pending = lookup_quantifier("usually", default_quantifier_lexicon())
        with pytest.raises(IndexError):
            resolve_ambiguity(pending, 5)
        with pytest.raises(TypeError):
            resolve_ambiguity(pending, "0")

    def test_with_sense_extends(self):
        qlex = QuantifierLexicon()
        qlex2 = qlex.with_sense(QuantifierSense("all", "", crisp(1.0)))
        assert qlex2.terms() == ("all",)
        assert qlex.terms() == ()

    def test_serialization_round_trip(self):
        qlex = default_quantifier_lexicon()
        assert QuantifierLexicon.from_dict(qlex.to_dict()) == qlex


class TestChain:
    def test_identity(self):
        q = UnitFuzzyNumber(0.2, 0.3, 0.5, 0.6)
        assert chain(crisp(1.0), q) == q

    def test_crisp_degeneration(self):
        assert chain(crisp(0.7), crisp(0.5)) == crisp(0.35)

    def test_interval_product_core(self):
        out = chain(UnitFuzzyNumber(0.6, 0.7, 0.7, 0.8), UnitFuzzyNumber(0.8, 0.9, 0.9, 1.0))
        assert out.b == pytest.approx(0.63)
        assert out.c == pytest.approx(0.63)


class TestEvaluate:
    def test_identity_chain_gives_certainty(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(1.0)),),
            warrants=(Warrant("w1", ("g1",), crisp(1.0)),),
            backings=(Backing("w1", crisp(1.0)),),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT)
        assert out.claim_credibility == crisp(1.0)

    def test_worked_example_scalar_rule(self):
        out = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        assert isinstance(out, Evaluation)
        reference = ((0.7 * 0.9) * 1.0) * (1.0 - 0.5)
        assert out.claim_credibility == crisp(reference)
        assert out.claim_credibility.a == 0.315

    def test_two_lines_aggregate_by_max(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.4)), Ground("g2", "", crisp(0.6))),
            warrants=(Warrant("w1", ("g1",), crisp(1.0)), Warrant("w2", ("g2",), crisp(1.0))),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT)
        assert out.claim_credibility == crisp(0.6)
        assert out.line("w1") == crisp(0.4)
        assert out.line("w2") == crisp(0.6)

    def test_min_aggregation_flag(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.4)), Ground("g2", "", crisp(0.6))),
            warrants=(Warrant("w1", ("g1",), crisp(1.0)), Warrant("w2", ("g2",), crisp(1.0))),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT, config=EvalConfig(aggregation="min"))
        assert out.claim_credibility == crisp(0.4)

    def test_multiple_grounds_combine_by_min(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.9)), Ground("g2", "", crisp(0.3))),
            warrants=(Warrant("w1", ("g1", "g2"), crisp(1.0)),),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT)
        assert out.claim_credibility == crisp(0.3)

    def test_missing_backing_means_no_discount(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.8)),),
            warrants=(Warrant("w1", ("g1",), crisp(0.5)),),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT)
        assert out.claim_credibility == crisp(0.5 * 0.8)

    def test_warrant_rebuttal_discounts_one_line_only(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.8)), Ground("g2", "", crisp(0.5))),
            warrants=(Warrant("w1", ("g1",), crisp(1.0)), Warrant("w2", ("g2",), crisp(1.0))),
            rebuttals=(Rebuttal("warrant", "w1", crisp(0.9)),),
        )
        out = evaluate(graph, QuantifierLexicon(), OUT)
        assert out.line("w1") == crisp(0.8 * (1.0 - 0.9))
        assert out.line("w2") == crisp(0.5)
        assert out.claim_credibility == crisp(0.5)

    def test_full_strength_claim_rebuttal_annihilates(self):
        out = evaluate(_crisp_graph(claim_rebuttal=1.0), QuantifierLexicon(), OUT)
        assert out.claim_credibility == crisp(0.0)

    def test_bounded_difference_rebuttal_flag(self):
        out = evaluate(
            _crisp_graph(ground=0.9, quantifier=1.0, claim_rebuttal=0.2),
            QuantifierLexicon(),
            OUT,
            config=EvalConfig(rebuttal_style="bounded-difference"),
        )
        assert out.claim_credibility.a == pytest.approx(0.7)

    def test_ambiguous_quantifier_halts_with_pending_set(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(0.9)),),
            warrants=(Warrant("w1", ("g1",), "usually"),),
        )
        out = evaluate(graph, default_quantifier_lexicon(), OUT)
        assert isinstance(out, PendingAmbiguities)
        assert out.items[0].warrant_ref == "w1"
        assert out.items[0].ambiguous.term == "usually"

    def test_resolution_unblocks_evaluation(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(1.0)),),
            warrants=(Warrant("w1", ("g1",), "usually"),),
        )
        qlex = default_quantifier_lexicon()
        pending = evaluate(graph, qlex, OUT)
        chosen = resolve_ambiguity(pending.items[0].ambiguous, 1)
        out = evaluate(graph, qlex, OUT, resolutions={"w1": chosen.meaning})
        assert isinstance(out, Evaluation)
        assert out.claim_credibility == chosen.meaning

    def test_unambiguous_term_needs_no_resolution(self):
        graph = ArgumentGraph(
            claim="c",
            grounds=(Ground("g1", "", crisp(1.0)),),
            warrants=(Warrant("w1", ("g1",), "often"),),
        )
        out = evaluate(graph, default_quantifier_lexicon(), OUT)
        assert isinstance(out, Evaluation)
        assert out.claim_credibility == UnitFuzzyNumber(0.5, 0.6, 0.7, 0.8)

    def test_label_is_nearest_in_output_lexicon(self):
        out = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        best = min(OUT.labels, key=lambda lab: distance(out.claim_credibility, lab.meaning))
        assert out.label == best

    def test_deterministic_and_trace_recorded(self):
        a = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        b = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        assert a == b
        ops = [step.op for step in a.trace]
        assert ops == [
            "grounds-min",
            "chain-quantifier",
            "chain-backing",
            "aggregate-max",
            "rebut-complement",
        ]
        assert a.trace[-1].result == a.claim_credibility


class TestMonotonicity:
    def _random_graph(self, rng):
        n_grounds = int(rng.integers(1, 4))
        grounds = tuple(
            Ground(f"g{i}", "", _random_number(rng)) for i in range(n_grounds)
        )
        n_warrants = int(rng.integers(1, 3))
        warrants = []
        for j in range(n_warrants):
            size = int(rng.integers(1, n_grounds + 1))
            refs = tuple(f"g{i}" for i in sorted(rng.choice(n_grounds, size=size, replace=False)))
            warrants.append(Warrant(f"w{j}", refs, _random_number(rng)))
        backings = tuple(
            Backing(f"w{j}", _random_number(rng)) for j in range(n_warrants) if rng.random() < 0.7
        )
        rebuttals = []
        if rng.random() < 0.5:
            rebuttals.append(Rebuttal("warrant", "w0", _random_number(rng)))
        if rng.random() < 0.5:
            rebuttals.append(Rebuttal("claim", None, _random_number(rng)))
        return ArgumentGraph("c", grounds, tuple(warrants), backings, tuple(rebuttals))

    def test_raising_inputs_never_lowers_claim_corners(self):
        rng = np.random.default_rng(20260823)
        for _ in range(250):
            graph = self._random_graph(rng)
            base = evaluate(graph, QuantifierLexicon(), OUT)
            lifted_grounds = tuple(
                Ground(g.ref, g.statement, _lift(g.credibility)) for g in graph.grounds
            )
            lifted_backings = tuple(
                Backing(b.warrant_ref, _lift(b.reliability)) for b in graph.backings
            )
            lifted_warrants = tuple(
                Warrant(w.ref, w.ground_refs, _lift(w.quantifier)) for w in graph.warrants
            )
            up = evaluate(
                ArgumentGraph("c", lifted_grounds, lifted_warrants, lifted_backings, graph.rebuttals),
                QuantifierLexicon(),
                OUT,
            )
            for lo, hi in zip(base.claim_credibility, up.claim_credibility):
                assert hi >= lo - 1e-12

    def test_raising_rebuttal_strength_never_raises_claim_corners(self):
        rng = np.random.default_rng(8135)
        for _ in range(250):
            graph = self._random_graph(rng)
            if not graph.rebuttals:
                continue
            base = evaluate(graph, QuantifierLexicon(), OUT)
            stronger = tuple(
                Rebuttal(r.target_kind, r.target_ref, _lift(r.strength)) for r in graph.rebuttals
            )
            up = evaluate(
                ArgumentGraph("c", graph.grounds, graph.warrants, graph.backings, stronger),
                QuantifierLexicon(),
                OUT,
            )
            for lo, hi in zip(base.claim_credibility, up.claim_credibility):
                assert hi <= lo + 1e-12


def _random_number(rng):
    corners = np.sort(rng.uniform(0.0, 1.0, size=4))
    return UnitFuzzyNumber(*corners)


def _lift(f: UnitFuzzyNumber) -> UnitFuzzyNumber:
    """Push every corner halfway toward 1, preserving the ordering."""
    return UnitFuzzyNumber(*(x + (1.0 - x) * 0.5 for x in f))


class TestVerbalizeAndCompare:
    def test_verbalize_returns_label_and_raw_trapezoid(self):
        out = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        v = verbalize(out, OUT)
        assert v.label == out.label
        assert v.credibility == out.claim_credibility

    def test_exact_label_meaning_agrees(self):
        label = OUT.labels[2]
        result = compare_evaluations(label.meaning, label.name, OUT)
        assert result.agree
        assert result.distance == 0.0
        assert result.median_gap == 0.0

    def test_disagreement_carries_signed_gap(self):
        result = compare_evaluations(crisp(0.9), "L2", OUT, tolerance=0.15)
        assert not result.agree
        assert result.median_gap == pytest.approx(0.6)

    def test_threshold_is_closed(self):
        label = OUT.labels[0]
        shifted = UnitFuzzyNumber(*(min(1.0, x + 0.05) for x in label.meaning))
        d = distance(shifted, label.meaning)
        at_threshold = compare_evaluations(shifted, label.name, OUT, tolerance=d)
        assert at_threshold.agree
        below = compare_evaluations(shifted, label.name, OUT, tolerance=d - 1e-9)
        assert not below.agree

    def test_unknown_subjective_label(self):
        with pytest.raises(KeyError):
            compare_evaluations(crisp(0.5), "nope", OUT)


class TestPooling:
    def test_identical_bases_fully_overlap(self):
        kb = KnowledgeBase.from_mapping("e1", {"g1": crisp(0.5), "g2": crisp(0.6)})
        check = pooling_admissible(kb, kb)
        assert check.admissible and check.overlap == 1.0

    def test_disjoint_bases_not_admissible(self):
        kb1 = KnowledgeBase.from_mapping("e1", {"g1": crisp(0.5)})
        kb2 = KnowledgeBase.from_mapping("e2", {"g2": crisp(0.5)})
        check = pooling_admissible(kb1, kb2)
        assert not check.admissible and check.overlap == 0.0

    def test_partial_overlap_hand_computed(self):
        kb1 = KnowledgeBase.from_mapping("e1", {g: crisp(0.5) for g in ("g1", "g2", "g3")})
        kb2 = KnowledgeBase.from_mapping("e2", {g: crisp(0.5) for g in ("g2", "g3", "g4", "g5")})
        check = pooling_admissible(kb1, kb2)
        assert check.overlap == pytest.approx(2.0 / 3.0)
        assert check.admissible

    def test_symmetry(self):
        kb1 = KnowledgeBase.from_mapping("e1", {g: crisp(0.5) for g in ("a", "b")})
        kb2 = KnowledgeBase.from_mapping("e2", {g: crisp(0.5) for g in ("b", "c", "d")})
        assert pooling_admissible(kb1, kb2) == pooling_admissible(kb2, kb1)

    def test_empty_base_rejected(self):
        with pytest.raises(ValueError):
            KnowledgeBase.from_mapping("e1", {})

    def test_pool_idempotent_and_mean(self):
        f = UnitFuzzyNumber(0.1, 0.2, 0.3, 0.4)
        assert pool([f, f]) == f
        assert pool([crisp(0.4), crisp(0.8)]).a == pytest.approx(0.6)
        mixed = pool([UnitFuzzyNumber(0.1, 0.2, 0.3, 0.4), UnitFuzzyNumber(0.3, 0.4, 0.5, 0.6)])
        assert tuple(mixed) == pytest.approx((0.2, 0.3, 0.4, 0.5))

    def test_pool_needs_two(self):
        with pytest.raises(ValueError):
            pool([crisp(0.5)])


class TestGraphValidation:
    def test_needs_ground_and_warrant(self):
        with pytest.raises(GraphStructureError):
            ArgumentGraph("c", (), (Warrant("w1", ("g1",), crisp(1.0)),))
        with pytest.raises(GraphStructureError):
            ArgumentGraph("c", (Ground("g1", "", crisp(1.0)),), ())

    def test_dangling_ground_ref(self):
        with pytest.raises(GraphStructureError):
            ArgumentGraph(
                "c", (Ground("g1", "", crisp(1.0)),), (Warrant("w1", ("g9",), crisp(1.0)),)
            )

    def test_duplicate_refs(self):
        with pytest.raises(GraphStructureError):
            ArgumentGraph(
                "c",
                (Ground("g1", "", crisp(1.0)), Ground("g1", "", crisp(0.5))),
                (Warrant("w1", ("g1",), crisp(1.0)),),
            )

    def test_warrant_without_grounds(self):
        with pytest.raises(GraphStructureError):
            Warrant("w1", (), crisp(1.0))

    def test_backing_must_reference_existing_warrant_once(self):
        g = (Ground("g1", "", crisp(1.0)),)
        w = (Warrant("w1", ("g1",), crisp(1.0)),)
        with pytest.raises(GraphStructureError):
            ArgumentGraph("c", g, w, backings=(Backing("w9", crisp(1.0)),))
        with pytest.raises(GraphStructureError):
            ArgumentGraph("c", g, w, backings=(Backing("w1", crisp(1.0)), Backing("w1", crisp(0.5))))

    def test_rebuttal_target_validation(self):
        g = (Ground("g1", "", crisp(1.0)),)
        w = (Warrant("w1", ("g1",), crisp(1.0)),)
        with pytest.raises(GraphStructureError):
            Rebuttal("ground", "g1", crisp(0.5))
        with pytest.raises(GraphStructureError):
            Rebuttal("claim", "w1", crisp(0.5))
        with pytest.raises(GraphStructureError):
            ArgumentGraph("c", g, w, rebuttals=(Rebuttal("warrant", "w9", crisp(0.5)),))

    def test_eval_config_validation(self):
        with pytest.raises(ValueError):
            EvalConfig(aggregation="sum")
        with pytest.raises(ValueError):
            EvalConfig(rebuttal_style="veto")


class TestSerialization:
    def test_graph_round_trip(self):
        graph = ArgumentGraph(
            claim="c",
            qualifier="L4",
            grounds=(Ground("g1", "s1", crisp(0.9), support=("doc-1",)),),
            warrants=(Warrant("w1", ("g1",), "usually"), Warrant("w2", ("g1",), crisp(0.7))),
            backings=(Backing("w1", crisp(0.8)),),
            rebuttals=(Rebuttal("claim", None, crisp(0.2)),),
        )
        assert graph_from_dict(graph_to_dict(graph)) == graph

    def test_evaluation_to_dict_shape(self):
        out = evaluate(_crisp_graph(), QuantifierLexicon(), OUT)
        data = evaluation_to_dict(out)
        assert data["claim_credibility"]["a"] == 0.315
        assert data["lines"][0]["warrant"] == "w1"
        assert [t["op"] for t in data["trace"]][-1] == "rebut-complement"
        assert data["label"]["name"] == out.label.name
