"""Session state machine and request handlers.

Handlers operate on JSON-level dicts against a DataStore, so the HTTP app
and the CLI share one implementation. Session state is the persisted JSON
itself; every mutation bumps the version and rewrites the file atomically.

Argument sessions walk building -> (pending-ambiguity)* -> evaluated ->
(agreed | revising -> evaluated ...). Elicitation sessions stay in
pending-elicitation until the last chain finishes, then move to completed
and publish the calibrated lexicon under the session owner.
"""

from __future__ import annotations

from typing import Optional

from ..argument import (
    ArgumentGraph,
    EvalConfig,
    Evaluation,
    GraphStructureError,
    PendingAmbiguities,
    QuantifierLexicon,
    UnknownQuantifierError,
    compare_evaluations,
    default_quantifier_lexicon,
    evaluate,
    evaluation_to_dict,
    graph_from_dict,
    graph_to_dict,
    lookup_quantifier,
    resolve_ambiguity,
)
from ..elicitation import CalibrationFailedError, LexiconElicitor
from ..fuzzy import UnitFuzzyNumber
from ..lexicon import Lexicon, LexiconError, default_lexicon
from .store import DataStore, new_session_id

DEFAULT_OUTPUT_LABELS = 5


class UnknownSessionError(KeyError):
    pass


class VersionConflictError(RuntimeError):
    """The client acted on a stale session version."""


class QuestionConflictError(RuntimeError):
    """The referenced question is not the currently pending one."""


class SessionValidationError(ValueError):
    pass


def _graph(state: dict) -> Optional[ArgumentGraph]:
    return graph_from_dict(state["graph"]) if state.get("graph") else None


def _qlex(state: dict) -> QuantifierLexicon:
    return QuantifierLexicon.from_dict(state["quantifiers"])


def _output_lexicon(state: dict) -> Lexicon:
    return Lexicon.from_dict(state["output_lexicon"])


def _resolutions_map(state: dict) -> dict[str, UnitFuzzyNumber]:
    return {
        item["warrant"]: UnitFuzzyNumber.from_dict(item["meaning"])
        for item in state["resolutions"]
    }


def create_session(store: DataStore, request: dict) -> dict:
    """Create an argument or elicitation session and persist it."""
    mode = request.get("mode", "argument")
    sid = new_session_id()
    if mode == "argument":
        graph_data = request.get("graph")
        if graph_data is not None:
            try:
                graph_data = graph_to_dict(graph_from_dict(graph_data))
            except (GraphStructureError, ValueError, KeyError, TypeError) as exc:
                raise SessionValidationError(f"invalid argument graph: {exc}") from exc
        out = request.get("output_lexicon")
        try:
            out_lexicon = (
                Lexicon.from_dict(out) if out else default_lexicon(DEFAULT_OUTPUT_LABELS)
            )
        except LexiconError as exc:
            raise SessionValidationError(f"invalid output lexicon: {exc}") from exc
        quantifiers = request.get("quantifiers")
        qlex = (
            QuantifierLexicon.from_dict(quantifiers)
            if quantifiers
            else default_quantifier_lexicon()
        )
        cfg = request.get("eval_config") or {}
        try:
            eval_config = EvalConfig(
                aggregation=cfg.get("aggregation", "max"),
                rebuttal_style=cfg.get("rebuttal_style", "complement"),
            )
        except ValueError as exc:
            raise SessionValidationError(str(exc)) from exc
        state = {
            "id": sid,
            "mode": "argument",
            "phase": "building",
            "version": 0,
            "graph": graph_data,
            "resolutions": [],
            "evaluation": None,
            "output_lexicon": out_lexicon.to_dict(),
            "quantifiers": qlex.to_dict(),
            "eval_config": {
                "aggregation": eval_config.aggregation,
                "rebuttal_style": eval_config.rebuttal_style,
            },
        }
    elif mode == "elicitation":
        labels = request.get("labels") or []
        try:
            elicitor = LexiconElicitor(
                labels,
                owner=request.get("owner", "subject"),
                trials=int(request.get("trials", 400)),
                step_c=float(request.get("step_c", 0.2)),
                pilot_reps=int(request.get("pilot_reps", 5)),
            )
        except ValueError as exc:
            raise SessionValidationError(str(exc)) from exc
        state = {
            "id": sid,
            "mode": "elicitation",
            "phase": "pending-elicitation",
            "version": 0,
            "elicitor": elicitor.to_state(),
            "lexicon_result": None,
            "failure": None,
        }
    else:
        raise SessionValidationError(f"unknown session mode {mode!r}")
    store.sessions.save(sid, state)
    return state


def load_session(store: DataStore, sid: str) -> dict:
    state = store.sessions.load(sid)
    if state is None:
        raise UnknownSessionError(sid)
    return state


def _first_ambiguity(state: dict) -> Optional[dict]:
    """First unresolved ambiguous quantifier, in warrant order."""
    graph = _graph(state)
    if graph is None:
        return None
    qlex = _qlex(state)
    resolved = {item["warrant"] for item in state["resolutions"]}
    for warrant in graph.warrants:
        if isinstance(warrant.quantifier, UnitFuzzyNumber) or warrant.ref in resolved:
            continue
        try:
            looked = lookup_quantifier(warrant.quantifier, qlex)
        except UnknownQuantifierError:
            continue  # surfaces as an evaluation-time error, not a question
        if hasattr(looked, "senses"):
            return {
                "kind": "ambiguity",
                "question_id": f"amb:{warrant.ref}",
                "warrant": warrant.ref,
                "term": looked.term,
                "senses": [
                    {"description": s.description, "meaning": s.meaning.to_dict()}
                    for s in looked.senses
                ],
            }
    return None


def _comparison(state: dict) -> Optional[dict]:
    graph = _graph(state)
    if graph is None or graph.qualifier is None or state.get("evaluation") is None:
        return None
    analytic = UnitFuzzyNumber.from_dict(state["evaluation"]["claim_credibility"])
    try:
        result = compare_evaluations(analytic, graph.qualifier, _output_lexicon(state))
    except KeyError:
        return None
    return {
        "agree": result.agree,
        "distance": result.distance,
        "median_gap": result.median_gap,
        "subjective": graph.qualifier,
        "analytic_label": state["evaluation"]["label"]["name"],
    }


def next_question(store: DataStore, sid: str) -> Optional[dict]:
    """The single currently pending question, or None when ready."""
    state = load_session(store, sid)
    return _question_for(state)


def _question_for(state: dict) -> Optional[dict]:
    if state["mode"] == "elicitation":
        if state["phase"] != "pending-elicitation":
            return None
        elicitor = LexiconElicitor.from_state(state["elicitor"])
        query = elicitor.query()
        if query is None:
            return None
        return {
            "kind": "elicitation",
            "question_id": f"stim:{query.label}:{query.key}:{query.trial}",
            "label": query.label,
            "stimulus": query.stimulus,
            "key": query.key,
            "trial": query.trial,
        }
    if state["phase"] in ("agreed",):
        return None
    question = _first_ambiguity(state)
    if question is not None:
        return question
    if state["phase"] == "evaluated":
        comparison = _comparison(state)
        if comparison is not None and not comparison["agree"]:
            return {"kind": "review", "question_id": "review", "comparison": comparison}
    return None


def _bump(store: DataStore, state: dict) -> dict:
    state["version"] += 1
    store.sessions.save(state["id"], state)
    return state


def answer(store: DataStore, sid: str, request: dict) -> dict:
    """Apply one answer (resolution, response, review, or revision)."""
    with store.sessions.lock(sid):
        state = load_session(store, sid)
        if request.get("version") != state["version"]:
            raise VersionConflictError(
                f"version {request.get('version')} is stale; session is at {state['version']}"
            )
        payload = request.get("payload") or {}
        kind = payload.get("kind")
        if kind == "resolve":
            _apply_resolve(state, request.get("question_id"), payload)
        elif kind == "respond":
            _apply_respond(store, state, request.get("question_id"), payload)
        elif kind == "review":
            _apply_review(state, request.get("question_id"), payload)
        elif kind == "revise-ground":
            _apply_revise_ground(state, payload)
        elif kind == "set-graph":
            _apply_set_graph(state, payload)
        else:
            raise SessionValidationError(f"unknown answer kind {kind!r}")
        return _bump(store, state)


def _require_question(state: dict, question_id: Optional[str], kind: str) -> dict:
    question = _question_for(state)
    if question is None or question["kind"] != kind or question["question_id"] != question_id:
        current = question["question_id"] if question else None
        raise QuestionConflictError(
            f"question {question_id!r} is not pending (current: {current!r})"
        )
    return question


def _apply_resolve(state: dict, question_id: Optional[str], payload: dict) -> None:
    if state["mode"] != "argument":
        raise SessionValidationError("resolutions apply to argument sessions")
    question = _require_question(state, question_id, "ambiguity")
    graph = _graph(state)
    qlex = _qlex(state)
    warrant = next(w for w in graph.warrants if w.ref == question["warrant"])
    pending = lookup_quantifier(warrant.quantifier, qlex)
    if payload.get("custom") is not None:
        try:
            choice = UnitFuzzyNumber.from_dict(payload["custom"])
        except (ValueError, KeyError, TypeError) as exc:
            raise SessionValidationError(f"invalid custom trapezoid: {exc}") from exc
        resolved = resolve_ambiguity(pending, choice)
        chosen: object = "custom"
    else:
        index = payload.get("choice")
        if not isinstance(index, int):
            raise SessionValidationError("resolve needs a sense index or a custom trapezoid")
        try:
            resolved = resolve_ambiguity(pending, index)
        except IndexError as exc:
            raise SessionValidationError(str(exc)) from exc
        chosen = index
    state["resolutions"].append(
        {
            "warrant": warrant.ref,
            "term": pending.term,
            "choice": chosen,
            "meaning": resolved.meaning.to_dict(),
        }
    )
    remaining = _first_ambiguity(state)
    state["phase"] = "pending-ambiguity" if remaining else "building"


def _apply_respond(store: DataStore, state: dict, question_id: Optional[str], payload: dict) -> None:
    if state["mode"] != "elicitation":
        raise SessionValidationError("responses apply to elicitation sessions")
    _require_question(state, question_id, "elicitation")
    if not isinstance(payload.get("accept"), bool):
        raise SessionValidationError("respond needs a boolean 'accept'")
    elicitor = LexiconElicitor.from_state(state["elicitor"])
    elicitor.submit(payload["accept"])
    state["elicitor"] = elicitor.to_state()
    if elicitor.done:
        state["phase"] = "completed"
        try:
            lexicon = elicitor.result()
        except CalibrationFailedError as exc:
            state["failure"] = str(exc)
            state["lexicon_result"] = None
        else:
            state["lexicon_result"] = lexicon.to_dict()
            store.lexicons.save(lexicon.owner, lexicon.to_dict())


def _apply_review(state: dict, question_id: Optional[str], payload: dict) -> None:
    if state["mode"] != "argument":
        raise SessionValidationError("reviews apply to argument sessions")
    _require_question(state, question_id, "review")
    decision = payload.get("decision")
    if decision == "agree":
        state["phase"] = "agreed"
    elif decision == "revise":
        state["phase"] = "revising"
    else:
        raise SessionValidationError(f"review decision must be 'agree' or 'revise', got {decision!r}")


def _graph_mutation_phase(state: dict) -> str:
    return "revising" if state["phase"] in ("evaluated", "revising", "agreed") else "building"


def _apply_revise_ground(state: dict, payload: dict) -> None:
    if state["mode"] != "argument":
        raise SessionValidationError("ground revisions apply to argument sessions")
    graph_data = state.get("graph")
    if graph_data is None:
        raise SessionValidationError("session has no graph")
    ref = payload.get("ground_ref")
    grounds = {g["ref"]: g for g in graph_data["grounds"]}
    if ref not in grounds:
        raise SessionValidationError(f"unknown ground {ref!r}")
    try:
        credibility = UnitFuzzyNumber.from_dict(payload["credibility"])
    except (ValueError, KeyError, TypeError) as exc:
        raise SessionValidationError(f"invalid credibility: {exc}") from exc
    grounds[ref]["credibility"] = credibility.to_dict()
    state["evaluation"] = None
    state["phase"] = _graph_mutation_phase(state)


def _apply_set_graph(state: dict, payload: dict) -> None:
    if state["mode"] != "argument":
        raise SessionValidationError("graph updates apply to argument sessions")
    try:
        graph = graph_from_dict(payload["graph"])
    except (GraphStructureError, ValueError, KeyError, TypeError) as exc:
        raise SessionValidationError(f"invalid argument graph: {exc}") from exc
    state["graph"] = graph_to_dict(graph)
    # resolutions for warrants that no longer exist are dropped
    refs = {w.ref for w in graph.warrants}
    state["resolutions"] = [r for r in state["resolutions"] if r["warrant"] in refs]
    state["evaluation"] = None
    state["phase"] = _graph_mutation_phase(state)


def evaluate_session(store: DataStore, sid: str) -> dict:
    """Evaluate the argument; stores the result or the pending-ambiguity set."""
    with store.sessions.lock(sid):
        state = load_session(store, sid)
        if state["mode"] != "argument":
            raise SessionValidationError("only argument sessions evaluate")
        graph = _graph(state)
        if graph is None:
            raise SessionValidationError("session has no graph to evaluate")
        try:
            outcome = evaluate(
                graph,
                _qlex(state),
                _output_lexicon(state),
                config=EvalConfig(**state["eval_config"]),
                resolutions=_resolutions_map(state),
            )
        except UnknownQuantifierError as exc:
            raise SessionValidationError(f"unknown quantifier term {exc.args[0]!r}") from exc
        if isinstance(outcome, PendingAmbiguities):
            state["phase"] = "pending-ambiguity"
            _bump(store, state)
            return {
                "status": "pending",
                "session": state,
                "pending": [
                    {
                        "warrant": item.warrant_ref,
                        "term": item.ambiguous.term,
                        "senses": [
                            {"description": s.description, "meaning": s.meaning.to_dict()}
                            for s in item.ambiguous.senses
                        ],
                    }
                    for item in outcome.items
                ],
            }
        state["evaluation"] = evaluation_to_dict(outcome)
        state["phase"] = "evaluated"
        comparison = _comparison(state)
        if comparison is not None and comparison["agree"]:
            # subjective and analytic evaluations are about the same: the
            # interactive loop ends here
            state["phase"] = "agreed"
        _bump(store, state)
        return {
            "status": "evaluated",
            "session": state,
            "evaluation": state["evaluation"],
            "comparison": comparison,
        }


def session_view(state: dict) -> dict:
    """Public view of a session: stored state plus derived comparison."""
    view = dict(state)
    if state["mode"] == "argument":
        view["comparison"] = _comparison(state)
        view.pop("quantifiers", None)
    else:
        view.pop("elicitor", None)
        elicitor_state = state.get("elicitor")
        view["progress"] = _elicitation_progress(elicitor_state)
    return view


def _elicitation_progress(elicitor_state: Optional[dict]) -> Optional[dict]:
    if elicitor_state is None:
        return None
    names = elicitor_state["label_names"]
    return {
        "labels_total": len(names),
        "labels_done": elicitor_state["current"],
        "current_label": (
            names[elicitor_state["current"]]
            if elicitor_state["current"] < len(names)
            else None
        ),
    }


def get_lexicon(store: DataStore, owner: str) -> Optional[dict]:
    return store.lexicons.load(owner)


def put_lexicon(store: DataStore, owner: str, data: dict) -> dict:
    payload = dict(data)
    payload["owner"] = owner
    try:
        lexicon = Lexicon.from_dict(payload)
    except (LexiconError, KeyError, ValueError, TypeError) as exc:
        raise SessionValidationError(f"invalid lexicon: {exc}") from exc
    store.lexicons.save(owner, lexicon.to_dict())
    return lexicon.to_dict()


def check_pooling(request: dict) -> dict:
    from ..argument import KnowledgeBase, pooling_admissible

    def kb(data: dict, which: str) -> KnowledgeBase:
        grounds = data.get("grounds") or {}
        try:
            return KnowledgeBase.from_mapping(
                data.get("expert", which),
                {ref: UnitFuzzyNumber.from_dict(v) for ref, v in grounds.items()},
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise SessionValidationError(f"invalid knowledge base {which}: {exc}") from exc

    theta = float(request.get("theta", 0.5))
    result = pooling_admissible(kb(request["kb1"], "kb1"), kb(request["kb2"], "kb2"), theta)
    return {"admissible": result.admissible, "overlap": result.overlap, "theta": theta}
