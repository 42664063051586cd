"""Pydantic request and response models for the HTTP API.

Request models forbid unknown fields so client typos fail loudly; response
models mirror the persisted JSON so the UI and tests can rely on one shape.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class Trapezoid(BaseModel):
    model_config = ConfigDict(extra="forbid")
    a: float
    b: float
    c: float
    d: float


class LabelModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str
    meaning: Trapezoid


class LexiconModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    owner: str
    labels: list[LabelModel]


class SenseModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    term: str
    description: str = ""
    meaning: Trapezoid


class QuantifierLexiconModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    senses: list[SenseModel]


class SenseChoiceView(BaseModel):
    """A candidate sense offered in a disambiguation question."""

    description: str = ""
    meaning: Trapezoid


class GroundModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    ref: str
    statement: str = ""
    credibility: Trapezoid
    support: list[str] = Field(default_factory=list)


class WarrantModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    ref: str
    grounds: list[str]
    quantifier: Union[str, Trapezoid]


class BackingModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    warrant: str
    reliability: Trapezoid


class RebuttalModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    target_kind: Literal["warrant", "claim"]
    target_ref: Optional[str] = None
    strength: Trapezoid


class GraphModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    claim: str
    qualifier: Optional[str] = None
    grounds: list[GroundModel]
    warrants: list[WarrantModel]
    backings: list[BackingModel] = Field(default_factory=list)
    rebuttals: list[RebuttalModel] = Field(default_factory=list)


class EvalConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    aggregation: Literal["max", "min"] = "max"
    rebuttal_style: Literal["complement", "bounded-difference"] = "complement"


class CreateSessionRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    mode: Literal["argument", "elicitation"] = "argument"
    # argument mode
    graph: Optional[GraphModel] = None
    output_lexicon: Optional[LexiconModel] = None
    quantifiers: Optional[QuantifierLexiconModel] = None
    eval_config: Optional[EvalConfigModel] = None
    # elicitation mode
    labels: Optional[list[str]] = None
    owner: str = "subject"
    trials: int = 400
    step_c: float = 0.2
    pilot_reps: int = 5


class ResolvePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["resolve"]
    choice: Optional[int] = None
    custom: Optional[Trapezoid] = None


class RespondPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["respond"]
    accept: bool


class ReviewPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["review"]
    decision: Literal["agree", "revise"]


class ReviseGroundPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["revise-ground"]
    ground_ref: str
    credibility: Trapezoid


class SetGraphPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["set-graph"]
    graph: GraphModel


AnswerPayload = Annotated[
    Union[ResolvePayload, RespondPayload, ReviewPayload, ReviseGroundPayload, SetGraphPayload],
    Field(discriminator="kind"),
]


class AnswerRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    question_id: Optional[str] = None
    version: int
    payload: AnswerPayload


class ResolutionView(BaseModel):
    warrant: str
    term: str
    choice: Union[int, str]
    meaning: Trapezoid


class LineView(BaseModel):
    warrant: str
    credibility: Trapezoid


class TraceStepView(BaseModel):
    op: str
    target: str
    result: Trapezoid


class EvaluationView(BaseModel):
    claim_credibility: Trapezoid
    lines: list[LineView]
    label: LabelModel
    trace: list[TraceStepView]


class ComparisonView(BaseModel):
    agree: bool
    distance: float
    median_gap: float
    subjective: str
    analytic_label: str


class ProgressView(BaseModel):
    labels_total: int
    labels_done: int
    current_label: Optional[str] = None


class SessionView(BaseModel):
    id: str
    mode: Literal["argument", "elicitation"]
    phase: str
    version: int
    graph: Optional[GraphModel] = None
    resolutions: list[ResolutionView] = Field(default_factory=list)
    evaluation: Optional[EvaluationView] = None
    comparison: Optional[ComparisonView] = None
    output_lexicon: Optional[LexiconModel] = None
    eval_config: Optional[EvalConfigModel] = None
    lexicon_result: Optional[LexiconModel] = None
    failure: Optional[str] = None
    progress: Optional[ProgressView] = None


class QuestionView(BaseModel):
    kind: Literal["ambiguity", "elicitation", "review"]
    question_id: str
    # ambiguity
    warrant: Optional[str] = None
    term: Optional[str] = None
    senses: Optional[list[SenseChoiceView]] = None
    # elicitation
    label: Optional[str] = None
    stimulus: Optional[float] = None
    key: Optional[str] = None
    trial: Optional[int] = None
    # review
    comparison: Optional[ComparisonView] = None


class QuestionResponse(BaseModel):
    question: Optional[QuestionView] = None


class AnswerResponse(BaseModel):
    session: SessionView
    question: Optional[QuestionView] = None


class PendingItemView(BaseModel):
    warrant: str
    term: str
    senses: list[SenseChoiceView]


class EvaluateResponse(BaseModel):
    status: Literal["pending", "evaluated"]
    session: SessionView
    pending: Optional[list[PendingItemView]] = None
    evaluation: Optional[EvaluationView] = None
    comparison: Optional[ComparisonView] = None


class KnowledgeBaseModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    expert: str = "expert"
    grounds: dict[str, Trapezoid]


class PoolingRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kb1: KnowledgeBaseModel
    kb2: KnowledgeBaseModel
    theta: float = 0.5


class PoolingResponse(BaseModel):
    admissible: bool
    overlap: float
    theta: float


class LexiconPutRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    labels: list[LabelModel]
