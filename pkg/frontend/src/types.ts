/** Wire types mirroring the service JSON schemas. */

export interface Trapezoid {
  a: number;
  b: number;
  c: number;
  d: number;
}

export interface LabelModel {
  name: string;
  meaning: Trapezoid;
}

export interface LexiconModel {
  owner: string;
  labels: LabelModel[];
}

export interface SenseChoice {
  description: string;
  meaning: Trapezoid;
}

export interface GroundModel {
  ref: string;
  statement?: string;
  credibility: Trapezoid;
  support?: string[];
}

export interface WarrantModel {
  ref: string;
  grounds: string[];
  quantifier: string | Trapezoid;
}

export interface BackingModel {
  warrant: string;
  reliability: Trapezoid;
}

export interface RebuttalModel {
  target_kind: "warrant" | "claim";
  target_ref?: string | null;
  strength: Trapezoid;
}

export interface GraphModel {
  claim: string;
  qualifier?: string | null;
  grounds: GroundModel[];
  warrants: WarrantModel[];
  backings?: BackingModel[];
  rebuttals?: RebuttalModel[];
}

export interface ResolutionView {
  warrant: string;
  term: string;
  choice: number | string;
  meaning: Trapezoid;
}

export interface LineView {
  warrant: string;
  credibility: Trapezoid;
}

export interface TraceStepView {
  op: string;
  target: string;
  result: Trapezoid;
}

export interface EvaluationView {
  claim_credibility: Trapezoid;
  lines: LineView[];
  label: LabelModel;
  trace: TraceStepView[];
}

export interface ComparisonView {
  agree: boolean;
  distance: number;
  median_gap: number;
  subjective: string;
  analytic_label: string;
}

export interface ProgressView {
  labels_total: number;
  labels_done: number;
  current_label?: string | null;
}

export interface SessionView {
  id: string;
  mode: "argument" | "elicitation";
  phase: string;
  version: number;
  graph?: GraphModel | null;
  resolutions: ResolutionView[];
  evaluation?: EvaluationView | null;
  comparison?: ComparisonView | null;
  output_lexicon?: LexiconModel | null;
  lexicon_result?: LexiconModel | null;
  failure?: string | null;
  progress?: ProgressView | null;
}

export interface QuestionView {
  kind: "ambiguity" | "elicitation" | "review";
  question_id: string;
  warrant?: string | null;
  term?: string | null;
  senses?: SenseChoice[] | null;
  label?: string | null;
  stimulus?: number | null;
  key?: string | null;
  trial?: number | null;
  comparison?: ComparisonView | null;
}

export type AnswerPayload =
  | { kind: "resolve"; choice?: number; custom?: Trapezoid }
  | { kind: "respond"; accept: boolean }
  | { kind: "review"; decision: "agree" | "revise" }
  | { kind: "revise-ground"; ground_ref: string; credibility: Trapezoid }
  | { kind: "set-graph"; graph: GraphModel };

export interface AnswerResponse {
  session: SessionView;
  question: QuestionView | null;
}

export interface PendingItemView {
  warrant: string;
  term: string;
  senses: SenseChoice[];
}

export interface EvaluateResponse {
  status: "pending" | "evaluated";
  session: SessionView;
  pending?: PendingItemView[] | null;
  evaluation?: EvaluationView | null;
  comparison?: ComparisonView | null;
}

export interface CreateSessionRequest {
  mode?: "argument" | "elicitation";
  graph?: GraphModel;
  output_lexicon?: LexiconModel;
  eval_config?: { aggregation?: string; rebuttal_style?: string };
  labels?: string[];
  owner?: string;
  trials?: number;
  step_c?: number;
  pilot_reps?: number;
}

export function trapezoidMedian(t: Trapezoid): number {
  return (t.b + t.c) / 2;
}

export function crisp(x: number): Trapezoid {
  return { a: x, b: x, c: x, d: x };
}
