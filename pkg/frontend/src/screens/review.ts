/** Evaluation display and the credibility review loop.
 *
 * The analytic result is drawn next to the expert's own qualifier; on
 * disagreement the expert either accepts the analytic verdict or goes back to
 * the builder to add grounds or revise credibilities.
 */

import { el } from "../dom.js";
import { plotTrapezoids } from "../plot.js";
import type { ComparisonView, EvaluationView } from "../types.js";
import { trapezoidMedian } from "../types.js";

function signed(value: number): string {
  return (value >= 0 ? "+" : "") + value.toFixed(3);
}

/** Render the analytic evaluation (and the comparison when present). */
export function renderEvaluation(
  host: Element,
  evaluation: EvaluationView,
  comparison: ComparisonView | null,
): HTMLElement {
  const doc = host.ownerDocument;
  const panel = el(doc, "section", { class: "evaluation", "data-test": "evaluation" });
  panel.append(el(doc, "h2", {}, "Analytic credibility"));
  plotTrapezoids(panel, [
    { trapezoid: evaluation.claim_credibility, name: "analytic" },
    { trapezoid: evaluation.label.meaning, name: "label" },
  ]);
  panel.append(
    el(
      doc,
      "p",
      {},
      "median ",
      el(doc, "strong", { "data-test": "analytic-median" }, trapezoidMedian(evaluation.claim_credibility).toFixed(3)),
      " reads as ",
      el(doc, "strong", { "data-test": "analytic-label" }, evaluation.label.name),
    ),
  );
  const lines = el(doc, "ul", { "data-test": "lines" });
  for (const line of evaluation.lines) {
    lines.append(
      el(doc, "li", {}, `${line.warrant}: median ${trapezoidMedian(line.credibility).toFixed(3)}`),
    );
  }
  panel.append(lines);
  const trace = el(doc, "ol", { class: "trace", "data-test": "trace" });
  for (const step of evaluation.trace) {
    trace.append(el(doc, "li", {}, `${step.op} ${step.target}`));
  }
  panel.append(el(doc, "details", {}, el(doc, "summary", {}, "trace"), trace));
  if (comparison) {
    panel.append(
      el(
        doc,
        "p",
        { class: "comparison" },
        "you said ",
        el(doc, "strong", { "data-test": "subjective-label" }, comparison.subjective),
        "; the analysis says ",
        el(doc, "strong", {}, comparison.analytic_label),
        " (median gap ",
        el(doc, "strong", { "data-test": "median-gap" }, signed(comparison.median_gap)),
        ", ",
        el(doc, "span", { "data-test": "comparison-agree" }, comparison.agree ? "agree" : "disagree"),
        ")",
      ),
    );
  }
  host.appendChild(panel);
  return panel;
}

export interface ReviewHandlers {
  onDecision(decision: "agree" | "revise"): Promise<string | null>;
}

export class ReviewScreen {
  readonly element: HTMLElement;
  private error: HTMLElement;

  constructor(
    host: Element,
    evaluation: EvaluationView,
    comparison: ComparisonView,
    private readonly handlers: ReviewHandlers,
  ) {
    const doc = host.ownerDocument;
    this.element = el(doc, "section", { class: "review", "data-test": "review" });
    renderEvaluation(this.element, evaluation, comparison);
    const agree = el(doc, "button", { "data-test": "agree" }, "Agree with the analysis");
    const disagree = el(doc, "button", { "data-test": "disagree" }, "Disagree: revise the argument");
    agree.addEventListener("click", () => void this.decide("agree"));
    disagree.addEventListener("click", () => void this.decide("revise"));
    this.error = el(doc, "p", { class: "error", "data-test": "review-error" });
    this.element.append(agree, disagree, this.error);
    host.appendChild(this.element);
  }

  private async decide(decision: "agree" | "revise"): Promise<void> {
    this.error.textContent = (await this.handlers.onDecision(decision)) ?? "";
  }
}
