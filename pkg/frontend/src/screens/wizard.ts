/** Calibration wizard: the live-responder side of lexicon elicitation.
 *
 * Each trial shows the stimulus as a random-dot proportion display and asks
 * whether the current label applies. The layout seed is derived from the
 * question coordinates, so a given trial always looks the same.
 */

import { el } from "../dom.js";
import { renderDots } from "../dots.js";
import { plotLexicon } from "../plot.js";
import { hashString } from "../rand.js";
import type { LexiconModel, ProgressView, QuestionView } from "../types.js";

export interface WizardStartHandlers {
  onStart(labels: string[], owner: string, trials: number, pilotReps: number): Promise<string | null>;
}

export class WizardStartScreen {
  readonly element: HTMLElement;
  private labels: HTMLInputElement;
  private owner: HTMLInputElement;
  private trials: HTMLInputElement;
  private pilotReps: HTMLInputElement;
  private error: HTMLElement;

  constructor(host: Element, private readonly handlers: WizardStartHandlers) {
    const doc = host.ownerDocument;
    this.element = el(doc, "section", { class: "wizard-start", "data-test": "wizard-start" });
    this.labels = el(doc, "input", { "data-test": "wizard-labels", placeholder: "labels, comma-separated" });
    this.owner = el(doc, "input", { "data-test": "wizard-owner", value: "subject" });
    this.trials = el(doc, "input", { "data-test": "wizard-trials", value: "400" });
    this.pilotReps = el(doc, "input", { "data-test": "wizard-pilot-reps", value: "5" });
    const start = el(doc, "button", { "data-test": "wizard-begin" }, "Start calibration");
    start.addEventListener("click", () => void this.start());
    this.error = el(doc, "p", { class: "error", "data-test": "wizard-error" });
    this.element.append(
      el(doc, "h2", {}, "Calibrate your own labels"),
      el(doc, "label", {}, "Labels ", this.labels),
      el(doc, "label", {}, "Owner ", this.owner),
      el(doc, "label", {}, "Trials per staircase ", this.trials),
      el(doc, "label", {}, "Pilot repetitions ", this.pilotReps),
      start,
      this.error,
    );
    host.appendChild(this.element);
  }

  private async start(): Promise<void> {
    const labels = this.labels.value
      .split(",")
      .map((p) => p.trim())
      .filter((p) => p !== "");
    if (labels.length < 2) {
      this.error.textContent = "calibration needs at least two labels";
      return;
    }
    this.error.textContent =
      (await this.handlers.onStart(
        labels,
        this.owner.value.trim() || "subject",
        Number(this.trials.value),
        Number(this.pilotReps.value),
      )) ?? "";
  }
}

export interface WizardTrialHandlers {
  onAnswer(accept: boolean): Promise<string | null>;
}

export class WizardTrialScreen {
  readonly element: HTMLElement;
  private error: HTMLElement;

  constructor(
    host: Element,
    question: QuestionView,
    progress: ProgressView | null,
    private readonly handlers: WizardTrialHandlers,
  ) {
    const doc = host.ownerDocument;
    this.element = el(doc, "section", { class: "wizard-trial", "data-test": "wizard-trial" });
    const label = question.label ?? "";
    if (progress) {
      this.element.append(
        el(
          doc,
          "p",
          { "data-test": "wizard-progress" },
          `label ${progress.labels_done + 1} of ${progress.labels_total}`,
        ),
      );
    }
    this.element.append(
      el(
        doc,
        "p",
        {},
        "Does ",
        el(doc, "strong", { "data-test": "wizard-label" }, `“${label}”`),
        " describe the share of white dots below?",
      ),
      el(
        doc,
        "p",
        { class: "muted", "data-test": "wizard-step" },
        `${question.key ?? ""} #${question.trial ?? 0}`,
      ),
    );
    const dotHost = el(doc, "div", { "data-test": "dot-host" });
    const seed = hashString(`${label}:${question.key ?? ""}:${question.trial ?? 0}`);
    renderDots(dotHost, question.stimulus ?? 0, seed);
    this.element.append(dotHost);
    const yes = el(doc, "button", { "data-test": "applies" }, "Applies");
    const no = el(doc, "button", { "data-test": "does-not-apply" }, "Does not apply");
    yes.addEventListener("click", () => void this.answer(true));
    no.addEventListener("click", () => void this.answer(false));
    this.error = el(doc, "p", { class: "error", "data-test": "wizard-trial-error" });
    this.element.append(yes, no, this.error);
    host.appendChild(this.element);
  }

  private async answer(accept: boolean): Promise<void> {
    this.error.textContent = (await this.handlers.onAnswer(accept)) ?? "";
  }
}

export class WizardDoneScreen {
  readonly element: HTMLElement;

  constructor(host: Element, lexicon: LexiconModel | null, failure: string | null) {
    const doc = host.ownerDocument;
    this.element = el(doc, "section", { class: "wizard-done", "data-test": "wizard-done" });
    if (lexicon) {
      this.element.append(
        el(doc, "h2", {}, "Your calibrated lexicon"),
        el(doc, "p", {}, "saved for owner ", el(doc, "strong", { "data-test": "lexicon-owner" }, lexicon.owner)),
      );
      const overlay = el(doc, "div", { "data-test": "lexicon-overlay" });
      plotLexicon(overlay, lexicon.labels);
      this.element.append(overlay);
      const list = el(doc, "ul", { "data-test": "lexicon-labels" });
      for (const label of lexicon.labels) {
        const m = label.meaning;
        list.append(
          el(
            doc,
            "li",
            { "data-label": label.name },
            `${label.name}: (${m.a.toFixed(3)}, ${m.b.toFixed(3)}, ${m.c.toFixed(3)}, ${m.d.toFixed(3)})`,
          ),
        );
      }
      this.element.append(list);
    } else {
      this.element.append(
        el(doc, "h2", {}, "Calibration failed"),
        el(doc, "p", { class: "error", "data-test": "wizard-failure" }, failure ?? "unknown failure"),
      );
    }
    host.appendChild(this.element);
  }
}
