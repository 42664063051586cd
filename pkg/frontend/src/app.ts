/** Screen controller.
 *
 * Holds nothing but the latest session and question returned by the service;
 * every render is a pure function of those, so a refresh can never change a
 * displayed decision. All mutations send the current version and a stale
 * write (409) resolves by refetching, never by overwriting.
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import { BuilderScreen } from "./screens/builder.js";
import { DialogScreen } from "./screens/dialog.js";
import { renderEvaluation, ReviewScreen } from "./screens/review.js";
import { WizardDoneScreen, WizardStartScreen, WizardTrialScreen } from "./screens/wizard.js";
import type { AnswerPayload, GraphModel, QuestionView, SessionView, Trapezoid } from "./types.js";

type Screen =
  | BuilderScreen
  | DialogScreen
  | ReviewScreen
  | WizardStartScreen
  | WizardTrialScreen
  | WizardDoneScreen
  | null;

type Nav = "home" | "builder" | "wizard";

export class App {
  session: SessionView | null = null;
  question: QuestionView | null = null;
  notice: string | null = null;
  current: Screen = null;
  private nav: Nav = "home";

  constructor(
    readonly root: HTMLElement,
    readonly api: ApiClient,
  ) {
    this.render();
  }

  /** Run one mutation; a stale-version conflict refetches instead of failing. */
  private async guard(action: () => Promise<void>): Promise<string | null> {
    try {
      await action();
      return null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.notice = "the session changed underneath you; showing the latest state";
        await this.refresh();
        return null;
      }
      return err instanceof ApiError ? err.detail : String(err);
    }
  }

  private apply(session: SessionView, question: QuestionView | null): void {
    this.session = session;
    this.question = question;
    this.render();
  }

  async refresh(): Promise<void> {
    if (this.session === null) {
      this.render();
      return;
    }
    const id = this.session.id;
    const session = await this.api.getSession(id);
    const question = await this.api.getQuestion(id);
    this.apply(session, question);
  }

  async open(id: string): Promise<string | null> {
    return this.guard(async () => {
      const session = await this.api.getSession(id);
      const question = await this.api.getQuestion(id);
      this.apply(session, question);
    });
  }

  showBuilder(): void {
    this.nav = "builder";
    this.render();
  }

  showWizard(): void {
    this.nav = "wizard";
    this.render();
  }

  async saveGraph(graph: GraphModel): Promise<string | null> {
    return this.guard(async () => {
      if (this.session === null) {
        const session = await this.api.createSession({ mode: "argument", graph });
        const question = await this.api.getQuestion(session.id);
        this.apply(session, question);
        return;
      }
      const response = await this.api.answer(this.session.id, this.session.version, {
        kind: "set-graph",
        graph,
      });
      if (response.session.phase === "revising") {
        // the review loop asked for this edit, so evaluate again right away
        await this.evaluateFrom(response.session);
        return;
      }
      this.apply(response.session, response.question);
    });
  }

  async evaluate(): Promise<string | null> {
    return this.guard(async () => {
      if (this.session === null) {
        throw new Error("no session");
      }
      await this.evaluateFrom(this.session);
    });
  }

  private async evaluateFrom(session: SessionView): Promise<void> {
    const result = await this.api.evaluate(session.id);
    const question = await this.api.getQuestion(session.id);
    this.apply(result.session, question);
  }

  async resolve(payload: AnswerPayload): Promise<string | null> {
    return this.guard(async () => {
      if (this.session === null || this.question === null) {
        throw new Error("no pending question");
      }
      const response = await this.api.answer(
        this.session.id,
        this.session.version,
        payload,
        this.question.question_id,
      );
      this.apply(response.session, response.question);
    });
  }

  async reviewDecision(decision: "agree" | "revise"): Promise<string | null> {
    return this.resolve({ kind: "review", decision });
  }

  async reviseGround(ref: string, credibility: Trapezoid): Promise<string | null> {
    return this.guard(async () => {
      if (this.session === null) {
        throw new Error("no session");
      }
      const response = await this.api.answer(this.session.id, this.session.version, {
        kind: "revise-ground",
        ground_ref: ref,
        credibility,
      });
      // a revision always re-evaluates so the reviewer sees its effect
      await this.evaluateFrom(response.session);
    });
  }

  async startWizard(
    labels: string[],
    owner: string,
    trials: number,
    pilotReps: number,
  ): Promise<string | null> {
    return this.guard(async () => {
      const session = await this.api.createSession({
        mode: "elicitation",
        labels,
        owner,
        trials,
        pilot_reps: pilotReps,
      });
      const question = await this.api.getQuestion(session.id);
      this.apply(session, question);
    });
  }

  async wizardAnswer(accept: boolean): Promise<string | null> {
    return this.resolve({ kind: "respond", accept });
  }

  render(): void {
    const doc = this.root.ownerDocument;
    clear(this.root);
    this.current = null;
    const header = el(doc, "header", {}, el(doc, "h1", {}, "verba"));
    if (this.notice !== null) {
      header.append(el(doc, "p", { class: "notice", "data-test": "notice" }, this.notice));
      this.notice = null;
    }
    if (this.session !== null) {
      header.append(
        el(
          doc,
          "p",
          { class: "muted" },
          "session ",
          el(doc, "span", { "data-test": "session-id" }, this.session.id),
          " · ",
          el(doc, "span", { "data-test": "phase" }, this.session.phase),
        ),
      );
    }
    this.root.append(header);
    if (this.session === null) {
      this.renderEntry(doc);
      return;
    }
    if (this.session.mode === "argument") {
      this.renderArgument(doc);
    } else {
      this.renderElicitation();
    }
  }

  private renderEntry(doc: Document): void {
    if (this.nav === "builder") {
      this.current = new BuilderScreen(this.root, null, {
        onSave: (graph) => this.saveGraph(graph),
      });
      return;
    }
    if (this.nav === "wizard") {
      this.current = new WizardStartScreen(this.root, {
        onStart: (labels, owner, trials, pilotReps) =>
          this.startWizard(labels, owner, trials, pilotReps),
      });
      return;
    }
    const argueButton = el(doc, "button", { "data-test": "nav-new-argument" }, "Build an argument");
    argueButton.addEventListener("click", () => this.showBuilder());
    const wizardButton = el(doc, "button", { "data-test": "nav-wizard" }, "Calibrate labels");
    wizardButton.addEventListener("click", () => this.showWizard());
    const openInput = el(doc, "input", { "data-test": "open-id", placeholder: "session id" });
    const openError = el(doc, "p", { class: "error", "data-test": "open-error" });
    const openButton = el(doc, "button", { "data-test": "open-session" }, "Resume session");
    openButton.addEventListener("click", () => {
      void this.open(openInput.value.trim()).then((err) => {
        openError.textContent = err ?? "";
      });
    });
    this.root.append(
      el(doc, "section", { "data-test": "home" }, argueButton, wizardButton, openInput, openButton, openError),
    );
  }

  private renderArgument(doc: Document): void {
    const session = this.session!;
    if (this.question?.kind === "ambiguity") {
      this.current = new DialogScreen(this.root, this.question, {
        onResolve: (payload) => this.resolve(payload),
      });
      return;
    }
    if (this.question?.kind === "review" && session.evaluation && this.question.comparison) {
      this.current = new ReviewScreen(this.root, session.evaluation, this.question.comparison, {
        onDecision: (decision) => this.reviewDecision(decision),
      });
      return;
    }
    if (session.phase === "agreed" && session.evaluation) {
      this.root.append(
        el(doc, "p", { class: "banner", "data-test": "agreed" }, "You and the analysis agree."),
      );
      renderEvaluation(this.root, session.evaluation, session.comparison ?? null);
      return;
    }
    if (session.evaluation) {
      renderEvaluation(this.root, session.evaluation, session.comparison ?? null);
    }
    this.current = new BuilderScreen(this.root, session.graph ?? null, {
      onSave: (graph) => this.saveGraph(graph),
      onEvaluate: () => this.evaluate(),
      onReviseGround: (ref, credibility) => this.reviseGround(ref, credibility),
    });
  }

  private renderElicitation(): void {
    const session = this.session!;
    if (this.question?.kind === "elicitation") {
      this.current = new WizardTrialScreen(this.root, this.question, session.progress ?? null, {
        onAnswer: (accept) => this.wizardAnswer(accept),
      });
      return;
    }
    this.current = new WizardDoneScreen(
      this.root,
      session.lexicon_result ?? null,
      session.failure ?? null,
    );
  }
}
