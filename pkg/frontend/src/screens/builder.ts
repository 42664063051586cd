/** Argument builder: claim, grounds with credibility editors, warrants with
 * quantifier terms, backings, and rebuttals. Saving posts the whole graph;
 * the service answers with structural errors that are shown inline.
 */

import { el } from "../dom.js";
import { TrapezoidEditor } from "../trapezoid.js";
import type { GraphModel, GroundModel, Trapezoid } from "../types.js";

export interface BuilderHandlers {
  /** Persist the collected graph; resolves to an error message or null. */
  onSave(graph: GraphModel): Promise<string | null>;
  onEvaluate?: () => Promise<string | null>;
  onReviseGround?: (ref: string, credibility: Trapezoid) => Promise<string | null>;
}

const FRESH: Trapezoid = { a: 0.2, b: 0.4, c: 0.6, d: 0.8 };

function parseQuantifier(text: string): string | Trapezoid {
  const parts = text.split(",").map((p) => p.trim());
  if (parts.length === 4 && parts.every((p) => p !== "" && !Number.isNaN(Number(p)))) {
    const [a, b, c, d] = parts.map(Number);
    return { a, b, c, d };
  }
  return text.trim();
}

function quantifierText(q: string | Trapezoid): string {
  if (typeof q === "string") {
    return q;
  }
  return [q.a, q.b, q.c, q.d].join(",");
}

interface GroundRow {
  row: HTMLElement;
  ref: HTMLInputElement;
  statement: HTMLInputElement;
  editor: TrapezoidEditor;
  support: string[];
}

interface WarrantRow {
  row: HTMLElement;
  ref: HTMLInputElement;
  grounds: HTMLInputElement;
  quantifier: HTMLInputElement;
}

interface BackingRow {
  row: HTMLElement;
  warrant: HTMLInputElement;
  editor: TrapezoidEditor;
}

interface RebuttalRow {
  row: HTMLElement;
  kind: HTMLSelectElement;
  target: HTMLInputElement;
  editor: TrapezoidEditor;
}

export class BuilderScreen {
  readonly element: HTMLElement;
  private readonly doc: Document;
  private grounds: GroundRow[] = [];
  private warrants: WarrantRow[] = [];
  private backings: BackingRow[] = [];
  private rebuttals: RebuttalRow[] = [];
  private claim: HTMLInputElement;
  private qualifier: HTMLInputElement;
  private error: HTMLElement;

  constructor(
    host: Element,
    initial: GraphModel | null,
    private readonly handlers: BuilderHandlers,
  ) {
    this.doc = host.ownerDocument;
    const doc = this.doc;
    this.element = el(doc, "section", { class: "builder", "data-test": "builder" });
    this.claim = el(doc, "input", { "data-test": "claim", placeholder: "claim" });
    this.qualifier = el(doc, "input", {
      "data-test": "qualifier",
      placeholder: "your qualifier label (optional)",
    });
    this.error = el(doc, "p", { class: "error", "data-test": "builder-error" });
    this.element.append(
      el(doc, "h2", {}, "Argument"),
      el(doc, "label", {}, "Claim ", this.claim),
      el(doc, "label", {}, "Subjective qualifier ", this.qualifier),
    );

    const groundsList = el(doc, "div", { "data-test": "grounds" });
    const warrantsList = el(doc, "div", { "data-test": "warrants" });
    const backingsList = el(doc, "div", { "data-test": "backings" });
    const rebuttalsList = el(doc, "div", { "data-test": "rebuttals" });
    const addButton = (test: string, text: string, action: () => void) => {
      const button = el(doc, "button", { "data-test": test }, text);
      button.addEventListener("click", action);
      return button;
    };
    this.element.append(
      el(doc, "h3", {}, "Grounds"),
      groundsList,
      addButton("add-ground", "Add ground", () => this.addGround(groundsList, null)),
      el(doc, "h3", {}, "Warrants"),
      warrantsList,
      addButton("add-warrant", "Add warrant", () => this.addWarrant(warrantsList, null)),
      el(doc, "h3", {}, "Backings"),
      backingsList,
      addButton("add-backing", "Add backing", () => this.addBacking(backingsList, null)),
      el(doc, "h3", {}, "Rebuttals"),
      rebuttalsList,
      addButton("add-rebuttal", "Add rebuttal", () => this.addRebuttal(rebuttalsList, null)),
    );

    const save = el(doc, "button", { "data-test": "save-graph" }, "Save argument");
    save.addEventListener("click", () => void this.save());
    this.element.append(save);
    if (handlers.onEvaluate) {
      const evaluate = el(doc, "button", { "data-test": "evaluate" }, "Evaluate");
      evaluate.addEventListener("click", () => void this.runEvaluate());
      this.element.append(evaluate);
    }
    this.element.append(this.error);

    if (initial) {
      this.claim.value = initial.claim;
      this.qualifier.value = initial.qualifier ?? "";
      for (const g of initial.grounds) {
        this.addGround(groundsList, g);
      }
      for (const w of initial.warrants) {
        this.addWarrant(warrantsList, w);
      }
      for (const b of initial.backings ?? []) {
        this.addBacking(backingsList, b);
      }
      for (const r of initial.rebuttals ?? []) {
        this.addRebuttal(rebuttalsList, r);
      }
    }
    host.appendChild(this.element);
  }

  private removable(row: HTMLElement, pull: () => void): void {
    const button = el(this.doc, "button", { "data-test": "remove" }, "Remove");
    button.addEventListener("click", () => {
      pull();
      row.remove();
    });
    row.append(button);
  }

  private addGround(list: HTMLElement, initial: GroundModel | null): void {
    const doc = this.doc;
    const ref = el(doc, "input", { "data-test": "ground-ref", placeholder: "ref" });
    const statement = el(doc, "input", { "data-test": "ground-statement", placeholder: "statement" });
    const row = el(doc, "div", { class: "row ground-row", "data-test": "ground-row" }, ref, statement);
    const editorHost = el(doc, "span", { class: "credibility" });
    row.append(editorHost);
    const editor = new TrapezoidEditor(editorHost, initial ? initial.credibility : FRESH);
    const entry: GroundRow = { row, ref, statement, editor, support: initial?.support ?? [] };
    if (initial) {
      ref.value = initial.ref;
      statement.value = initial.statement ?? "";
      row.setAttribute("data-ref", initial.ref);
      if (this.handlers.onReviseGround) {
        const revise = el(doc, "button", { "data-test": "revise-credibility" }, "Revise credibility");
        revise.addEventListener("click", () => void this.revise(entry));
        row.append(revise);
      }
    }
    this.grounds.push(entry);
    this.removable(row, () => {
      this.grounds = this.grounds.filter((g) => g !== entry);
    });
    list.append(row);
  }

  private addWarrant(list: HTMLElement, initial: { ref: string; grounds: string[]; quantifier: string | Trapezoid } | null): void {
    const doc = this.doc;
    const ref = el(doc, "input", { "data-test": "warrant-ref", placeholder: "ref" });
    const grounds = el(doc, "input", { "data-test": "warrant-grounds", placeholder: "ground refs, comma-separated" });
    const quantifier = el(doc, "input", {
      "data-test": "warrant-quantifier",
      placeholder: "term, or a,b,c,d",
    });
    const row = el(doc, "div", { class: "row warrant-row", "data-test": "warrant-row" }, ref, grounds, quantifier);
    if (initial) {
      ref.value = initial.ref;
      grounds.value = initial.grounds.join(",");
      quantifier.value = quantifierText(initial.quantifier);
      row.setAttribute("data-ref", initial.ref);
    }
    const entry: WarrantRow = { row, ref, grounds, quantifier };
    this.warrants.push(entry);
    this.removable(row, () => {
      this.warrants = this.warrants.filter((w) => w !== entry);
    });
    list.append(row);
  }

  private addBacking(list: HTMLElement, initial: { warrant: string; reliability: Trapezoid } | null): void {
    const doc = this.doc;
    const warrant = el(doc, "input", { "data-test": "backing-warrant", placeholder: "warrant ref" });
    const row = el(doc, "div", { class: "row backing-row", "data-test": "backing-row" }, warrant);
    const editorHost = el(doc, "span", { class: "reliability" });
    row.append(editorHost);
    const editor = new TrapezoidEditor(editorHost, initial ? initial.reliability : FRESH);
    if (initial) {
      warrant.value = initial.warrant;
    }
    const entry: BackingRow = { row, warrant, editor };
    this.backings.push(entry);
    this.removable(row, () => {
      this.backings = this.backings.filter((b) => b !== entry);
    });
    list.append(row);
  }

  private addRebuttal(
    list: HTMLElement,
    initial: { target_kind: "warrant" | "claim"; target_ref?: string | null; strength: Trapezoid } | null,
  ): void {
    const doc = this.doc;
    const kind = el(doc, "select", { "data-test": "rebuttal-kind" });
    kind.append(el(doc, "option", { value: "claim" }, "claim"), el(doc, "option", { value: "warrant" }, "warrant"));
    const target = el(doc, "input", { "data-test": "rebuttal-target", placeholder: "warrant ref (blank for claim)" });
    const row = el(doc, "div", { class: "row rebuttal-row", "data-test": "rebuttal-row" }, kind, target);
    const editorHost = el(doc, "span", { class: "strength" });
    row.append(editorHost);
    const editor = new TrapezoidEditor(editorHost, initial ? initial.strength : FRESH);
    if (initial) {
      kind.value = initial.target_kind;
      target.value = initial.target_ref ?? "";
    }
    const entry: RebuttalRow = { row, kind, target, editor };
    this.rebuttals.push(entry);
    this.removable(row, () => {
      this.rebuttals = this.rebuttals.filter((r) => r !== entry);
    });
    list.append(row);
  }

  /** The graph as currently drawn in the form. */
  collect(): GraphModel {
    return {
      claim: this.claim.value.trim(),
      qualifier: this.qualifier.value.trim() === "" ? null : this.qualifier.value.trim(),
      grounds: this.grounds.map((g) => ({
        ref: g.ref.value.trim(),
        statement: g.statement.value,
        credibility: g.editor.value,
        support: g.support,
      })),
      warrants: this.warrants.map((w) => ({
        ref: w.ref.value.trim(),
        grounds: w.grounds.value
          .split(",")
          .map((p) => p.trim())
          .filter((p) => p !== ""),
        quantifier: parseQuantifier(w.quantifier.value),
      })),
      backings: this.backings.map((b) => ({
        warrant: b.warrant.value.trim(),
        reliability: b.editor.value,
      })),
      rebuttals: this.rebuttals.map((r) => ({
        target_kind: r.kind.value as "warrant" | "claim",
        target_ref: r.target.value.trim() === "" ? null : r.target.value.trim(),
        strength: r.editor.value,
      })),
    };
  }

  private showError(message: string | null): void {
    this.error.textContent = message ?? "";
  }

  private async save(): Promise<void> {
    const graph = this.collect();
    if (graph.claim === "") {
      this.showError("claim must not be empty");
      return;
    }
    this.showError(await this.handlers.onSave(graph));
  }

  private async runEvaluate(): Promise<void> {
    if (this.handlers.onEvaluate) {
      this.showError(await this.handlers.onEvaluate());
    }
  }

  private async revise(entry: GroundRow): Promise<void> {
    if (this.handlers.onReviseGround) {
      this.showError(await this.handlers.onReviseGround(entry.ref.value.trim(), entry.editor.value));
    }
  }

  /** Test handle: the ground row for a ref, with its credibility editor. */
  groundRow(ref: string): { row: HTMLElement; editor: TrapezoidEditor } {
    const found = this.grounds.find((g) => g.ref.value.trim() === ref);
    if (!found) {
      throw new Error(`no ground row for ${ref}`);
    }
    return { row: found.row, editor: found.editor };
  }

  /** Test handle: the credibility editor of the most recently added ground. */
  lastGround(): { row: HTMLElement; editor: TrapezoidEditor } {
    const last = this.grounds[this.grounds.length - 1];
    if (!last) {
      throw new Error("no ground rows");
    }
    return { row: last.row, editor: last.editor };
  }

  lastBacking(): { row: HTMLElement; editor: TrapezoidEditor } {
    const last = this.backings[this.backings.length - 1];
    if (!last) {
      throw new Error("no backing rows");
    }
    return { row: last.row, editor: last.editor };
  }

  lastRebuttal(): { row: HTMLElement; editor: TrapezoidEditor } {
    const last = this.rebuttals[this.rebuttals.length - 1];
    if (!last) {
      throw new Error("no rebuttal rows");
    }
    return { row: last.row, editor: last.editor };
  }
}

