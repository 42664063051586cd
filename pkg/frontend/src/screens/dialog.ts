/** Disambiguation dialog: the pending quantifier's candidate senses drawn as
 * possibility functions, plus a custom trapezoid option. The submitted answer
 * carries the session version; a conflict makes the controller refetch and
 * rebuild this dialog from the latest state.
 */

import { el } from "../dom.js";
import { plotTrapezoids } from "../plot.js";
import { isOrdered, TrapezoidEditor } from "../trapezoid.js";
import type { AnswerPayload, QuestionView } from "../types.js";

export interface DialogHandlers {
  onResolve(payload: AnswerPayload): Promise<string | null>;
}

const CUSTOM_START = { a: 0.2, b: 0.4, c: 0.6, d: 0.8 };

export class DialogScreen {
  readonly element: HTMLElement;
  readonly customEditor: TrapezoidEditor;
  private radios: HTMLInputElement[] = [];
  private customRadio: HTMLInputElement;
  private error: HTMLElement;

  constructor(
    host: Element,
    private readonly question: QuestionView,
    private readonly handlers: DialogHandlers,
  ) {
    const doc = host.ownerDocument;
    this.element = el(doc, "section", { class: "dialog", "data-test": "dialog" });
    this.element.append(
      el(doc, "h2", {}, "What does the quantifier mean here?"),
      el(
        doc,
        "p",
        {},
        "Warrant ",
        el(doc, "strong", { "data-test": "ambiguity-warrant" }, question.warrant ?? ""),
        " uses ",
        el(doc, "strong", { "data-test": "ambiguity-term" }, `“${question.term ?? ""}”`),
        ", which has more than one stored sense.",
      ),
    );
    const senses = question.senses ?? [];
    senses.forEach((sense, index) => {
      const radio = el(doc, "input", {
        type: "radio",
        name: "sense",
        value: String(index),
        "data-test": `sense-${index}`,
      });
      this.radios.push(radio);
      const item = el(
        doc,
        "div",
        { class: "sense", "data-test": "sense-option" },
        el(doc, "label", {}, radio, ` ${sense.description || `sense ${index}`}`),
      );
      plotTrapezoids(item, [{ trapezoid: sense.meaning, name: `sense-${index}` }]);
      this.element.append(item);
    });

    this.customRadio = el(doc, "input", {
      type: "radio",
      name: "sense",
      value: "custom",
      "data-test": "sense-custom",
    });
    const customItem = el(
      doc,
      "div",
      { class: "sense custom" },
      el(doc, "label", {}, this.customRadio, " my own meaning:"),
    );
    this.customEditor = new TrapezoidEditor(customItem, CUSTOM_START);
    this.element.append(customItem);

    const submit = el(doc, "button", { "data-test": "resolve-submit" }, "Use this meaning");
    submit.addEventListener("click", () => void this.submit());
    this.error = el(doc, "p", { class: "error", "data-test": "dialog-error" });
    this.element.append(submit, this.error);
    host.appendChild(this.element);
  }

  private async submit(): Promise<void> {
    let payload: AnswerPayload;
    if (this.customRadio.checked) {
      const custom = this.customEditor.value;
      if (!isOrdered(custom)) {
        this.error.textContent = "corners must satisfy a <= b <= c <= d";
        return;
      }
      payload = { kind: "resolve", custom };
    } else {
      const chosen = this.radios.findIndex((radio) => radio.checked);
      if (chosen < 0) {
        this.error.textContent = "pick a sense or the custom option";
        return;
      }
      payload = { kind: "resolve", choice: chosen };
    }
    this.error.textContent = (await this.handlers.onResolve(payload)) ?? "";
  }
}
