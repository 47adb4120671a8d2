/** Task answer controls.
 *
 * Tasks with options render the option buttons plus a free-entry field (the
 * user may know better than every offered spelling); tasks without options
 * render the free-entry field alone. Submission stays disabled until an
 * option is chosen or the typed text validates against the symbol list.
 */

import { checkIpa } from "./ipa-input.js";
import type { AnswerPayload, TaskView } from "./types.js";

export type TaskMode = "options-and-input" | "input-only";

export function taskMode(view: TaskView): TaskMode {
  return view.options.length > 0 ? "options-and-input" : "input-only";
}

export interface AnswerDraft {
  optionIndex: number | null;
  typed: string;
}

/** The payload a draft would submit, or null while it is not submittable. */
export function draftPayload(
  draft: AnswerDraft,
  symbols: readonly string[],
): AnswerPayload | null {
  if (draft.optionIndex !== null) {
    return { option_index: draft.optionIndex };
  }
  const typed = draft.typed.trim();
  if (typed === "" || !checkIpa(typed, symbols).ok) {
    return null;
  }
  return { ipa: typed };
}

export interface TaskControlHandles {
  root: HTMLElement;
  optionButtons: HTMLButtonElement[];
  input: HTMLInputElement;
  palette: HTMLElement;
  submit: HTMLButtonElement;
  feedback: HTMLElement;
}

export function renderTaskControl(
  doc: Document,
  view: TaskView,
  symbols: readonly string[],
  onSubmit: (payload: AnswerPayload) => void,
): TaskControlHandles {
  const draft: AnswerDraft = { optionIndex: null, typed: "" };
  const root = doc.createElement("div");
  root.className = "task-control";

  const optionButtons: HTMLButtonElement[] = [];
  if (taskMode(view) === "options-and-input") {
    const optionBox = doc.createElement("div");
    optionBox.className = "task-options";
    view.options.forEach((option, index) => {
      const button = doc.createElement("button");
      button.type = "button";
      button.className = "task-option";
      button.textContent = option;
      button.addEventListener("click", () => {
        draft.optionIndex = draft.optionIndex === index ? null : index;
        draft.typed = input.value = "";
        refresh();
      });
      optionButtons.push(button);
      optionBox.appendChild(button);
    });
    root.appendChild(optionBox);
  }

  const entry = doc.createElement("div");
  entry.className = "task-entry";
  const input = doc.createElement("input");
  input.type = "text";
  input.placeholder = "type what you hear (IPA)";
  input.addEventListener("input", () => {
    draft.typed = input.value;
    draft.optionIndex = null;
    refresh();
  });
  entry.appendChild(input);

  // On-screen palette: IPA is hard to type on a regular keyboard.
  const palette = doc.createElement("div");
  palette.className = "ipa-palette";
  for (const symbol of symbols) {
    const key = doc.createElement("button");
    key.type = "button";
    key.className = "ipa-key";
    key.textContent = symbol;
    key.addEventListener("click", () => {
      input.value += symbol;
      draft.typed = input.value;
      draft.optionIndex = null;
      refresh();
    });
    palette.appendChild(key);
  }
  entry.appendChild(palette);

  const feedback = doc.createElement("div");
  feedback.className = "task-feedback";
  entry.appendChild(feedback);
  root.appendChild(entry);

  const submit = doc.createElement("button");
  submit.type = "button";
  submit.className = "task-submit";
  submit.textContent = "Submit";
  submit.addEventListener("click", () => {
    const payload = draftPayload(draft, symbols);
    if (payload !== null) {
      onSubmit(payload);
    }
  });
  root.appendChild(submit);

  function refresh(): void {
    optionButtons.forEach((button, index) => {
      button.classList.toggle("selected", draft.optionIndex === index);
    });
    const typed = draft.typed.trim();
    if (typed !== "" && draft.optionIndex === null) {
      const check = checkIpa(typed, symbols);
      feedback.textContent = check.ok
        ? ""
        : `"${check.symbol}" at position ${check.position} is not an IPA symbol used here`;
    } else {
      feedback.textContent = "";
    }
    submit.disabled = draftPayload(draft, symbols) === null;
  }

  refresh();
  return { root, optionButtons, input, palette, submit, feedback };
}
