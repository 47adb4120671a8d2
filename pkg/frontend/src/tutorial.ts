/** Short interactive walkthrough shown once, before the first task.
 *
 * Each step gates on a user action so newcomers exercise the whole flow
 * (listen, pick an option, type a symbol) before their answers count.
 */

export type TutorialAction = "continue" | "play-audio" | "pick-option" | "type-symbol";

export interface TutorialStep {
  title: string;
  body: string;
  action: TutorialAction;
}

export const TUTORIAL_STEPS: readonly TutorialStep[] = [
  {
    title: "Listen",
    body:
      "Each screen plays one line of poetry. The word being spoken turns " +
      "red, together with its phonetic spelling. Press play to hear the " +
      "sample word.",
    action: "play-audio",
  },
  {
    title: "Choose",
    body:
      "Some words offer several phonetic spellings. Click the one that " +
      "matches what you hear. Try clicking any option now.",
    action: "pick-option",
  },
  {
    title: "Type",
    body:
      "When no offered spelling fits, type what you hear. The symbol " +
      "palette inserts sounds your keyboard lacks. Insert any symbol now.",
    action: "type-symbol",
  },
  {
    title: "Ready",
    body:
      "You can pause, replay the current word, or start a line over at any " +
      "time. Answer every question; there is no time limit.",
    action: "continue",
  },
];

export class TutorialFlow {
  private index = 0;

  constructor(private readonly steps: readonly TutorialStep[] = TUTORIAL_STEPS) {
    if (steps.length === 0) {
      throw new Error("tutorial needs at least one step");
    }
  }

  get current(): TutorialStep {
    return this.steps[Math.min(this.index, this.steps.length - 1)]!;
  }

  get stepNumber(): number {
    return Math.min(this.index + 1, this.steps.length);
  }

  get totalSteps(): number {
    return this.steps.length;
  }

  get finished(): boolean {
    return this.index >= this.steps.length;
  }

  /** Advance only when the completed action matches the current gate. */
  complete(action: TutorialAction): boolean {
    if (this.finished || action !== this.current.action) {
      return false;
    }
    this.index += 1;
    return true;
  }
}
