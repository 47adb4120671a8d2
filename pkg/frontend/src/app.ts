/** Single-page flow: profile, introduction, tutorial, then the task loop. */

import { ApiClient, ApiError } from "./api.js";
import { LinePlayer } from "./player.js";
import { renderTaskControl } from "./task-view.js";
import { TutorialFlow } from "./tutorial.js";
import type { AnswerPayload, LineView, SessionInfo, TaskView } from "./types.js";

export class App {
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private symbols: string[] = [];
  private session: SessionInfo | null = null;
  private lineCache = new Map<string, LineView>();

  constructor(root: HTMLElement, api: ApiClient = new ApiClient()) {
    this.root = root;
    this.api = api;
  }

  async start(): Promise<void> {
    this.symbols = (await this.api.inventory()).symbols;
    this.showProfileForm();
  }

  private clear(): HTMLElement {
    this.root.innerHTML = "";
    return this.root;
  }

  private showProfileForm(): void {
    const doc = this.root.ownerDocument;
    const box = this.clear();
    const form = doc.createElement("form");
    form.className = "profile-form";
    form.innerHTML = `
      <h1>About you</h1>
      <p>This helps relate answers to language background. Only the starred
         fields are required; none of them identify you.</p>
      <label>Native language *<input name="l1_language" required></label>
      <label>Other languages (comma separated)<input name="l2_languages"></label>
      <label>Age *<input name="age" type="number" min="10" max="120" required></label>
      <label>Gender<input name="gender"></label>
      <label>Education *<input name="education" required></label>
      <label>Nationality<input name="nationality"></label>
      <p class="form-error" role="alert"></p>
      <button type="submit">Continue</button>
    `;
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const text = (name: string) => (data.get(name) as string | null)?.trim() || null;
      try {
        const profile = await this.api.createProfile({
          l1_language: text("l1_language"),
          l2_languages: (text("l2_languages") ?? "")
            .split(",")
            .map((s) => s.trim())
            .filter(Boolean),
          age: text("age") ? Number(text("age")) : null,
          gender: text("gender"),
          education: text("education"),
          nationality: text("nationality"),
        });
        await this.showIntro(profile.profile_id);
      } catch (error) {
        const slot = form.querySelector(".form-error")!;
        slot.textContent =
          error instanceof ApiError ? String(error.detail) : "could not save the profile";
      }
    });
    box.appendChild(form);
  }

  private async showIntro(profileId: string): Promise<void> {
    const doc = this.root.ownerDocument;
    const { text } = await this.api.intro();
    const box = this.clear();
    const intro = doc.createElement("div");
    intro.className = "intro";
    for (const paragraph of text.split(/\n\s*\n/)) {
      const p = doc.createElement("p");
      p.textContent = paragraph.replace(/^#+\s*/, "");
      intro.appendChild(p);
    }
    const next = doc.createElement("button");
    next.textContent = "Start the tutorial";
    next.addEventListener("click", () => this.showTutorial(profileId));
    intro.appendChild(next);
    box.appendChild(intro);
  }

  private showTutorial(profileId: string): void {
    const doc = this.root.ownerDocument;
    const flow = new TutorialFlow();
    const box = this.clear();
    const panel = doc.createElement("div");
    panel.className = "tutorial";
    box.appendChild(panel);

    const render = () => {
      if (flow.finished) {
        void this.startSession(profileId);
        return;
      }
      const step = flow.current;
      panel.innerHTML = `
        <h1>Tutorial ${flow.stepNumber}/${flow.totalSteps}: ${step.title}</h1>
        <p>${step.body}</p>
        <div class="tutorial-stage"></div>
      `;
      const stage = panel.querySelector(".tutorial-stage")!;
      const advance = (action: typeof step.action) => {
        if (flow.complete(action)) render();
      };
      if (step.action === "play-audio") {
        const play = doc.createElement("button");
        play.textContent = "▶ play sample";
        play.addEventListener("click", () => advance("play-audio"));
        stage.appendChild(play);
      } else if (step.action === "pick-option") {
        for (const option of ["dæl", "del", "dol"]) {
          const button = doc.createElement("button");
          button.textContent = option;
          button.addEventListener("click", () => advance("pick-option"));
          stage.appendChild(button);
        }
      } else if (step.action === "type-symbol") {
        const key = doc.createElement("button");
        key.textContent = "æ";
        key.addEventListener("click", () => advance("type-symbol"));
        stage.appendChild(key);
      } else {
        const done = doc.createElement("button");
        done.textContent = "Begin";
        done.addEventListener("click", () => advance("continue"));
        stage.appendChild(done);
      }
    };
    render();
  }

  private async startSession(profileId: string): Promise<void> {
    this.session = await this.api.createSession(profileId);
    await this.showNextTask();
  }

  private async fetchLine(lineId: string): Promise<LineView> {
    const cached = this.lineCache.get(lineId);
    if (cached) return cached;
    const line = await this.api.line(lineId);
    this.lineCache.set(lineId, line);
    return line;
  }

  private async showNextTask(): Promise<void> {
    if (!this.session) return;
    const next = await this.api.nextTask(this.session.session_id);
    if (next.complete) {
      this.showDone();
      return;
    }
    const line = await this.fetchLine(next.task.line_id);
    this.showTask(next.task, line, next.remaining);
  }

  private showTask(task: TaskView, line: LineView, remaining: number): void {
    const doc = this.root.ownerDocument;
    const box = this.clear();
    const total = this.session?.total_tasks ?? remaining;

    const header = doc.createElement("div");
    header.className = "progress";
    header.textContent = `Question ${total - remaining + 1} of ${total}`;
    box.appendChild(header);

    const source = doc.createElement("p");
    source.className = "source-line";
    source.dir = "rtl";
    source.lang = "fa";
    source.textContent = line.source_text;
    box.appendChild(source);

    const ipaLine = doc.createElement("p");
    ipaLine.className = "ipa-line";
    const wordSpans: HTMLSpanElement[] = [];
    line.words.forEach((word, index) => {
      const span = doc.createElement("span");
      span.className = "ipa-word" + (word.index === task.word_index ? " task-word" : "");
      span.textContent = word.ipa_token;
      wordSpans.push(span);
      ipaLine.appendChild(span);
      if (index < line.words.length - 1) {
        ipaLine.appendChild(doc.createTextNode(" "));
      }
    });
    box.appendChild(ipaLine);

    const audio = doc.createElement("audio");
    audio.src = this.api.audioUrl(line.audio_ref);
    audio.preload = "auto";
    const player = new LinePlayer(audio, line.words);
    player.onTick((state) => {
      wordSpans.forEach((span, index) => {
        span.classList.toggle("speaking", index === state.activeWordIndex);
      });
    });

    const controls = doc.createElement("div");
    controls.className = "player-controls";
    const addControl = (label: string, handler: () => void) => {
      const button = doc.createElement("button");
      button.type = "button";
      button.textContent = label;
      button.addEventListener("click", handler);
      controls.appendChild(button);
    };
    addControl("play / pause", () => void player.toggle());
    addControl("repeat word", () => void player.repeatWord());
    addControl("start over", () => void player.startOver());
    addControl("play the question word", () => void player.playWord(task.word_index));
    box.appendChild(controls);
    box.appendChild(audio);

    const prompt = doc.createElement("p");
    prompt.className = "task-prompt";
    prompt.textContent =
      task.options.length > 0
        ? "Which spelling matches the highlighted word? Pick one, or type a better one."
        : "The highlighted spelling is wrong. Type what you actually hear.";
    box.appendChild(prompt);

    const control = renderTaskControl(doc, task, this.symbols, (payload) => {
      void this.submit(task, payload, control.feedback);
    });
    box.appendChild(control.root);
  }

  private async submit(
    task: TaskView,
    payload: AnswerPayload,
    feedback: HTMLElement,
  ): Promise<void> {
    if (!this.session) return;
    try {
      await this.api.submit(this.session.session_id, task.task_id, payload);
      await this.showNextTask();
    } catch (error) {
      feedback.textContent =
        error instanceof ApiError
          ? `submission rejected: ${JSON.stringify(error.detail)}`
          : "submission failed; please retry";
    }
  }

  private showDone(): void {
    const doc = this.root.ownerDocument;
    const box = this.clear();
    const done = doc.createElement("div");
    done.className = "done";
    done.innerHTML = `
      <h1>All questions answered</h1>
      <p>Thank you. Your answers were recorded and will help improve the
         phonetic annotation of these poems.</p>
    `;
    box.appendChild(done);
  }
}

declare global {
  interface Window {
    avanegarApp?: App;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const app = new App(document.getElementById("app")!);
  window.avanegarApp = app;
  void app.start();
}
