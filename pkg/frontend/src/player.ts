/** Audio playback with word-synchronized state.
 *
 * The active word derives purely from the playhead time, so highlighting
 * needs no server round trips and the mapping stays testable on its own
 * (see highlight.ts).
 */

import { highlightFor, type WordWindow } from "./highlight.js";

export interface PlayerState {
  playheadMs: number;
  playing: boolean;
  activeWordIndex: number | null;
}

export class LinePlayer {
  constructor(
    private readonly audio: HTMLAudioElement,
    private words: readonly WordWindow[],
  ) {}

  setWords(words: readonly WordWindow[]): void {
    this.words = words;
  }

  state(): PlayerState {
    const playheadMs = this.audio.currentTime * 1000;
    return {
      playheadMs,
      playing: !this.audio.paused && !this.audio.ended,
      activeWordIndex: highlightFor(playheadMs, this.words),
    };
  }

  async toggle(): Promise<void> {
    if (this.audio.paused) {
      await this.audio.play();
    } else {
      this.audio.pause();
    }
  }

  /** Jump back to the start of the word under (or before) the playhead. */
  async repeatWord(): Promise<void> {
    const ms = this.audio.currentTime * 1000;
    let index = highlightFor(ms, this.words);
    if (index === null) {
      index = 0;
      for (let i = this.words.length - 1; i >= 0; i--) {
        if (this.words[i]!.start_ms <= ms) {
          index = i;
          break;
        }
      }
    }
    const word = this.words[index];
    this.audio.currentTime = (word ? word.start_ms : 0) / 1000;
    await this.audio.play();
  }

  async startOver(): Promise<void> {
    this.audio.currentTime = 0;
    await this.audio.play();
  }

  /** Scrub to a word and play it (used by the task panel's replay link). */
  async playWord(index: number): Promise<void> {
    const word = this.words[index];
    if (word) {
      this.audio.currentTime = word.start_ms / 1000;
      await this.audio.play();
    }
  }

  onTick(callback: (state: PlayerState) => void): void {
    const emit = () => callback(this.state());
    this.audio.addEventListener("timeupdate", emit);
    this.audio.addEventListener("play", emit);
    this.audio.addEventListener("pause", emit);
    this.audio.addEventListener("ended", emit);
  }
}
