/** Wire types of the task API. The server never includes a task's truth,
 * complexity or class; clients decide what to render from `options` alone. */

export interface ProfileFields {
  l1_language?: string | null;
  l2_languages?: string[];
  age?: number | null;
  gender?: string | null;
  education?: string | null;
  nationality?: string | null;
}

export interface ProfileReceipt {
  profile_id: string;
  eligible: boolean;
}

export interface SessionInfo {
  session_id: string;
  profile_id: string;
  total_tasks: number;
}

export interface TaskView {
  task_id: string;
  line_id: string;
  word_index: number;
  start_ms: number;
  end_ms: number;
  displayed: string;
  options: string[];
}

export type NextResponse =
  | { complete: true; remaining: 0 }
  | { complete: false; remaining: number; task: TaskView };

export type AnswerPayload = { option_index: number } | { ipa: string };

export interface SubmitReceipt {
  seq_no: number;
  remaining: number;
  complete: boolean;
}

export interface WordView {
  index: number;
  source_token: string;
  ipa_token: string;
  start_ms: number;
  end_ms: number;
  has_task: boolean;
}

export interface LineView {
  line_id: string;
  source_text: string;
  ipa_text: string;
  audio_ref: string;
  words: WordView[];
}

export interface InventoryView {
  symbols: string[];
  short_vowels: string[];
}
