/** Thin typed client for the task API. */

import type {
  AnswerPayload,
  InventoryView,
  LineView,
  NextResponse,
  ProfileFields,
  ProfileReceipt,
  SessionInfo,
  SubmitReceipt,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON error bodies still surface via status
    }
    if (!response.ok) {
      throw new ApiError(response.status, (body as { detail?: unknown })?.detail ?? body);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  createProfile(fields: ProfileFields): Promise<ProfileReceipt> {
    return this.post("/api/profiles", fields);
  }

  createSession(profileId: string): Promise<SessionInfo> {
    return this.post("/api/sessions", { profile_id: profileId });
  }

  nextTask(sessionId: string): Promise<NextResponse> {
    return this.request(`/api/sessions/${sessionId}/next`);
  }

  submit(sessionId: string, taskId: string, payload: AnswerPayload): Promise<SubmitReceipt> {
    return this.post(`/api/sessions/${sessionId}/responses`, {
      task_id: taskId,
      ...payload,
    });
  }

  lines(): Promise<LineView[]> {
    return this.request("/api/lines");
  }

  line(lineId: string): Promise<LineView> {
    return this.request(`/api/lines/${lineId}`);
  }

  inventory(): Promise<InventoryView> {
    return this.request("/api/inventory");
  }

  intro(): Promise<{ text: string }> {
    return this.request("/api/intro");
  }

  audioUrl(audioRef: string): string {
    return `${this.baseUrl}/api/audio/${encodeURIComponent(audioRef)}`;
  }
}
