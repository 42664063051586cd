/** Thin typed client for the service HTTP+JSON API. */

import type {
  AnswerPayload,
  AnswerResponse,
  CreateSessionRequest,
  EvaluateResponse,
  LexiconModel,
  QuestionView,
  SessionView,
  Trapezoid,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.status = status;
    this.detail = detail;
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body.detail !== undefined) {
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  createSession(request: CreateSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", request);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  async getQuestion(id: string): Promise<QuestionView | null> {
    const body = await this.request<{ question: QuestionView | null }>(
      "GET",
      `/sessions/${id}/question`,
    );
    return body.question;
  }

  answer(
    id: string,
    version: number,
    payload: AnswerPayload,
    questionId?: string,
  ): Promise<AnswerResponse> {
    return this.request("POST", `/sessions/${id}/answers`, {
      question_id: questionId ?? null,
      version,
      payload,
    });
  }

  evaluate(id: string): Promise<EvaluateResponse> {
    return this.request("POST", `/sessions/${id}/evaluate`);
  }

  getLexicon(owner: string): Promise<LexiconModel> {
    return this.request("GET", `/lexicons/${owner}`);
  }

  putLexicon(owner: string, labels: LexiconModel["labels"]): Promise<LexiconModel> {
    return this.request("PUT", `/lexicons/${owner}`, { labels });
  }

  checkPooling(
    kb1: { expert: string; grounds: Record<string, Trapezoid> },
    kb2: { expert: string; grounds: Record<string, Trapezoid> },
    theta = 0.5,
  ): Promise<{ admissible: boolean; overlap: number; theta: number }> {
    return this.request("POST", "/pooling/check", { kb1, kb2, theta });
  }
}
