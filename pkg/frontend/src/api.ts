/** Typed client for the session service.
 *
 * Action posts are serialized: at most one request is in flight and later
 * ones queue behind it, preserving the session's event order.
 */
import type {
  ActionRequest,
  ActionResponse,
  PageContent,
  PageName,
  SessionCreated,
  UsageStats,
} from "./types.js";

export class ServiceError extends Error {
  constructor(public code: string, message: string, public status: number) {
    super(message);
  }
}

async function request<T>(method: string, url: string, body?: unknown): Promise<T> {
  const response = await fetch(url, {
    method,
    headers: { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const text = await response.text();
  const doc = text ? JSON.parse(text) : null;
  if (!response.ok) {
    const err = doc?.error ?? { code: "HttpError", message: text };
    throw new ServiceError(err.code, err.message, response.status);
  }
  return doc as T;
}

export class ApiClient {
  private actionChain: Promise<unknown> = Promise.resolve();

  constructor(public base: string) {}

  listProblems(): Promise<{ problems: string[] }> {
    return request("GET", `${this.base}/problems`);
  }

  listModels(): Promise<{ models: string[] }> {
    return request("GET", `${this.base}/models`);
  }

  createSession(problem: string, model: string): Promise<SessionCreated> {
    return request("POST", `${this.base}/sessions`, { problem, model });
  }

  /** Queue an action behind any in-flight one. */
  postAction(session: string, action: ActionRequest): Promise<ActionResponse> {
    const next = this.actionChain.then(() =>
      request<ActionResponse>(
        "POST", `${this.base}/sessions/${session}/actions`, action));
    // Keep the chain alive whether the action succeeds or fails.
    this.actionChain = next.catch(() => undefined);
    return next;
  }

  getPage(session: string, page: PageName): Promise<PageContent> {
    return request("GET", `${this.base}/sessions/${session}/explanations/${page}`);
  }

  postPageClosed(session: string, page: PageName, dwellMs: number): Promise<void> {
    return request("POST",
      `${this.base}/sessions/${session}/explanations/${page}/closed`,
      { dwell_ms: Math.round(dwellMs) });
  }

  postFeedback(session: string, page: PageName): Promise<void> {
    return request("POST",
      `${this.base}/sessions/${session}/explanations/${page}/feedback`, {});
  }

  getStats(session: string): Promise<UsageStats> {
    return request("GET", `${this.base}/sessions/${session}/stats`);
  }
}
