/** Typed client for the evaluation service HTTP API. */

export interface TrialView {
  trialId: string;
  words: string[];
  clue: string;
}

export interface Progress {
  answered: number;
  total: number;
}

export interface NextTrial {
  trial: TrialView;
  progress: Progress;
}

export interface ConfigMetrics {
  precision_at_2: number;
  recall_at_4: number;
  n: number;
}

export interface ZTest {
  z: number;
  p_value: number;
  degenerate: boolean;
}

export interface Report {
  per_config: Record<string, ConfigMetrics>;
  ztests: Record<string, Record<string, ZTest>>;
}

export interface TrialConfigSpec {
  representation: string;
  scoringFn: string;
  detect: boolean;
}

export interface SessionRequest {
  boardCount: number;
  configSet: TrialConfigSpec[];
  seed: number;
  nPerTeam?: number;
}

export interface SessionCreated {
  sessionId: string;
  trialCount: number;
}

export interface ResponseBody {
  trialId: string;
  rank1: string;
  rank2: string;
  rank3: string | null;
  rank4: string | null;
  responderId: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    const payload = await resp.json();
    if (!resp.ok) {
      const err = payload?.error ?? {};
      throw new ApiError(resp.status, err.code ?? "Unknown", err.message ?? resp.statusText);
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/api/health");
  }

  createSession(req: SessionRequest): Promise<SessionCreated> {
    return this.request("POST", "/api/sessions", req);
  }

  /** Returns null once every trial in the session has been answered. */
  async nextTrial(sessionId: string): Promise<NextTrial | null> {
    try {
      return await this.request("GET", `/api/sessions/${sessionId}/next`);
    } catch (err) {
      if (err instanceof ApiError && err.code === "SessionComplete") {
        return null;
      }
      throw err;
    }
  }

  submit(sessionId: string, body: ResponseBody): Promise<{ progress: Progress }> {
    return this.request("POST", `/api/sessions/${sessionId}/responses`, body);
  }

  async results(sessionId: string): Promise<Report> {
    const payload = await this.request<{ report: Report }>(
      "GET",
      `/api/sessions/${sessionId}/results`,
    );
    return payload.report;
  }
}
