/** Thin typed client over the /v1 session API. No business logic here:
 * every distribution, ranking, and transition comes from the server. */

import type { SessionView, TracePayload } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorBody {
  detail?: unknown;
}

function describeDetail(status: number, detail: unknown): string {
  if (detail && typeof detail === "object" && !Array.isArray(detail)) {
    const d = detail as Record<string, unknown>;
    if (d.error === "out_of_order") {
      return `action "${d.action}" is not allowed in state "${d.state}"`;
    }
    if (d.error === "degenerate_update") {
      return `degenerate update at timestep ${d.timestep}: ${d.message}`;
    }
    if (typeof d.message === "string") return d.message;
    if (typeof d.error === "string") return d.error;
  }
  if (Array.isArray(detail) && detail.length > 0) {
    const first = detail[0] as Record<string, unknown>;
    if (first && typeof first.msg === "string") return first.msg;
  }
  if (typeof detail === "string") return detail;
  return `request failed with status ${status}`;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await fetch(this.baseUrl + path, {
        headers: { "content-type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new ApiError(0, null, `cannot reach the server: ${String(err)}`);
    }
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      // tolerate empty bodies; errors below fall back to the status line
    }
    if (!resp.ok) {
      const detail = (body as ErrorBody | null)?.detail ?? body;
      throw new ApiError(resp.status, detail, describeDetail(resp.status, detail));
    }
    return body as T;
  }

  createSession(body: { scenario?: unknown; epsilon_floor?: boolean } = {}): Promise<SessionView> {
    return this.request("/v1/sessions", {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}`);
  }

  submitTrust(id: string, body: { level_label?: string; tau?: number }): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}/trust`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  submitCounter(id: string, poolIndex: number | null): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}/counter`, {
      method: "POST",
      body: JSON.stringify({ pool_index: poolIndex }),
    });
  }

  submitRanking(id: string, ranking: number[]): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}/ranking`, {
      method: "POST",
      body: JSON.stringify({ ranking }),
    });
  }

  endSession(id: string): Promise<SessionView> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}/end`, {
      method: "POST",
      body: JSON.stringify({}),
    });
  }

  getTrace(id: string): Promise<TracePayload> {
    return this.request(`/v1/sessions/${encodeURIComponent(id)}/trace`);
  }
}
