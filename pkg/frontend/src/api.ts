/** Thin typed client over the session service. All state lives server-side;
 * these calls return freshly parsed views and throw ApiError / ParseError
 * on anything unexpected. */

import {
  HistoryEntry,
  ParseError,
  SessionView,
  SurfaceView,
  parseHistory,
  parseSessionView,
  parseSurfaceView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(`${errorName}: ${detail}`);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

async function request(base: string, path: string, init?: RequestInit): Promise<unknown> {
  let resp: Response;
  try {
    resp = await fetch(base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
  } catch (err) {
    throw new NetworkError(err);
  }
  let body: unknown = null;
  const text = await resp.text();
  if (text) {
    try {
      body = JSON.parse(text);
    } catch {
      if (resp.ok) throw new ParseError(`response to ${path} is not JSON`);
    }
  }
  if (!resp.ok) {
    const detail = (body as { detail?: { error?: string; detail?: string } })?.detail;
    throw new ApiError(
      resp.status,
      detail?.error ?? `HTTP${resp.status}`,
      detail?.detail ?? text.slice(0, 200),
    );
  }
  return body;
}

export interface NewSessionSpec {
  domain: { ivs: { name: string; low: number; high: number }[]; dv_name: string };
  initial_samples: { coords: number[]; value: number }[];
  rng_seed?: number;
  overrides?: Record<string, unknown>;
}

export class AredClient {
  constructor(public base: string = "") {}

  async createSession(spec: NewSessionSpec): Promise<string> {
    const body = await request(this.base, "/sessions", {
      method: "POST",
      body: JSON.stringify(spec),
    });
    const id = (body as { id?: unknown })?.id;
    if (typeof id !== "string") throw new ParseError("create response has no id");
    return id;
  }

  async listSessions(): Promise<string[]> {
    const body = await request(this.base, "/sessions");
    const ids = (body as { sessions?: unknown })?.sessions;
    if (!Array.isArray(ids)) throw new ParseError("session list malformed");
    return ids.map(String);
  }

  async getSession(id: string): Promise<SessionView> {
    return parseSessionView(await request(this.base, `/sessions/${id}`));
  }

  async propose(id: string): Promise<SessionView> {
    await request(this.base, `/sessions/${id}/proposal`, { method: "POST" });
    return this.getSession(id);
  }

  async submitResult(id: string, value: number): Promise<SessionView> {
    await request(this.base, `/sessions/${id}/result`, {
      method: "POST",
      body: JSON.stringify({ value }),
    });
    return this.getSession(id);
  }

  async getSurface(
    id: string,
    resolution?: number,
    axisX?: number,
    axisY?: number,
  ): Promise<SurfaceView> {
    const params = new URLSearchParams();
    if (resolution) params.set("resolution", String(resolution));
    if (axisX !== undefined) params.set("axis_x", String(axisX));
    if (axisY !== undefined) params.set("axis_y", String(axisY));
    const q = params.toString() ? `?${params}` : "";
    return parseSurfaceView(await request(this.base, `/sessions/${id}/surface${q}`));
  }

  async getHistory(id: string): Promise<HistoryEntry[]> {
    return parseHistory(await request(this.base, `/sessions/${id}/history`));
  }

  exportUrl(id: string): string {
    return `${this.base}/sessions/${id}/export?force=true`;
  }
}
