/**
 * Typed client for the measurement-session API.
 *
 * All calls for one client are funneled through a single promise queue, so
 * the UI can never have two measure requests in flight for a session; the
 * displayed numbers always come from server responses.
 */

export type GroupSpec = Record<string, unknown> | string;
export type StateSpec = Record<string, unknown> | string;

export interface CreateResponse {
  id: string;
  n: number;
  slice: number[][];
}

export interface MeasureResponse {
  outcome: number;
  probability: number;
  slice: number[][];
  nonClassicalFlag: boolean;
}

export interface HistoryEntry {
  position: number;
  outcome: number;
  probability: number;
}

export interface SessionSnapshot {
  id: string;
  n: number;
  slice: number[][];
  history: HistoryEntry[];
  fixedPointDistribution: Record<string, number>;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(readonly baseUrl: string = "") {}

  /** Serialize all requests: at most one in flight per client. */
  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task, task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { detail?: string };
        if (payload.detail) detail = payload.detail;
      } catch {
        /* keep the status text */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(group: GroupSpec, state: StateSpec, seed: number): Promise<CreateResponse> {
    return this.enqueue(() =>
      this.request<CreateResponse>("POST", "/api/session", { group, state, seed }),
    );
  }

  measure(id: string, position: number): Promise<MeasureResponse> {
    return this.enqueue(() =>
      this.request<MeasureResponse>("POST", `/api/session/${id}/measure`, { position }),
    );
  }

  snapshot(id: string): Promise<SessionSnapshot> {
    return this.enqueue(() => this.request<SessionSnapshot>("GET", `/api/session/${id}`));
  }

  reset(id: string): Promise<CreateResponse> {
    return this.enqueue(() => this.request<CreateResponse>("POST", `/api/session/${id}/reset`));
  }

  remove(id: string): Promise<{ ok: boolean }> {
    return this.enqueue(() => this.request<{ ok: boolean }>("DELETE", `/api/session/${id}`));
  }
}
