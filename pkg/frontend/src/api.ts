/**
 * Typed client for the design service.
 *
 * Every mutation can carry the revision the caller last saw; the server
 * answers 409 with its current revision when that is stale. Failed solves
 * still bump the revision (the prescription is stored for in-place repair),
 * so the error payload's `revision` field must be honored too.
 */

export type PrescriptionMode = "diagonals" | "boundary" | "c1";
export type BoundarySide = "row0" | "row_n" | "col0" | "col_n";
export type RingSide = "row1" | "row_n1" | "col1" | "col_n1";
export type Slot = readonly [number, number];

export interface CurveData {
  degree: number;
  points: number[][];
}

export interface PrescriptionDoc {
  kind: "prescription";
  version: number;
  n: number;
  mode: PrescriptionMode;
  pair: { q: CurveData; r: CurveData };
  boundary?: Record<BoundarySide, number[][]>;
  rings?: Record<RingSide, number[][]>;
}

export interface NetDoc {
  kind: "net";
  version: number;
  degree: number;
  points: number[][][];
}

export interface ReportDoc {
  kind: "report";
  version: number;
  parity: "even" | "odd";
  residual_a: number[];
  residual_b: number[];
  scale: number;
  tol: number;
  admissible: boolean;
}

export interface ResidualPayload {
  parity: string;
  residual_a: number[];
  residual_b: number[];
  scale: number;
  max_residual: number;
}

export interface SpaceSummary {
  dimension: number;
  free_slots: [number, number][];
  revision: number;
}

export interface SessionState {
  id: string;
  revision: number;
  prescription: PrescriptionDoc | null;
  solved: boolean;
  admissible?: boolean;
  dimension?: number;
  free_slots?: [number, number][];
  free_values?: Record<string, number[]>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly payload: Record<string, unknown>,
  ) {
    super(`${status} ${code}${typeof payload.detail === "string" ? `: ${payload.detail}` : ""}`);
    this.name = "ApiError";
  }

  /** Present on 409 responses and on 422s from a failed solve. */
  get revision(): number | undefined {
    const value = this.payload.current_revision ?? this.payload.revision;
    return typeof value === "number" ? value : undefined;
  }

  get residuals(): ResidualPayload | undefined {
    const value = this.payload.residuals;
    return value && !Array.isArray(value) ? (value as ResidualPayload) : undefined;
  }
}

export const slotKey = (slot: Slot): string => `${slot[0]},${slot[1]}`;

async function raise(response: Response): Promise<never> {
  let payload: Record<string, unknown> = {};
  try {
    payload = (await response.json()) as Record<string, unknown>;
  } catch {
    // non-JSON error body; status alone will have to do
  }
  const code = typeof payload.code === "string" ? payload.code : "http_error";
  throw new ApiError(response.status, code, payload);
}

export class DesignApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit & { ifMatch?: number }): Promise<Response> {
    const headers = new Headers(init?.headers);
    if (init?.ifMatch !== undefined) headers.set("If-Match", `"${init.ifMatch}"`);
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    if (!response.ok) await raise(response);
    return response;
  }

  private async json<T>(path: string, init?: RequestInit & { ifMatch?: number }): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  createSession(): Promise<{ id: string; revision: number }> {
    return this.json("/sessions", { method: "POST" });
  }

  getState(id: string): Promise<SessionState> {
    return this.json(`/sessions/${id}`);
  }

  putPrescription(id: string, doc: PrescriptionDoc, ifMatch?: number): Promise<SpaceSummary> {
    return this.json(`/sessions/${id}/prescription`, {
      method: "PUT",
      body: JSON.stringify(doc),
      headers: { "Content-Type": "application/json" },
      ifMatch,
    });
  }

  repair(id: string, mode?: string, ifMatch?: number): Promise<SpaceSummary> {
    return this.json(`/sessions/${id}/repair`, {
      method: "POST",
      body: JSON.stringify(mode ? { mode } : {}),
      headers: { "Content-Type": "application/json" },
      ifMatch,
    });
  }

  putFreeValue(id: string, slot: Slot, point: number[], ifMatch?: number): Promise<{ revision: number }> {
    return this.json(`/sessions/${id}/free/${slotKey(slot)}`, {
      method: "PUT",
      body: JSON.stringify(point),
      headers: { "Content-Type": "application/json" },
      ifMatch,
    });
  }

  getNet(id: string): Promise<NetDoc> {
    return this.json(`/sessions/${id}/net`);
  }

  getReport(id: string): Promise<ReportDoc> {
    return this.json(`/sessions/${id}/report`);
  }

  async getMesh(id: string, samples = 32, diagonals = true): Promise<string> {
    const query = `samples=${samples}&diagonals=${diagonals ? 1 : 0}`;
    return (await this.request(`/sessions/${id}/mesh?${query}`)).text();
  }
}
