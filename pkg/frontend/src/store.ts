/**
 * Client-side session state.
 *
 * The store never computes geometry; committed state always comes back from
 * the service (GET /net, /mesh, /sessions/{id}). Local edits exist only as an
 * optimistic overlay, keyed by the revision they were sent at, and are
 * dropped once the server confirms or supersedes them.
 *
 * Mutations are serialized: at most one request is in flight per session,
 * later drag positions for the same slot coalesce to the newest one. A 409
 * is resolved by refetching the session state and retrying once with the
 * fresh revision.
 */

import {
  ApiError,
  DesignApi,
  NetDoc,
  PrescriptionDoc,
  PrescriptionMode,
  ReportDoc,
  ResidualPayload,
  SessionState,
  Slot,
  slotKey,
} from "./api.js";
import { ObjModel, parseObj } from "./objparse.js";

export type BannerTone = "grey" | "red" | "green";

export interface Banner {
  tone: BannerTone;
  message: string;
  code?: string;
  residuals?: ResidualPayload;
}

export interface HandleView {
  slot: Slot;
  /** Optimistic value, else last server-confirmed value, else null (fill decides). */
  value: number[] | null;
  pending: boolean;
  /** Revision the optimistic edit was issued at, when one is pending. */
  sentAt?: number;
}

export interface PairView {
  q: number[][];
  r: number[][];
}

interface PendingEdit {
  slot: Slot;
  point: number[];
  sentAt: number;
  retried: boolean;
}

export interface StudioView {
  sessionId: string;
  revision: number;
  mode: PrescriptionMode | null;
  n: number | null;
  dimension: number | null;
  handles: HandleView[];
  banner: Banner;
  pair: PairView | null;
  /** The pair as it was before the last repair, for before/after rendering. */
  ghost: PairView | null;
  selected: Slot | null;
  /** True when the revision moved past the last fetched tessellation. */
  meshStale: boolean;
  lastError: { code: string; message: string } | null;
}

const NO_PRESCRIPTION: Banner = { tone: "grey", message: "no prescription loaded" };

export class StudioSession {
  #api: DesignApi;
  #id: string;
  #revision = 0;
  #mode: PrescriptionMode | null = null;
  #n: number | null = null;
  #dimension: number | null = null;
  #freeSlots: Slot[] = [];
  #serverValues = new Map<string, number[]>();
  #pending = new Map<string, PendingEdit>();
  #banner: Banner = NO_PRESCRIPTION;
  #pair: PairView | null = null;
  #ghost: PairView | null = null;
  #selected: Slot | null = null;
  #meshRevision = -1;
  #lastError: { code: string; message: string } | null = null;
  #listeners = new Set<() => void>();
  #pump: Promise<void> | null = null;

  private constructor(api: DesignApi, id: string, revision: number) {
    this.#api = api;
    this.#id = id;
    this.#revision = revision;
  }

  static async open(api: DesignApi): Promise<StudioSession> {
    const { id, revision } = await api.createSession();
    return new StudioSession(api, id, revision);
  }

  /** Rebind to an existing session, e.g. after a page reload. */
  static async attach(api: DesignApi, id: string): Promise<StudioSession> {
    const session = new StudioSession(api, id, 0);
    await session.refreshState();
    return session;
  }

  get id(): string {
    return this.#id;
  }

  get view(): StudioView {
    return {
      sessionId: this.#id,
      revision: this.#revision,
      mode: this.#mode,
      n: this.#n,
      dimension: this.#dimension,
      handles: this.#freeSlots.map((slot) => {
        const key = slotKey(slot);
        const pending = this.#pending.get(key);
        const handle: HandleView = {
          slot,
          value: pending?.point ?? this.#serverValues.get(key) ?? null,
          pending: pending !== undefined,
        };
        if (pending) handle.sentAt = pending.sentAt;
        return handle;
      }),
      banner: this.#banner,
      pair: this.#pair,
      ghost: this.#ghost,
      selected: this.#selected,
      meshStale: this.#meshRevision !== this.#revision,
      lastError: this.#lastError,
    };
  }

  subscribe(listener: () => void): () => void {
    this.#listeners.add(listener);
    return () => this.#listeners.delete(listener);
  }

  #notify(): void {
    for (const listener of this.#listeners) listener();
  }

  select(slot: Slot | null): void {
    this.#selected = slot;
    this.#notify();
  }

  /** Returns false when the prescription was stored but is not solvable. */
  async loadPrescription(doc: PrescriptionDoc): Promise<boolean> {
    try {
      const summary = await this.#api.putPrescription(this.#id, doc, this.#revision);
      this.#revision = summary.revision;
      this.#applySolved(summary.dimension, summary.free_slots);
      this.#mode = doc.mode;
      this.#n = doc.n;
      this.#pair = { q: doc.pair.q.points, r: doc.pair.r.points };
      this.#ghost = null;
      this.#notify();
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refreshState();
        return this.loadPrescription(doc);
      }
      if (error instanceof ApiError && error.status === 422) {
        // Solve failures still store the prescription and bump the revision.
        if (error.revision !== undefined) this.#revision = error.revision;
        this.#mode = doc.mode;
        this.#n = doc.n;
        this.#pair = { q: doc.pair.q.points, r: doc.pair.r.points };
        this.#ghost = null;
        this.#applyUnsolved(error);
        this.#notify();
        return false;
      }
      throw error;
    }
  }

  async repair(mode?: string): Promise<boolean> {
    const before = this.#pair;
    try {
      const summary = await this.#api.repair(this.#id, mode, this.#revision);
      this.#revision = summary.revision;
      this.#applySolved(summary.dimension, summary.free_slots);
      this.#ghost = before;
      await this.refreshState(); // pulls the repaired pair for rendering
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refreshState();
        return this.repair(mode);
      }
      if (error instanceof ApiError && error.status === 422) {
        if (error.revision !== undefined) this.#revision = error.revision;
        this.#applyUnsolved(error);
        this.#notify();
        return false;
      }
      throw error;
    }
  }

  /** Optimistic drag update; transport runs in the background, one at a time. */
  moveHandle(slot: Slot, point: number[]): void {
    const key = slotKey(slot);
    this.#pending.set(key, { slot, point: [...point], sentAt: this.#revision, retried: false });
    this.#notify();
    if (!this.#pump) {
      this.#pump = this.#drain().finally(() => {
        this.#pump = null;
      });
    }
  }

  /** Resolves once every queued edit has been confirmed or abandoned. */
  async idle(): Promise<void> {
    while (this.#pump) await this.#pump;
  }

  async #drain(): Promise<void> {
    for (;;) {
      const next = this.#inFlightCandidate();
      if (!next) return;
      const [key, edit] = next;
      try {
        const { revision } = await this.#api.putFreeValue(this.#id, edit.slot, edit.point, this.#revision);
        this.#revision = revision;
        this.#serverValues.set(key, edit.point);
        // A newer drag position may have been queued while this one flew.
        if (this.#pending.get(key) === edit) this.#pending.delete(key);
        this.#lastError = null;
      } catch (error) {
        if (error instanceof ApiError && error.status === 409 && !edit.retried) {
          await this.refreshState();
          if (this.#pending.get(key) === edit) edit.retried = true;
          continue;
        }
        if (this.#pending.get(key) === edit) this.#pending.delete(key);
        if (error instanceof ApiError) {
          this.#lastError = { code: error.code, message: error.message };
        } else {
          this.#lastError = { code: "network", message: String(error) };
        }
        await this.refreshState();
      }
      this.#notify();
    }
  }

  #inFlightCandidate(): [string, PendingEdit] | null {
    const first = this.#pending.entries().next();
    return first.done ? null : first.value;
  }

  /** Reconcile with the server; resolves revision conflicts. */
  async refreshState(): Promise<void> {
    const state = await this.#api.getState(this.#id);
    this.#ingest(state);
    this.#notify();
  }

  #ingest(state: SessionState): void {
    this.#revision = state.revision;
    if (state.prescription) {
      this.#mode = state.prescription.mode;
      this.#n = state.prescription.n;
      this.#pair = {
        q: state.prescription.pair.q.points,
        r: state.prescription.pair.r.points,
      };
    }
    if (state.solved) {
      this.#applySolved(state.dimension ?? 0, state.free_slots ?? []);
      this.#serverValues = new Map(Object.entries(state.free_values ?? {}));
    } else if (state.prescription) {
      this.#dimension = null;
      this.#freeSlots = [];
      // Keep an existing red banner: it has the richer residual payload.
      if (this.#banner.tone !== "red") {
        this.#banner = {
          tone: "red",
          message:
            state.admissible === false
              ? "prescription is not admissible"
              : "prescription stored but not solvable",
        };
      }
    } else {
      this.#banner = NO_PRESCRIPTION;
    }
  }

  #applySolved(dimension: number, freeSlots: [number, number][]): void {
    this.#dimension = dimension;
    this.#freeSlots = freeSlots.map((slot) => [slot[0], slot[1]] as const);
    this.#banner = {
      tone: "green",
      message:
        dimension === 0
          ? "admissible · fully determined"
          : `admissible · ${dimension} free control point${dimension === 1 ? "" : "s"}`,
    };
    for (const key of [...this.#serverValues.keys()]) {
      if (!this.#freeSlots.some((slot) => slotKey(slot) === key)) this.#serverValues.delete(key);
    }
  }

  #applyUnsolved(error: ApiError): void {
    this.#dimension = null;
    this.#freeSlots = [];
    this.#serverValues.clear();
    this.#banner = {
      tone: "red",
      code: error.code,
      message:
        error.residuals !== undefined
          ? `inadmissible · max residual ${error.residuals.max_residual.toExponential(2)}`
          : error.message,
      residuals: error.residuals,
    };
  }

  async fetchNet(): Promise<NetDoc> {
    return this.#api.getNet(this.#id);
  }

  async fetchReport(): Promise<ReportDoc> {
    return this.#api.getReport(this.#id);
  }

  /** Fetch and parse the current tessellation; clears the stale flag. */
  async fetchMesh(samples = 32): Promise<ObjModel> {
    const revision = this.#revision;
    const model = parseObj(await this.#api.getMesh(this.#id, samples, true));
    this.#meshRevision = revision;
    this.#notify();
    return model;
  }
}
