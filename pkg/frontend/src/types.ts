/** Wire types mirrored from the session service, plus strict parsers.
 *
 * The dashboard never mutates these locally: every render starts from a
 * fresh server response, and anything malformed becomes a ParseError that
 * the UI surfaces in its error panel.
 */

export interface VariableRange {
  name: string;
  low: number;
  high: number;
}

export interface DomainView {
  ivs: VariableRange[];
  dv_name: string;
}

export type Provenance = "initial" | "drawn" | "feedback";

export interface ArchiveEntry {
  coords: number[];
  value: number | null;
  provenance: Provenance;
  sequence_index: number;
}

export interface ProposalAudit {
  distance: number;
  threshold: number;
}

export interface PendingView {
  coords: number[];
  provenance: Provenance;
  sequence_index: number;
  predicted: number | null;
  audit: ProposalAudit;
}

export interface FeedbackView {
  coords: number[];
  triggering_ape: number;
  sigma_fraction: number;
}

export type SessionStatus =
  | "ready_to_propose"
  | "awaiting_measurement"
  | "converged"
  | "failed";

export interface SessionView {
  id: string;
  status: SessionStatus;
  domain: DomainView;
  archive: ArchiveEntry[];
  v: number;
  consecutive_passes: number;
  stopping_run_length: number;
  pending: PendingView | null;
  feedback: FeedbackView | null;
  iterations: number;
  has_model: boolean;
}

export interface CurveSurface {
  kind: "curve";
  xs: number[];
  predictions: number[];
  archive: ArchiveEntry[];
}

export interface GridSurface {
  kind: "grid";
  xs: number[];
  ys: number[];
  z: number[][];
  archive: ArchiveEntry[];
}

export type SurfaceView = CurveSurface | GridSurface;

export interface HistoryEntry {
  archive_size: number;
  mae: number;
  mape: number;
  r: number;
  eligible: boolean;
  passed: boolean;
  feedback: boolean;
}

export class ParseError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ParseError";
  }
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function num(v: unknown, where: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ParseError(`expected a finite number at ${where}, got ${JSON.stringify(v)}`);
  }
  return v;
}

function numOrNull(v: unknown, where: string): number | null {
  return v === null || v === undefined ? null : num(v, where);
}

function str(v: unknown, where: string): string {
  if (typeof v !== "string") throw new ParseError(`expected a string at ${where}`);
  return v;
}

function bool(v: unknown, where: string): boolean {
  if (typeof v !== "boolean") throw new ParseError(`expected a boolean at ${where}`);
  return v;
}

function numArray(v: unknown, where: string): number[] {
  if (!Array.isArray(v)) throw new ParseError(`expected an array at ${where}`);
  return v.map((x, i) => num(x, `${where}[${i}]`));
}

const PROVENANCE: Provenance[] = ["initial", "drawn", "feedback"];
const STATUS: SessionStatus[] = [
  "ready_to_propose",
  "awaiting_measurement",
  "converged",
  "failed",
];

function parseArchiveEntry(v: unknown, where: string): ArchiveEntry {
  if (!isRecord(v)) throw new ParseError(`expected an archive entry at ${where}`);
  const provenance = str(v.provenance, `${where}.provenance`);
  if (!PROVENANCE.includes(provenance as Provenance)) {
    throw new ParseError(`unknown provenance ${provenance} at ${where}`);
  }
  return {
    coords: numArray(v.coords, `${where}.coords`),
    value: numOrNull(v.value, `${where}.value`),
    provenance: provenance as Provenance,
    sequence_index: num(v.sequence_index, `${where}.sequence_index`),
  };
}

export function parseSessionView(v: unknown): SessionView {
  if (!isRecord(v)) throw new ParseError("session summary is not an object");
  const status = str(v.status, "status");
  if (!STATUS.includes(status as SessionStatus)) {
    throw new ParseError(`unknown status ${status}`);
  }
  const domain = v.domain;
  if (!isRecord(domain) || !Array.isArray(domain.ivs)) {
    throw new ParseError("domain.ivs missing");
  }
  const ivs = domain.ivs.map((r, i) => {
    if (!isRecord(r)) throw new ParseError(`domain.ivs[${i}] is not an object`);
    return {
      name: str(r.name, `domain.ivs[${i}].name`),
      low: num(r.low, `domain.ivs[${i}].low`),
      high: num(r.high, `domain.ivs[${i}].high`),
    };
  });
  let pending: PendingView | null = null;
  if (v.pending !== null && v.pending !== undefined) {
    const p = v.pending;
    if (!isRecord(p) || !isRecord(p.audit)) throw new ParseError("pending.audit missing");
    pending = {
      coords: numArray(p.coords, "pending.coords"),
      provenance: str(p.provenance, "pending.provenance") as Provenance,
      sequence_index: num(p.sequence_index, "pending.sequence_index"),
      predicted: numOrNull(p.predicted, "pending.predicted"),
      audit: {
        distance: num(p.audit.distance, "pending.audit.distance"),
        threshold: num(p.audit.threshold, "pending.audit.threshold"),
      },
    };
  }
  let feedback: FeedbackView | null = null;
  if (v.feedback !== null && v.feedback !== undefined) {
    const f = v.feedback;
    if (!isRecord(f)) throw new ParseError("feedback is not an object");
    feedback = {
      coords: numArray(f.coords, "feedback.coords"),
      triggering_ape: num(f.triggering_ape, "feedback.triggering_ape"),
      sigma_fraction: num(f.sigma_fraction, "feedback.sigma_fraction"),
    };
  }
  if (!Array.isArray(v.archive)) throw new ParseError("archive is not an array");
  return {
    id: str(v.id, "id"),
    status: status as SessionStatus,
    domain: { ivs, dv_name: str(domain.dv_name, "domain.dv_name") },
    archive: v.archive.map((e, i) => parseArchiveEntry(e, `archive[${i}]`)),
    v: num(v.v, "v"),
    consecutive_passes: num(v.consecutive_passes, "consecutive_passes"),
    stopping_run_length: num(v.stopping_run_length, "stopping_run_length"),
    pending,
    feedback,
    iterations: num(v.iterations, "iterations"),
    has_model: bool(v.has_model, "has_model"),
  };
}

export function parseSurfaceView(v: unknown): SurfaceView {
  if (!isRecord(v)) throw new ParseError("surface payload is not an object");
  if (!Array.isArray(v.archive)) throw new ParseError("surface.archive missing");
  const archive = v.archive.map((e, i) => parseArchiveEntry(e, `surface.archive[${i}]`));
  if (v.kind === "curve") {
    return {
      kind: "curve",
      xs: numArray(v.xs, "surface.xs"),
      predictions: numArray(v.predictions, "surface.predictions"),
      archive,
    };
  }
  if (v.kind === "grid") {
    if (!Array.isArray(v.z)) throw new ParseError("surface.z missing");
    return {
      kind: "grid",
      xs: numArray(v.xs, "surface.xs"),
      ys: numArray(v.ys, "surface.ys"),
      z: v.z.map((row, i) => numArray(row, `surface.z[${i}]`)),
      archive,
    };
  }
  throw new ParseError(`unknown surface kind ${JSON.stringify(v.kind)}`);
}

export function parseHistory(v: unknown): HistoryEntry[] {
  if (!isRecord(v) || !Array.isArray(v.iterations)) {
    throw new ParseError("history.iterations missing");
  }
  return v.iterations.map((e, i) => {
    if (!isRecord(e)) throw new ParseError(`history.iterations[${i}] is not an object`);
    return {
      archive_size: num(e.archive_size, `history[${i}].archive_size`),
      mae: num(e.mae, `history[${i}].mae`),
      mape: num(e.mape, `history[${i}].mape`),
      r: num(e.r, `history[${i}].r`),
      eligible: bool(e.eligible, `history[${i}].eligible`),
      passed: bool(e.passed, `history[${i}].passed`),
      feedback: bool(e.feedback, `history[${i}].feedback`),
    };
  });
}
