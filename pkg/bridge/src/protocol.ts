/**
 * Wire protocol shared with the tuning engine: one JSON object per line.
 *
 * bridge -> engine on startup:  {"hello":{"mode":"stub","protocol":1}}
 * engine -> bridge:             {"guidance_scale":7,"id":1,"image_count":20,...}
 * bridge -> engine:             {"id":1,"records":[...]} or {"error":"...","id":1}
 *
 * Encoding is canonical: keys sorted recursively, compact separators, UTF-8.
 * A response carries either records or an error, never both; a line the
 * bridge cannot parse at all is answered with an error object whose id is
 * null so the engine can tell it apart from a failed evaluation.
 */

import { z } from "zod";

export const PROTOCOL_VERSION = 1;

export type BridgeMode = "stub" | "real";

export const GENDER_LABELS = ["male", "female", "unknown"] as const;
export const ETHNICITY_LABELS = ["arab", "asian", "black", "white", "unknown"] as const;

export type GenderLabel = (typeof GENDER_LABELS)[number];
export type EthnicityLabel = (typeof ETHNICITY_LABELS)[number];

export interface WireRecord {
  quality: number;
  gender: GenderLabel;
  ethnicity: EthnicityLabel;
  cpu_kwh: number;
  gpu_kwh: number;
  duration_s: number;
}

export interface EvaluationRequest {
  id: number;
  positive_prompt: string;
  negative_prompt: string;
  guidance_scale: number;
  inference_steps: number;
  image_count: number;
  seed: number;
}

const requestSchema = z
  .object({
    id: z.number().int().nonnegative(),
    positive_prompt: z.string().min(1),
    negative_prompt: z.string(),
    guidance_scale: z.number().nonnegative().finite(),
    inference_steps: z.number().int().positive(),
    image_count: z.number().int().positive(),
    seed: z.number().int().nonnegative(),
  })
  .strict();

export type DecodedRequest =
  | { ok: true; request: EvaluationRequest }
  | { ok: false; error: string; id: number | null };

/** Serialize any JSON value with recursively sorted keys and no whitespace. */
export function canonicalStringify(value: unknown): string {
  if (value === null || typeof value === "number" || typeof value === "string" || typeof value === "boolean") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalStringify).join(",") + "]";
  }
  const record = value as Record<string, unknown>;
  const parts = Object.keys(record)
    .sort()
    .map((key) => JSON.stringify(key) + ":" + canonicalStringify(record[key]));
  return "{" + parts.join(",") + "}";
}

export function encodeHello(mode: BridgeMode): string {
  return canonicalStringify({ hello: { protocol: PROTOCOL_VERSION, mode } });
}

export function encodeRecords(id: number, records: WireRecord[]): string {
  return canonicalStringify({ id, records });
}

export function encodeError(id: number | null, message: string): string {
  return canonicalStringify({ id, error: message });
}

/** Pull a usable request id out of a line that failed full validation. */
function salvageId(payload: unknown): number | null {
  if (payload !== null && typeof payload === "object" && !Array.isArray(payload)) {
    const id = (payload as Record<string, unknown>).id;
    if (typeof id === "number" && Number.isInteger(id) && id >= 0) {
      return id;
    }
  }
  return null;
}

/**
 * Parse one engine line into a request. Never throws: malformed input comes
 * back as {ok: false} with the best id that could be salvaged, so the caller
 * can still address its error response.
 */
export function decodeRequest(line: string): DecodedRequest {
  let payload: unknown;
  try {
    payload = JSON.parse(line);
  } catch (exc) {
    return { ok: false, error: `invalid JSON: ${(exc as Error).message}`, id: null };
  }
  if (payload === null || typeof payload !== "object" || Array.isArray(payload)) {
    return { ok: false, error: "request must be a JSON object", id: null };
  }
  const parsed = requestSchema.safeParse(payload);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    const where = issue && issue.path.length > 0 ? ` at ${issue.path.join(".")}` : "";
    const what = issue ? issue.message : "invalid request";
    return { ok: false, error: `invalid request${where}: ${what}`, id: salvageId(payload) };
  }
  return { ok: true, request: parsed.data };
}
