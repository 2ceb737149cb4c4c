/**
 * Stub backend: synthesizes plausible per-image measurements without any
 * model. Useful for wiring tests, protocol conformance runs, and campaign
 * rehearsals on machines with no GPU.
 *
 * The synthesis is shaped like a text-to-image pipeline: image quality peaks
 * at a sweet-spot guidance scale, demographic skew relaxes as the prompt
 * carries more weighted style keywords, and energy scales with the step
 * count. Records are deterministic in (config seed, request seed, image
 * index) and never depend on the request id.
 */

import { CounterRng } from "./rng";
import {
  ETHNICITY_LABELS,
  EvaluationRequest,
  GENDER_LABELS,
  WireRecord,
} from "./protocol";

export interface StubSettings {
  /** Campaign-level seed mixed into every draw. */
  configSeed: number;
  /** Idle wall-clock seconds amortized into each image's energy figures. */
  idleSeconds: number;
}

const QUALITY_PEAK_GUIDANCE = 7.0;
const QUALITY_WIDTH = 1.8;
const QUALITY_NOISE = 0.01;
const UNKNOWN_GENDER_RATE = 0.02;
const GENDER_SKEW_DECAY = 0.4;
const ETHNICITY_SKEW_DECAY = 0.35;
const CPU_KWH_PER_STEP = 4.0e-6;
const GPU_PER_CPU = 9.0;
const SECONDS_PER_STEP = 0.65;
const IDLE_CPU_WATTS = 45.0;
const IDLE_GPU_WATTS = 18.0;

function clamp01(value: number): number {
  return Math.min(1.0, Math.max(0.0, value));
}

/** Count weighted keyword groups: each "+" run marks one emphasized term. */
export function emphasisSignal(prompt: string): number {
  const runs = prompt.match(/\++/g);
  return Math.min(10, runs ? runs.length : 0);
}

function drawGender(rng: CounterRng, signal: number): WireRecord["gender"] {
  if (rng.next() < UNKNOWN_GENDER_RATE) {
    return GENDER_LABELS[2];
  }
  const pMale = 0.5 + 0.5 * Math.exp(-GENDER_SKEW_DECAY * signal);
  return rng.next() < pMale ? GENDER_LABELS[0] : GENDER_LABELS[1];
}

function drawEthnicity(rng: CounterRng, signal: number): WireRecord["ethnicity"] {
  const dominant = 0.25 + 0.75 * Math.exp(-ETHNICITY_SKEW_DECAY * signal);
  const rest = 1.0 - dominant;
  // white dominates the skewed stub distribution; the remainder splits
  // 50/30/20 across asian, black, arab.
  const shares: Array<[WireRecord["ethnicity"], number]> = [
    ["white", dominant],
    ["asian", rest * 0.5],
    ["black", rest * 0.3],
    ["arab", rest * 0.2],
  ];
  let u = rng.next();
  for (const [label, share] of shares) {
    if (u < share) {
      return label;
    }
    u -= share;
  }
  return ETHNICITY_LABELS[4];
}

/** Synthesize the full record batch for one evaluation request. */
export function synthesizeRecords(request: EvaluationRequest, settings: StubSettings): WireRecord[] {
  const signal = emphasisSignal(request.positive_prompt);
  const idlePerImage = settings.idleSeconds / request.image_count;
  const idleCpuKwh = (IDLE_CPU_WATTS * idlePerImage) / 3.6e6;
  const idleGpuKwh = (IDLE_GPU_WATTS * idlePerImage) / 3.6e6;

  const records: WireRecord[] = [];
  for (let index = 0; index < request.image_count; index += 1) {
    const rng = new CounterRng("equigen-stub", settings.configSeed, request.seed, index);
    const offPeak = (request.guidance_scale - QUALITY_PEAK_GUIDANCE) / QUALITY_WIDTH;
    const bell = Math.exp(-0.5 * offPeak * offPeak);
    const quality = clamp01(bell + QUALITY_NOISE * (2.0 * rng.next() - 1.0));
    const gender = drawGender(rng, signal);
    const ethnicity = drawEthnicity(rng, signal);
    const cpuBase = CPU_KWH_PER_STEP * request.inference_steps * (1.0 + 0.05 * (2.0 * rng.next() - 1.0));
    const duration = SECONDS_PER_STEP * request.inference_steps * (1.0 + 0.02 * (2.0 * rng.next() - 1.0));
    records.push({
      quality,
      gender,
      ethnicity,
      cpu_kwh: cpuBase + idleCpuKwh,
      gpu_kwh: cpuBase * GPU_PER_CPU + idleGpuKwh,
      duration_s: duration,
    });
  }
  return records;
}
