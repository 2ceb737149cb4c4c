import { describe, expect, it } from "vitest";

import {
  canonicalStringify,
  decodeRequest,
  encodeError,
  encodeHello,
  encodeRecords,
  PROTOCOL_VERSION,
  WireRecord,
} from "../src/protocol";

const VALID_REQUEST = {
  id: 7,
  positive_prompt: "Photo portrait of a Software Engineer that codes, photograph++",
  negative_prompt: "illustration++",
  guidance_scale: 7.0,
  inference_steps: 50,
  image_count: 3,
  seed: 42,
};

const RECORD: WireRecord = {
  quality: 0.75,
  gender: "female",
  ethnicity: "asian",
  cpu_kwh: 2e-4,
  gpu_kwh: 1.8e-3,
  duration_s: 32.5,
};

describe("canonicalStringify", () => {
  it("sorts keys recursively and emits no whitespace", () => {
    const text = canonicalStringify({ b: 1, a: { d: [2, { z: 0, y: 1 }], c: "x" } });
    expect(text).toBe('{"a":{"c":"x","d":[2,{"y":1,"z":0}]},"b":1}');
  });

  it("round-trips through JSON.parse", () => {
    const value = { id: 3, records: [RECORD] };
    expect(JSON.parse(canonicalStringify(value))).toEqual(value);
  });

  it("is stable under re-encoding", () => {
    const once = canonicalStringify({ hello: { protocol: 1, mode: "stub" } });
    expect(canonicalStringify(JSON.parse(once))).toBe(once);
  });
});

describe("encodeHello", () => {
  it("announces the protocol version and mode", () => {
    expect(JSON.parse(encodeHello("stub"))).toEqual({
      hello: { protocol: PROTOCOL_VERSION, mode: "stub" },
    });
  });
});

describe("encodeRecords / encodeError", () => {
  it("carries records under the request id", () => {
    const payload = JSON.parse(encodeRecords(7, [RECORD]));
    expect(payload.id).toBe(7);
    expect(payload.records).toHaveLength(1);
    expect(payload.records[0]).toEqual(RECORD);
    expect(payload.error).toBeUndefined();
  });

  it("carries errors with a null id when none was salvageable", () => {
    const payload = JSON.parse(encodeError(null, "invalid JSON"));
    expect(payload.id).toBeNull();
    expect(payload.error).toBe("invalid JSON");
    expect(payload.records).toBeUndefined();
  });
});

describe("decodeRequest", () => {
  it("accepts a fully valid request", () => {
    const decoded = decodeRequest(JSON.stringify(VALID_REQUEST));
    expect(decoded.ok).toBe(true);
    if (decoded.ok) {
      expect(decoded.request).toEqual(VALID_REQUEST);
    }
  });

  it("rejects non-JSON with a null id", () => {
    const decoded = decodeRequest("this is not json");
    expect(decoded).toMatchObject({ ok: false, id: null });
    if (!decoded.ok) {
      expect(decoded.error).toContain("invalid JSON");
    }
  });

  it("rejects JSON that is not an object", () => {
    for (const line of ["[1,2]", '"text"', "17", "null"]) {
      const decoded = decodeRequest(line);
      expect(decoded).toMatchObject({ ok: false, id: null });
    }
  });

  it("rejects unknown keys", () => {
    const decoded = decodeRequest(JSON.stringify({ ...VALID_REQUEST, extra: 1 }));
    expect(decoded.ok).toBe(false);
  });

  it("salvages the id from an otherwise invalid request", () => {
    const broken = { ...VALID_REQUEST, image_count: 0 };
    const decoded = decodeRequest(JSON.stringify(broken));
    expect(decoded).toMatchObject({ ok: false, id: 7 });
  });

  it("rejects each required key when missing", () => {
    for (const key of Object.keys(VALID_REQUEST)) {
      const partial: Record<string, unknown> = { ...VALID_REQUEST };
      delete partial[key];
      const decoded = decodeRequest(JSON.stringify(partial));
      expect(decoded.ok, `missing ${key} must be rejected`).toBe(false);
    }
  });

  it("rejects out-of-domain numerics", () => {
    const bad = [
      { ...VALID_REQUEST, id: -1 },
      { ...VALID_REQUEST, guidance_scale: -0.1 },
      { ...VALID_REQUEST, inference_steps: 0 },
      { ...VALID_REQUEST, inference_steps: 12.5 },
      { ...VALID_REQUEST, image_count: -3 },
      { ...VALID_REQUEST, seed: -2 },
      { ...VALID_REQUEST, positive_prompt: "" },
    ];
    for (const payload of bad) {
      expect(decodeRequest(JSON.stringify(payload)).ok).toBe(false);
    }
  });
});
