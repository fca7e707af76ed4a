/**
 * Wire protocol types and validation. Request bodies carry exactly
 * request_id/seed/inputs/params; responses carry exactly
 * request_id/status/outputs/gpu_seconds/model_id. Media travels by
 * reference into the shared media root, never inline.
 */

import type { MediaRef } from "./media.js";

export const KINDS = [
  "caption",
  "instruct",
  "edit_image",
  "depth",
  "generate",
  "judge",
  "enhance",
] as const;

export type Kind = (typeof KINDS)[number];

export class ProtocolError extends Error {}

type InputSpec = Record<string, "media" | "text">;

export const REQUIRED_INPUTS: Record<Kind, InputSpec> = {
  caption: { video: "media" },
  instruct: { video: "media", caption: "text" },
  edit_image: { frame: "media", instruction: "text" },
  depth: { video: "media" },
  // generation is only valid conditioned on BOTH scaffolds plus the instruction
  generate: { depth_video: "media", edited_keyframe: "media", instruction: "text" },
  judge: { source: "media", edited: "media", instruction: "text" },
  enhance: { video: "media" },
};

export interface WireRequest {
  kind: Kind;
  requestId: string;
  /** decimal string so u64 seeds survive JSON without precision loss */
  seed: string;
  inputs: Record<string, MediaRef | string>;
  params: Record<string, unknown>;
}

function isMediaRef(v: unknown): v is MediaRef {
  if (typeof v !== "object" || v === null) return false;
  const o = v as Record<string, unknown>;
  return (
    Object.keys(o).length === 3 &&
    typeof o.digest === "string" &&
    typeof o.path === "string" &&
    (o.kind === "VIDEO" || o.kind === "IMAGE")
  );
}

const U64_MAX = 2n ** 64n - 1n;

/**
 * Parse and validate one request body. `rawSeed` comes from the raw body
 * text (not the JSON.parse output) because seeds are 64-bit and a
 * round-trip through a double would corrupt them.
 */
export function parseRequest(
  kind: string,
  body: unknown,
  rawSeed: string | null,
): WireRequest {
  if (!(KINDS as readonly string[]).includes(kind)) {
    throw new ProtocolError(`unknown backend kind '${kind}'`);
  }
  if (typeof body !== "object" || body === null) {
    throw new ProtocolError("request body must be a JSON object");
  }
  const o = body as Record<string, unknown>;
  const keys = Object.keys(o).sort();
  if (keys.join(",") !== "inputs,params,request_id,seed") {
    throw new ProtocolError(
      `request body must have exactly request_id/seed/inputs/params, got [${keys}]`,
    );
  }
  const requestId = o.request_id;
  if (typeof requestId !== "string" || !requestId || requestId.includes(" ")) {
    throw new ProtocolError(`bad request_id ${JSON.stringify(requestId)}`);
  }
  const seed = rawSeed ?? String(o.seed);
  if (!/^\d+$/.test(seed) || BigInt(seed) > U64_MAX) {
    throw new ProtocolError(`seed must be a u64, got ${JSON.stringify(o.seed)}`);
  }
  if (typeof o.params !== "object" || o.params === null || Array.isArray(o.params)) {
    throw new ProtocolError("params must be an object");
  }
  if (typeof o.inputs !== "object" || o.inputs === null || Array.isArray(o.inputs)) {
    throw new ProtocolError("inputs must be an object");
  }

  const inputs: Record<string, MediaRef | string> = {};
  for (const [name, value] of Object.entries(o.inputs as Record<string, unknown>)) {
    if (typeof value === "string") inputs[name] = value;
    else if (isMediaRef(value)) inputs[name] = value;
    else throw new ProtocolError(`input '${name}' must be text or a media reference`);
  }
  for (const [name, want] of Object.entries(REQUIRED_INPUTS[kind as Kind])) {
    const v = inputs[name];
    if (v === undefined) {
      throw new ProtocolError(`${kind} request missing required input '${name}'`);
    }
    if (want === "media" && typeof v === "string") {
      throw new ProtocolError(`${kind} input '${name}' must be a media reference`);
    }
    if (want === "text" && (typeof v !== "string" || v === "")) {
      throw new ProtocolError(`${kind} input '${name}' must be nonempty text`);
    }
  }
  return { kind: kind as Kind, requestId, seed, inputs, params: o.params as Record<string, unknown> };
}

export interface WireResponse {
  request_id: string;
  status: "OK" | "BACKEND_FAILURE";
  outputs: Record<string, unknown>;
  gpu_seconds: number;
  model_id: string;
}

export function okResponse(
  requestId: string,
  outputs: Record<string, unknown>,
  gpuSeconds: number,
  modelId: string,
): WireResponse {
  if (!(gpuSeconds >= 0)) {
    throw new ProtocolError(`gpu_seconds must be nonnegative, got ${gpuSeconds}`);
  }
  return { request_id: requestId, status: "OK", outputs, gpu_seconds: gpuSeconds, model_id: modelId };
}

export function failureResponse(requestId: string, message: string): WireResponse {
  return {
    request_id: requestId,
    status: "BACKEND_FAILURE",
    outputs: { error: message },
    gpu_seconds: 0,
    model_id: "adapter",
  };
}
