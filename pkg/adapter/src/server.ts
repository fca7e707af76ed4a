/**
 * The adapter service: seven POST /v1/<kind> endpoints over a shared media
 * root. Stateless across requests. Hook outputs pass geometry self-checks
 * before anything is stored or referenced in a reply, so a misbehaving
 * model integration can never publish malformed media into the pipeline.
 */

import express, { type Express } from "express";
import { MILLION, canonicalJson } from "./encoding.js";
import { MediaError, MediaStore, sameGeometry, type MediaRef, type Video } from "./media.js";
import {
  ProtocolError,
  failureResponse,
  okResponse,
  parseRequest,
  type WireRequest,
  type WireResponse,
} from "./protocol.js";
import {
  DEFAULT_BASE_GPU_SECONDS,
  DEFAULT_ENHANCE_STEPS,
  DEFAULT_GLOBAL_WEIGHT_M,
  DEFAULT_JUDGE_BIAS_M,
  DEFAULT_NOISE_SIGMA,
  FIXED_GPU_SECONDS,
  stubHooks,
  type ModelHooks,
} from "./hooks.js";

export interface AdapterConfig {
  mediaRoot: string;
  hooks?: ModelHooks;
}

class GeometryViolation extends Error {}

function requireGeometry(output: Video, reference: Video, what: string): void {
  if (!sameGeometry(output.header, reference.header)) {
    throw new GeometryViolation(
      `${what} hook broke geometry: ` +
        `${JSON.stringify(output.header)} != ${JSON.stringify(reference.header)}`,
    );
  }
}

function numberParam(params: Record<string, unknown>, name: string, fallback: number): number {
  const v = params[name];
  if (v === undefined) return fallback;
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`param '${name}' must be a number, got ${JSON.stringify(v)}`);
  }
  return v;
}

function handle(req: WireRequest, store: MediaStore, hooks: ModelHooks): WireResponse {
  const { kind, requestId, seed, inputs, params } = req;

  switch (kind) {
    case "caption": {
      const ref = inputs.video as MediaRef;
      store.load(ref); // existence + digest check, same as the reference host
      const { caption, modelId } = hooks.caption(ref.digest, seed);
      return okResponse(requestId, { caption }, FIXED_GPU_SECONDS.caption, modelId);
    }

    case "instruct": {
      const ref = inputs.video as MediaRef;
      const weight = numberParam(params, "global_weight_millionths", DEFAULT_GLOBAL_WEIGHT_M);
      if (!Number.isInteger(weight) || weight < 0 || weight > MILLION) {
        throw new ProtocolError(`global_weight_millionths out of range: ${weight}`);
      }
      const { instruction, category, modelId } = hooks.instruct(
        ref.digest, inputs.caption as string, seed, weight);
      return okResponse(requestId, { instruction, category }, FIXED_GPU_SECONDS.instruct, modelId);
    }

    case "edit_image": {
      const ref = inputs.frame as MediaRef;
      if (ref.kind !== "IMAGE") throw new ProtocolError("edit_image input must be an IMAGE reference");
      const frame = store.load(ref);
      const { image, modelId } = hooks.editImage(frame, inputs.instruction as string, seed);
      requireGeometry(image, frame, "edit_image");
      return okResponse(
        requestId, { image: store.store(image, "IMAGE") }, FIXED_GPU_SECONDS.edit_image, modelId);
    }

    case "depth": {
      const ref = inputs.video as MediaRef;
      if (ref.kind !== "VIDEO") throw new ProtocolError("depth input must be a VIDEO reference");
      const video = store.load(ref);
      const { depth, modelId } = hooks.depth(video, seed);
      requireGeometry(depth, video, "depth");
      return okResponse(
        requestId, { depth_video: store.store(depth, "VIDEO") }, FIXED_GPU_SECONDS.depth, modelId);
    }

    case "generate": {
      const depthRef = inputs.depth_video as MediaRef;
      const keyRef = inputs.edited_keyframe as MediaRef;
      if (depthRef.kind !== "VIDEO") throw new ProtocolError("generate depth_video must be a VIDEO reference");
      if (keyRef.kind !== "IMAGE") throw new ProtocolError("generate edited_keyframe must be an IMAGE reference");
      const keyframe = store.load(keyRef);
      const depth = store.load(depthRef);
      const base = numberParam(params, "base_gpu_seconds", DEFAULT_BASE_GPU_SECONDS);
      if (base < 0) throw new ProtocolError(`bad base_gpu_seconds ${base}`);
      const distilled = params.distilled === undefined ? true : Boolean(params.distilled);
      const { video, gpuSeconds, modelId } = hooks.generate(
        depth, keyframe, inputs.instruction as string, seed, base, distilled);
      requireGeometry(video, depth, "generate");
      return okResponse(requestId, { video: store.store(video, "VIDEO") }, gpuSeconds, modelId);
    }

    case "judge": {
      const src = inputs.source as MediaRef;
      const edited = inputs.edited as MediaRef;
      const bias = numberParam(params, "bias_millionths", DEFAULT_JUDGE_BIAS_M);
      const { scores, modelId } = hooks.judge(
        src.digest, edited.digest, inputs.instruction as string, seed, bias);
      return okResponse(requestId, { scores }, FIXED_GPU_SECONDS.judge, modelId);
    }

    case "enhance": {
      const ref = inputs.video as MediaRef;
      const sigma = numberParam(params, "noise_sigma", DEFAULT_NOISE_SIGMA);
      const steps = numberParam(params, "steps", DEFAULT_ENHANCE_STEPS);
      if (sigma < 0) throw new ProtocolError(`noise_sigma must be >= 0, got ${sigma}`);
      if (!Number.isInteger(steps) || steps < 1) {
        throw new ProtocolError(`steps must be a positive int, got ${steps}`);
      }
      const video = store.load(ref);
      const { video: out, provenance, modelId } = hooks.enhance(video, sigma, steps, seed);
      requireGeometry(out, video, "enhance");
      return okResponse(
        requestId,
        { video: store.store(out, "VIDEO"), provenance },
        FIXED_GPU_SECONDS.enhance,
        modelId,
      );
    }
  }
}

/** Recover the top-level seed digits from the raw body text; JSON numbers
 * above 2^53 do not survive JSON.parse. */
function extractSeed(raw: string, parsedSeed: unknown): string | null {
  if (typeof parsedSeed === "number" && Number.isSafeInteger(parsedSeed) && parsedSeed >= 0) {
    return String(parsedSeed);
  }
  const m = raw.match(/"seed"\s*:\s*(\d+)/);
  return m ? m[1] : null;
}

export function createApp(config: AdapterConfig): Express {
  const store = new MediaStore(config.mediaRoot);
  const hooks = config.hooks ?? stubHooks;
  const app = express();
  app.use(express.text({ type: "*/*", limit: "512mb" }));

  app.post("/v1/:kind", (req, res) => {
    const send = (code: number, body: unknown) => {
      res.status(code).type("application/json").send(canonicalJson(body));
    };

    let wire: WireRequest;
    try {
      const raw = typeof req.body === "string" ? req.body : "";
      const parsed: unknown = JSON.parse(raw);
      const seed = extractSeed(raw, (parsed as Record<string, unknown>)?.seed);
      wire = parseRequest(req.params.kind, parsed, seed);
    } catch (e) {
      const message = e instanceof Error ? e.message : String(e);
      if (e instanceof ProtocolError && message.startsWith("unknown backend kind")) {
        return send(404, { error: message });
      }
      return send(400, { error: `malformed request: ${message}` });
    }

    try {
      return send(200, handle(wire, store, hooks));
    } catch (e) {
      const message = e instanceof Error ? e.message : String(e);
      if (e instanceof ProtocolError || e instanceof MediaError) {
        return send(400, { error: message });
      }
      // hook failures and self-check rejections: protocol-shaped failure,
      // never a silent drop and never a reference to unchecked media
      return send(200, failureResponse(wire.requestId, message));
    }
  });

  return app;
}
