/**
 * Model hooks: the seams where real models (image editor, depth predictor,
 * video generator, VLM judge, enhancer) plug in. The stub hooks below
 * re-implement the pipeline's seeded mocks exactly, so any protocol drift
 * between the two codebases is caught by the shared conformance vectors.
 *
 * All stub randomness is SHA-256 in integer millionths; no float RNG.
 */

import { MILLION, formatNumber, hashBytes, hashMillionths } from "./encoding.js";
import type { Video } from "./media.js";
import { ProtocolError } from "./protocol.js";

const ADJECTIVES = [
  "quiet", "busy", "sunlit", "foggy", "crowded", "empty", "windy", "rainy",
  "snowy", "dusty", "vivid", "calm", "noisy", "shaded", "bright", "hazy",
];
const SUBJECTS = [
  "street", "harbor", "forest", "kitchen", "market", "rooftop", "meadow", "workshop",
  "beach", "plaza", "garden", "bridge", "stadium", "canal", "orchard", "courtyard",
];
const ACTIONS = [
  "bustling with people", "drifting past slowly", "lit by lanterns", "covered in leaves",
  "reflecting the sky", "filling with fog", "waking up at dawn", "settling at dusk",
  "swaying in the wind", "glowing after rain", "buzzing with traffic", "resting in shade",
  "framed by trees", "dotted with birds", "crossed by cyclists", "washed by waves",
];
const SCENES = [
  "old town", "waterfront", "countryside", "city center", "hillside", "suburbs",
  "valley", "coastline", "industrial district", "park", "village", "desert",
  "mountains", "riverbank", "island", "night market",
];
const STYLES = [
  "a watercolor painting", "an oil painting", "a pencil sketch", "a comic book",
  "an old film reel", "a neon cyberpunk scene", "a claymation short", "a stained-glass window",
];
const ENVIRONMENTS = [
  "snowy winter day", "rainy autumn evening", "bright summer noon", "foggy morning",
  "golden sunset", "starry night", "sandstorm", "spring bloom",
];
const OBJECTS = [
  "car", "bicycle", "dog", "umbrella", "bench", "lantern", "boat", "kite",
  "statue", "fountain", "balloon", "scooter", "flag", "cart", "mailbox", "tree",
];

const GLOBAL_CATEGORIES = ["GLOBAL_STYLE", "GLOBAL_ENVIRONMENT"];
const LOCAL_CATEGORIES = ["LOCAL_REPLACE", "LOCAL_ADD", "LOCAL_REMOVE"];

const CHANNEL_PERMS: ReadonlyArray<readonly [number, number, number]> = [
  [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
];

export const FIXED_GPU_SECONDS: Record<string, number> = {
  caption: 2,
  instruct: 3,
  edit_image: 5,
  depth: 8,
  judge: 4,
  enhance: 30,
};

export const MODEL_IDS: Record<string, string> = {
  caption: "mock-captioner-v1",
  instruct: "mock-instructor-v1",
  edit_image: "mock-image-editor-v1",
  depth: "mock-depth-v1",
  generate: "mock-generator-v1",
  generate_distilled: "mock-generator-distilled-v1",
  judge: "mock-judge-v1",
  enhance: "mock-enhancer-v1",
};

export const DEFAULT_GLOBAL_WEIGHT_M = 700_000;
export const DEFAULT_JUDGE_BIAS_M = 800_000;
export const DEFAULT_BASE_GPU_SECONDS = 3000;
export const DEFAULT_NOISE_SIGMA = 0.1;
export const DEFAULT_ENHANCE_STEPS = 4;

export const JUDGE_CRITERIA = [
  "instruction_fidelity",
  "preservation_fidelity",
  "visual_quality",
  "safety",
] as const;

export interface ColorKey {
  permIndex: number;
  offsets: [number, number, number];
}

/** Instruction-keyed invertible color map; the empty instruction is identity. */
export function colorKey(instruction: string): ColorKey {
  if (instruction === "") return { permIndex: 0, offsets: [0, 0, 0] };
  const kb = hashBytes("ditto-mock/color-key", instruction);
  return { permIndex: kb[0] % 6, offsets: [kb[1], kb[2], kb[3]] };
}

export function applyColorKey(pixels: Buffer, key: ColorKey): Buffer {
  const perm = CHANNEL_PERMS[key.permIndex];
  const out = Buffer.allocUnsafe(pixels.length);
  for (let i = 0; i < pixels.length; i += 3) {
    for (let c = 0; c < 3; c++) {
      out[i + c] = (pixels[i + perm[c]] + key.offsets[c]) & 0xff;
    }
  }
  return out;
}

/** Integer BT.601 luma, round-half-up, replicated across the channels. */
export function luminance(pixels: Buffer): Buffer {
  const out = Buffer.allocUnsafe(pixels.length);
  for (let i = 0; i < pixels.length; i += 3) {
    const y = Math.floor((299 * pixels[i] + 587 * pixels[i + 1] + 114 * pixels[i + 2] + 500) / 1000);
    out[i] = out[i + 1] = out[i + 2] = y;
  }
  return out;
}

export function mockCaption(videoDigest: string, seed: string): string {
  const kb = hashBytes("ditto-mock/caption", videoDigest, seed);
  return (
    `a ${ADJECTIVES[kb[0] % 16]} ${SUBJECTS[kb[1] % 16]} ` +
    `${ACTIONS[kb[2] % 16]} in the ${SCENES[kb[3] % 16]}`
  );
}

export function mockInstruction(
  videoDigest: string,
  caption: string,
  seed: string,
  globalWeightM: number,
): { instruction: string; category: string } {
  const u = hashMillionths("ditto-mock/instruct-cat", videoDigest, caption, seed);
  const kb = hashBytes("ditto-mock/instruct-words", videoDigest, caption, seed);
  const category =
    u < globalWeightM ? GLOBAL_CATEGORIES[kb[0] % 2] : LOCAL_CATEGORIES[kb[0] % 3];
  let instruction: string;
  if (category === "GLOBAL_STYLE") {
    instruction = `make the whole video look like ${STYLES[kb[1] % 8]}`;
  } else if (category === "GLOBAL_ENVIRONMENT") {
    instruction = `change the setting to a ${ENVIRONMENTS[kb[1] % 8]}`;
  } else if (category === "LOCAL_REPLACE") {
    instruction = `replace the ${OBJECTS[kb[1] % 16]} with a ${OBJECTS[kb[2] % 16]}`;
  } else if (category === "LOCAL_ADD") {
    instruction = `add a ${OBJECTS[kb[1] % 16]} to the scene`;
  } else {
    instruction = `remove the ${OBJECTS[kb[1] % 16]} from the scene`;
  }
  return { instruction, category };
}

export function mockJudgeScores(
  sourceDigest: string,
  editedDigest: string,
  instruction: string,
  seed: string,
  biasM: number,
): Record<string, number> {
  if (!(biasM >= 0 && biasM <= MILLION)) {
    throw new ProtocolError(`judge bias out of range: ${biasM}`);
  }
  const scores: Record<string, number> = {};
  for (const crit of JUDGE_CRITERIA) {
    const u = hashMillionths("ditto-mock/judge", crit, sourceDigest, editedDigest, instruction, seed);
    const scoreM = MILLION - Math.floor(((MILLION - biasM) * u) / MILLION);
    scores[crit] = scoreM / MILLION;
  }
  return scores;
}

/**
 * The pluggable surface. Real model integrations implement this interface;
 * the adapter enforces envelope schema and geometry contracts around it.
 */
export interface ModelHooks {
  caption(videoDigest: string, seed: string): { caption: string; modelId: string };
  instruct(
    videoDigest: string,
    caption: string,
    seed: string,
    globalWeightM: number,
  ): { instruction: string; category: string; modelId: string };
  editImage(frame: Video, instruction: string, seed: string): { image: Video; modelId: string };
  depth(video: Video, seed: string): { depth: Video; modelId: string };
  generate(
    depth: Video,
    editedKeyframe: Video,
    instruction: string,
    seed: string,
    baseGpuSeconds: number,
    distilled: boolean,
  ): { video: Video; gpuSeconds: number; modelId: string };
  judge(
    sourceDigest: string,
    editedDigest: string,
    instruction: string,
    seed: string,
    biasM: number,
  ): { scores: Record<string, number>; modelId: string };
  enhance(
    video: Video,
    noiseSigma: number,
    steps: number,
    seed: string,
  ): { video: Video; provenance: string; modelId: string };
}

export const stubHooks: ModelHooks = {
  caption: (digest, seed) => ({
    caption: mockCaption(digest, seed),
    modelId: MODEL_IDS.caption,
  }),

  instruct: (digest, caption, seed, globalWeightM) => ({
    ...mockInstruction(digest, caption, seed, globalWeightM),
    modelId: MODEL_IDS.instruct,
  }),

  editImage: (frame, instruction) => ({
    image: { header: frame.header, pixels: applyColorKey(frame.pixels, colorKey(instruction)) },
    modelId: MODEL_IDS.edit_image,
  }),

  depth: (video) => ({
    depth: { header: video.header, pixels: luminance(video.pixels) },
    modelId: MODEL_IDS.depth,
  }),

  generate: (depth, _keyframe, instruction, _seed, baseGpuSeconds, distilled) => ({
    video: { header: depth.header, pixels: applyColorKey(depth.pixels, colorKey(instruction)) },
    gpuSeconds: distilled ? baseGpuSeconds / 5 : baseGpuSeconds,
    modelId: distilled ? MODEL_IDS.generate_distilled : MODEL_IDS.generate,
  }),

  judge: (sourceDigest, editedDigest, instruction, seed, biasM) => ({
    scores: mockJudgeScores(sourceDigest, editedDigest, instruction, seed, biasM),
    modelId: MODEL_IDS.judge,
  }),

  enhance: (video, noiseSigma, steps) => ({
    video, // identity on pixels; a real enhancer refines but keeps geometry
    provenance: `enhance sigma=${formatNumber(noiseSigma)} steps=${steps}`,
    modelId: MODEL_IDS.enhance,
  }),
};
