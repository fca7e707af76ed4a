/**
 * The raw RGB8 video container the pipeline ships media in. Layout: one
 * ASCII header line `DVF1 <w> <h> <fps> <frame_count> RGB8\n` followed by
 * the raw frames, row-major, frame-major. Content digest is SHA-256 over
 * the whole file.
 */

import { readFileSync, writeFileSync, existsSync } from "node:fs";
import { join } from "node:path";
import { sha256Hex } from "./encoding.js";

export const MAGIC = "DVF1";
export const PIXEL_FORMAT = "RGB8";

export interface VideoHeader {
  width: number;
  height: number;
  fps: number;
  frameCount: number;
}

export interface Video {
  header: VideoHeader;
  /** frameCount * height * width * 3 bytes */
  pixels: Buffer;
}

export class MediaError extends Error {}

export function sameGeometry(a: VideoHeader, b: VideoHeader): boolean {
  return (
    a.width === b.width && a.height === b.height && a.fps === b.fps && a.frameCount === b.frameCount
  );
}

export function headerLine(h: VideoHeader): Buffer {
  return Buffer.from(`${MAGIC} ${h.width} ${h.height} ${h.fps} ${h.frameCount} ${PIXEL_FORMAT}\n`);
}

export function encodeVideo(video: Video): Buffer {
  const { header, pixels } = video;
  const expected = header.width * header.height * header.frameCount * 3;
  if (pixels.length !== expected) {
    throw new MediaError(`payload is ${pixels.length} bytes, header requires ${expected}`);
  }
  return Buffer.concat([headerLine(header), pixels]);
}

export function decodeVideo(data: Buffer): Video {
  const nl = data.indexOf(0x0a);
  if (nl < 0) throw new MediaError("missing header line");
  const parts = data.subarray(0, nl).toString("ascii").split(" ");
  if (parts.length !== 6 || parts[0] !== MAGIC || parts[5] !== PIXEL_FORMAT) {
    throw new MediaError(`bad header line ${JSON.stringify(parts)}`);
  }
  const [width, height, fps, frameCount] = parts.slice(1, 5).map(Number);
  if (![width, height, fps, frameCount].every((v) => Number.isInteger(v) && v > 0)) {
    throw new MediaError(`non-positive header field in ${JSON.stringify(parts)}`);
  }
  const header = { width, height, fps, frameCount };
  const pixels = data.subarray(nl + 1);
  if (pixels.length !== width * height * frameCount * 3) {
    throw new MediaError(`payload is ${pixels.length} bytes for ${width}x${height}x${frameCount}`);
  }
  return { header, pixels };
}

export interface MediaRef {
  digest: string;
  path: string;
  kind: "VIDEO" | "IMAGE";
}

/** Content-addressed media store shared with the pipeline over a directory. */
export class MediaStore {
  constructor(readonly root: string) {}

  load(ref: MediaRef): Video {
    const full = join(this.root, ref.path);
    if (!existsSync(full)) {
      throw new MediaError(`media ${ref.path} not found under media root`);
    }
    const data = readFileSync(full);
    if (sha256Hex(data) !== ref.digest) {
      throw new MediaError(`digest mismatch for ${ref.path}`);
    }
    return decodeVideo(data);
  }

  store(video: Video, kind: "VIDEO" | "IMAGE"): MediaRef {
    const data = encodeVideo(video);
    const digest = sha256Hex(data);
    const path = `${digest}.dvf`;
    const full = join(this.root, path);
    if (!existsSync(full)) {
      writeFileSync(full, data);
    }
    return { digest, path, kind };
  }
}
