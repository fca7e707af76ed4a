/**
 * Canonical serialization and hash-derived randomness, matching the
 * pipeline's Python implementation byte-for-byte. Any drift here shows up
 * immediately in the conformance-vector tests.
 */

import { createHash } from "node:crypto";

export const MILLION = 1_000_000;

const SEP = Buffer.from([0x1f]);

/** Integers bare; floats to six decimals with trailing zeros trimmed. */
export function formatNumber(x: number): string {
  if (!Number.isFinite(x)) {
    throw new TypeError(`not a canonical JSON number: ${x}`);
  }
  if (Number.isInteger(x)) {
    return Object.is(x, -0) ? "0" : String(x);
  }
  let s = x.toFixed(6).replace(/0+$/, "").replace(/\.$/, "");
  if (s === "-0" || s === "") s = "0";
  return s;
}

/** ASCII-only string escaping equivalent to Python json.dumps(ensure_ascii=True). */
function encodeString(s: string): string {
  let out = '"';
  for (const ch of s) {
    const code = ch.codePointAt(0)!;
    if (ch === '"') out += '\\"';
    else if (ch === "\\") out += "\\\\";
    else if (code >= 0x20 && code < 0x7f) out += ch;
    else if (ch === "\n") out += "\\n";
    else if (ch === "\t") out += "\\t";
    else if (ch === "\r") out += "\\r";
    else if (ch === "\b") out += "\\b";
    else if (ch === "\f") out += "\\f";
    else if (code > 0xffff) {
      // encode as a surrogate pair, the way ensure_ascii does
      const hi = 0xd800 + ((code - 0x10000) >> 10);
      const lo = 0xdc00 + ((code - 0x10000) & 0x3ff);
      out += `\\u${hi.toString(16).padStart(4, "0")}\\u${lo.toString(16).padStart(4, "0")}`;
    } else {
      out += `\\u${code.toString(16).padStart(4, "0")}`;
    }
  }
  return out + '"';
}

export function canonicalJson(obj: unknown): string {
  if (obj === null) return "null";
  if (typeof obj === "boolean") return obj ? "true" : "false";
  if (typeof obj === "number") return formatNumber(obj);
  if (typeof obj === "bigint") return obj.toString();
  if (typeof obj === "string") return encodeString(obj);
  if (Array.isArray(obj)) {
    return "[" + obj.map(canonicalJson).join(",") + "]";
  }
  if (typeof obj === "object") {
    const entries = Object.entries(obj as Record<string, unknown>).sort(([a], [b]) =>
      a < b ? -1 : a > b ? 1 : 0,
    );
    return "{" + entries.map(([k, v]) => `${encodeString(k)}:${canonicalJson(v)}`).join(",") + "}";
  }
  throw new TypeError(`not canonically serializable: ${typeof obj}`);
}

export function sha256Hex(data: Buffer): string {
  return createHash("sha256").update(data).digest("hex");
}

export type HashPart = string | number | bigint | Buffer;

function digest(parts: HashPart[]): Buffer {
  const h = createHash("sha256");
  parts.forEach((p, i) => {
    if (i > 0) h.update(SEP);
    h.update(Buffer.isBuffer(p) ? p : Buffer.from(String(p), "utf-8"));
  });
  return h.digest();
}

/** First 8 bytes of SHA-256 over the 0x1F-joined parts, big-endian. */
export function hashU64(...parts: HashPart[]): bigint {
  return digest(parts).readBigUInt64BE(0);
}

export function hashMillionths(...parts: HashPart[]): number {
  return Number(hashU64(...parts) % BigInt(MILLION));
}

export function hashBytes(...parts: HashPart[]): Buffer {
  return digest(parts);
}
