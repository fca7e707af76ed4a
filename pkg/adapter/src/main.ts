import { existsSync, mkdirSync } from "node:fs";
import { createApp } from "./server.js";

function arg(name: string, fallback: string): string {
  const i = process.argv.indexOf(name);
  return i >= 0 && process.argv[i + 1] ? process.argv[i + 1] : fallback;
}

const mediaRoot = arg("--media-root", "");
if (!mediaRoot) {
  console.error("usage: node dist/main.js --media-root <dir> [--port 8788] [--address 127.0.0.1]");
  process.exit(1);
}
if (!existsSync(mediaRoot)) mkdirSync(mediaRoot, { recursive: true });

const port = Number(arg("--port", "8788"));
const address = arg("--address", "127.0.0.1");

createApp({ mediaRoot }).listen(port, address, () => {
  console.log(`adapter listening on http://${address}:${port} (media root ${mediaRoot})`);
});
