"""Regenerate conformance/vectors.json.

The file is normative for any adapter implementing the backend wire
protocol: posting each request (with the media section materialized under
the media root) must yield the canonical-JSON response byte-for-byte.
"""

import base64
import json
import os
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from ditto import media  # noqa: E402
from ditto.backends.client import BackendClient, InProcessTransport  # noqa: E402
from ditto.backends.mocks import MockBackendHost  # noqa: E402
from ditto.encoding import canonical_json, sha256_hex  # noqa: E402


def source_video():
    header = media.VideoHeader(8, 6, 4, 3)
    f, y, x, c = np.meshgrid(
        np.arange(3), np.arange(6), np.arange(8), np.arange(3), indexing="ij"
    )
    frames = ((f * 50 + y * 20 + x * 10 + c * 3) % 256).astype(np.uint8)
    return header, frames


def main():
    out_path = os.path.join(os.path.dirname(__file__), "..", "conformance", "vectors.json")
    media_root = tempfile.mkdtemp(prefix="ditto-vectors-")
    host = MockBackendHost(media_root)
    client = BackendClient(InProcessTransport(host))

    header, frames = source_video()
    src_ref = host.store(header, frames, "VIDEO")
    key_header = media.VideoHeader(header.width, header.height, header.fps, 1)
    key_ref = host.store(key_header, frames[0:1], "IMAGE")

    vectors = []

    def record(kind, inputs, seed, params=None):
        rid = f"vector-{kind}-{seed}"
        resp = client.call(kind, inputs, seed, params, request_id=rid)
        from ditto.backends.protocol import BackendRequest
        req = BackendRequest(kind, rid, seed, inputs, params or {})
        vectors.append({
            "kind": kind,
            "request": req.to_wire(),
            "response": resp.to_wire(),
        })
        return resp

    cap = record("caption", {"video": src_ref}, 1)
    cap2 = record("caption", {"video": src_ref}, 2)
    ins = record("instruct", {"video": src_ref, "caption": cap.outputs["caption"]}, 3)
    record("instruct", {"video": src_ref, "caption": cap2.outputs["caption"]}, 4,
           {"global_weight_millionths": 1000000})
    instruction = ins.outputs["instruction"]
    edit = record("edit_image", {"frame": key_ref, "instruction": instruction}, 5)
    depth = record("depth", {"video": src_ref}, 6)
    gen = record(
        "generate",
        {"depth_video": depth.outputs["depth_video"],
         "edited_keyframe": edit.outputs["image"],
         "instruction": instruction},
        7,
        {"base_gpu_seconds": 3000, "distilled": True},
    )
    record(
        "generate",
        {"depth_video": depth.outputs["depth_video"],
         "edited_keyframe": edit.outputs["image"],
         "instruction": instruction},
        8,
        {"base_gpu_seconds": 50, "distilled": False},
    )
    record("judge", {"source": src_ref, "edited": gen.outputs["video"],
                     "instruction": instruction}, 9)
    record("judge", {"source": src_ref, "edited": gen.outputs["video"],
                     "instruction": instruction}, 10, {"bias_millionths": 1000000})
    record("enhance", {"video": gen.outputs["video"]}, 11,
           {"noise_sigma": 0.1, "steps": 4})

    media_files = []
    for name in sorted(os.listdir(media_root)):
        with open(os.path.join(media_root, name), "rb") as f:
            data = f.read()
        media_files.append({
            "path": name,
            "sha256": sha256_hex(data),
            "base64": base64.b64encode(data).decode("ascii"),
        })

    doc = {"media": media_files, "vectors": vectors}
    os.makedirs(os.path.dirname(out_path), exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(vectors)} vectors, {len(media_files)} media files -> {out_path}")
    print("canonical response sample:", canonical_json(vectors[0]["response"])[:120])


if __name__ == "__main__":
    main()
