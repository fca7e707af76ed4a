"""Deterministic seeded mock implementations of the seven model services.

Every mock is a pure function of (input digests, text inputs, seed, params):
two calls with equal arguments produce byte-identical outputs. All
randomness comes from SHA-256 in integer millionths so independent adapter
implementations can reproduce it exactly. Output media is stored
content-addressed under the media root as ``<digest>.dvf``.
"""

import os

import numpy as np

from .. import kernels, media
from ..encoding import MILLION, format_number, hash_bytes, hash_millionths, sha256_hex
from ..errors import InvalidRequest
from .protocol import BackendRequest, BackendResponse, JudgeScores, MediaRef, validate_request

ADJECTIVES = [
    "quiet", "busy", "sunlit", "foggy", "crowded", "empty", "windy", "rainy",
    "snowy", "dusty", "vivid", "calm", "noisy", "shaded", "bright", "hazy",
]
SUBJECTS = [
    "street", "harbor", "forest", "kitchen", "market", "rooftop", "meadow", "workshop",
    "beach", "plaza", "garden", "bridge", "stadium", "canal", "orchard", "courtyard",
]
ACTIONS = [
    "bustling with people", "drifting past slowly", "lit by lanterns", "covered in leaves",
    "reflecting the sky", "filling with fog", "waking up at dawn", "settling at dusk",
    "swaying in the wind", "glowing after rain", "buzzing with traffic", "resting in shade",
    "framed by trees", "dotted with birds", "crossed by cyclists", "washed by waves",
]
SCENES = [
    "old town", "waterfront", "countryside", "city center", "hillside", "suburbs",
    "valley", "coastline", "industrial district", "park", "village", "desert",
    "mountains", "riverbank", "island", "night market",
]

STYLES = [
    "a watercolor painting", "an oil painting", "a pencil sketch", "a comic book",
    "an old film reel", "a neon cyberpunk scene", "a claymation short", "a stained-glass window",
]
ENVIRONMENTS = [
    "snowy winter day", "rainy autumn evening", "bright summer noon", "foggy morning",
    "golden sunset", "starry night", "sandstorm", "spring bloom",
]
OBJECTS = [
    "car", "bicycle", "dog", "umbrella", "bench", "lantern", "boat", "kite",
    "statue", "fountain", "balloon", "scooter", "flag", "cart", "mailbox", "tree",
]

GLOBAL_CATEGORIES = ("GLOBAL_STYLE", "GLOBAL_ENVIRONMENT")
LOCAL_CATEGORIES = ("LOCAL_REPLACE", "LOCAL_ADD", "LOCAL_REMOVE")
CATEGORIES = GLOBAL_CATEGORIES + LOCAL_CATEGORIES

CHANNEL_PERMS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))

FIXED_GPU_SECONDS = {
    "caption": 2,
    "instruct": 3,
    "edit_image": 5,
    "depth": 8,
    "judge": 4,
    "enhance": 30,
}

MODEL_IDS = {
    "caption": "mock-captioner-v1",
    "instruct": "mock-instructor-v1",
    "edit_image": "mock-image-editor-v1",
    "depth": "mock-depth-v1",
    "generate": "mock-generator-v1",
    "generate_distilled": "mock-generator-distilled-v1",
    "judge": "mock-judge-v1",
    "enhance": "mock-enhancer-v1",
}

DEFAULT_GLOBAL_WEIGHT_M = 700_000
DEFAULT_JUDGE_BIAS_M = 800_000
DEFAULT_BASE_GPU_SECONDS = 3000
DEFAULT_NOISE_SIGMA = 0.1
DEFAULT_ENHANCE_STEPS = 4


def color_key(instruction: str) -> tuple[int, tuple[int, int, int]]:
    """Instruction-keyed invertible color map: (permutation index, offsets).

    The empty instruction is the identity class.
    """
    if instruction == "":
        return 0, (0, 0, 0)
    kb = hash_bytes("ditto-mock/color-key", instruction)
    return kb[0] % 6, (kb[1], kb[2], kb[3])


def apply_color_key(frames: np.ndarray, key) -> np.ndarray:
    perm_idx, offsets = key
    return kernels.apply_color_map(
        frames,
        np.array(CHANNEL_PERMS[perm_idx], dtype=np.int64),
        np.array(offsets, dtype=np.int64),
    )


def invert_color_key(frames: np.ndarray, key) -> np.ndarray:
    """Undo apply_color_key: subtract the offsets, then un-permute."""
    perm_idx, offsets = key
    perm = CHANNEL_PERMS[perm_idx]
    undone = (frames.astype(np.int16) - np.array(offsets, dtype=np.int16)) % 256
    out = np.empty_like(frames)
    for c in range(3):
        out[..., perm[c]] = undone[..., c].astype(np.uint8)
    return out


def mock_caption(video_digest: str, seed: int) -> str:
    kb = hash_bytes("ditto-mock/caption", video_digest, seed)
    return (
        f"a {ADJECTIVES[kb[0] % 16]} {SUBJECTS[kb[1] % 16]} "
        f"{ACTIONS[kb[2] % 16]} in the {SCENES[kb[3] % 16]}"
    )


def mock_instruction(video_digest: str, caption: str, seed: int,
                     global_weight_m: int = DEFAULT_GLOBAL_WEIGHT_M) -> tuple[str, str]:
    u = hash_millionths("ditto-mock/instruct-cat", video_digest, caption, seed)
    kb = hash_bytes("ditto-mock/instruct-words", video_digest, caption, seed)
    if u < global_weight_m:
        category = GLOBAL_CATEGORIES[kb[0] % 2]
    else:
        category = LOCAL_CATEGORIES[kb[0] % 3]
    if category == "GLOBAL_STYLE":
        instruction = f"make the whole video look like {STYLES[kb[1] % 8]}"
    elif category == "GLOBAL_ENVIRONMENT":
        instruction = f"change the setting to a {ENVIRONMENTS[kb[1] % 8]}"
    elif category == "LOCAL_REPLACE":
        instruction = f"replace the {OBJECTS[kb[1] % 16]} with a {OBJECTS[kb[2] % 16]}"
    elif category == "LOCAL_ADD":
        instruction = f"add a {OBJECTS[kb[1] % 16]} to the scene"
    else:
        instruction = f"remove the {OBJECTS[kb[1] % 16]} from the scene"
    return instruction, category


def mock_judge_scores(source_digest: str, edited_digest: str, instruction: str, seed: int,
                      bias_m: int = DEFAULT_JUDGE_BIAS_M) -> JudgeScores:
    """score = 1 - (1 - bias) * U with U uniform in millionths, per criterion."""
    if not 0 <= bias_m <= MILLION:
        raise InvalidRequest(f"judge bias out of range: {bias_m}")
    values = {}
    for crit in JudgeScores.CRITERIA:
        u = hash_millionths("ditto-mock/judge", crit, source_digest, edited_digest, instruction, seed)
        score_m = MILLION - ((MILLION - bias_m) * u) // MILLION
        values[crit] = score_m / MILLION
    return JudgeScores(**values)


def judge_pass_probability(threshold: float, bias_m: int = DEFAULT_JUDGE_BIAS_M) -> float:
    """Analytic P(score >= threshold) for the mock score distribution."""
    if bias_m >= MILLION:
        return 1.0
    return min(1.0, max(0.0, (1.0 - threshold) / (1.0 - bias_m / MILLION)))


class MockBackendHost:
    """In-process implementation of all seven services over a media root."""

    def __init__(self, media_root, verify_digests: bool = True):
        self.media_root = str(media_root)
        self.verify_digests = verify_digests

    # -- media helpers ------------------------------------------------------

    def resolve(self, ref: MediaRef):
        path = os.path.join(self.media_root, ref.path)
        if not os.path.exists(path):
            raise InvalidRequest(f"media {ref.path} not found under media root")
        header, frames = media.read_video(path)
        if self.verify_digests:
            actual = sha256_hex(media.encode_video(header, frames))
            if actual != ref.digest:
                raise InvalidRequest(f"digest mismatch for {ref.path}")
        return header, frames

    def store(self, header, frames, kind: str) -> MediaRef:
        data = media.encode_video(header, frames)
        digest = sha256_hex(data)
        path = f"{digest}.dvf"
        full = os.path.join(self.media_root, path)
        if not os.path.exists(full):
            tmp = full + ".tmp"
            with open(tmp, "wb") as f:
                f.write(data)
            os.replace(tmp, full)
        return MediaRef(digest, path, kind)

    # -- dispatch -----------------------------------------------------------

    def handle(self, req: BackendRequest) -> BackendResponse:
        validate_request(req)
        handler = getattr(self, f"_handle_{req.kind}")
        outputs, gpu_seconds, model_id = handler(req)
        return BackendResponse(req.request_id, "OK", outputs, gpu_seconds, model_id)

    def _handle_caption(self, req):
        ref = req.inputs["video"]
        self.resolve(ref)
        caption = mock_caption(ref.digest, req.seed)
        return {"caption": caption}, FIXED_GPU_SECONDS["caption"], MODEL_IDS["caption"]

    def _handle_instruct(self, req):
        ref = req.inputs["video"]
        weight = int(req.params.get("global_weight_millionths", DEFAULT_GLOBAL_WEIGHT_M))
        if not 0 <= weight <= MILLION:
            raise InvalidRequest(f"global_weight_millionths out of range: {weight}")
        instruction, category = mock_instruction(ref.digest, req.inputs["caption"], req.seed, weight)
        return (
            {"instruction": instruction, "category": category},
            FIXED_GPU_SECONDS["instruct"],
            MODEL_IDS["instruct"],
        )

    def _handle_edit_image(self, req):
        ref = req.inputs["frame"]
        if ref.kind != "IMAGE":
            raise InvalidRequest("edit_image input must be an IMAGE reference")
        header, frames = self.resolve(ref)
        edited = apply_color_key(frames, color_key(req.inputs["instruction"]))
        out = self.store(header, edited, "IMAGE")
        return {"image": out}, FIXED_GPU_SECONDS["edit_image"], MODEL_IDS["edit_image"]

    def _handle_depth(self, req):
        ref = req.inputs["video"]
        if ref.kind != "VIDEO":
            raise InvalidRequest("depth input must be a VIDEO reference")
        header, frames = self.resolve(ref)
        depth = kernels.luminance(frames)
        out = self.store(header, depth, "VIDEO")
        return {"depth_video": out}, FIXED_GPU_SECONDS["depth"], MODEL_IDS["depth"]

    def _handle_generate(self, req):
        depth_ref = req.inputs["depth_video"]
        key_ref = req.inputs["edited_keyframe"]
        if depth_ref.kind != "VIDEO":
            raise InvalidRequest("generate depth_video must be a VIDEO reference")
        if key_ref.kind != "IMAGE":
            raise InvalidRequest("generate edited_keyframe must be an IMAGE reference")
        self.resolve(key_ref)
        header, depth_frames = self.resolve(depth_ref)
        base = req.params.get("base_gpu_seconds", DEFAULT_BASE_GPU_SECONDS)
        if not isinstance(base, (int, float)) or isinstance(base, bool) or base < 0:
            raise InvalidRequest(f"bad base_gpu_seconds {base!r}")
        distilled = bool(req.params.get("distilled", True))
        # per-frame structure comes from the depth scaffold; appearance from
        # the same instruction-keyed color map that produced the keyframe
        key = color_key(req.inputs["instruction"])
        out_frames = apply_color_key(depth_frames, key)
        out = self.store(header, out_frames, "VIDEO")
        gpu = base / 5 if distilled else base
        if isinstance(gpu, float) and gpu.is_integer():
            gpu = int(gpu)
        model_id = MODEL_IDS["generate_distilled" if distilled else "generate"]
        return {"video": out}, gpu, model_id

    def _handle_judge(self, req):
        src = req.inputs["source"]
        edited = req.inputs["edited"]
        bias = int(req.params.get("bias_millionths", DEFAULT_JUDGE_BIAS_M))
        scores = mock_judge_scores(src.digest, edited.digest, req.inputs["instruction"], req.seed, bias)
        return {"scores": scores}, FIXED_GPU_SECONDS["judge"], MODEL_IDS["judge"]

    def _handle_enhance(self, req):
        ref = req.inputs["video"]
        sigma = req.params.get("noise_sigma", DEFAULT_NOISE_SIGMA)
        steps = req.params.get("steps", DEFAULT_ENHANCE_STEPS)
        if not isinstance(sigma, (int, float)) or isinstance(sigma, bool) or sigma < 0:
            raise InvalidRequest(f"noise_sigma must be >= 0, got {sigma!r}")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise InvalidRequest(f"steps must be a positive int, got {steps!r}")
        self.resolve(ref)
        # identity on pixels; real backends may refine but must keep geometry
        provenance = f"enhance sigma={format_number(float(sigma))} steps={steps}"
        return (
            {"video": ref, "provenance": provenance},
            FIXED_GPU_SECONDS["enhance"],
            MODEL_IDS["enhance"],
        )
