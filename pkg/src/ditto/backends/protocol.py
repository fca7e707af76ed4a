"""Wire protocol for the seven model services.

One endpoint per kind: ``POST /v1/<kind>``. Request bodies carry exactly
``request_id``, ``seed``, ``inputs``, ``params``; responses carry exactly
``request_id``, ``status``, ``outputs``, ``gpu_seconds``, ``model_id``.
Media travels by reference (content digest + path relative to the shared
media root), never inline. The conformance vector file under
``conformance/`` is normative for any adapter.
"""

from dataclasses import dataclass, field
from typing import Union

from ..encoding import canonical_json
from ..errors import InvalidRequest, MalformedResponse

KINDS = ("caption", "instruct", "edit_image", "depth", "generate", "judge", "enhance")

REQUIRED_INPUTS = {
    "caption": {"video": "media"},
    "instruct": {"video": "media", "caption": "text"},
    "edit_image": {"frame": "media", "instruction": "text"},
    "depth": {"video": "media"},
    # Appendix-B-style validity: generation must be conditioned on BOTH the
    # edited keyframe and the depth scaffold, plus the instruction.
    "generate": {"depth_video": "media", "edited_keyframe": "media", "instruction": "text"},
    "judge": {"source": "media", "edited": "media", "instruction": "text"},
    "enhance": {"video": "media"},
}

OUTPUT_NAMES = {
    "caption": ("caption",),
    "instruct": ("instruction", "category"),
    "edit_image": ("image",),
    "depth": ("depth_video",),
    "generate": ("video",),
    "judge": ("scores",),
    "enhance": ("video", "provenance"),
}


@dataclass(frozen=True)
class MediaRef:
    digest: str
    path: str
    kind: str  # VIDEO | IMAGE

    def to_wire(self) -> dict:
        return {"digest": self.digest, "path": self.path, "kind": self.kind}

    @classmethod
    def from_wire(cls, obj: dict) -> "MediaRef":
        if set(obj) != {"digest", "path", "kind"} or obj["kind"] not in ("VIDEO", "IMAGE"):
            raise MalformedResponse(f"bad media reference {obj!r}")
        return cls(obj["digest"], obj["path"], obj["kind"])


InputValue = Union[MediaRef, str]


@dataclass(frozen=True)
class JudgeScores:
    instruction_fidelity: float
    preservation_fidelity: float
    visual_quality: float
    safety: float

    CRITERIA = ("instruction_fidelity", "preservation_fidelity", "visual_quality", "safety")

    def __post_init__(self):
        for name in self.CRITERIA:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} out of [0, 1]")

    def to_wire(self) -> dict:
        return {name: getattr(self, name) for name in self.CRITERIA}

    @classmethod
    def from_wire(cls, obj: dict) -> "JudgeScores":
        if set(obj) != set(cls.CRITERIA):
            raise MalformedResponse(f"bad judge scores {obj!r}")
        return cls(**obj)


@dataclass
class BackendRequest:
    kind: str
    request_id: str
    seed: int
    inputs: dict[str, InputValue]
    params: dict = field(default_factory=dict)

    def to_wire(self) -> dict:
        return {
            "request_id": self.request_id,
            "seed": self.seed,
            "inputs": {
                k: v.to_wire() if isinstance(v, MediaRef) else v for k, v in self.inputs.items()
            },
            "params": dict(self.params),
        }

    @classmethod
    def from_wire(cls, kind: str, obj: dict) -> "BackendRequest":
        if set(obj) != {"request_id", "seed", "inputs", "params"}:
            raise InvalidRequest(f"request body must have exactly request_id/seed/inputs/params, got {sorted(obj)}")
        inputs: dict[str, InputValue] = {}
        for name, v in obj["inputs"].items():
            inputs[name] = MediaRef.from_wire(v) if isinstance(v, dict) else v
        return cls(kind, obj["request_id"], obj["seed"], inputs, dict(obj["params"]))


@dataclass
class BackendResponse:
    request_id: str
    status: str  # OK | BACKEND_FAILURE
    outputs: dict
    gpu_seconds: float
    model_id: str

    def to_wire(self) -> dict:
        outs = {}
        for k, v in self.outputs.items():
            if isinstance(v, MediaRef):
                outs[k] = v.to_wire()
            elif isinstance(v, JudgeScores):
                outs[k] = v.to_wire()
            else:
                outs[k] = v
        return {
            "request_id": self.request_id,
            "status": self.status,
            "outputs": outs,
            "gpu_seconds": self.gpu_seconds,
            "model_id": self.model_id,
        }

    def serialize(self) -> str:
        return canonical_json(self.to_wire())

    @classmethod
    def from_wire(cls, kind: str, obj: dict) -> "BackendResponse":
        if set(obj) != {"request_id", "status", "outputs", "gpu_seconds", "model_id"}:
            raise MalformedResponse(f"bad response envelope keys {sorted(obj)}")
        if obj["status"] not in ("OK", "BACKEND_FAILURE"):
            raise MalformedResponse(f"bad status {obj['status']!r}")
        gpu = obj["gpu_seconds"]
        if not isinstance(gpu, (int, float)) or isinstance(gpu, bool) or gpu < 0 or gpu != gpu:
            raise MalformedResponse(f"bad gpu_seconds {gpu!r}")
        outputs = {}
        for name, v in obj["outputs"].items():
            if kind == "judge" and name == "scores":
                outputs[name] = JudgeScores.from_wire(v)
            elif isinstance(v, dict):
                outputs[name] = MediaRef.from_wire(v)
            else:
                outputs[name] = v
        if obj["status"] == "OK":
            missing = [n for n in OUTPUT_NAMES[kind] if n not in outputs]
            if missing:
                raise MalformedResponse(f"OK response missing outputs {missing}")
        return cls(obj["request_id"], obj["status"], outputs, gpu, obj["model_id"])


def validate_request(req: BackendRequest):
    """Client-side validation; invalid requests never reach the wire."""
    if req.kind not in KINDS:
        raise InvalidRequest(f"unknown backend kind {req.kind!r}")
    if not req.request_id or " " in req.request_id:
        raise InvalidRequest(f"bad request_id {req.request_id!r}")
    if not isinstance(req.seed, int) or not 0 <= req.seed < 2 ** 64:
        raise InvalidRequest(f"seed must be a u64, got {req.seed!r}")
    for name, want in REQUIRED_INPUTS[req.kind].items():
        v = req.inputs.get(name)
        if v is None:
            raise InvalidRequest(f"{req.kind} request missing required input {name!r}")
        if want == "media" and not isinstance(v, MediaRef):
            raise InvalidRequest(f"{req.kind} input {name!r} must be a media reference")
        if want == "text" and (not isinstance(v, str) or not v):
            raise InvalidRequest(f"{req.kind} input {name!r} must be nonempty text")
