"""Pipeline orchestrator: fixed stage DAG, idempotent resumable execution,
cost accounting.

Dedup and motion filtering are batch barriers (they need cross-asset data);
everything downstream fans out per asset across a worker pool. All side
effects go through the single-writer manifest journal, and all randomness
derives from (run seed, asset id, stage), so the canonical manifest digest
is a pure function of (assets, seed, config) regardless of worker count.
"""

import json
import os
import shutil
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from threading import Event, Lock
from typing import Callable, Optional

import numpy as np

from . import filtering, media
from .backends.client import BackendClient, HttpTransport, InProcessTransport
from .backends.mocks import MockBackendHost
from .backends.protocol import JudgeScores, MediaRef
from .curation import CurationPolicy, accept
from .encoding import MILLION, canonical_json, hash_millionths, hash_u64, sha256_hex
from .errors import (
    AbortRun,
    BackendFailure,
    BackendTimeout,
    BackendUnavailable,
    BudgetExceeded,
    DittoError,
    InvalidConfig,
    MalformedResponse,
)
from .manifest import ManifestState, ManifestWriter, replay

STAGES = (
    "INGEST", "DEDUP", "MOTION_FILTER", "STANDARDIZE", "CAPTION", "INSTRUCT",
    "KEYFRAME_EDIT", "DEPTH", "GENERATE", "CURATE", "ENHANCE", "PUBLISH",
)

BARRIER_STAGES = ("INGEST", "DEDUP", "MOTION_FILTER")

DEFAULT_CONFIG = {
    "seed": 0,
    "workers": 4,
    "max_attempts": 3,
    "backoff_base_seconds": 1.0,
    "budget_gpu_seconds": None,
    "target_count": 1_000_000,
    "backends": "inprocess",
    "enable_enhance": True,
    "enable_depth": True,
    "keyframe_policy": "FIRST",
    "standardize": {"width": 1280, "height": 720, "fps": 20, "frame_cap": 101},
    "grid": {"rows": 16, "cols": 16},
    "filtering": {"similarity_threshold": 0.95, "motion_threshold": 5.0, "feature_dim": 32},
    "instruct": {"global_weight": 0.7},
    "judge": {"bias": 0.8},
    "curation": {
        "thresholds": {
            "instruction_fidelity": 0.7,
            "preservation_fidelity": 0.7,
            "visual_quality": 0.7,
            "safety": 0.7,
        },
        "safety_hard_floor": 0.9,
    },
    "generate": {"base_gpu_seconds": 3000, "distilled": True},
    "enhance": {"noise_sigma": 0.1, "steps": 4},
}


def _merge(defaults, user, path=""):
    if not isinstance(user, dict):
        raise InvalidConfig(f"expected a table at {path or 'top level'}, got {user!r}")
    out = {}
    for key, dv in defaults.items():
        if key in user:
            uv = user[key]
            if isinstance(dv, dict) and dv:
                out[key] = _merge(dv, uv, f"{path}{key}.")
            else:
                out[key] = uv
        else:
            out[key] = dv
    unknown = set(user) - set(defaults)
    if unknown:
        raise InvalidConfig(f"unknown config key {path}{sorted(unknown)[0]}")
    return out


@dataclass
class RunConfig:
    data: dict

    @classmethod
    def from_dict(cls, user: dict) -> "RunConfig":
        cfg = cls(_merge(DEFAULT_CONFIG, user))
        cfg.validate()
        return cfg

    def validate(self):
        d = self.data
        if not isinstance(d["seed"], int) or not 0 <= d["seed"] < 2 ** 64:
            raise InvalidConfig(f"seed must be a u64, got {d['seed']!r}")
        if d["workers"] < 1:
            raise InvalidConfig("workers must be >= 1")
        if not d["enable_depth"]:
            # generation without the depth scaffold is invalid by construction
            raise InvalidConfig("the depth stage cannot be disabled")
        if d["keyframe_policy"] not in ("FIRST", "MIDDLE"):
            raise InvalidConfig(f"unknown keyframe_policy {d['keyframe_policy']!r}")
        if not 0.0 <= d["instruct"]["global_weight"] <= 1.0:
            raise InvalidConfig("instruct.global_weight must be in [0, 1]")
        if not 0.0 <= d["judge"]["bias"] <= 1.0:
            raise InvalidConfig("judge.bias must be in [0, 1]")
        budget = d["budget_gpu_seconds"]
        if budget is not None and budget < 0:
            raise InvalidConfig("budget_gpu_seconds must be >= 0")
        self.curation_policy().validate()
        media.StandardTarget(**d["standardize"]).validate()
        media.GridSpec(**d["grid"]).validate()

    def curation_policy(self) -> CurationPolicy:
        c = self.data["curation"]
        return CurationPolicy(dict(c["thresholds"]), c["safety_hard_floor"])

    def standard_target(self) -> media.StandardTarget:
        return media.StandardTarget(**self.data["standardize"])

    def __getitem__(self, key):
        return self.data[key]


@dataclass(frozen=True)
class StagePlan:
    stages: tuple[str, ...]
    deps: dict


def build_plan(config: RunConfig) -> StagePlan:
    """Canonical DAG; deterministic topological order equals STAGES order."""
    deps = {
        "INGEST": (),
        "DEDUP": ("INGEST",),
        "MOTION_FILTER": ("DEDUP",),
        "STANDARDIZE": ("MOTION_FILTER",),
        "CAPTION": ("STANDARDIZE",),
        "INSTRUCT": ("CAPTION", "STANDARDIZE"),
        "KEYFRAME_EDIT": ("INSTRUCT", "STANDARDIZE"),
        "DEPTH": ("INSTRUCT", "STANDARDIZE"),
        "GENERATE": ("KEYFRAME_EDIT", "DEPTH"),
        "CURATE": ("GENERATE",),
        "ENHANCE": ("CURATE",),
        "PUBLISH": ("ENHANCE",),
    }
    stages = list(STAGES)
    if not config["enable_enhance"]:
        stages.remove("ENHANCE")
        deps = dict(deps)
        del deps["ENHANCE"]
        deps["PUBLISH"] = ("CURATE",)
    return StagePlan(tuple(stages), deps)


@dataclass
class RunSummary:
    published: int = 0
    rejected: int = 0
    failed: int = 0
    filtered: int = 0
    total_assets: int = 0
    total_gpu_seconds: float = 0.0
    manifest_digest: str = ""
    budget_exceeded: bool = False
    aborted: bool = False

    @property
    def exit_code(self) -> int:
        if self.budget_exceeded:
            return 3
        if self.failed:
            return 2
        return 0


class _Budget:
    """Pre-dispatch GPU-seconds gate, charged under a lock."""

    def __init__(self, cap: Optional[float], already_spent: float):
        self.cap = cap
        self.total = already_spent
        self._lock = Lock()

    def charge(self, amount: float):
        with self._lock:
            if self.cap is not None and self.total + amount > self.cap:
                raise BudgetExceeded(
                    f"next job needs {amount} GPU-s, spent {self.total} of {self.cap}"
                )
            self.total += amount

    def adjust(self, delta: float):
        with self._lock:
            self.total += delta


# --- deterministic in-process stand-ins for the encoder and tracker ----------


def mock_embedding(frames: np.ndarray, dim: int) -> np.ndarray:
    """Feature vector from a coarse content sketch.

    The sketch quantizes a 4x4 grid of time-averaged block means, so videos
    that differ only imperceptibly map to identical vectors (and get caught
    by dedup) while visually distinct videos get uncorrelated vectors.
    """
    fc, h, w, _ = frames.shape
    ys = (np.arange(4 + 1) * h) // 4
    xs = (np.arange(4 + 1) * w) // 4
    mean = frames.astype(np.float64).mean(axis=0)
    sketch = []
    for i in range(4):
        for j in range(4):
            block = mean[ys[i]:ys[i + 1], xs[j]:xs[j + 1]]
            sketch.extend(int(v) // 16 for v in block.mean(axis=(0, 1)))
    tag = ",".join(str(v) for v in sketch)
    values = np.array(
        [hash_millionths("ditto-embed", tag, i) / MILLION * 2.0 - 1.0 for i in range(dim)]
    )
    if np.linalg.norm(values) == 0.0:
        values[0] = 1.0
    return values


def mock_trajectories(digest: str, header: media.VideoHeader,
                      grid: media.GridSpec) -> list[filtering.Trajectory]:
    """Grid points pushed by content-seeded random-direction steps of a
    content-seeded amplitude (so some sources are genuinely low-motion)."""
    amp = hash_millionths("ditto-track-amp", digest) / MILLION * 8.0
    points = media.grid_points(header.width, header.height, grid)
    out = []
    for idx, (x, y) in enumerate(points):
        pos = np.empty((header.frame_count, 2))
        pos[0] = (x, y)
        for f in range(1, header.frame_count):
            theta = 2.0 * np.pi * hash_millionths("ditto-track-dir", digest, idx, f) / MILLION
            pos[f] = pos[f - 1] + amp * np.array([np.cos(theta), np.sin(theta)])
        out.append(filtering.Trajectory(str(idx), pos))
    return out


# --- the run itself -----------------------------------------------------------


class PipelineRun:
    def __init__(self, config: RunConfig, asset_paths: list[str], run_dir: str,
                 fault_hook: Optional[Callable[[str, str], None]] = None,
                 workers: Optional[int] = None):
        self.config = config
        self.asset_paths = [str(p) for p in asset_paths]
        self.run_dir = str(run_dir)
        self.media_root = os.path.join(self.run_dir, "media")
        self.journal_path = os.path.join(self.run_dir, "journal.log")
        self.fault_hook = fault_hook
        self.workers = workers or config["workers"]
        self.plan = build_plan(config)
        self.halt = Event()
        self.summary = RunSummary()
        self._summary_lock = Lock()

    # -- helpers ---------------------------------------------------------------

    def _client(self) -> BackendClient:
        backends = self.config["backends"]
        if backends == "inprocess":
            return BackendClient(InProcessTransport(MockBackendHost(self.media_root)))
        if isinstance(backends, list) and backends:
            return BackendClient(HttpTransport(backends[0]))
        raise InvalidConfig(f"backends must be 'inprocess' or a URL list, got {backends!r}")

    def _stage_seed(self, asset_id: str, stage: str) -> int:
        return hash_u64("ditto-stage-seed", self.config["seed"], asset_id, stage)

    def _request_id(self, asset_id: str, stage: str, attempt: int) -> str:
        return f"{asset_id}-{stage.lower()}-a{attempt}"

    def _done(self, asset_id: str, stage: str) -> Optional[dict]:
        payload = self.writer.state.stage_results.get(asset_id, {}).get(stage)
        if payload and payload.get("status") == "DONE":
            return payload
        return None

    def _record_stage(self, asset_id: str, stage: str, status: str, **fields):
        self.writer.append("STAGE_RESULT", asset_id, {"stage": stage, "status": status, **fields})

    def _record_cost(self, asset_id: str, stage: str, resp):
        self.writer.append(
            "COST", asset_id,
            {"stage": stage, "gpu_seconds": resp.gpu_seconds, "model_id": resp.model_id},
        )

    def _call(self, asset_id: str, stage: str, estimate: float, fn):
        """Budget-gated, retried backend call; returns the response."""
        self.budget.charge(estimate)
        attempts = self.config["max_attempts"]
        last = None
        for attempt in range(1, attempts + 1):
            try:
                resp = fn(self._request_id(asset_id, stage, attempt),
                          self._stage_seed(asset_id, stage))
                self.budget.adjust(resp.gpu_seconds - estimate)
                return resp
            except (BackendFailure, BackendTimeout, MalformedResponse) as e:
                last = e
                if attempt < attempts:
                    time.sleep(self.config["backoff_base_seconds"] * 4 ** (attempt - 1))
        raise BackendUnavailable(f"{stage} for {asset_id}: {last}") from last

    _STAGE_KIND = {
        "CAPTION": "caption",
        "INSTRUCT": "instruct",
        "KEYFRAME_EDIT": "edit_image",
        "DEPTH": "depth",
        "CURATE": "judge",
        "ENHANCE": "enhance",
    }

    def _estimate(self, stage: str) -> float:
        """Pre-dispatch cost estimate under the distilled-cost model."""
        from .backends.mocks import FIXED_GPU_SECONDS
        if stage == "GENERATE":
            base = self.config["generate"]["base_gpu_seconds"]
            return base / 5 if self.config["generate"]["distilled"] else base
        return FIXED_GPU_SECONDS.get(self._STAGE_KIND.get(stage, ""), 0)

    def _check_fault(self, stage: str, asset_id: str):
        if self.fault_hook is not None:
            self.fault_hook(stage, asset_id)

    # -- barrier phase ---------------------------------------------------------

    def _ingest(self) -> list[str]:
        order = []
        for path in self.asset_paths:
            header, frames = media.read_video(path)
            data = media.encode_video(header, frames)
            digest = sha256_hex(data)
            asset_id = digest[:16]
            if asset_id in order:
                continue  # byte-identical input listed twice is the same asset
            order.append(asset_id)
            dest = os.path.join(self.media_root, f"{digest}.dvf")
            if not os.path.exists(dest):
                shutil.copyfile(path, dest)
            ref = MediaRef(digest, f"{digest}.dvf", "VIDEO")
            self.ctx[asset_id] = {"source_ref": ref, "source_header": header}
            if asset_id not in self.writer.state.assets:
                self.writer.append("ASSET", asset_id, {
                    "digest": digest,
                    "source_path": os.path.abspath(path),
                    "width": header.width, "height": header.height,
                    "fps": header.fps, "frame_count": header.frame_count,
                })
            if not self._done(asset_id, "INGEST"):
                self._record_stage(asset_id, "INGEST", "DONE", source=ref.to_wire())
            self._check_fault("INGEST", asset_id)
        return order

    def _dedup_barrier(self, order: list[str]) -> list[str]:
        dim = self.config["filtering"]["feature_dim"]
        vectors = []
        for asset_id in order:
            ref = self.ctx[asset_id]["source_ref"]
            _, frames = media.read_video(os.path.join(self.media_root, ref.path))
            vectors.append(filtering.FeatureVector(asset_id, mock_embedding(frames, dim)))
        decisions = filtering.dedup(vectors, self.config["filtering"]["similarity_threshold"])
        kept = []
        for d in decisions:
            if not self._done(d.asset_id, "DEDUP"):
                self._record_stage(
                    d.asset_id, "DEDUP", "DONE",
                    kept=d.kept, reason=d.reason.value, duplicate_of=d.duplicate_of,
                )
            if d.kept:
                kept.append(d.asset_id)
            self._check_fault("DEDUP", d.asset_id)
        return kept

    def _motion_barrier(self, order: list[str]) -> list[str]:
        grid = media.GridSpec(**self.config["grid"])
        scores = {}
        for asset_id in order:
            ref = self.ctx[asset_id]["source_ref"]
            header = self.ctx[asset_id]["source_header"]
            trajectories = mock_trajectories(ref.digest, header, grid)
            scores[asset_id] = filtering.motion_score(trajectories)
        decisions = filtering.motion_filter(scores, self.config["filtering"]["motion_threshold"])
        kept = []
        for d in decisions:
            if not self._done(d.asset_id, "MOTION_FILTER"):
                self._record_stage(
                    d.asset_id, "MOTION_FILTER", "DONE",
                    kept=d.kept, reason=d.reason.value, score=d.score,
                )
            if d.kept:
                kept.append(d.asset_id)
            self._check_fault("MOTION_FILTER", d.asset_id)
        return kept

    # -- per-asset chain -------------------------------------------------------

    def _store_frame(self, header: media.VideoHeader, frame: np.ndarray) -> MediaRef:
        frame_header = media.VideoHeader(header.width, header.height, header.fps, 1)
        data = media.encode_video(frame_header, frame[None])
        digest = sha256_hex(data)
        path = os.path.join(self.media_root, f"{digest}.dvf")
        if not os.path.exists(path):
            with open(path, "wb") as f:
                f.write(data)
        return MediaRef(digest, f"{digest}.dvf", "IMAGE")

    def _run_asset(self, asset_id: str, client: BackendClient):
        ctx = self.ctx[asset_id]
        ctx.setdefault("lineage", {})
        per_asset = [s for s in self.plan.stages if s not in BARRIER_STAGES]
        rejected = False
        for i, stage in enumerate(per_asset):
            if self.halt.is_set():
                return
            done = self._done(asset_id, stage)
            if done:
                self._load_ctx(asset_id, stage, done)
                if stage == "CURATE" and not done.get("accepted", True):
                    rejected = True
                    break
                continue
            try:
                outcome = getattr(self, f"_stage_{stage.lower()}")(asset_id, ctx, client)
            except BudgetExceeded:
                self.halt.set()
                with self._summary_lock:
                    self.summary.budget_exceeded = True
                return
            except AbortRun:
                raise
            except DittoError as e:
                self._record_stage(asset_id, stage, "FAILED", error=str(e))
                for rest in per_asset[i + 1:]:
                    self._record_stage(asset_id, rest, "SKIPPED", upstream=stage)
                with self._summary_lock:
                    self.summary.failed += 1
                return
            self._check_fault(stage, asset_id)
            if outcome == "REJECTED":
                rejected = True
                break
        with self._summary_lock:
            if rejected:
                self.summary.rejected += 1
            elif self._done(asset_id, "PUBLISH"):
                self.summary.published += 1

    def _load_ctx(self, asset_id: str, stage: str, payload: dict):
        ctx = self.ctx[asset_id]
        if "lineage" in payload:
            ctx.setdefault("lineage", {})[stage] = payload["lineage"]
        if stage == "STANDARDIZE":
            ctx["std_ref"] = MediaRef.from_wire(payload["output"])
            ctx["format"] = payload["format"]
        elif stage == "CAPTION":
            ctx["caption"] = payload["caption"]
        elif stage == "INSTRUCT":
            ctx["instruction"] = payload["instruction"]
            ctx["category"] = payload["category"]
        elif stage == "KEYFRAME_EDIT":
            ctx["edited_keyframe"] = MediaRef.from_wire(payload["edited_keyframe"])
        elif stage == "DEPTH":
            ctx["depth_ref"] = MediaRef.from_wire(payload["output"])
        elif stage == "GENERATE":
            ctx["generated_ref"] = MediaRef.from_wire(payload["output"])
        elif stage == "CURATE":
            ctx["judge_scores"] = payload["scores"]
        elif stage == "ENHANCE":
            ctx["final_ref"] = MediaRef.from_wire(payload["output"])

    def _stage_standardize(self, asset_id, ctx, client):
        src = ctx["source_ref"]
        header, frames = media.read_video(os.path.join(self.media_root, src.path))
        out_header, out_frames = media.standardize(header, frames, self.config.standard_target())
        data = media.encode_video(out_header, out_frames)
        digest = sha256_hex(data)
        path = os.path.join(self.media_root, f"{digest}.dvf")
        if not os.path.exists(path):
            with open(path, "wb") as f:
                f.write(data)
        ref = MediaRef(digest, f"{digest}.dvf", "VIDEO")
        ctx["std_ref"] = ref
        ctx["std_header"] = out_header
        ctx["format"] = {
            "width": out_header.width, "height": out_header.height,
            "fps": out_header.fps, "frames": out_header.frame_count,
        }
        self._record_stage(asset_id, "STANDARDIZE", "DONE",
                           output=ref.to_wire(), format=ctx["format"])

    def _stage_caption(self, asset_id, ctx, client):
        stage = "CAPTION"
        resp = self._call(asset_id, stage, self._estimate(stage),
                          lambda rid, seed: client.caption(ctx["std_ref"], seed, request_id=rid))
        ctx["caption"] = resp.outputs["caption"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", caption=ctx["caption"],
                           lineage=ctx["lineage"][stage])

    def _stage_instruct(self, asset_id, ctx, client):
        stage = "INSTRUCT"
        params = {"global_weight_millionths": round(self.config["instruct"]["global_weight"] * MILLION)}
        resp = self._call(
            asset_id, stage, self._estimate(stage),
            lambda rid, seed: client.instruct(ctx["std_ref"], ctx["caption"], seed,
                                              params=params, request_id=rid))
        ctx["instruction"] = resp.outputs["instruction"]
        ctx["category"] = resp.outputs["category"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", instruction=ctx["instruction"],
                           category=ctx["category"], lineage=ctx["lineage"][stage])

    def _stage_keyframe_edit(self, asset_id, ctx, client):
        stage = "KEYFRAME_EDIT"
        std_path = os.path.join(self.media_root, ctx["std_ref"].path)
        header, frames = media.read_video(std_path)
        policy = media.KeyframePolicy(self.config["keyframe_policy"])
        idx = media.select_keyframe(header, policy)
        frame_ref = self._store_frame(header, frames[idx])
        resp = self._call(
            asset_id, stage, self._estimate(stage),
            lambda rid, seed: client.edit_image(frame_ref, ctx["instruction"], seed, request_id=rid))
        ctx["edited_keyframe"] = resp.outputs["image"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", keyframe_index=idx,
                           keyframe=frame_ref.to_wire(),
                           edited_keyframe=ctx["edited_keyframe"].to_wire(),
                           lineage=ctx["lineage"][stage])

    def _stage_depth(self, asset_id, ctx, client):
        stage = "DEPTH"
        resp = self._call(asset_id, stage, self._estimate(stage),
                          lambda rid, seed: client.predict_depth(ctx["std_ref"], seed, request_id=rid))
        ctx["depth_ref"] = resp.outputs["depth_video"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", output=ctx["depth_ref"].to_wire(),
                           lineage=ctx["lineage"][stage])

    def _stage_generate(self, asset_id, ctx, client):
        stage = "GENERATE"
        params = {
            "base_gpu_seconds": self.config["generate"]["base_gpu_seconds"],
            "distilled": self.config["generate"]["distilled"],
        }
        resp = self._call(
            asset_id, stage, self._estimate(stage),
            lambda rid, seed: client.generate_video(
                ctx["depth_ref"], ctx["edited_keyframe"], ctx["instruction"], seed,
                params=params, request_id=rid))
        ctx["generated_ref"] = resp.outputs["video"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", output=ctx["generated_ref"].to_wire(),
                           lineage=ctx["lineage"][stage])

    def _stage_curate(self, asset_id, ctx, client):
        stage = "CURATE"
        params = {"bias_millionths": round(self.config["judge"]["bias"] * MILLION)}
        resp = self._call(
            asset_id, stage, self._estimate(stage),
            lambda rid, seed: client.judge(ctx["std_ref"], ctx["generated_ref"],
                                           ctx["instruction"], seed, params=params, request_id=rid))
        scores: JudgeScores = resp.outputs["scores"]
        decision = accept(scores, self.config.curation_policy())
        ctx["judge_scores"] = scores.to_wire()
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", accepted=decision.accepted,
                           scores=scores.to_wire(), lineage=ctx["lineage"][stage])
        if not decision.accepted:
            self.writer.append("REJECT", asset_id, {
                "failed": list(decision.failed), "scores": scores.to_wire(),
            })
            return "REJECTED"

    def _stage_enhance(self, asset_id, ctx, client):
        stage = "ENHANCE"
        params = {"noise_sigma": self.config["enhance"]["noise_sigma"],
                  "steps": self.config["enhance"]["steps"]}
        resp = self._call(
            asset_id, stage, self._estimate(stage),
            lambda rid, seed: client.enhance(ctx["generated_ref"], seed,
                                             params=params, request_id=rid))
        ctx["final_ref"] = resp.outputs["video"]
        ctx["lineage"][stage] = {"request_id": resp.request_id, "model_id": resp.model_id,
                                 "seed": self._stage_seed(asset_id, stage)}
        self._record_cost(asset_id, stage, resp)
        self._record_stage(asset_id, stage, "DONE", output=ctx["final_ref"].to_wire(),
                           provenance=resp.outputs["provenance"], lineage=ctx["lineage"][stage])

    def _stage_publish(self, asset_id, ctx, client):
        final_ref = ctx.get("final_ref") or ctx["generated_ref"]
        lineage = ctx.get("lineage", {})
        self.writer.append("PUBLISH", asset_id, {
            "source": ctx["source_ref"].to_wire(),
            "edited": final_ref.to_wire(),
            "instruction": ctx["instruction"],
            "category": ctx["category"],
            "scores": ctx["judge_scores"],
            "format": ctx["format"],
            "lineage": lineage,
        })
        self._record_stage(asset_id, "PUBLISH", "DONE", edited=final_ref.to_wire())

    # -- entry points ----------------------------------------------------------

    def execute(self) -> RunSummary:
        os.makedirs(self.media_root, exist_ok=True)
        meta_path = os.path.join(self.run_dir, "run.json")
        if not os.path.exists(meta_path):
            with open(meta_path, "w", encoding="utf-8") as f:
                json.dump({"config": self.config.data,
                           "assets": [os.path.abspath(p) for p in self.asset_paths]}, f, indent=2)
        with ManifestWriter(self.journal_path) as writer:
            self.writer = writer
            self.ctx = {}
            self.budget = _Budget(self.config["budget_gpu_seconds"],
                                  writer.state.total_gpu_seconds())
            client = self._client()
            aborted = False
            try:
                order = self._ingest()
                self.summary.total_assets = len(order)
                kept = self._dedup_barrier(order)
                kept = self._motion_barrier(kept)
                self.summary.filtered = len(order) - len(kept)
                if self.workers == 1:
                    for asset_id in kept:
                        if not self.halt.is_set():
                            self._run_asset(asset_id, client)
                else:
                    with ThreadPoolExecutor(max_workers=self.workers) as pool:
                        futures = [pool.submit(self._run_asset, a, client) for a in kept]
                        for fut in futures:
                            try:
                                fut.result()
                            except AbortRun:
                                aborted = True
                                self.halt.set()
            except AbortRun:
                aborted = True
            except BudgetExceeded:
                self.summary.budget_exceeded = True
            self.summary.aborted = aborted
            self.summary.total_gpu_seconds = writer.state.total_gpu_seconds()
            self.summary.manifest_digest = writer.state.digest()
            return self.summary


def execute(config: RunConfig, asset_paths, run_dir, fault_hook=None, workers=None) -> RunSummary:
    return PipelineRun(config, asset_paths, run_dir, fault_hook, workers).execute()


def resume(run_dir, workers=None) -> RunSummary:
    meta_path = os.path.join(run_dir, "run.json")
    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
    except OSError as e:
        raise InvalidConfig(f"no resumable run at {run_dir}: {e}") from e
    config = RunConfig.from_dict(meta["config"])
    # replay eagerly so a corrupt journal surfaces before any dispatch
    replay(os.path.join(run_dir, "journal.log"))
    return execute(config, meta["assets"], run_dir, workers=workers)


# --- cost reporting -----------------------------------------------------------


@dataclass
class BudgetReport:
    per_stage: dict  # stage -> {"total", "count", "mean"}
    total_gpu_seconds: float
    per_sample_mean: float
    target_count: int
    projected_gpu_days: float

    def rows(self):
        for stage in sorted(self.per_stage):
            s = self.per_stage[stage]
            yield stage, s["total"], s["count"], s["mean"]


def budget_report(state: ManifestState, target_count: int = 1_000_000) -> BudgetReport:
    per_stage: dict = {}
    samples = set()
    for c in state.costs:
        s = per_stage.setdefault(c["stage"], {"total": 0.0, "count": 0, "mean": 0.0})
        s["total"] += c["gpu_seconds"]
        s["count"] += 1
        samples.add(c["asset_id"])
    for s in per_stage.values():
        s["mean"] = s["total"] / s["count"]
    total = sum(s["total"] for s in per_stage.values())
    per_sample = total / len(samples) if samples else 0.0
    projected_days = per_sample * target_count / 86400.0
    return BudgetReport(per_stage, total, per_sample, target_count, projected_days)
