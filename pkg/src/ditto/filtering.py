"""Source-video filters: embedding near-duplicate removal and motion scoring.

Both filters are pure functions over numbers handed to us by external
encoders/trackers (or their in-process mocks); this module never touches
pixels. Records can also be fed offline as line-delimited JSON, one object
per asset.
"""

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyTrajectorySet, ZeroNorm


class Reason(enum.Enum):
    KEPT = "KEPT"
    DUPLICATE_OF = "DUPLICATE_OF"
    LOW_MOTION = "LOW_MOTION"


@dataclass(frozen=True)
class FilterDecision:
    asset_id: str
    kept: bool
    reason: Reason
    duplicate_of: Optional[str] = None
    score: Optional[float] = None


@dataclass
class FeatureVector:
    asset_id: str
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise DimensionMismatch("feature vector must be 1-D")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"non-finite feature vector for {self.asset_id}")
        if np.linalg.norm(self.values) == 0.0:
            raise ZeroNorm(f"zero-norm feature vector for {self.asset_id}")


@dataclass
class Trajectory:
    point_id: str
    positions: np.ndarray  # (n_frames, 2)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2 or self.positions.shape[0] < 1:
            raise ValueError("trajectory must be a nonempty (n, 2) sequence")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError(f"non-finite coordinates in trajectory {self.point_id}")


def cosine_similarity(a: FeatureVector, b: FeatureVector) -> float:
    if a.values.shape != b.values.shape:
        raise DimensionMismatch(f"{a.values.shape} vs {b.values.shape}")
    na = np.linalg.norm(a.values)
    nb = np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise ZeroNorm("cosine similarity of a zero vector")
    return float(np.dot(a.values, b.values) / (na * nb))


def dedup(vectors: list[FeatureVector], threshold: float) -> list[FilterDecision]:
    """Greedy sweep in ingestion order.

    An asset is a duplicate of the earliest already-kept asset whose cosine
    similarity is strictly greater than the threshold; otherwise it is kept.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"similarity threshold must be in (0, 1], got {threshold}")
    if not vectors:
        return []
    dims = {v.values.shape for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatch(f"mixed feature dimensions: {sorted(dims)}")
    mat = np.stack([v.values for v in vectors])
    normed = mat / np.linalg.norm(mat, axis=1, keepdims=True)
    dup_idx = kernels.greedy_dedup(np.ascontiguousarray(normed), float(threshold))
    decisions = []
    for i, v in enumerate(vectors):
        j = int(dup_idx[i])
        if j < 0:
            decisions.append(FilterDecision(v.asset_id, True, Reason.KEPT))
        else:
            decisions.append(
                FilterDecision(v.asset_id, False, Reason.DUPLICATE_OF, duplicate_of=vectors[j].asset_id)
            )
    return decisions


def cumulative_displacement(t: Trajectory) -> float:
    return float(kernels.cumulative_displacements(t.positions[None, :, :])[0])


def motion_score(ts: list[Trajectory]) -> float:
    """Mean cumulative displacement over all trajectories, in pixels."""
    if not ts:
        raise EmptyTrajectorySet("motion score over zero trajectories")
    lengths = {t.positions.shape[0] for t in ts}
    if len(lengths) == 1:
        batch = np.stack([t.positions for t in ts])
        return float(kernels.cumulative_displacements(batch).mean())
    return float(np.mean([cumulative_displacement(t) for t in ts]))


def motion_filter(scores: dict[str, float], threshold: float) -> list[FilterDecision]:
    """Keep iff score >= threshold (boundary inclusive)."""
    if threshold < 0:
        raise ValueError("motion threshold must be >= 0")
    out = []
    for asset_id, score in scores.items():
        if score >= threshold:
            out.append(FilterDecision(asset_id, True, Reason.KEPT, score=score))
        else:
            out.append(FilterDecision(asset_id, False, Reason.LOW_MOTION, score=score))
    return out


# --- offline line-delimited interchange -------------------------------------


def parse_feature_lines(lines: Iterable[str]) -> list[FeatureVector]:
    out = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        out.append(FeatureVector(obj["asset_id"], obj["values"]))
    return out


def parse_trajectory_lines(lines: Iterable[str]) -> dict[str, list[Trajectory]]:
    out: dict[str, list[Trajectory]] = {}
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        out[obj["asset_id"]] = [
            Trajectory(t["point_id"], t["positions"]) for t in obj["trajectories"]
        ]
    return out
