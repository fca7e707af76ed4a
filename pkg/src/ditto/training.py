"""Executable oracles for the training mathematics.

Covers the modality-curriculum scaffold schedule (linear anneal over the
warm-up phase, defaults 5,000 of 16,000 steps) and the flow-matching
objective with the straight-line noising path z_t = (1-t) z0 + t eps and
regression target z0 - z_t. No model is trained here; these are the pure
functions a trainer would call.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .encoding import MILLION, hash_millionths
from .errors import DimensionMismatch, InvalidConfig


class ScheduleShape(enum.Enum):
    LINEAR = "LINEAR"


class ConditioningTag(enum.Enum):
    TEXT_ONLY = "TEXT_ONLY"
    TEXT_PLUS_SCAFFOLD = "TEXT_PLUS_SCAFFOLD"


@dataclass(frozen=True)
class CurriculumSchedule:
    warmup_steps: int = 5000
    total_steps: int = 16000
    shape: ScheduleShape = ScheduleShape.LINEAR

    def validate(self):
        if not 0 < self.warmup_steps <= self.total_steps:
            raise InvalidConfig(
                f"need 0 < warmup_steps <= total_steps, got {self.warmup_steps}/{self.total_steps}"
            )


def scaffold_probability(step: int, schedule: CurriculumSchedule = CurriculumSchedule()) -> float:
    """Probability of providing the visual scaffold at a training step."""
    schedule.validate()
    if step < 0:
        raise ValueError(f"step must be >= 0, got {step}")
    return max(0.0, 1.0 - step / schedule.warmup_steps)


def sample_scaffold(step: int, schedule: CurriculumSchedule, seed: int,
                    draw: int = 0) -> ConditioningTag:
    """Seeded per-sample draw of the conditioning mode."""
    p = scaffold_probability(step, schedule)
    u = hash_millionths("ditto-curriculum", step, seed, draw)
    if u < round(p * MILLION):
        return ConditioningTag.TEXT_PLUS_SCAFFOLD
    return ConditioningTag.TEXT_ONLY


@dataclass
class FlowSample:
    z0: np.ndarray
    eps: np.ndarray
    t: float
    c: ConditioningTag = ConditioningTag.TEXT_ONLY

    def __post_init__(self):
        self.z0 = np.asarray(self.z0, dtype=np.float64)
        self.eps = np.asarray(self.eps, dtype=np.float64)
        if self.z0.shape != self.eps.shape:
            raise DimensionMismatch(f"z0 {self.z0.shape} vs eps {self.eps.shape}")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must be in [0, 1], got {self.t}")


def interpolate(z0: np.ndarray, eps: np.ndarray, t: float) -> np.ndarray:
    """Straight-line noising path: z_t = (1 - t) z0 + t eps."""
    z0 = np.asarray(z0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if z0.shape != eps.shape:
        raise DimensionMismatch(f"{z0.shape} vs {eps.shape}")
    return (1.0 - t) * z0 + t * eps


def flow_target(sample: FlowSample) -> np.ndarray:
    """The regression target z0 - z_t that the vector field points along."""
    return sample.z0 - interpolate(sample.z0, sample.eps, sample.t)


def flow_matching_loss(predicted_field: np.ndarray, sample: FlowSample,
                       reduction: str = "sum") -> float:
    predicted_field = np.asarray(predicted_field, dtype=np.float64)
    if predicted_field.shape != sample.z0.shape:
        raise DimensionMismatch(f"{predicted_field.shape} vs {sample.z0.shape}")
    residual = predicted_field - flow_target(sample)
    sq = float(np.sum(residual ** 2))
    if reduction == "sum":
        return sq
    if reduction == "mean":
        return sq / residual.size
    raise ValueError(f"unknown reduction {reduction!r}")


def flow_matching_loss_grad(predicted_field: np.ndarray, sample: FlowSample) -> np.ndarray:
    """Analytic gradient of the sum-reduced loss wrt the predicted field."""
    predicted_field = np.asarray(predicted_field, dtype=np.float64)
    return 2.0 * (predicted_field - flow_target(sample))
