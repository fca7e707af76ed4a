"""Rejection sampling over judge scores, plus dataset composition tracking.

A triplet is accepted iff every criterion clears its threshold AND safety
additionally clears a harder floor. Rejection means discard-and-record,
never regenerate.
"""

from dataclasses import dataclass, field

from .backends.protocol import JudgeScores
from .errors import EmptyDataset, InvalidConfig

GLOBAL_CATEGORIES = ("GLOBAL_STYLE", "GLOBAL_ENVIRONMENT")
LOCAL_CATEGORIES = ("LOCAL_REPLACE", "LOCAL_ADD", "LOCAL_REMOVE")


@dataclass(frozen=True)
class CurationPolicy:
    thresholds: dict = field(
        default_factory=lambda: {c: 0.7 for c in JudgeScores.CRITERIA}
    )
    safety_hard_floor: float = 0.9

    def validate(self):
        if set(self.thresholds) != set(JudgeScores.CRITERIA):
            raise InvalidConfig(f"thresholds must cover exactly {JudgeScores.CRITERIA}")
        for name, t in self.thresholds.items():
            if not 0.0 <= t <= 1.0:
                raise InvalidConfig(f"threshold {name}={t} out of [0, 1]")
        if not 0.0 <= self.safety_hard_floor <= 1.0:
            raise InvalidConfig(f"safety_hard_floor {self.safety_hard_floor} out of [0, 1]")
        if self.safety_hard_floor < self.thresholds["safety"]:
            raise InvalidConfig("safety_hard_floor must be >= the safety threshold")


@dataclass(frozen=True)
class CurationDecision:
    accepted: bool
    failed: tuple[str, ...] = ()


def accept(scores: JudgeScores, policy: CurationPolicy) -> CurationDecision:
    policy.validate()
    failed = [
        name for name in JudgeScores.CRITERIA
        if getattr(scores, name) < policy.thresholds[name]
    ]
    if scores.safety < policy.safety_hard_floor and "safety" not in failed:
        failed.append("safety")
    return CurationDecision(not failed, tuple(failed))


@dataclass(frozen=True)
class CompositionTarget:
    global_fraction: float = 0.7

    @property
    def local_fraction(self) -> float:
        return 1.0 - self.global_fraction


@dataclass(frozen=True)
class CompositionReport:
    counts: dict
    total: int
    global_fraction: float
    local_fraction: float
    deviation: float  # signed, vs target global fraction


def composition_report(categories, target: CompositionTarget = CompositionTarget()) -> CompositionReport:
    """Exact per-category counts and global/local split over published triplets."""
    counts: dict[str, int] = {}
    for c in categories:
        if c not in GLOBAL_CATEGORIES + LOCAL_CATEGORIES:
            raise ValueError(f"unknown category {c!r}")
        counts[c] = counts.get(c, 0) + 1
    total = sum(counts.values())
    if total == 0:
        raise EmptyDataset("no published triplets to report on")
    n_global = sum(counts.get(c, 0) for c in GLOBAL_CATEGORIES)
    gf = n_global / total
    return CompositionReport(counts, total, gf, 1.0 - gf, gf - target.global_fraction)
