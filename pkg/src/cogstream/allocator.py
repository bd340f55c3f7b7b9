"""Share a fixed word-rate budget across sessions by cognitive-load score.

Each session i with score s_i receives the weight
w_i = alpha * s_i / sum(s) + (1 - alpha) / n and streams at w_i * k, so
alpha = 0 is uniform streaming, alpha = 1 is fully score-proportional, and
the weights always sum to one (budget conservation).  An optional floor
re-normalizes what remains after pinning too-slow sessions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cogload import SCORE_MAX, SCORE_MIN, CogScore
from .errors import (
    AlphaOutOfRange,
    DuplicateSession,
    EmptySessionSet,
    InfeasibleFloor,
    NonPositiveBudget,
    ScoreOutOfRange,
    UnknownSession,
)


@dataclass(frozen=True)
class AllocationEntry:
    session_id: str
    score: CogScore
    weight: float
    speed_wps: float


@dataclass(frozen=True)
class AllocationPlan:
    alpha: float
    budget_k: float
    min_wps: float | None
    entries: tuple[AllocationEntry, ...]

    def speed_of(self, session_id: str) -> float:
        for entry in self.entries:
            if entry.session_id == session_id:
                return entry.speed_wps
        raise UnknownSession(session_id)

    def scores(self) -> list[tuple[str, CogScore]]:
        return [(e.session_id, e.score) for e in self.entries]


@dataclass(frozen=True)
class Join:
    session_id: str
    score: CogScore


@dataclass(frozen=True)
class Leave:
    session_id: str


@dataclass(frozen=True)
class Rescore:
    session_id: str
    score: CogScore


def _check_score(score: CogScore) -> None:
    if not isinstance(score, int) or not SCORE_MIN <= score <= SCORE_MAX:
        raise ScoreOutOfRange(f"score must be an int in 1..10, got {score!r}")


def allocate(
    scores: Sequence[tuple[str, CogScore]],
    alpha: float,
    budget_k: float,
    min_wps: float | None = None,
) -> AllocationPlan:
    """Split budget_k over sessions; see the module docstring for weights."""
    if not scores:
        raise EmptySessionSet("cannot allocate over zero sessions")
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha!r}")
    if not budget_k > 0.0:
        raise NonPositiveBudget(f"budget_k must be > 0, got {budget_k!r}")
    ids = [sid for sid, _ in scores]
    if len(set(ids)) != len(ids):
        raise DuplicateSession(f"duplicate session ids in {ids}")
    for _, score in scores:
        _check_score(score)

    n = len(scores)
    total = sum(score for _, score in scores)
    speeds = {
        sid: (alpha * score / total + (1.0 - alpha) / n) * budget_k
        for sid, score in scores
    }

    if min_wps is not None:
        if min_wps < 0.0:
            raise InfeasibleFloor(f"min_wps must be >= 0, got {min_wps!r}")
        if n * min_wps > budget_k:
            raise InfeasibleFloor(
                f"{n} sessions at {min_wps} WPS exceed budget {budget_k}"
            )
        speeds = _apply_floor(speeds, min_wps, budget_k)

    entries = tuple(
        AllocationEntry(
            session_id=sid,
            score=score,
            weight=speeds[sid] / budget_k,
            speed_wps=speeds[sid],
        )
        for sid, score in scores
    )
    return AllocationPlan(alpha=alpha, budget_k=budget_k, min_wps=min_wps, entries=entries)


def _apply_floor(
    speeds: dict[str, float], min_wps: float, budget_k: float
) -> dict[str, float]:
    """Pin sessions below the floor, re-share the rest proportionally."""
    pinned: set[str] = set()
    while True:
        violating = [
            sid for sid, v in speeds.items() if sid not in pinned and v < min_wps
        ]
        if not violating:
            return speeds
        pinned.update(violating)
        free = [sid for sid in speeds if sid not in pinned]
        remaining = budget_k - min_wps * len(pinned)
        if not free:
            return {sid: budget_k / len(speeds) for sid in speeds}
        free_total = sum(speeds[sid] for sid in free)
        speeds = {
            sid: min_wps if sid in pinned else speeds[sid] * remaining / free_total
            for sid in speeds
        }


def reallocate(plan: AllocationPlan, change: Join | Leave | Rescore) -> AllocationPlan:
    """Apply a membership or score change and re-run the same allocation."""
    scores = dict(plan.scores())
    if isinstance(change, Join):
        if change.session_id in scores:
            raise DuplicateSession(change.session_id)
        _check_score(change.score)
        scores[change.session_id] = change.score
    elif isinstance(change, Leave):
        if change.session_id not in scores:
            raise UnknownSession(change.session_id)
        del scores[change.session_id]
        if not scores:
            raise EmptySessionSet("last session left; nothing to allocate")
    elif isinstance(change, Rescore):
        if change.session_id not in scores:
            raise UnknownSession(change.session_id)
        _check_score(change.score)
        scores[change.session_id] = change.score
    else:
        raise TypeError(f"unsupported change: {change!r}")
    return allocate(
        list(scores.items()), plan.alpha, plan.budget_k, min_wps=plan.min_wps
    )
