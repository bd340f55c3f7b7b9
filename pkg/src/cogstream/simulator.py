"""Offline what-if engine: alignment rates and savings over a passage corpus.

Each passage carries a fitted reading-speed model and a population share.
Given a total word-rate budget, the allocator assigns each passage a stream
speed; the population-level streaming-reading alignment rate (SRAR) is the
share-weighted fraction of readers at or below their stream speed.  The
module answers both directions (SRAR at a budget, budget for a target SRAR),
tabulates savings against uniform streaming, and cross-checks the analytic
rates with Monte-Carlo sampling.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import allocator, cogload, stats
from .errors import (
    AlphaOutOfRange,
    BadProportions,
    DegenerateVariance,
    MissingScores,
    NonPositiveBudget,
    Unreachable,
)
from .readmodel import LogNormalModel, SpeedSample, fit

METHOD_UNIFORM = "uniform"
METHOD_FOG = "fog"
METHOD_TAG = "tag_oracle"
METHODS = (METHOD_UNIFORM, METHOD_FOG, METHOD_TAG)

_SHARE_TOL = 1e-9
_BISECT_REL_TOL = 1e-6


@dataclass(frozen=True)
class PassageRecord:
    """A passage, its audience share, and what we know about its difficulty."""

    id: str
    model: LogNormalModel
    population_share: float
    text: str | None = None
    oracle_score: cogload.CogScore | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.population_share <= 1.0:
            raise BadProportions(
                f"population_share must be in (0, 1], got {self.population_share!r}"
            )


@dataclass(frozen=True)
class SimPoint:
    """One row of a savings table."""

    target_srar: float
    method: str
    avg_speed_wps: float
    saving_vs_uniform: float


def _check_passages(passages: Sequence[PassageRecord]) -> None:
    if not passages:
        raise ValueError("need at least one passage")
    ids = [p.id for p in passages]
    if len(set(ids)) != len(ids):
        raise ValueError(f"passage ids must be unique, got {ids}")
    total = sum(p.population_share for p in passages)
    if abs(total - 1.0) > _SHARE_TOL:
        raise BadProportions(f"population shares must sum to 1, got {total!r}")


def passage_scores(
    passages: Sequence[PassageRecord], method: str
) -> list[cogload.CogScore]:
    """Load scores for every passage under the chosen estimation method."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    scores: list[cogload.CogScore] = []
    for p in passages:
        if method == METHOD_UNIFORM:
            scores.append(5)  # ignored: uniform allocation uses alpha = 0
        elif method == METHOD_FOG:
            if p.text is None:
                raise MissingScores(f"passage {p.id!r} has no text for fog scoring")
            scores.append(cogload.fog_to_score(cogload.gunning_fog(p.text).index))
        else:
            if p.oracle_score is None:
                raise MissingScores(f"passage {p.id!r} has no oracle score")
            scores.append(p.oracle_score)
    return scores


def _allocation_speeds(
    passages: Sequence[PassageRecord], method: str, alpha: float, budget_k: float
) -> list[float]:
    effective_alpha = 0.0 if method == METHOD_UNIFORM else alpha
    scores = passage_scores(passages, method)
    plan = allocator.allocate(
        [(p.id, s) for p, s in zip(passages, scores)], effective_alpha, budget_k
    )
    return [entry.speed_wps for entry in plan.entries]


def srar_at_budget(
    passages: Sequence[PassageRecord], method: str, alpha: float, budget_k: float
) -> float:
    """Share-weighted alignment rate when budget_k is split by the method."""
    _check_passages(passages)
    if not budget_k > 0.0:
        raise NonPositiveBudget(f"budget_k must be > 0, got {budget_k!r}")
    speeds = _allocation_speeds(passages, method, alpha, budget_k)
    return sum(
        p.population_share * p.model.cdf(v) for p, v in zip(passages, speeds)
    )


def budget_for_srar(
    passages: Sequence[PassageRecord], method: str, alpha: float, target: float
) -> float:
    """Smallest budget reaching the target SRAR, returned as avg WPS (k/n).

    SRAR is continuous and strictly increasing in the budget (all weights
    are positive), so bisection to relative 1e-6 is exact enough for the
    tables; the upper bracket doubles until it covers the target.
    """
    _check_passages(passages)
    if not 0.0 < target:
        raise AlphaOutOfRange(f"target must be positive, got {target!r}")
    if target >= 1.0:
        raise Unreachable(f"no finite budget reaches SRAR {target!r}")
    n = len(passages)
    hi = float(n)
    for _ in range(200):
        if srar_at_budget(passages, method, alpha, hi) >= target:
            break
        hi *= 2.0
    else:
        raise Unreachable(f"budget search did not bracket SRAR {target!r}")
    lo = 0.0
    while (hi - lo) > _BISECT_REL_TOL * hi:
        mid = 0.5 * (lo + hi)
        if srar_at_budget(passages, method, alpha, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi / n


def savings_table(
    passages: Sequence[PassageRecord],
    targets: Iterable[float],
    alpha: float,
    methods: Sequence[str] = METHODS,
) -> list[SimPoint]:
    """Budget and saving versus uniform for each target and method."""
    points: list[SimPoint] = []
    for target in targets:
        uniform_avg = budget_for_srar(passages, METHOD_UNIFORM, alpha, target)
        for method in methods:
            if method == METHOD_UNIFORM:
                avg = uniform_avg
            else:
                avg = budget_for_srar(passages, method, alpha, target)
            points.append(
                SimPoint(
                    target_srar=target,
                    method=method,
                    avg_speed_wps=avg,
                    saving_vs_uniform=1.0 - avg / uniform_avg,
                )
            )
    return points


def monte_carlo_srar(
    passages: Sequence[PassageRecord],
    method: str,
    alpha: float,
    budget_k: float,
    readers_per_passage: int,
    seed: int,
) -> float:
    """Estimate SRAR by sampling readers instead of evaluating CDFs."""
    _check_passages(passages)
    if not budget_k > 0.0:
        raise NonPositiveBudget(f"budget_k must be > 0, got {budget_k!r}")
    if readers_per_passage < 1:
        raise ValueError("readers_per_passage must be >= 1")
    speeds = _allocation_speeds(passages, method, alpha, budget_k)
    rng = np.random.default_rng(seed)
    total = 0.0
    for p, v in zip(passages, speeds):
        draws = rng.lognormal(mean=p.model.mu, sigma=p.model.sigma, size=readers_per_passage)
        total += p.population_share * float(np.mean(draws <= v))
    return total


def score_speed_correlation(passages: Sequence[PassageRecord], method: str) -> float:
    """Pearson correlation between passage scores and median speeds."""
    _check_passages(passages)
    if len(passages) < 3:
        raise ValueError("need at least 3 passages for a meaningful correlation")
    if method == METHOD_UNIFORM:
        raise ValueError("uniform streaming carries no scores to correlate")
    scores = [float(s) for s in passage_scores(passages, method)]
    medians = [p.model.median for p in passages]
    if len(set(scores)) == 1 or len(set(medians)) == 1:
        raise DegenerateVariance("scores or medians never vary")
    return stats.pearson_r(scores, medians)


# --- synthetic corpus ---------------------------------------------------------

_SIMPLE_WORDS = (
    "the", "cat", "sat", "on", "mat", "dog", "ran", "big", "red", "sun",
    "day", "way", "top", "tin", "man", "fish", "bird", "tree", "rock", "hand",
)
_COMPLEX_WORDS = (
    "animal", "banana", "calculator", "elephant", "umbrella",
    "electricity", "tomato", "potato", "calendar", "positive",
)
_WORDS_PER_SENTENCE = 5
_SENTENCES_PER_PASSAGE = 20


def text_for_score(score: cogload.CogScore) -> str:
    """Build a passage whose Gunning-Fog score round-trips to `score`.

    With 5-word sentences and C complex words per 100, the fog index is
    0.4 * (5 + C); choosing C = 5 * (10 - score) lands the index exactly on
    22 - 2*score, the centre of the bin that fog_to_score maps back to
    `score`.
    """
    if not cogload.SCORE_MIN <= score <= cogload.SCORE_MAX:
        raise ValueError(f"score must be in 1..10, got {score!r}")
    total_words = _WORDS_PER_SENTENCE * _SENTENCES_PER_PASSAGE
    complex_count = 5 * (10 - score)
    complex_slots = {int(i * total_words / complex_count) for i in range(complex_count)}
    words = []
    for i in range(total_words):
        if i in complex_slots:
            words.append(_COMPLEX_WORDS[i % len(_COMPLEX_WORDS)])
        else:
            words.append(_SIMPLE_WORDS[i % len(_SIMPLE_WORDS)])
    sentences = []
    for s in range(_SENTENCES_PER_PASSAGE):
        chunk = words[s * _WORDS_PER_SENTENCE:(s + 1) * _WORDS_PER_SENTENCE]
        chunk[0] = chunk[0].capitalize()
        sentences.append(" ".join(chunk) + ".")
    return " ".join(sentences)


def synthetic_passages(
    n: int = 10,
    median_range: tuple[float, float] = (4.0, 9.0),
    sigma: float = 0.25,
    score_noise: float = 0.0,
    seed: int = 0,
) -> list[PassageRecord]:
    """A corpus with log-spaced median speeds and scores affine in log-median.

    Oracle scores map the slowest median to 1 and the fastest to 10.  The
    passage text is synthesized so that its Gunning-Fog score equals the
    oracle score plus rounded Gaussian noise of sd score_noise (clamped to
    1..10); with score_noise=0 the fog estimator recovers the oracle
    exactly.
    """
    if n < 2:
        raise ValueError("need at least 2 passages")
    lo, hi = median_range
    if not 0.0 < lo < hi:
        raise ValueError(f"bad median range {median_range!r}")
    rng = np.random.default_rng(seed)
    log_lo, log_hi = math.log(lo), math.log(hi)
    passages = []
    for i in range(n):
        log_median = log_lo + (log_hi - log_lo) * i / (n - 1)
        oracle = round(1 + 9 * (log_median - log_lo) / (log_hi - log_lo))
        oracle = min(cogload.SCORE_MAX, max(cogload.SCORE_MIN, oracle))
        noisy = oracle
        if score_noise > 0.0:
            noisy += round(float(rng.normal(0.0, score_noise)))
            noisy = min(cogload.SCORE_MAX, max(cogload.SCORE_MIN, noisy))
        passages.append(
            PassageRecord(
                id=f"p{i + 1:02d}",
                model=LogNormalModel(mu=log_median, sigma=sigma),
                population_share=1.0 / n,
                text=text_for_score(noisy),
                oracle_score=oracle,
            )
        )
    return passages


def smallest_density_intersection(passages: Sequence[PassageRecord]) -> float:
    """Smallest speed at which any two passage densities cross."""
    from .readmodel import density_intersection

    best = math.inf
    for i, a in enumerate(passages):
        for b in passages[i + 1:]:
            if a.model == b.model:
                continue
            roots = density_intersection(a.model, b.model)
            if roots:
                best = min(best, min(roots))
    if not math.isfinite(best):
        raise ValueError("no pair of passages has distinct models")
    return best


# --- file formats --------------------------------------------------------------

def load_passages(path: str, speeds_csv: str | None = None) -> list[PassageRecord]:
    """Read a corpus from JSON; fit models from a speeds CSV when absent.

    Each JSON entry is {"id", "text"?, "oracle_score"?, "mu"?, "sigma"?,
    "share"?}; entries without mu/sigma must be covered by rows of the
    per-passage speeds CSV (passage_id,user_id,speed_wps).  Missing shares
    default to an even split.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list) or not raw:
        raise ValueError("passages file must be a non-empty JSON array")

    samples: list[SpeedSample] = []
    if speeds_csv is not None:
        from .readmodel import load_samples_csv

        samples = load_samples_csv(speeds_csv)

    shares_given = [e.get("share") for e in raw]
    if any(s is None for s in shares_given) and any(
        s is not None for s in shares_given
    ):
        raise BadProportions("give shares for all passages or none")

    passages = []
    for entry in raw:
        pid = str(entry["id"])
        if "mu" in entry and "sigma" in entry:
            model = LogNormalModel(mu=float(entry["mu"]), sigma=float(entry["sigma"]))
        else:
            speeds = [s.speed_wps for s in samples if s.passage_id == pid]
            if not speeds:
                raise ValueError(
                    f"passage {pid!r} has no model parameters and no CSV rows"
                )
            model = fit(speeds)
        share = entry.get("share")
        passages.append(
            PassageRecord(
                id=pid,
                model=model,
                population_share=float(share) if share is not None else 1.0 / len(raw),
                text=entry.get("text"),
                oracle_score=(
                    int(entry["oracle_score"])
                    if entry.get("oracle_score") is not None
                    else None
                ),
            )
        )
    _check_passages(passages)
    return passages


def save_passages(passages: Sequence[PassageRecord], path: str) -> None:
    """Write a corpus in the JSON format load_passages reads."""
    payload = [
        {
            "id": p.id,
            "text": p.text,
            "oracle_score": p.oracle_score,
            "mu": p.model.mu,
            "sigma": p.model.sigma,
            "share": p.population_share,
        }
        for p in passages
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def table_rows(points: Sequence[SimPoint]) -> list[dict]:
    """Rows of the delimited savings table: saving as a percentage."""
    return [
        {
            "target_srar": p.target_srar,
            "method": p.method,
            "avg_wps": p.avg_speed_wps,
            "saving_pct": 100.0 * p.saving_vs_uniform,
        }
        for p in points
    ]


def write_table_json(points: Sequence[SimPoint], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(table_rows(points), fh, indent=2)
        fh.write("\n")


def write_table_csv(points: Sequence[SimPoint], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["target_srar", "method", "avg_wps", "saving_pct"]
        )
        writer.writeheader()
        for row in table_rows(points):
            writer.writerow(row)
