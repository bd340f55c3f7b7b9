"""Log-normal reading-speed models: fitting, evaluation, comparison.

A population's natural reading speed (words per second) is modelled as
log-normal.  The model supports quantile speeds ("fast enough for a target
fraction of readers"), the streaming-reading alignment rate (the CDF at a
stream speed), goodness-of-fit via Kolmogorov-Smirnov, paired-t comparisons
between conditions, and the speeds at which two population densities cross.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import stats
from .errors import (
    AlphaOutOfRange,
    DegenerateDifferences,
    DegenerateSample,
    EmptyOrSingleton,
    IdenticalModels,
    LengthMismatch,
    NegativeSpeed,
    NonPositiveSample,
)

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LogNormalModel:
    """Log-normal law of reading speed, parameterized on the log scale."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma!r}")

    @property
    def median(self) -> float:
        return math.exp(self.mu)

    def cdf(self, speed_wps: float) -> float:
        """Fraction of readers whose natural speed is at most speed_wps."""
        if speed_wps < 0.0:
            raise NegativeSpeed(f"speed must be >= 0, got {speed_wps!r}")
        if speed_wps == 0.0:
            return 0.0
        z = (math.log(speed_wps) - self.mu) / self.sigma
        return stats.normal_cdf(z)

    def srar(self, stream_speed_wps: float) -> float:
        """Streaming-reading alignment rate at a stream speed.

        A reader is aligned when the stream runs no faster than they read,
        so this is exactly the CDF evaluated at the stream speed.
        """
        return self.cdf(stream_speed_wps)

    def quantile(self, alpha: float) -> float:
        """Speed that satisfies a fraction alpha of the population."""
        if not 0.0 < alpha < 1.0:
            raise AlphaOutOfRange(f"alpha must be in (0, 1), got {alpha!r}")
        return math.exp(self.mu + stats.normal_quantile(alpha) * self.sigma)

    def logpdf(self, speed_wps: float) -> float:
        if speed_wps <= 0.0:
            return -math.inf
        t = math.log(speed_wps)
        z = (t - self.mu) / self.sigma
        return -t - math.log(self.sigma) - _LOG_SQRT_TWO_PI - 0.5 * z * z

    def pdf(self, speed_wps: float) -> float:
        if speed_wps <= 0.0:
            return 0.0
        return math.exp(self.logpdf(speed_wps))


@dataclass(frozen=True)
class SpeedSample:
    """One observed reading: who read which passage at what speed."""

    passage_id: str
    user_id: str
    speed_wps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.speed_wps) and self.speed_wps > 0.0):
            raise NonPositiveSample(
                f"speed_wps must be > 0, got {self.speed_wps!r}"
            )


@dataclass(frozen=True)
class FitReport:
    """A fitted model plus its goodness of fit against the fitting sample."""

    model: LogNormalModel
    n: int
    ks_statistic: float
    ks_p_value: float


def _checked_logs(samples: Sequence[float]) -> list[float]:
    if len(samples) < 2:
        raise EmptyOrSingleton(f"need at least 2 samples, got {len(samples)}")
    for s in samples:
        if not (math.isfinite(s) and s > 0.0):
            raise NonPositiveSample(f"samples must be > 0, got {s!r}")
    return [math.log(s) for s in samples]


def fit(samples: Sequence[float]) -> LogNormalModel:
    """Maximum-likelihood log-normal fit (population variance on logs)."""
    logs = _checked_logs(samples)
    n = len(logs)
    mu = sum(logs) / n
    var = sum((t - mu) ** 2 for t in logs) / n
    if var == 0.0:
        raise DegenerateSample("all samples identical; log-spread is zero")
    return LogNormalModel(mu=mu, sigma=math.sqrt(var))


def ks_test(samples: Sequence[float], model: LogNormalModel) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test of samples against a model.

    Returns (statistic, p_value).  The p-value uses the asymptotic
    Kolmogorov distribution with the Stephens small-sample correction
    sqrt(n) + 0.12 + 0.11 / sqrt(n).
    """
    logs = _checked_logs(samples)
    n = len(logs)
    ordered = sorted(math.exp(t) for t in logs)
    d = 0.0
    for i, x in enumerate(ordered, start=1):
        f = model.cdf(x)
        d = max(d, abs(i / n - f), abs((i - 1) / n - f))
    root_n = math.sqrt(n)
    p = stats.kolmogorov_sf(d * (root_n + 0.12 + 0.11 / root_n))
    return d, p


def paired_t_test(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, int, float]:
    """Two-sided paired t-test; returns (t, degrees of freedom, p_value)."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise EmptyOrSingleton(f"need at least 2 pairs, got {n}")
    diffs = [x - y for x, y in zip(xs, ys)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    if ss == 0.0:
        raise DegenerateDifferences("paired differences have zero spread")
    sd = math.sqrt(ss / (n - 1))
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    return t, df, stats.student_t_two_sided_p(t, df)


def density_intersection(a: LogNormalModel, b: LogNormalModel) -> list[float]:
    """All speeds x > 0 where the two densities are equal, ascending.

    On the log scale the densities are quadratics, so two distinct models
    with equal sigma cross exactly once and models with different sigma
    cross exactly twice (both densities integrate to one, so neither can
    dominate everywhere).  Roots are polished by Newton steps on the
    log-density difference.  A crossing beyond the double-precision range
    of exp() is reported as inf.
    """
    if a.mu == b.mu and a.sigma == b.sigma:
        raise IdenticalModels("identical models intersect everywhere")
    if a.sigma == b.sigma:
        return [math.exp(0.5 * (a.mu + b.mu))]

    sa2, sb2 = a.sigma * a.sigma, b.sigma * b.sigma
    # sa2*(t-mu_b)^2 - sb2*(t-mu_a)^2 = 2*sa2*sb2*log(sigma_a/sigma_b)
    qa = sa2 - sb2
    qb = -2.0 * (sa2 * b.mu - sb2 * a.mu)
    qc = sa2 * b.mu * b.mu - sb2 * a.mu * a.mu - 2.0 * sa2 * sb2 * math.log(
        a.sigma / b.sigma
    )
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:  # numerically impossible in exact arithmetic; guard anyway
        disc = 0.0
    root = math.sqrt(disc)
    q = -0.5 * (qb + math.copysign(root, qb))
    ts = sorted({q / qa, qc / q} if q != 0.0 else {0.0})

    def diff(t: float) -> float:
        za = (t - a.mu) / a.sigma
        zb = (t - b.mu) / b.sigma
        return (
            math.log(b.sigma / a.sigma) - 0.5 * za * za + 0.5 * zb * zb
        )

    def slope(t: float) -> float:
        return -(t - a.mu) / sa2 + (t - b.mu) / sb2

    polished = []
    for t in ts:
        for _ in range(3):
            g = slope(t)
            if g == 0.0:
                break
            t = t - diff(t) / g
        polished.append(t)

    out = []
    for t in sorted(polished):
        try:
            out.append(math.exp(t))
        except OverflowError:
            out.append(math.inf)
    return out


def evaluate_fit(samples: Sequence[float]) -> FitReport:
    """Fit a model and report its Kolmogorov-Smirnov fit on the same data."""
    model = fit(samples)
    statistic, p = ks_test(samples, model)
    return FitReport(model=model, n=len(samples), ks_statistic=statistic, ks_p_value=p)


def load_samples_csv(path: str) -> list[SpeedSample]:
    """Read observations from a CSV with header passage_id,user_id,speed_wps."""
    required = {"passage_id", "user_id", "speed_wps"}
    rows: list[SpeedSample] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ValueError(
                f"CSV must have columns {sorted(required)}, got {reader.fieldnames}"
            )
        for row in reader:
            rows.append(
                SpeedSample(
                    passage_id=row["passage_id"],
                    user_id=row["user_id"],
                    speed_wps=float(row["speed_wps"]),
                )
            )
    return rows


def speeds_of(samples: Iterable[SpeedSample], passage_id: str | None = None) -> list[float]:
    """Extract raw speeds, optionally restricted to one passage."""
    return [
        s.speed_wps
        for s in samples
        if passage_id is None or s.passage_id == passage_id
    ]
