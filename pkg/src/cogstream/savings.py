"""Compute savings from group-aware streaming and budget redistribution.

Serving each reader group at its own alignment quantile instead of one
worst-case speed saves compute; moving budget between two groups along the
fixed-cost line p_a*s_a + p_b*s_b = s0 can raise the share of aligned
readers.  Both calculations work directly on fitted log-normal models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AlphaOutOfRange, BadProportions, InfeasibleSplit, NonPositiveSmax
from .readmodel import LogNormalModel

_PROPORTION_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GroupSpec:
    """A reader group: its share of the population and its speed model."""

    name: str
    proportion: float
    model: LogNormalModel

    def __post_init__(self) -> None:
        if not (0.0 < self.proportion <= 1.0):
            raise BadProportions(
                f"proportion must be in (0, 1], got {self.proportion!r}"
            )


@dataclass(frozen=True)
class SavingsReport:
    """Per-group quantile speeds and the saving against a flat s_max."""

    target_srar: float
    group_speeds: dict[str, float]
    s_max: float
    saving_fraction: float


@dataclass(frozen=True)
class RedistributionPlan:
    """A budget split between two groups and its alignment consequences."""

    s0: float
    speeds: dict[str, float]
    gain_loss: dict[str, float]
    net_gain: float


def _check_groups(groups: Sequence[GroupSpec]) -> None:
    if not groups:
        raise BadProportions("need at least one group")
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise BadProportions(f"group names must be unique, got {names}")
    total = sum(g.proportion for g in groups)
    if abs(total - 1.0) > _PROPORTION_TOL:
        raise BadProportions(f"proportions must sum to 1, got {total!r}")


def savings_at(
    groups: Sequence[GroupSpec], target_srar: float, s_max: float
) -> SavingsReport:
    """Saving of quantile-speed streaming relative to streaming at s_max.

    Each group g runs at its own target_srar quantile speed s_g; the saving
    is 1 - (sum_g p_g * s_g) / s_max.  A negative saving (quantiles above
    s_max) is reported as-is, not clamped.
    """
    _check_groups(groups)
    if not 0.0 < target_srar < 1.0:
        raise AlphaOutOfRange(f"target_srar must be in (0, 1), got {target_srar!r}")
    if not s_max > 0.0:
        raise NonPositiveSmax(f"s_max must be > 0, got {s_max!r}")
    speeds = {g.name: g.model.quantile(target_srar) for g in groups}
    mean_speed = sum(g.proportion * speeds[g.name] for g in groups)
    return SavingsReport(
        target_srar=target_srar,
        group_speeds=speeds,
        s_max=s_max,
        saving_fraction=1.0 - mean_speed / s_max,
    )


def redistribution_gains(
    a: GroupSpec, b: GroupSpec, s0: float, s_a: float
) -> RedistributionPlan:
    """Alignment gains when group a runs at s_a under a fixed mean budget s0.

    Group b absorbs the remainder of the budget line:
    s_b = (s0 - p_a * s_a) / p_b.  Gains are CDF changes relative to both
    groups running at s0, weighted by proportions in net_gain.
    """
    _check_groups([a, b])
    if not s0 > 0.0:
        raise ValueError(f"s0 must be > 0, got {s0!r}")
    if s_a < 0.0:
        raise InfeasibleSplit(f"s_a must be >= 0, got {s_a!r}")
    s_b = (s0 - a.proportion * s_a) / b.proportion
    if s_b < 0.0:
        raise InfeasibleSplit(
            f"s_a={s_a!r} drives the other group below zero speed"
        )
    gain_a = a.model.cdf(s_a) - a.model.cdf(s0)
    gain_b = b.model.cdf(s_b) - b.model.cdf(s0)
    return RedistributionPlan(
        s0=s0,
        speeds={a.name: s_a, b.name: s_b},
        gain_loss={a.name: gain_a, b.name: gain_b},
        net_gain=a.proportion * gain_a + b.proportion * gain_b,
    )


def optimize_split(a: GroupSpec, b: GroupSpec, s0: float) -> RedistributionPlan:
    """Best split of a fixed budget s0 between two groups.

    Maximizes p_a * F_a(s_a) + p_b * F_b(s_b) over the feasible segment
    s_a in [0, s0/p_a] with a coarse scan to bracket the optimum followed
    by golden-section refinement to 1e-6 WPS.  Ties go to the uniform
    split, so net_gain is never negative.
    """
    _check_groups([a, b])
    if not s0 > 0.0:
        raise ValueError(f"s0 must be > 0, got {s0!r}")

    def objective(s_a: float) -> float:
        s_b = (s0 - a.proportion * s_a) / b.proportion
        return a.proportion * a.model.cdf(s_a) + b.proportion * b.model.cdf(s_b)

    lo, hi = 0.0, s0 / a.proportion
    grid = 256
    best_i, best_val = 0, -1.0
    for i in range(grid + 1):
        val = objective(lo + (hi - lo) * i / grid)
        if val > best_val:
            best_i, best_val = i, val
    left = lo + (hi - lo) * max(best_i - 1, 0) / grid
    right = lo + (hi - lo) * min(best_i + 1, grid) / grid

    # Golden-section on [left, right] down to 1e-6 WPS.
    x1 = right - _GOLDEN * (right - left)
    x2 = left + _GOLDEN * (right - left)
    f1, f2 = objective(x1), objective(x2)
    while right - left > 1e-6:
        if f1 < f2:
            left, x1, f1 = x1, x2, f2
            x2 = left + _GOLDEN * (right - left)
            f2 = objective(x2)
        else:
            right, x2, f2 = x2, x1, f1
            x1 = right - _GOLDEN * (right - left)
            f1 = objective(x1)
    s_a = 0.5 * (left + right)

    if objective(s_a) <= objective(s0):
        s_a = s0  # tie-break toward the uniform split
    return redistribution_gains(a, b, s0, s_a)


def load_groups(path: str) -> list[GroupSpec]:
    """Read groups from a JSON array of {name, proportion, mu, sigma}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError("groups file must contain a JSON array")
    groups = []
    for entry in raw:
        groups.append(
            GroupSpec(
                name=str(entry["name"]),
                proportion=float(entry["proportion"]),
                model=LogNormalModel(mu=float(entry["mu"]), sigma=float(entry["sigma"])),
            )
        )
    return groups
