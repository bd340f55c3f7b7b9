"""Savings arithmetic and budget-redistribution analysis."""

import json
import math
import time

import numpy as np
import pytest

from cogstream.errors import (
    AlphaOutOfRange,
    BadProportions,
    InfeasibleSplit,
    NonPositiveSmax,
)
from cogstream.readmodel import LogNormalModel
from cogstream.savings import (
    GroupSpec,
    load_groups,
    optimize_split,
    redistribution_gains,
    savings_at,
)

Z99 = 2.3263478740408408


def study_groups() -> list[GroupSpec]:
    """Two groups whose 0.99-quantile speeds equal the study's 21.20/11.97 WPS."""
    sigma = 0.5
    return [
        GroupSpec("simple", 0.5, LogNormalModel(math.log(21.20) - Z99 * sigma, sigma)),
        GroupSpec("dense", 0.5, LogNormalModel(math.log(11.97) - Z99 * sigma, sigma)),
    ]


class TestSavingsAt:
    def test_study_anchor(self):
        report = savings_at(study_groups(), 0.99, 45.0)
        assert report.group_speeds["simple"] == pytest.approx(21.20, abs=1e-9)
        assert report.group_speeds["dense"] == pytest.approx(11.97, abs=1e-9)
        assert report.saving_fraction == pytest.approx(0.6314, abs=1e-4)

    def test_study_anchor_runtime(self):
        groups = study_groups()
        start = time.perf_counter()
        savings_at(groups, 0.99, 45.0)
        assert time.perf_counter() - start < 1e-3

    def test_quantile_equals_smax(self):
        g = GroupSpec("only", 1.0, LogNormalModel(math.log(45.0), 0.3))
        report = savings_at([g], 0.5, 45.0)
        assert report.saving_fraction == pytest.approx(0.0, abs=1e-12)

    def test_three_equal_groups(self):
        # quantiles {9, 9, 9} against s_max 45 -> saving 0.8
        groups = [
            GroupSpec(f"g{i}", 1.0 / 3.0, LogNormalModel(math.log(9.0), 0.2))
            for i in range(3)
        ]
        report = savings_at(groups, 0.5, 45.0)
        assert report.saving_fraction == pytest.approx(0.8, abs=1e-12)

    def test_negative_saving_not_clamped(self):
        g = GroupSpec("only", 1.0, LogNormalModel(math.log(50.0), 0.3))
        report = savings_at([g], 0.5, 45.0)
        assert report.saving_fraction < 0.0

    def test_validation(self):
        groups = study_groups()
        with pytest.raises(AlphaOutOfRange):
            savings_at(groups, 1.0, 45.0)
        with pytest.raises(NonPositiveSmax):
            savings_at(groups, 0.9, 0.0)
        bad = [GroupSpec("a", 0.5, LogNormalModel(1.0, 0.3)),
               GroupSpec("b", 0.4, LogNormalModel(1.5, 0.3))]
        with pytest.raises(BadProportions):
            savings_at(bad, 0.9, 45.0)
        with pytest.raises(BadProportions):
            GroupSpec("a", 0.0, LogNormalModel(1.0, 0.3))

    def test_monotone_in_target(self):
        """Higher target alignment can only cost more compute."""
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            props = rng.dirichlet(np.ones(n))
            groups = [
                GroupSpec(f"g{i}", float(p),
                          LogNormalModel(float(rng.uniform(0.5, 3.0)),
                                         float(rng.uniform(0.1, 1.0))))
                for i, p in enumerate(props)
            ]
            targets = sorted(rng.uniform(0.05, 0.95, size=4))
            savings = [savings_at(groups, t, 45.0).saving_fraction for t in targets]
            assert all(b <= a + 1e-12 for a, b in zip(savings, savings[1:]))


class TestRedistribution:
    def a_b(self):
        a = GroupSpec("A", 0.5, LogNormalModel(math.log(8.0), 0.4))
        b = GroupSpec("B", 0.5, LogNormalModel(math.log(4.0), 0.4))
        return a, b

    def test_noop_split(self):
        a, b = self.a_b()
        plan = redistribution_gains(a, b, s0=5.0, s_a=5.0)
        assert plan.gain_loss == {"A": 0.0, "B": 0.0}
        assert plan.net_gain == 0.0

    def test_budget_conserved(self):
        a, b = self.a_b()
        for s_a in (0.0, 2.5, 5.0, 7.25, 9.9):
            plan = redistribution_gains(a, b, s0=5.0, s_a=s_a)
            total = 0.5 * plan.speeds["A"] + 0.5 * plan.speeds["B"]
            assert total == pytest.approx(5.0, abs=1e-9)
            assert plan.net_gain == pytest.approx(
                0.5 * plan.gain_loss["A"] + 0.5 * plan.gain_loss["B"], abs=1e-12)

    def test_cdf_arithmetic_oracle(self):
        a, b = self.a_b()
        plan = redistribution_gains(a, b, s0=5.0, s_a=6.0)
        s_b = (5.0 - 0.5 * 6.0) / 0.5
        expected_a = a.model.cdf(6.0) - a.model.cdf(5.0)
        expected_b = b.model.cdf(s_b) - b.model.cdf(5.0)
        assert plan.gain_loss["A"] == pytest.approx(expected_a, abs=1e-12)
        assert plan.gain_loss["B"] == pytest.approx(expected_b, abs=1e-12)
        assert plan.net_gain == pytest.approx(
            0.5 * expected_a + 0.5 * expected_b, abs=1e-12)

    def test_identical_models_never_gain_above_median(self):
        """With s0 at or past the median the CDF is concave: no split wins."""
        model = LogNormalModel(math.log(6.0), 0.5)
        a = GroupSpec("A", 0.5, model)
        b = GroupSpec("B", 0.5, model)
        for s0 in (6.0, 7.0, 9.0):
            for s_a in np.linspace(0.0, 2.0 * s0, 80):
                plan = redistribution_gains(a, b, s0=s0, s_a=float(s_a))
                assert plan.net_gain <= 1e-12

    def test_identical_models_can_gain_below_median(self):
        """Below the median the CDF is convex, so an extreme split beats
        uniform even for identical groups; pinned by direct CDF arithmetic."""
        model = LogNormalModel(math.log(6.0), 0.5)
        a = GroupSpec("A", 0.5, model)
        b = GroupSpec("B", 0.5, model)
        plan = redistribution_gains(a, b, s0=5.0, s_a=0.0)
        expected = 0.5 * (model.cdf(10.0) - model.cdf(5.0)) - 0.5 * model.cdf(5.0)
        assert expected > 0.06
        assert plan.net_gain == pytest.approx(expected, abs=1e-12)

    def test_infeasible_split(self):
        a, b = self.a_b()
        with pytest.raises(InfeasibleSplit):
            redistribution_gains(a, b, s0=5.0, s_a=10.5)


class TestOptimizeSplit:
    def test_identical_models_stay_uniform(self):
        """Identical groups with s0 past the median: the uniform split wins
        and ties break toward it exactly."""
        model = LogNormalModel(math.log(5.0), 0.4)
        a = GroupSpec("A", 0.5, model)
        b = GroupSpec("B", 0.5, model)
        plan = optimize_split(a, b, s0=6.0)
        assert plan.speeds["A"] == pytest.approx(6.0, abs=1e-9)
        assert plan.speeds["B"] == pytest.approx(6.0, abs=1e-9)
        assert plan.net_gain == 0.0

    def test_identical_models_below_median_split_apart(self):
        """Below the median even identical groups profit from splitting; the
        optimizer must find at least the grid-verified boundary gain."""
        model = LogNormalModel(math.log(6.0), 0.5)
        a = GroupSpec("A", 0.5, model)
        b = GroupSpec("B", 0.5, model)
        plan = optimize_split(a, b, s0=5.0)
        assert plan.net_gain >= 0.065
        assert min(plan.speeds.values()) == pytest.approx(0.0, abs=1e-3)

    def test_easy_group_sped_up(self):
        """With s0 above both medians, the faster-reading group gets more."""
        a = GroupSpec("A", 0.5, LogNormalModel(math.log(7.0), 0.35))
        b = GroupSpec("B", 0.5, LogNormalModel(math.log(3.5), 0.35))
        s0 = 9.0
        plan = optimize_split(a, b, s0)
        assert plan.speeds["A"] > s0 > plan.speeds["B"]
        # independent grid-search oracle at 1e-4 resolution
        grid = np.arange(0.0, s0 / 0.5, 1e-4)
        objective = 0.5 * np.array([a.model.cdf(float(s)) for s in grid]) + \
            0.5 * np.array([b.model.cdf((s0 - 0.5 * float(s)) / 0.5) for s in grid])
        best = float(grid[int(np.argmax(objective))])
        assert plan.speeds["A"] == pytest.approx(best, abs=1e-3)

    def test_dominates_random_probes(self):
        rng = np.random.default_rng(21)
        a = GroupSpec("A", 0.6, LogNormalModel(math.log(6.0), 0.5))
        b = GroupSpec("B", 0.4, LogNormalModel(math.log(3.0), 0.7))
        s0 = 4.5
        plan = optimize_split(a, b, s0)
        assert plan.net_gain >= -1e-12
        for _ in range(100):
            s_a = float(rng.uniform(0.0, s0 / 0.6))
            probe = redistribution_gains(a, b, s0, s_a)
            assert plan.net_gain >= probe.net_gain - 1e-9

    def test_interior_optimum_density_match(self):
        """First-order condition: the two densities agree at the optimum."""
        a = GroupSpec("A", 0.5, LogNormalModel(math.log(7.0), 0.35))
        b = GroupSpec("B", 0.5, LogNormalModel(math.log(3.5), 0.35))
        plan = optimize_split(a, b, s0=6.0)
        pa = a.model.pdf(plan.speeds["A"])
        pb = b.model.pdf(plan.speeds["B"])
        assert pa == pytest.approx(pb, rel=1e-4)


def test_load_groups(tmp_path):
    path = tmp_path / "groups.json"
    path.write_text(json.dumps([
        {"name": "a", "proportion": 0.5, "mu": 1.0, "sigma": 0.4},
        {"name": "b", "proportion": 0.5, "mu": 1.5, "sigma": 0.5},
    ]), encoding="utf-8")
    groups = load_groups(str(path))
    assert [g.name for g in groups] == ["a", "b"]
    assert groups[0].model == LogNormalModel(1.0, 0.4)
    assert groups[1].proportion == 0.5
