"""Render the simulation study as figures next to the delimited tables."""

from __future__ import annotations

import math
import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import pest, simulator
from .readmodel import density_intersection
from .simulator import PassageRecord, SimPoint

_METHOD_STYLE = {
    simulator.METHOD_UNIFORM: dict(color="0.4", marker="o", label="uniform"),
    simulator.METHOD_FOG: dict(color="tab:orange", marker="s", label="fog"),
    simulator.METHOD_TAG: dict(color="tab:blue", marker="^", label="tag oracle"),
}


def plot_savings_curve(points: Sequence[SimPoint], path: str) -> None:
    """Average stream speed (compute proxy) against the target alignment rate."""
    fig, (ax_wps, ax_save) = plt.subplots(1, 2, figsize=(9, 3.6))
    for method in simulator.METHODS:
        rows = [p for p in points if p.method == method]
        if not rows:
            continue
        xs = [p.target_srar for p in rows]
        ax_wps.plot(xs, [p.avg_speed_wps for p in rows], **_METHOD_STYLE[method])
        if method != simulator.METHOD_UNIFORM:
            ax_save.plot(xs, [100.0 * p.saving_vs_uniform for p in rows],
                         **_METHOD_STYLE[method])
    ax_wps.set_xlabel("target alignment rate")
    ax_wps.set_ylabel("avg stream speed (WPS)")
    ax_wps.legend()
    ax_save.set_xlabel("target alignment rate")
    ax_save.set_ylabel("saving vs uniform (%)")
    ax_save.axhline(0.0, color="0.8", lw=0.8)
    ax_save.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_densities(passages: Sequence[PassageRecord], path: str) -> None:
    """Reading-speed densities per passage, with pairwise crossings marked."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    hi = max(p.model.quantile(0.995) for p in passages)
    xs = np.linspace(1e-3, hi, 400)
    for p in passages:
        ax.plot(xs, [p.model.pdf(x) for x in xs], lw=1.0, label=p.id)
    crossings = []
    for i, a in enumerate(passages):
        for b in passages[i + 1:]:
            if a.model == b.model:
                continue
            crossings.extend(x for x in density_intersection(a.model, b.model)
                             if math.isfinite(x) and x <= hi)
    for x in crossings:
        ax.axvline(x, color="0.85", lw=0.6, zorder=0)
    ax.set_xlabel("reading speed (WPS)")
    ax.set_ylabel("density")
    if len(passages) <= 10:
        ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_staircase(true_speed: float, seed: int, path: str) -> None:
    """One simulated calibration run against a known comfortable speed."""
    transcript = pest.simulate_reader(true_speed,
                                      pest.PestConfig(rng_seed=seed))
    steps = [row["step"] for row in transcript]
    speeds = [row["speed"] for row in transcript]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.step(steps, speeds, where="post", color="tab:blue")
    ax.plot(steps, speeds, "o", color="tab:blue", ms=3)
    ax.axhline(true_speed, color="tab:red", lw=0.8, ls="--",
               label=f"true speed {true_speed:g} WPS")
    ax.set_xlabel("adjustment")
    ax.set_ylabel("stream speed (WPS)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(
    passages: Sequence[PassageRecord],
    targets: Sequence[float],
    alpha: float,
    out_dir: str,
    staircase_true_speed: float = 6.0,
    seed: int = 0,
) -> list[str]:
    """Write table.json/table.csv plus the three figures; return the paths."""
    os.makedirs(out_dir, exist_ok=True)
    points = simulator.savings_table(passages, targets, alpha)
    written = []
    for name, writer in (("table.json", simulator.write_table_json),
                         ("table.csv", simulator.write_table_csv)):
        target = os.path.join(out_dir, name)
        writer(points, target)
        written.append(target)
    fig_jobs = (
        ("savings_curve.png", lambda p: plot_savings_curve(points, p)),
        ("densities.png", lambda p: plot_densities(passages, p)),
        ("staircase.png",
         lambda p: plot_staircase(staircase_true_speed, seed, p)),
    )
    for name, job in fig_jobs:
        target = os.path.join(out_dir, name)
        job(target)
        written.append(target)
    return written
