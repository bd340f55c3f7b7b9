"""Adaptive staircase calibration of comfortable reading speed.

The procedure starts at a random speed, moves by a step delta_v on each
"faster"/"slower" choice, and halves the step (never below 0.2 WPS) every
time the reader reverses direction.  After seven adjustments the reader may
accept the current speed as comfortable.  State transitions are pure: both
the streaming server and the offline simulator drive the same functions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .errors import AlreadyConverged, BadConfig, TooEarly

Choice = Literal["faster", "slower"]
FASTER: Choice = "faster"
SLOWER: Choice = "slower"

SPEED_FLOOR = 0.2


@dataclass(frozen=True)
class PestConfig:
    """Tunables of the staircase; the defaults mirror the study procedure."""

    initial_speed_range: tuple[float, float] = (3.0, 8.0)
    initial_delta_v: float = 2.0
    delta_floor: float = 0.2
    same_option_after: int = 7
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        lo, hi = self.initial_speed_range
        if not (0.0 < lo < hi):
            raise BadConfig(f"bad initial speed range: {self.initial_speed_range!r}")
        if self.initial_delta_v <= 0.0 or self.delta_floor <= 0.0:
            raise BadConfig("steps must be positive")
        if self.initial_delta_v < self.delta_floor:
            raise BadConfig("initial step below the floor")
        if self.same_option_after < 1:
            raise BadConfig("same_option_after must be >= 1")


@dataclass(frozen=True)
class PestState:
    current_speed: float
    delta_v: float
    previous_choice: Choice | None
    adjustment_count: int
    converged: bool = False
    final_speed: float | None = None
    delta_floor: float = 0.2
    same_option_after: int = 7


def start(config: PestConfig, rng: np.random.Generator | None = None) -> PestState:
    """Draw the initial speed uniformly from the configured range."""
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    lo, hi = config.initial_speed_range
    speed = lo + (hi - lo) * float(rng.random())
    return PestState(
        current_speed=speed,
        delta_v=config.initial_delta_v,
        previous_choice=None,
        adjustment_count=0,
        delta_floor=config.delta_floor,
        same_option_after=config.same_option_after,
    )


def step(state: PestState, choice: Choice) -> PestState:
    """Apply one faster/slower choice: move first, then shrink on reversal."""
    if state.converged:
        raise AlreadyConverged("staircase already accepted a speed")
    if choice not in (FASTER, SLOWER):
        raise ValueError(f"choice must be 'faster' or 'slower', got {choice!r}")
    if choice == FASTER:
        speed = state.current_speed + state.delta_v
    else:
        speed = max(state.current_speed - state.delta_v, SPEED_FLOOR)
    reversal = state.previous_choice is not None and choice != state.previous_choice
    delta_v = max(state.delta_v / 2.0, state.delta_floor) if reversal else state.delta_v
    return replace(
        state,
        current_speed=speed,
        delta_v=delta_v,
        previous_choice=choice,
        adjustment_count=state.adjustment_count + 1,
    )


def accept_same(state: PestState) -> PestState:
    """Accept the current speed as comfortable; allowed after 7 adjustments."""
    if state.converged:
        raise AlreadyConverged("staircase already accepted a speed")
    if state.adjustment_count < state.same_option_after:
        raise TooEarly(
            f"{state.adjustment_count} adjustments; "
            f"need {state.same_option_after}"
        )
    return replace(state, converged=True, final_speed=state.current_speed)


def simulate_reader(
    true_speed: float,
    config: PestConfig,
    accept_tolerance: float = 0.25,
    max_steps: int = 100,
) -> list[dict]:
    """Drive the staircase with a deterministic reader and return a transcript.

    The reader asks for "faster" exactly when the current speed is below its
    true comfortable speed and accepts once the comfort option is available
    and the speed is within accept_tolerance.  Each transcript row is
    {"step", "speed", "delta_v", "choice"}.
    """
    state = start(config)
    rows = [
        {
            "step": 0,
            "speed": state.current_speed,
            "delta_v": state.delta_v,
            "choice": None,
        }
    ]
    for i in range(1, max_steps + 1):
        if (
            state.adjustment_count >= state.same_option_after
            and abs(state.current_speed - true_speed) <= accept_tolerance
        ):
            state = accept_same(state)
            rows.append(
                {
                    "step": i,
                    "speed": state.current_speed,
                    "delta_v": state.delta_v,
                    "choice": "same",
                }
            )
            break
        choice = FASTER if state.current_speed < true_speed else SLOWER
        state = step(state, choice)
        rows.append(
            {
                "step": i,
                "speed": state.current_speed,
                "delta_v": state.delta_v,
                "choice": choice,
            }
        )
    return rows
