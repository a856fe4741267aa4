"""Pressure-driven growth and retraction of the eversion body.

The body everts: new material extrudes at the tip while the already-everted
outer wall stays put. That is the load-bearing invariant here, kept as the
wall ledger: every (material coordinate, world position) pair is frozen the
moment that material everts and is only ever popped again by retraction,
never moved.

Pressures are kPa, lengths m, times s. All operations are pure: they return
a new state and never mutate their input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

GROWING = "growing"
HOLDING = "holding"
RETRACTING = "retracting"
BLOCKED = "blocked"
STATUSES = (GROWING, HOLDING, RETRACTING, BLOCKED)


class LedgerEntry(NamedTuple):
    material_coordinate: float
    world_position: tuple[float, float, float]


@dataclass(frozen=True)
class EversionState:
    pressure: float = 0.0
    target_pressure: float = 0.0
    everted_length: float = 0.0
    max_length: float = 5.0
    wall_ledger: tuple[LedgerEntry, ...] = ()
    status: str = HOLDING

    def __post_init__(self):
        if self.pressure < 0:
            raise ValueError(f"pressure must be >= 0, got {self.pressure}")
        if self.target_pressure < 0:
            raise ValueError(f"target_pressure must be >= 0, got {self.target_pressure}")
        if self.max_length <= 0:
            raise ValueError(f"max_length must be > 0, got {self.max_length}")
        if not 0 <= self.everted_length <= self.max_length:
            raise ValueError(
                f"everted_length {self.everted_length} outside [0, {self.max_length}]"
            )
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        coords = [e.material_coordinate for e in self.wall_ledger]
        if any(b <= a for a, b in zip(coords, coords[1:])):
            raise ValueError("wall_ledger material coordinates must strictly increase")


def pressure_step(state: EversionState, dt: float, regulator_tau: float) -> EversionState:
    """First-order regulator response: pressure relaxes toward the target
    by a factor (1 - e^(-dt/tau)) per step."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if regulator_tau <= 0:
        raise ValueError(f"regulator_tau must be > 0, got {regulator_tau}")
    gain = 1.0 - math.exp(-dt / regulator_tau)
    return replace(state, pressure=state.pressure + (state.target_pressure - state.pressure) * gain)


def growth_demand(state: EversionState, dt: float, rate_coeff: float, threshold: float) -> float:
    """Unclamped growth increment for one step: rate * max(0, p - p0) * dt."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return rate_coeff * max(0.0, state.pressure - threshold) * dt


def growth_step(
    state: EversionState,
    dt: float,
    rate_coeff: float,
    threshold: float,
    *,
    free_length: float = math.inf,
    tip_point: tuple[float, float, float] | None = None,
) -> EversionState:
    """Advance eversion by one step.

    The demanded increment is clamped by the remaining body material
    (max_length) and by free_length, the unobstructed distance ahead of the
    tip (the environment: dead end, junction refusal, terminal wall).
    tip_point is the world position of the newly everted wall material;
    when the caller tracks no environment it defaults to a straight run
    along +x. Status lands on:

      growing  - some material everted this step
      holding  - nothing demanded (pressure at or below threshold)
      blocked  - growth demanded but clamped to less than demanded
    """
    demand = growth_demand(state, dt, rate_coeff, threshold)
    grown = min(demand, state.max_length - state.everted_length, free_length)
    grown = max(0.0, grown)
    if demand <= 0.0:
        status = HOLDING
    elif grown < demand:
        status = BLOCKED
    else:
        status = GROWING
    if grown == 0.0:
        return replace(state, status=status)
    new_length = state.everted_length + grown
    point = tip_point if tip_point is not None else (new_length, 0.0, 0.0)
    entry = LedgerEntry(new_length, (float(point[0]), float(point[1]), float(point[2])))
    return replace(
        state,
        everted_length=new_length,
        wall_ledger=state.wall_ledger + (entry,),
        status=status,
    )


def retract_state(state: EversionState, delta_l: float) -> EversionState:
    """Pull back delta_l of everted body, popping ledger entries past the
    new length. Rejects retraction beyond what is everted."""
    if delta_l < 0:
        raise ValueError(f"retraction must be >= 0, got {delta_l}")
    if delta_l > state.everted_length + 1e-12:
        raise ValueError(
            f"cannot retract {delta_l} m, only {state.everted_length} m everted"
        )
    if delta_l == 0.0:
        return state
    new_length = max(0.0, state.everted_length - delta_l)
    keep = 0
    for keep, entry in enumerate(state.wall_ledger, start=1):
        if entry.material_coordinate > new_length + 1e-15:
            keep -= 1
            break
    return replace(
        state,
        everted_length=new_length,
        wall_ledger=state.wall_ledger[:keep],
        status=RETRACTING,
    )
