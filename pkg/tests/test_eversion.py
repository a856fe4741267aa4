"""Eversion growth state machine and the append-only wall ledger."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evertip.eversion import (
    EversionState,
    LedgerEntry,
    growth_step,
    pressure_step,
    retract_state,
)


def fresh(**kw):
    return EversionState(**kw)


# --------------------------------------------------------------- pressure --


def test_pressure_first_order_step():
    s = fresh(target_pressure=100.0)
    s = pressure_step(s, dt=1.0, regulator_tau=1.0)
    assert s.pressure == pytest.approx(100.0 * (1 - math.exp(-1.0)))


def test_pressure_already_at_target_is_fixed_point():
    s = fresh(pressure=42.0, target_pressure=42.0)
    assert pressure_step(s, 0.1, 0.2).pressure == 42.0


def test_pressure_steps_compose():
    # 100 small steps against one big step: the exponential telescopes
    s_small = fresh(target_pressure=80.0)
    for _ in range(100):
        s_small = pressure_step(s_small, 0.01, 1.0)
    s_big = pressure_step(fresh(target_pressure=80.0), 1.0, 1.0)
    assert s_small.pressure == pytest.approx(s_big.pressure, abs=1e-9)


def test_pressure_approaches_target_monotonically():
    s = fresh(target_pressure=60.0)
    last = 0.0
    for _ in range(50):
        s = pressure_step(s, 0.05, 0.15)
        assert last < s.pressure < 60.0 + 1e-12
        last = s.pressure


# ----------------------------------------------------------------- growth --


def test_growth_rate_above_threshold():
    s = fresh(pressure=60.0, target_pressure=60.0)
    s = growth_step(s, dt=0.1, rate_coeff=0.01, threshold=10.0)
    assert s.everted_length == pytest.approx(0.05)  # 0.01 * 50 * 0.1
    assert s.status == "growing"
    assert len(s.wall_ledger) == 1
    assert s.wall_ledger[0].material_coordinate == pytest.approx(0.05)


def test_growth_below_threshold_holds():
    s = fresh(pressure=5.0, target_pressure=5.0)
    s2 = growth_step(s, 0.1, 0.01, 10.0)
    assert s2.everted_length == 0.0
    assert s2.status == "holding"
    assert s2.wall_ledger == ()


def test_growth_stops_at_max_length():
    s = fresh(pressure=100.0, target_pressure=100.0, everted_length=1.0, max_length=1.0)
    s2 = growth_step(s, 0.1, 0.05, 10.0)
    assert s2.everted_length == 1.0
    assert s2.status == "blocked"


def test_growth_respects_free_length():
    # a wall 2 mm ahead lets only 2 mm of the demanded growth through
    s = fresh(pressure=100.0, target_pressure=100.0)
    s2 = growth_step(s, 1.0, 0.01, 0.0, free_length=2e-3)
    assert s2.everted_length == pytest.approx(2e-3)
    assert s2.status == "blocked"


def test_growth_records_tip_point():
    s = fresh(pressure=50.0, target_pressure=50.0)
    s2 = growth_step(s, 0.1, 0.01, 0.0, tip_point=(1.0, 2.0, 3.0))
    assert s2.wall_ledger[-1].world_position == (1.0, 2.0, 3.0)


def test_ledger_is_append_only_across_growth():
    s = fresh(pressure=60.0, target_pressure=60.0)
    s = growth_step(s, 0.1, 0.01, 10.0)
    first = s.wall_ledger
    s = growth_step(s, 0.1, 0.01, 10.0)
    assert s.wall_ledger[: len(first)] == first
    assert len(s.wall_ledger) == len(first) + 1


# ---------------------------------------------------------------- retract --


def test_retract_zero_is_identity():
    s = fresh(pressure=60.0, target_pressure=60.0)
    s = growth_step(s, 0.1, 0.01, 10.0)
    s2 = retract_state(s, 0.0)
    assert s2.everted_length == s.everted_length
    assert s2.wall_ledger == s.wall_ledger


def test_retract_pops_exactly_the_overhang():
    s = fresh(pressure=60.0, target_pressure=60.0)
    for _ in range(5):
        s = growth_step(s, 0.1, 0.01, 10.0)
    assert len(s.wall_ledger) == 5
    total = s.everted_length
    s2 = retract_state(s, total / 2)
    assert all(e.material_coordinate <= s2.everted_length + 1e-12 for e in s2.wall_ledger)
    s3 = retract_state(s2, s2.everted_length)
    assert s3.everted_length == 0.0
    assert s3.wall_ledger == ()
    assert s3.status == "retracting"


def test_retract_beyond_everted_rejected():
    s = fresh(pressure=60.0, target_pressure=60.0)
    s = growth_step(s, 0.1, 0.01, 10.0)
    with pytest.raises(ValueError):
        retract_state(s, s.everted_length + 1e-3)


def test_retract_keeps_surviving_entries_identical():
    s = fresh(pressure=60.0, target_pressure=60.0)
    for _ in range(10):
        s = growth_step(s, 0.1, 0.01, 10.0)
    kept = retract_state(s, 0.12).wall_ledger
    assert kept == s.wall_ledger[: len(kept)]
    for a, b in zip(kept, s.wall_ledger):
        assert a is b  # popped-only, never rebuilt


def test_state_validation():
    with pytest.raises(ValueError):
        fresh(everted_length=-0.1)
    with pytest.raises(ValueError):
        fresh(max_length=0.0)
    with pytest.raises(ValueError):
        EversionState(wall_ledger=(LedgerEntry(0.2, (0, 0, 0)), LedgerEntry(0.1, (0, 0, 0))))


# -------------------------------------------------------------- properties --


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=120))
def test_random_walk_ledger_prefix_identity(moves):
    """Growth appends, retraction pops; the surviving prefix is never rewritten."""
    s = fresh(pressure=80.0, target_pressure=80.0)
    for m in moves:
        prev = s.wall_ledger
        if m < 7:
            s = growth_step(s, 0.05, 0.01, 10.0, tip_point=(float(m), 0.0, 0.0))
            assert s.wall_ledger[: len(prev)] == prev
        elif s.everted_length > 0:
            s = retract_state(s, s.everted_length * (m - 6) / 4.0)
            assert prev[: len(s.wall_ledger)] == s.wall_ledger
        coords = [e.material_coordinate for e in s.wall_ledger]
        assert coords == sorted(set(coords))  # strictly increasing
        assert all(c <= s.everted_length + 1e-9 for c in coords)
