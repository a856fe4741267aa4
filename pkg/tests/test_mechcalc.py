"""Design calculator checks: material constants, spring stiffness, servo sizing.

Expected numbers are recomputed from the closed-form expressions inline, so a
regression in the module shows up as a disagreement with plain arithmetic.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evertip.mechcalc import (
    SERVO_CATALOG,
    SPOOL_DEFAULT,
    SPRING_304,
    ActuationRequirement,
    FeasibilityReport,
    ServoSpec,
    SpoolSpec,
    SpringSpec,
    dump_servo_catalog,
    format_report,
    load_servo_catalog,
    required_torque,
    servo_feasibility,
    shear_modulus,
    spool_travel,
    spring_constant,
    spring_force,
    stall_torque_si,
)


# ------------------------------------------------------------- material --


def test_shear_modulus_304_stainless():
    g = shear_modulus(190e9, 0.27)
    assert g == pytest.approx(190e9 / 2.54)
    assert g == pytest.approx(74.8e9, abs=0.1e9)


def test_shear_modulus_zero_poisson_is_half_e():
    assert shear_modulus(1e9, 0.0) == 0.5e9
    assert shear_modulus(2.6, 0.3) == pytest.approx(1.0)


def test_shear_modulus_rejects_bad_inputs():
    with pytest.raises(ValueError):
        shear_modulus(-1.0, 0.3)
    with pytest.raises(ValueError):
        shear_modulus(1e9, 0.5)
    with pytest.raises(ValueError):
        shear_modulus(1e9, -0.01)


# --------------------------------------------------------------- spring --


def test_spring_constant_default_band():
    k = spring_constant(SPRING_304)
    d = SPRING_304.wire_diameter
    dm = SPRING_304.outer_diameter - SPRING_304.wire_diameter
    g = shear_modulus(SPRING_304.young_modulus, SPRING_304.poisson_ratio)
    assert k == pytest.approx(g * d**4 / (8 * SPRING_304.active_coils * dm**3))
    assert 583.0 <= k <= 590.0


def test_spring_constant_with_datasheet_g():
    # datasheets round G for 304 up to 75 GPa; the override reproduces that
    k = spring_constant(SPRING_304, shear_modulus_override=75e9)
    assert k == pytest.approx(586.9, abs=0.1)
    with pytest.raises(ValueError):
        spring_constant(SPRING_304, shear_modulus_override=-5.0)


def test_spring_constant_doubled_coils_halves_k():
    base = spring_constant(SPRING_304)
    doubled = SpringSpec(
        SPRING_304.young_modulus,
        SPRING_304.poisson_ratio,
        SPRING_304.wire_diameter,
        SPRING_304.outer_diameter,
        SPRING_304.active_coils * 2,
        SPRING_304.free_length,
    )
    assert spring_constant(doubled) == pytest.approx(base / 2)


def test_spring_spec_validation():
    with pytest.raises(ValueError):
        SpringSpec(190e9, 0.27, 6e-3, 0.5e-3, 6, 20e-3)  # wire > outer
    with pytest.raises(ValueError):
        SpringSpec(190e9, 0.27, 0.5e-3, 6e-3, 0, 20e-3)


def test_spring_force_values():
    assert spring_force(587.0, 5e-3) == pytest.approx(2.935, abs=1e-3)
    assert spring_force(586.0, 2.9e-3) == pytest.approx(1.699, abs=1e-3)
    # compression direction does not change the magnitude
    assert spring_force(500.0, -2e-3) == spring_force(500.0, 2e-3)
    with pytest.raises(ValueError):
        spring_force(-1.0, 1e-3)


# --------------------------------------------------------------- torque --


def test_required_torque_stack_of_five():
    req = ActuationRequirement(total_force=14.75, required_displacement=14.5e-3)
    assert required_torque(req, SPOOL_DEFAULT) == pytest.approx(0.184, abs=1e-3)
    assert required_torque(req, SPOOL_DEFAULT) == pytest.approx(14.75 * 12.5e-3)


def test_required_torque_from_spring_forces():
    # five springs at the working point, unrounded
    force = spring_force(2.935 / 5e-3, 5e-3) * 5
    req = ActuationRequirement(force, 14.5e-3)
    assert required_torque(req, SPOOL_DEFAULT) == pytest.approx(0.1834375)


def test_stall_torque_conversion():
    assert stall_torque_si(1.2) == pytest.approx(0.1177, abs=1e-4)
    assert stall_torque_si(2.0) == pytest.approx(0.1962, abs=1e-4)
    assert stall_torque_si(0.0) == 0.0
    with pytest.raises(ValueError):
        stall_torque_si(-0.1)


def test_spool_travel_values():
    assert spool_travel(SPOOL_DEFAULT, 270.0) == pytest.approx(58.9e-3, abs=0.1e-3)
    assert spool_travel(SPOOL_DEFAULT, 180.0) == pytest.approx(39.27e-3, abs=0.01e-3)
    r = 7e-3
    assert spool_travel(SpoolSpec(r), 360.0) == pytest.approx(2 * math.pi * r)


# ---------------------------------------------------------- feasibility --


def _default_requirement():
    return ActuationRequirement(total_force=14.75, required_displacement=14.5e-3)


def test_feasibility_selects_dm_s0090md_at_6v():
    report = servo_feasibility(SERVO_CATALOG, _default_requirement(), SPOOL_DEFAULT)
    assert report.supply == "6V"
    assert report.selected == "DM-S0090MD"
    assert not report.entry("DS-S006L").feasible
    assert not report.entry("DS-S006L").torque_ok


def test_feasibility_mg90s_passes_but_loses():
    report = servo_feasibility(SERVO_CATALOG, _default_requirement(), SPOOL_DEFAULT)
    mg = report.entry("MG90s")
    assert mg.feasible  # enough torque and travel at 180 degrees
    assert report.selected != "MG90s"  # smaller operating angle loses


def test_feasibility_empty_catalog_rejected():
    with pytest.raises(ValueError):
        servo_feasibility([], _default_requirement(), SPOOL_DEFAULT)


def test_feasibility_no_winner_when_all_too_weak():
    weak = [ServoSpec("tiny", 270, 0.01, 0.01)]
    report = servo_feasibility(weak, _default_requirement(), SPOOL_DEFAULT)
    assert report.selected is None
    assert not report.entries[0].torque_ok


def test_feasibility_travel_gate():
    # huge torque, but a 60 degree horn winds only 13.1 mm on this spool
    servo = ServoSpec("stubby", 60, 10.0, 10.0)
    report = servo_feasibility([servo], _default_requirement(), SPOOL_DEFAULT)
    assert report.entries[0].torque_ok
    assert not report.entries[0].travel_ok
    assert report.selected is None


def test_format_report_lists_every_servo():
    report = servo_feasibility(SERVO_CATALOG, _default_requirement(), SPOOL_DEFAULT)
    text = format_report(report)
    for servo in SERVO_CATALOG:
        assert servo.name in text
    assert "DM-S0090MD" in text.splitlines()[-1] or "selected" in text


def test_servo_catalog_csv_round_trip(tmp_path):
    text = dump_servo_catalog(SERVO_CATALOG)
    assert load_servo_catalog(text) == SERVO_CATALOG
    p = tmp_path / "catalog.csv"
    p.write_text(text)
    assert load_servo_catalog(p) == SERVO_CATALOG


# ----------------------------------------------------------- properties --

wire = st.floats(min_value=0.1e-3, max_value=1.5e-3)
poisson = st.floats(min_value=0.0, max_value=0.49, exclude_max=True)


@settings(max_examples=60, deadline=None)
@given(d=wire, bump=st.floats(min_value=1.01, max_value=2.0))
def test_stiffness_increases_with_wire_diameter(d, bump):
    thicker = min(d * bump, 5.9e-3)
    a = SpringSpec(190e9, 0.27, d, 6e-3, 6, 20e-3)
    b = SpringSpec(190e9, 0.27, thicker, 6e-3, 6, 20e-3)
    if thicker > d:
        assert spring_constant(b) > spring_constant(a)


@settings(max_examples=60, deadline=None)
@given(coils=st.integers(min_value=1, max_value=40))
def test_stiffness_decreases_with_coils(coils):
    a = SpringSpec(190e9, 0.27, 0.5e-3, 6e-3, coils, 20e-3)
    b = SpringSpec(190e9, 0.27, 0.5e-3, 6e-3, coils + 1, 20e-3)
    assert spring_constant(b) < spring_constant(a)


@settings(max_examples=60, deadline=None)
@given(outer=st.floats(min_value=3e-3, max_value=12e-3))
def test_stiffness_decreases_with_outer_diameter(outer):
    a = SpringSpec(190e9, 0.27, 0.5e-3, outer, 6, 20e-3)
    b = SpringSpec(190e9, 0.27, 0.5e-3, outer + 1e-3, 6, 20e-3)
    assert spring_constant(b) < spring_constant(a)


@settings(max_examples=100, deadline=None)
@given(e=st.floats(min_value=1e6, max_value=1e12), v=poisson)
def test_shear_below_young_above_half(e, v):
    g = shear_modulus(e, v)
    assert e / 3 < g <= e / 2
    if v > 1e-12:  # below that 1 + v rounds to 1 and G == E/2 exactly
        assert g < e / 2


@settings(max_examples=100, deadline=None)
@given(
    k=st.floats(min_value=0.0, max_value=1e5),
    x=st.floats(min_value=-0.05, max_value=0.05),
)
def test_spring_force_linear(k, x):
    assert spring_force(k, 2 * x) == pytest.approx(2 * spring_force(k, x), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(min_value=0.2, max_value=8.0))
def test_selection_invariant_under_torque_scaling(scale):
    # scaling every stall torque by the same positive factor cannot change
    # which feasible servo wins, as long as the same set stays feasible
    base = servo_feasibility(SERVO_CATALOG, _default_requirement(), SPOOL_DEFAULT)
    scaled_catalog = [
        ServoSpec(s.name, s.operating_angle_deg, s.torque_4v8_kgcm * scale, s.torque_6v_kgcm * scale)
        for s in SERVO_CATALOG
    ]
    scaled_req = ActuationRequirement(
        _default_requirement().total_force * scale,
        _default_requirement().required_displacement,
    )
    scaled = servo_feasibility(scaled_catalog, scaled_req, SPOOL_DEFAULT)
    assert scaled.selected == base.selected
    assert isinstance(scaled, FeasibilityReport)
