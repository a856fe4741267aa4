"""Tip kinematics: bend discretization, tendon pulls, servo mapping, forward chain."""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from evertip.kinematics import (
    BEND_STRAIGHT,
    BendCommand,
    TipGeometry,
    bend_from_displacements,
    disc_frames,
    displacements_from_servo_angles,
    forward_tip_pose,
    joystick_to_bend,
    per_joint_angle,
    servo_angles_for,
    solve_continuum,
    tendon_displacements,
    tendon_polyline_length,
)
from evertip.mechcalc import SERVO_CATALOG, SPOOL_DEFAULT, spool_travel

GEO = TipGeometry()
SERVO = next(s for s in SERVO_CATALOG if s.name == "DM-S0090MD")


def test_per_joint_angle_even_share():
    assert per_joint_angle(90.0, GEO).degrees == 18.0
    assert per_joint_angle(90.0, GEO).clamped is False
    assert per_joint_angle(45.0, GEO).degrees == 9.0


def test_per_joint_angle_clamps_out_of_range():
    over = per_joint_angle(120.0, GEO)
    assert over.degrees == 18.0  # parked at max bend
    assert over.clamped is True
    under = per_joint_angle(-5.0, GEO)
    assert under.degrees == 0.0
    assert under.clamped is True


def test_tendon_displacements_aligned_bend():
    d = tendon_displacements(BendCommand(90.0, 0.0), GEO)
    # tendon 0 takes the full r * theta pull, the others stay slack
    assert d[0] == pytest.approx(GEO.tendon_pitch_radius * math.pi / 2)
    assert d[0] == pytest.approx(14.5e-3, abs=0.01e-3)
    # cos(+-90) is only float-zero, so the side tendons carry ~1e-18 m
    assert d[1] == pytest.approx(0.0, abs=1e-15)
    assert d[3] == pytest.approx(0.0, abs=1e-15)
    assert d[2] == 0.0  # opposite side would feed out


def test_tendon_displacements_diagonal_bend():
    d = tendon_displacements(BendCommand(60.0, 45.0), GEO)
    expect = GEO.tendon_pitch_radius * math.radians(60.0) * math.cos(math.radians(45.0))
    assert d[0] == pytest.approx(expect)
    assert d[1] == pytest.approx(expect)
    assert d[2] == 0.0 and d[3] == 0.0


def test_servo_angle_mapping():
    angles = servo_angles_for([14.5e-3, 0.0, 0.0, 0.0], SPOOL_DEFAULT, SERVO)
    assert angles.angles_deg[0] == pytest.approx(math.degrees(14.5e-3 / 12.5e-3))
    assert angles.angles_deg[1:] == (0.0, 0.0, 0.0)
    assert angles.clamped == (False, False, False, False)


def test_servo_angle_saturates_at_operating_angle():
    full = spool_travel(SPOOL_DEFAULT, SERVO.operating_angle_deg)
    angles = servo_angles_for([full * 1.2, 0.0, 0.0, 0.0], SPOOL_DEFAULT, SERVO)
    assert angles.angles_deg[0] == SERVO.operating_angle_deg
    assert angles.clamped[0] is True
    with pytest.raises(ValueError):
        servo_angles_for([-1e-6, 0, 0, 0], SPOOL_DEFAULT, SERVO)


def test_displacement_round_trip_through_servo():
    pulls = tendon_displacements(BendCommand(70.0, 30.0), GEO)
    angles = servo_angles_for(pulls, SPOOL_DEFAULT, SERVO)
    back = displacements_from_servo_angles(angles.angles_deg, SPOOL_DEFAULT)
    assert back == pytest.approx(pulls, abs=1e-12)


def test_bend_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(500):
        cmd = BendCommand(float(rng.uniform(0.01, 90.0)), float(rng.uniform(0.0, 360.0)))
        got = bend_from_displacements(tendon_displacements(cmd, GEO), GEO)
        assert abs(got.magnitude_deg - cmd.magnitude_deg) < 1e-6
        err = (got.direction_deg - cmd.direction_deg + 180.0) % 360.0 - 180.0
        assert abs(err) < 1e-6


def test_joystick_mapping():
    assert joystick_to_bend(0.0, 0.0, GEO) == BEND_STRAIGHT
    full = joystick_to_bend(1.0, 0.0, GEO)
    assert full.magnitude_deg == 90.0 and full.direction_deg == 0.0
    diag = joystick_to_bend(0.5, 0.5, GEO)
    assert diag.magnitude_deg == pytest.approx(90.0 * math.hypot(0.5, 0.5))
    assert diag.direction_deg == pytest.approx(45.0)
    down = joystick_to_bend(0.0, -1.0, GEO)
    assert down.direction_deg == pytest.approx(270.0)
    # deflections past the rim clamp to full bend
    assert joystick_to_bend(3.0, 4.0, GEO).magnitude_deg == 90.0


def test_forward_straight_pose():
    pose = forward_tip_pose(BEND_STRAIGHT, GEO)
    assert pose.position == pytest.approx((0.0, 0.0, GEO.backbone_length))
    assert pose.heading == pytest.approx((0.0, 0.0, 1.0))


def test_forward_full_bend_heading_turns_ninety():
    pose = forward_tip_pose(BendCommand(90.0, 0.0), GEO)
    assert pose.heading == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)
    # bent toward +x, so the tip leaves the z axis in +x only
    assert pose.position[0] > 0.04
    assert pose.position[1] == pytest.approx(0.0, abs=1e-15)


def test_disc_frames_against_rotation_library():
    # same translate-then-rotate chain, built from scipy rotations instead
    cmd = BendCommand(73.0, 211.0)
    alpha = math.radians(per_joint_angle(cmd.magnitude_deg, GEO).degrees)
    phi = math.radians(cmd.direction_deg)
    axis = np.array([-math.sin(phi), math.cos(phi), 0.0])
    step = Rotation.from_rotvec(alpha * axis)
    rot = Rotation.identity()
    pos = np.zeros(3)
    for got_rot, got_pos in disc_frames(cmd, GEO):
        assert np.allclose(got_rot, rot.as_matrix(), atol=1e-9)
        assert np.allclose(got_pos, pos, atol=1e-12)
        pos = pos + rot.apply([0.0, 0.0, GEO.disc_spacing])
        rot = rot * step


def test_chain_approaches_constant_curvature():
    # 500 joints, 90 degrees: the polygon chain should sit within a
    # millimeter of the ideal circular arc of the same length
    k = 500
    fine = TipGeometry(
        disc_count=k + 1,
        disc_spacing=GEO.backbone_length / k,
        tendon_pitch_radius=GEO.tendon_pitch_radius,
    )
    pose = forward_tip_pose(BendCommand(90.0, 0.0), fine)
    radius = fine.backbone_length / (math.pi / 2)
    ideal = np.array([radius * (1 - math.cos(math.pi / 2)), 0.0, radius * math.sin(math.pi / 2)])
    gap = float(np.linalg.norm(np.asarray(pose.position) - ideal))
    assert gap < 1e-3
    assert gap == pytest.approx(0.1414e-3, abs=0.01e-3)  # frozen regression value


def test_tendon_polyline_straight_is_backbone_length():
    for tendon in range(4):
        length = tendon_polyline_length(BEND_STRAIGHT, GEO, tendon)
        assert length == pytest.approx(0.1, abs=1e-12)


def test_tendon_polyline_full_bend_inner_outer():
    inner = tendon_polyline_length(BendCommand(90.0, 0.0), GEO, 0)
    outer = tendon_polyline_length(BendCommand(90.0, 0.0), GEO, 2)
    side = tendon_polyline_length(BendCommand(90.0, 0.0), GEO, 1)
    assert inner == pytest.approx(85.5e-3, abs=0.5e-3)
    assert outer > 0.1 > inner
    assert side == pytest.approx(0.1, abs=1e-3)  # neutral fibre barely moves


def test_small_bend_shortening_matches_linear_model():
    # for small theta the inner tendon shortens by ~ r * theta
    theta_deg = 5.0
    inner = tendon_polyline_length(BendCommand(theta_deg, 0.0), GEO, 0)
    shortening = 0.1 - inner
    linear = GEO.tendon_pitch_radius * math.radians(theta_deg)
    assert shortening == pytest.approx(linear, rel=0.01)


def test_solve_continuum_end_to_end():
    state = solve_continuum(BendCommand(90.0, 0.0), GEO, SPOOL_DEFAULT, SERVO)
    assert state.joint_angle_deg == 18.0
    assert state.tendon_displacements[0] == pytest.approx(14.5e-3, abs=0.01e-3)
    assert state.servo_angles_deg[0] == pytest.approx(66.46, abs=0.01)
    assert state.bend_clamped is False
    assert state.servo_clamped == (False, False, False, False)


def test_solve_continuum_reports_clamps():
    state = solve_continuum(BendCommand(150.0, 0.0), GEO, SPOOL_DEFAULT, SERVO)
    assert state.bend_clamped is True
    assert state.joint_angle_deg == 18.0  # held at max bend


def test_geometry_validation():
    with pytest.raises(ValueError):
        TipGeometry(disc_count=1)
    with pytest.raises(ValueError):
        TipGeometry(tendon_pitch_radius=30e-3)  # outside the disc
    with pytest.raises(ValueError):
        BendCommand(-1.0, 0.0)


def test_bend_direction_normalized():
    assert BendCommand(10.0, 370.0).direction_deg == pytest.approx(10.0)
    assert BendCommand(10.0, -90.0).direction_deg == pytest.approx(270.0)
