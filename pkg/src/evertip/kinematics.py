"""Kinematics of the disc-and-u-joint continuum tip.

The tip is a chain of rigid discs joined by u-joints on a fixed-length
backbone, steered by 4 tendons at 90 degree azimuth spacing. A bend command
is a magnitude theta (deg) and an azimuth phi (deg): the tip tilts toward
azimuth phi, every joint takes the same share of theta, and the tendons on
the phi side shorten while their opposites go slack.

Tip base frame: +z along the backbone, azimuth 0 along +x, azimuth 90 along
+y. External angle fields are degrees; all internal math is radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .mechcalc import ServoSpec, SpoolSpec

TENDON_AZIMUTHS_DEG = (0.0, 90.0, 180.0, 270.0)


@dataclass(frozen=True)
class TipGeometry:
    """Disc chain dimensions, lengths in m, angles in deg.

    tendon_pitch_radius is the radial offset of the tendon guide holes. The
    default 9.23 mm makes a 90 degree bend pull the inner tendon by
    r * pi/2 = 14.5 mm, matching the CAD measurement of this tip.
    """

    disc_count: int = 6
    disc_spacing: float = 20e-3
    disc_diameter: float = 45e-3
    tendon_pitch_radius: float = 9.23e-3
    max_bend_deg: float = 90.0

    def __post_init__(self):
        if self.disc_count < 2:
            raise ValueError(f"disc_count must be >= 2, got {self.disc_count}")
        for name in ("disc_spacing", "disc_diameter", "tendon_pitch_radius"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.tendon_pitch_radius >= self.disc_diameter / 2:
            raise ValueError("tendon_pitch_radius must be inside the disc radius")
        if self.max_bend_deg <= 0:
            raise ValueError("max_bend_deg must be > 0")

    @property
    def joint_count(self) -> int:
        return self.disc_count - 1

    @property
    def backbone_length(self) -> float:
        return self.joint_count * self.disc_spacing


@dataclass(frozen=True)
class BendCommand:
    """Commanded bend: magnitude_deg >= 0, direction_deg in [0, 360)."""

    magnitude_deg: float
    direction_deg: float = 0.0

    def __post_init__(self):
        if self.magnitude_deg < 0:
            raise ValueError(f"bend magnitude must be >= 0, got {self.magnitude_deg}")
        object.__setattr__(self, "direction_deg", self.direction_deg % 360.0)


BEND_STRAIGHT = BendCommand(0.0, 0.0)


class ClampedAngle(NamedTuple):
    degrees: float
    clamped: bool


class ServoAngles(NamedTuple):
    angles_deg: tuple[float, float, float, float]
    clamped: tuple[bool, bool, bool, bool]


@dataclass(frozen=True)
class TipPose:
    """Tip frame origin and unit heading, in the tip-base frame."""

    position: tuple[float, float, float]
    heading: tuple[float, float, float]

    def __post_init__(self):
        norm = math.sqrt(sum(h * h for h in self.heading))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"heading must be a unit vector, |h| = {norm}")


@dataclass(frozen=True)
class ContinuumState:
    """Snapshot of one bend command pushed through the whole actuation chain."""

    joint_angle_deg: float
    bend_direction_deg: float
    tendon_displacements: tuple[float, float, float, float]
    servo_angles_deg: tuple[float, float, float, float]
    bend_clamped: bool = False
    servo_clamped: tuple[bool, bool, bool, bool] = (False, False, False, False)

    def __post_init__(self):
        if any(d < 0 for d in self.tendon_displacements):
            raise ValueError("tendon displacements must be >= 0")
        d = self.tendon_displacements
        if (d[0] > 0 and d[2] > 0) or (d[1] > 0 and d[3] > 0):
            raise ValueError("opposite tendons cannot both be taut")


def per_joint_angle(total_deg: float, geometry: TipGeometry) -> ClampedAngle:
    """Share of the commanded bend taken by each u-joint: theta / (discs - 1).

    Out-of-range totals are clamped into [0, max_bend] and flagged.
    """
    clamped_total = min(max(total_deg, 0.0), geometry.max_bend_deg)
    return ClampedAngle(clamped_total / geometry.joint_count, clamped_total != total_deg)


def clamp_bend(cmd: BendCommand, geometry: TipGeometry) -> tuple[BendCommand, bool]:
    """Limit a command to the geometry's maximum bend."""
    if cmd.magnitude_deg > geometry.max_bend_deg:
        return BendCommand(geometry.max_bend_deg, cmd.direction_deg), True
    return cmd, False


def tendon_displacements(cmd: BendCommand, geometry: TipGeometry) -> tuple[float, float, float, float]:
    """Pull length of each tendon for a bend, m.

    Tendon i at azimuth psi_i shortens by r * theta * cos(phi - psi_i);
    negative values mean the tendon would have to be fed out, and since a
    tendon cannot push, those are clipped to zero (slack).
    """
    theta = math.radians(cmd.magnitude_deg)
    phi = math.radians(cmd.direction_deg)
    r = geometry.tendon_pitch_radius
    return tuple(
        max(0.0, r * theta * math.cos(phi - math.radians(psi)))
        for psi in TENDON_AZIMUTHS_DEG
    )


def servo_angles_for(
    displacements,
    spool: SpoolSpec,
    servo: ServoSpec,
) -> ServoAngles:
    """Servo horn rotation for each tendon displacement.

    angle = displacement / spool radius (radians), reported in degrees and
    clamped to [0, operating angle]. Clamping is reported per tendon, not
    raised: a saturated servo is a legal state.
    """
    angles = []
    clamped = []
    for d in displacements:
        if d < 0:
            raise ValueError(f"displacement must be >= 0, got {d}")
        raw = math.degrees(d / spool.radius)
        hit = raw > servo.operating_angle_deg
        angles.append(min(raw, servo.operating_angle_deg))
        clamped.append(hit)
    return ServoAngles(tuple(angles), tuple(clamped))


def displacements_from_servo_angles(angles_deg, spool: SpoolSpec) -> tuple[float, ...]:
    """Inverse of servo_angles_for (ignoring clamp): arc length per horn angle."""
    return tuple(math.radians(a) * spool.radius for a in angles_deg)


def bend_from_displacements(displacements, geometry: TipGeometry) -> BendCommand:
    """Recover the bend command from the 4 tendon pulls.

    With tendons at 0/90/180/270 the taut-side pulls encode
    r*theta*(cos phi, sin phi) as (d0 - d2, d1 - d3).
    """
    r = geometry.tendon_pitch_radius
    x = (displacements[0] - displacements[2]) / r
    y = (displacements[1] - displacements[3]) / r
    theta = math.hypot(x, y)
    if theta == 0.0:
        return BEND_STRAIGHT
    return BendCommand(math.degrees(theta), math.degrees(math.atan2(y, x)) % 360.0)


def joystick_to_bend(x: float, y: float, geometry: TipGeometry) -> BendCommand:
    """Map a joystick deflection to a bend command.

    Stick radius (clamped to 1) scales the bend up to max_bend; stick
    direction is the bend azimuth. Dead stick maps to azimuth 0.
    """
    radius = min(1.0, math.hypot(x, y))
    theta = geometry.max_bend_deg * radius
    if theta == 0.0:
        return BEND_STRAIGHT
    return BendCommand(theta, math.degrees(math.atan2(y, x)) % 360.0)


def _bend_axis(direction_rad: float) -> np.ndarray:
    # in-plane axis orthogonal to the bend azimuth; rotating +z about it
    # tilts the heading toward the azimuth direction
    return np.array([-math.sin(direction_rad), math.cos(direction_rad), 0.0])


def _axis_rotation(axis: np.ndarray, angle_rad: float) -> np.ndarray:
    ax, ay, az = axis
    c = math.cos(angle_rad)
    s = math.sin(angle_rad)
    k = 1.0 - c
    return np.array(
        [
            [c + ax * ax * k, ax * ay * k - az * s, ax * az * k + ay * s],
            [ay * ax * k + az * s, c + ay * ay * k, ay * az * k - ax * s],
            [az * ax * k - ay * s, az * ay * k + ax * s, c + az * az * k],
        ]
    )


def disc_frames(cmd: BendCommand, geometry: TipGeometry) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pose (rotation, position) of every disc for a bend command.

    Disc 0 is the base (identity). Each joint contributes one rigid
    transform: translate disc_spacing along the local +z, then rotate the
    per-joint angle about the in-plane axis orthogonal to the bend azimuth.
    """
    cmd, _ = clamp_bend(cmd, geometry)
    alpha = math.radians(per_joint_angle(cmd.magnitude_deg, geometry).degrees)
    step_rot = _axis_rotation(_bend_axis(math.radians(cmd.direction_deg)), alpha)
    step_t = np.array([0.0, 0.0, geometry.disc_spacing])
    rot = np.eye(3)
    pos = np.zeros(3)
    frames = [(rot, pos)]
    for _ in range(geometry.joint_count):
        pos = pos + rot @ step_t
        rot = rot @ step_rot
        frames.append((rot, pos))
    return frames


def forward_tip_frame(cmd: BendCommand, geometry: TipGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Full tip frame (rotation, position) in the tip-base frame."""
    rot, pos = disc_frames(cmd, geometry)[-1]
    return rot, pos


def forward_tip_pose(cmd: BendCommand, geometry: TipGeometry) -> TipPose:
    """Tip position and heading for a bend command."""
    rot, pos = forward_tip_frame(cmd, geometry)
    heading = rot @ np.array([0.0, 0.0, 1.0])
    heading = heading / np.linalg.norm(heading)
    return TipPose(position=tuple(pos.tolist()), heading=tuple(heading.tolist()))


def tendon_guide_points(cmd: BendCommand, geometry: TipGeometry, tendon_index: int) -> np.ndarray:
    """World points of one tendon's guide holes, one per disc, shape (discs, 3)."""
    if not 0 <= tendon_index < 4:
        raise ValueError(f"tendon_index must be 0..3, got {tendon_index}")
    psi = math.radians(TENDON_AZIMUTHS_DEG[tendon_index])
    local = np.array(
        [
            geometry.tendon_pitch_radius * math.cos(psi),
            geometry.tendon_pitch_radius * math.sin(psi),
            0.0,
        ]
    )
    return np.array([pos + rot @ local for rot, pos in disc_frames(cmd, geometry)])


def tendon_polyline_length(cmd: BendCommand, geometry: TipGeometry, tendon_index: int) -> float:
    """Length of the straight-segment path through one tendon's guide holes, m."""
    points = tendon_guide_points(cmd, geometry, tendon_index)
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def solve_continuum(
    cmd: BendCommand,
    geometry: TipGeometry,
    spool: SpoolSpec,
    servo: ServoSpec,
) -> ContinuumState:
    """Push a bend command through joints, tendons and servos in one go."""
    limited, bend_clamped = clamp_bend(cmd, geometry)
    pulls = tendon_displacements(limited, geometry)
    servo_result = servo_angles_for(pulls, spool, servo)
    return ContinuumState(
        joint_angle_deg=per_joint_angle(limited.magnitude_deg, geometry).degrees,
        bend_direction_deg=limited.direction_deg,
        tendon_displacements=pulls,
        servo_angles_deg=servo_result.angles_deg,
        bend_clamped=bend_clamped,
        servo_clamped=servo_result.clamped,
    )
