"""Design calculator for the tendon actuation train: spring stiffness,
Hooke forces, spool torque and servo feasibility ranking.

All inputs and outputs are SI (Pa, m, N, N*m) except where a field name
says otherwise: servo catalog torques are kg*cm as printed on datasheets,
operating angles are degrees.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

GRAVITY = 9.81  # m/s^2, conversion constant for kg*cm datasheet torque

SUPPLY_VOLTAGES = ("4.8V", "6V")


@dataclass(frozen=True)
class SpringSpec:
    """Helical compression spring, as read off a datasheet.

    young_modulus Pa, poisson_ratio dimensionless, wire_diameter and
    outer_diameter in m, active_coils count, free_length m. The mean coil
    diameter used by the stiffness formula is outer_diameter - wire_diameter.
    """

    young_modulus: float
    poisson_ratio: float
    wire_diameter: float
    outer_diameter: float
    active_coils: int
    free_length: float

    def __post_init__(self):
        if self.young_modulus <= 0:
            raise ValueError(f"young_modulus must be > 0, got {self.young_modulus}")
        if not 0 <= self.poisson_ratio < 0.5:
            raise ValueError(f"poisson_ratio must be in [0, 0.5), got {self.poisson_ratio}")
        for name in ("wire_diameter", "outer_diameter", "free_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.active_coils < 1:
            raise ValueError(f"active_coils must be >= 1, got {self.active_coils}")
        if self.wire_diameter >= self.outer_diameter:
            raise ValueError("wire_diameter must be smaller than outer_diameter")


# Default 304 stainless spring. The shipped wire diameter is 0.5 mm: the
# 5.5 mm mean coil diameter and the ~586 N/m design stiffness this actuator
# train was sized around are only consistent with 0.5 mm wire (0.05 mm wire
# would give ~0.06 N/m). 0.05 mm remains a legal input. See README.
SPRING_304 = SpringSpec(
    young_modulus=190e9,
    poisson_ratio=0.27,
    wire_diameter=0.5e-3,
    outer_diameter=6e-3,
    active_coils=6,
    free_length=20e-3,
)


@dataclass(frozen=True)
class ServoSpec:
    """One servo catalog row: operating angle (deg) and stall torques (kg*cm)."""

    name: str
    operating_angle_deg: float
    torque_4v8_kgcm: float
    torque_6v_kgcm: float

    def __post_init__(self):
        if not 0 < self.operating_angle_deg <= 360:
            raise ValueError(f"operating_angle_deg must be in (0, 360], got {self.operating_angle_deg}")
        if self.torque_4v8_kgcm < 0 or self.torque_6v_kgcm < 0:
            raise ValueError("servo torques must be >= 0")

    def torque_kgcm(self, supply: str) -> float:
        if supply not in SUPPLY_VOLTAGES:
            raise ValueError(f"supply must be one of {SUPPLY_VOLTAGES}, got {supply!r}")
        return self.torque_4v8_kgcm if supply == "4.8V" else self.torque_6v_kgcm


# The candidate servos that were compared for the tip actuator stack.
SERVO_CATALOG = (
    ServoSpec("SG90", 180, 1.2, 1.6),
    ServoSpec("MG90s", 180, 1.8, 2.2),
    ServoSpec("DMS-MG90-A", 270, 1.3, 1.5),
    ServoSpec("DS-S006L", 300, 1.0, 1.2),
    ServoSpec("DM-S0090MD", 270, 1.8, 2.0),
)


@dataclass(frozen=True)
class SpoolSpec:
    """Servo horn spool that winds the tendon. radius in m."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"spool radius must be > 0, got {self.radius}")


SPOOL_DEFAULT = SpoolSpec(radius=12.5e-3)


@dataclass(frozen=True)
class ActuationRequirement:
    """What one servo must deliver: total axial force (N) to compress the
    spring stack and the tendon displacement (m) it must wind in."""

    total_force: float
    required_displacement: float

    def __post_init__(self):
        if self.total_force < 0 or self.required_displacement < 0:
            raise ValueError("total_force and required_displacement must be >= 0")


@dataclass(frozen=True)
class ServoEntry:
    """Per-servo feasibility line in a report."""

    name: str
    stall_torque_nm: float
    spool_travel: float
    torque_ok: bool
    travel_ok: bool

    @property
    def feasible(self) -> bool:
        return self.torque_ok and self.travel_ok


@dataclass(frozen=True)
class FeasibilityReport:
    required_torque: float
    supply: str
    entries: tuple[ServoEntry, ...] = field(default_factory=tuple)
    selected: str | None = None

    def entry(self, name: str) -> ServoEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def shear_modulus(young_modulus: float, poisson_ratio: float) -> float:
    """Shear modulus G = E / (2 (1 + v)). No rounding is applied."""
    if young_modulus <= 0:
        raise ValueError(f"young_modulus must be > 0, got {young_modulus}")
    if not 0 <= poisson_ratio < 0.5:
        raise ValueError(f"poisson_ratio must be in [0, 0.5), got {poisson_ratio}")
    return young_modulus / (2 * (1 + poisson_ratio))


def spring_constant(spec: SpringSpec, shear_modulus_override: float | None = None) -> float:
    """Stiffness k = G d^4 / (8 N D^3) of a helical compression spring, N/m.

    D is the mean coil diameter (outer - wire). shear_modulus_override
    substitutes a pre-rounded G (datasheets often quote 75 GPa for 304
    stainless where E and v give 74.8).
    """
    g = shear_modulus_override
    if g is None:
        g = shear_modulus(spec.young_modulus, spec.poisson_ratio)
    elif g <= 0:
        raise ValueError(f"shear modulus must be > 0, got {g}")
    mean_coil_diameter = spec.outer_diameter - spec.wire_diameter
    return g * spec.wire_diameter**4 / (8 * spec.active_coils * mean_coil_diameter**3)


def spring_force(stiffness: float, displacement: float) -> float:
    """Hooke force magnitude |k x| in N for a compression of x meters."""
    if stiffness < 0:
        raise ValueError(f"stiffness must be >= 0, got {stiffness}")
    return abs(stiffness * displacement)


def required_torque(req: ActuationRequirement, spool: SpoolSpec) -> float:
    """Torque (N*m) to pull the tendon: total force times spool radius."""
    return req.total_force * spool.radius


def stall_torque_si(torque_kgcm: float) -> float:
    """Datasheet stall torque kg*cm -> N*m (kg*cm x 0.01 m/cm x 9.81 m/s^2)."""
    if torque_kgcm < 0:
        raise ValueError(f"torque must be >= 0, got {torque_kgcm}")
    return torque_kgcm * 0.01 * GRAVITY


def spool_travel(spool: SpoolSpec, operating_angle_deg: float) -> float:
    """Tendon length (m) wound over the servo's operating angle: arc length
    (angle/360) * 2 pi r."""
    if operating_angle_deg < 0:
        raise ValueError(f"operating angle must be >= 0, got {operating_angle_deg}")
    return operating_angle_deg / 360.0 * 2.0 * math.pi * spool.radius


def servo_feasibility(
    catalog: list[ServoSpec] | tuple[ServoSpec, ...],
    req: ActuationRequirement,
    spool: SpoolSpec,
    supply: str = "6V",
) -> FeasibilityReport:
    """Mark every catalog servo against the torque and travel requirements
    and pick the winner.

    A servo passes torque iff its stall torque at the chosen supply covers
    the required spool torque, and travel iff its spool arc covers the
    required tendon displacement. Among feasible servos the largest
    operating angle wins (a larger angle lets the horn, and so the whole
    rigid tip, be smaller); ties go to the higher torque at the chosen
    supply, then to catalog order.
    """
    if not catalog:
        raise ValueError("servo catalog is empty")
    torque_needed = required_torque(req, spool)
    entries = []
    for servo in catalog:
        stall = stall_torque_si(servo.torque_kgcm(supply))
        travel = spool_travel(spool, servo.operating_angle_deg)
        entries.append(
            ServoEntry(
                name=servo.name,
                stall_torque_nm=stall,
                spool_travel=travel,
                torque_ok=stall >= torque_needed,
                travel_ok=travel >= req.required_displacement,
            )
        )
    feasible = [s for s, e in zip(catalog, entries) if e.feasible]
    selected = None
    if feasible:
        best = max(feasible, key=lambda s: (s.operating_angle_deg, s.torque_kgcm(supply)))
        selected = best.name
    return FeasibilityReport(
        required_torque=torque_needed,
        supply=supply,
        entries=tuple(entries),
        selected=selected,
    )


def load_servo_catalog(path_or_text) -> tuple[ServoSpec, ...]:
    """Read a servo catalog from CSV text or a file path.

    Columns mirror the comparison table this design was sized from:
    name, operating_angle_deg, torque_4v8_kgcm, torque_6v_kgcm.
    """
    if hasattr(path_or_text, "read"):
        text = path_or_text.read()
    else:
        text = str(path_or_text)
        if "\n" not in text and not text.lstrip().startswith("name"):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    required = {"name", "operating_angle_deg", "torque_4v8_kgcm", "torque_6v_kgcm"}
    if reader.fieldnames is None or not required.issubset(set(reader.fieldnames)):
        missing = sorted(required - set(reader.fieldnames or ()))
        raise ValueError(f"servo catalog is missing columns: {', '.join(missing)}")
    servos = []
    for row_no, row in enumerate(reader, start=2):
        try:
            servos.append(
                ServoSpec(
                    name=row["name"].strip(),
                    operating_angle_deg=float(row["operating_angle_deg"]),
                    torque_4v8_kgcm=float(row["torque_4v8_kgcm"]),
                    torque_6v_kgcm=float(row["torque_6v_kgcm"]),
                )
            )
        except ValueError as exc:
            raise ValueError(f"servo catalog line {row_no}: {exc}") from exc
    if not servos:
        raise ValueError("servo catalog has no data rows")
    return tuple(servos)


def dump_servo_catalog(catalog) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["name", "operating_angle_deg", "torque_4v8_kgcm", "torque_6v_kgcm"])
    for s in catalog:
        writer.writerow([s.name, s.operating_angle_deg, s.torque_4v8_kgcm, s.torque_6v_kgcm])
    return out.getvalue()


def format_report(report: FeasibilityReport) -> str:
    """Plain-text feasibility table for the CLI."""
    lines = [
        f"required torque: {report.required_torque:.4f} N*m (supply {report.supply})",
        f"{'servo':<14}{'stall N*m':>10}{'travel mm':>11}{'torque':>8}{'travel':>8}",
    ]
    for e in report.entries:
        mark = " <- selected" if e.name == report.selected else ""
        lines.append(
            f"{e.name:<14}{e.stall_torque_nm:>10.4f}{e.spool_travel * 1e3:>11.2f}"
            f"{'ok' if e.torque_ok else 'FAIL':>8}{'ok' if e.travel_ok else 'FAIL':>8}{mark}"
        )
    if report.selected is None:
        lines.append("no feasible servo in catalog")
    return "\n".join(lines)
