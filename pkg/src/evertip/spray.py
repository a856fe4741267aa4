"""Spray cone model and coverage accounting.

A spray event is a cone: apex at the tip, axis along the tip heading, half
angle and range from the SpraySpec. A target cell counts as hit when its
center is inside the cone, within range, and on a surface facing the tip.
Counting cell centers (not areas) keeps the test geometric and exactly
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FLOWS = ("water", "aerosol_paint", "foam")

GRID_ROWS = 6
GRID_COLS = 10
GRID_CELLS = GRID_ROWS * GRID_COLS


@dataclass(frozen=True)
class SpraySpec:
    cone_half_angle_deg: float = 10.0
    range_m: float = 0.8
    flow: str = "aerosol_paint"

    def __post_init__(self):
        if not 0 < self.cone_half_angle_deg < 90:
            raise ValueError(
                f"cone_half_angle_deg must be in (0, 90), got {self.cone_half_angle_deg}"
            )
        if self.range_m <= 0:
            raise ValueError(f"range_m must be > 0, got {self.range_m}")
        if self.flow not in FLOWS:
            raise ValueError(f"flow must be one of {FLOWS}, got {self.flow!r}")


def cone_mask(
    tip_position,
    tip_heading,
    spec: SpraySpec,
    points: np.ndarray,
    normal=None,
) -> np.ndarray:
    """Boolean mask of which points the cone reaches.

    points is (n, 3). A point qualifies when its distance is in (0, range],
    the angle from the heading to it is <= the half angle, and (if a surface
    normal is given) the spray arrives against the surface: d . n < 0.
    """
    pos = np.asarray(tip_position, dtype=float)
    h = np.asarray(tip_heading, dtype=float)
    h = h / np.linalg.norm(h)
    d = np.asarray(points, dtype=float) - pos
    dist = np.linalg.norm(d, axis=1)
    ok = (dist > 0.0) & (dist <= spec.range_m)
    cos_half = math.cos(math.radians(spec.cone_half_angle_deg))
    with np.errstate(invalid="ignore", divide="ignore"):
        ok &= (d @ h) >= cos_half * dist
    if normal is not None:
        n = np.asarray(normal, dtype=float)
        ok &= (d @ n) < 0.0
    return ok


@dataclass
class TargetGrid:
    """The 6 x 10 target sheet: 60 square cells on a wall plane.

    origin is the corner of cell (row 0, col 0); cell (r, c) has its center
    at origin + (c + 1/2) * cell * u + (r + 1/2) * cell * v. u and v are
    unit vectors in the plane and u x v is the surface normal, which must
    face the robot. Hit flags are set-only during a run.
    """

    cell_size: float
    origin: tuple[float, float, float]
    u: tuple[float, float, float]
    v: tuple[float, float, float]
    hit: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        for name in ("u", "v"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if abs(np.linalg.norm(vec) - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a unit vector")
        if abs(float(np.dot(self.u, self.v))) > 1e-9:
            raise ValueError("u and v must be perpendicular")
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be > 0, got {self.cell_size}")
        if self.hit is None:
            self.hit = np.zeros((GRID_ROWS, GRID_COLS), dtype=bool)
        else:
            self.hit = np.asarray(self.hit, dtype=bool).reshape(GRID_ROWS, GRID_COLS)

    @property
    def rows(self) -> int:
        return GRID_ROWS

    @property
    def cols(self) -> int:
        return GRID_COLS

    @property
    def normal(self) -> np.ndarray:
        n = np.cross(np.asarray(self.u, float), np.asarray(self.v, float))
        return n / np.linalg.norm(n)

    def cell_center(self, row: int, col: int) -> np.ndarray:
        o = np.asarray(self.origin, dtype=float)
        return (
            o
            + (col + 0.5) * self.cell_size * np.asarray(self.u, float)
            + (row + 0.5) * self.cell_size * np.asarray(self.v, float)
        )

    def centers(self) -> np.ndarray:
        """(60, 3) cell centers, row-major."""
        rows, cols = np.meshgrid(
            np.arange(GRID_ROWS), np.arange(GRID_COLS), indexing="ij"
        )
        o = np.asarray(self.origin, dtype=float)
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        pts = (
            o
            + (cols.reshape(-1, 1) + 0.5) * self.cell_size * u
            + (rows.reshape(-1, 1) + 0.5) * self.cell_size * v
        )
        return pts

    def fresh(self) -> "TargetGrid":
        """Copy with all hit flags cleared (one per run)."""
        return TargetGrid(self.cell_size, self.origin, self.u, self.v)

    @property
    def sprayed_count(self) -> int:
        return int(self.hit.sum())

    @property
    def percent(self) -> float:
        return round(100.0 * self.sprayed_count / GRID_CELLS, 1)


def spray_hits(tip, spec: SpraySpec, grid: TargetGrid) -> set[tuple[int, int]]:
    """Cells reached by one spray event from the tip pose (anything with
    position and heading, e.g. a TipPose). Marks them hit on the grid and
    returns their (row, col) indices."""
    mask = cone_mask(tip.position, tip.heading, spec, grid.centers(), grid.normal)
    mask = mask.reshape(GRID_ROWS, GRID_COLS)
    grid.hit |= mask
    rows, cols = np.nonzero(mask)
    return {(int(r), int(c)) for r, c in zip(rows, cols)}


@dataclass(frozen=True)
class CoverageReport:
    """Per-test sprayed-cell counts with the derived percentages.

    Each percent is rounded to one decimal before averaging, so the average
    is the mean of the reported rows, not of the raw counts.
    """

    counts: tuple[int, ...]
    total_cells: int = GRID_CELLS

    def __post_init__(self):
        if not self.counts:
            raise ValueError("need at least one test count")
        for c in self.counts:
            if not 0 <= c <= self.total_cells:
                raise ValueError(f"count {c} outside [0, {self.total_cells}]")

    @property
    def percents(self) -> tuple[float, ...]:
        return tuple(round(100.0 * c / self.total_cells, 1) for c in self.counts)

    @property
    def average_count(self) -> float:
        return sum(self.counts) / len(self.counts)

    @property
    def average_percent(self) -> float:
        pcts = self.percents
        return sum(pcts) / len(pcts)

    def format_table(self) -> str:
        lines = ["test  sprayed  coverage"]
        for i, (c, p) in enumerate(zip(self.counts, self.percents), start=1):
            lines.append(f"{i:>4}  {c:>3}/{self.total_cells}   {p:>5.1f}%")
        lines.append(
            f" avg  {self.average_count:>5.1f}    {self.average_percent:>6.2f}%"
        )
        return "\n".join(lines)


def coverage_stats(counts) -> CoverageReport:
    return CoverageReport(tuple(int(c) for c in counts))
