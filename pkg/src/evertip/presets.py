"""Built-in scenes and scenario scripts.

These are the desk-scale setups the experiment harness ships with:

  straight_grid   straight pipe into a box with the 6 x 10 target sheet
  t_network       pipe with a T junction, boxes on both branch ends
  box_sweep       straight pipe into a bare box, wall panels only

plus script builders for the coverage raster (with and without aim noise),
the junction navigation run, and the box sweep. write_default_assets()
materialises them all as JSON under scenes/ and scripts/ so the CLI can be
driven without touching Python.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .kinematics import BendCommand, TipGeometry, forward_tip_frame
from .scene import scene_from_dict

GRID_CELL = 0.042  # m; 10 x 0.042 = 0.42 across, 6 x 0.042 = 0.252 down


def straight_grid_scene() -> dict:
    """Straight 1.2 m pipe into a 0.6 m box; target grid on the far wall,
    centered on the pipe axis."""
    return {
        "format": "pipescene",
        "version": 1,
        "name": "straight_grid",
        "nodes": {"inlet": [0.0, 0.0, 0.0], "mouth": [1.2, 0.0, 0.0]},
        "segments": [
            {"id": "s1", "from": "inlet", "to": "mouth", "shape": "straight", "diameter": 0.1}
        ],
        "terminals": [
            {
                "node": "mouth",
                "center": [1.5, 0.0, 0.0],
                "size": 0.6,
                "open_face": "-x",
                "grid": {
                    "cell_size": GRID_CELL,
                    "origin": [1.8, 5 * GRID_CELL, -3 * GRID_CELL],
                    "u": [0.0, -1.0, 0.0],
                    "v": [0.0, 0.0, 1.0],
                },
            }
        ],
        "start": {"node": "inlet", "segment": "s1"},
    }


def t_network_scene() -> dict:
    """Pipe east to a T at j1: branches north and south to boxes with
    grids, plus a straight continuation to a bare box. Azimuths are in the
    arriving tip frame (travelling +x, azimuth 0 bends toward +y)."""
    grid_n = {
        "cell_size": GRID_CELL,
        "origin": [0.8 - 5 * GRID_CELL, 1.0, -3 * GRID_CELL],
        "u": [1.0, 0.0, 0.0],
        "v": [0.0, 0.0, 1.0],
    }
    grid_s = {
        "cell_size": GRID_CELL,
        "origin": [0.8 + 5 * GRID_CELL, -1.0, -3 * GRID_CELL],
        "u": [-1.0, 0.0, 0.0],
        "v": [0.0, 0.0, 1.0],
    }
    return {
        "format": "pipescene",
        "version": 1,
        "name": "t_network",
        "nodes": {
            "inlet": [0.0, 0.0, 0.0],
            "j1": [0.8, 0.0, 0.0],
            "mouth_n": [0.8, 0.4, 0.0],
            "mouth_s": [0.8, -0.4, 0.0],
            "mouth_e": [1.6, 0.0, 0.0],
        },
        "segments": [
            {"id": "s1", "from": "inlet", "to": "j1", "diameter": 0.1},
            {"id": "s_n", "from": "j1", "to": "mouth_n", "diameter": 0.1},
            {"id": "s_s", "from": "j1", "to": "mouth_s", "diameter": 0.1},
            {"id": "s_e", "from": "j1", "to": "mouth_e", "diameter": 0.1},
        ],
        "junctions": [
            {
                "node": "j1",
                "azimuths": {"s_n": 0.0, "s_s": 180.0},
                "straight": "s_e",
            }
        ],
        "terminals": [
            {
                "node": "mouth_n",
                "center": [0.8, 0.7, 0.0],
                "size": 0.6,
                "open_face": "-y",
                "grid": grid_n,
            },
            {
                "node": "mouth_s",
                "center": [0.8, -0.7, 0.0],
                "size": 0.6,
                "open_face": "+y",
                "grid": grid_s,
            },
            {"node": "mouth_e", "center": [1.9, 0.0, 0.0], "size": 0.6, "open_face": "-x"},
        ],
        "start": {"node": "inlet", "segment": "s1"},
    }


def box_sweep_scene() -> dict:
    """Straight 1.0 m pipe into a bare 0.6 m box (no grid; the five wall
    panels are the target)."""
    return {
        "format": "pipescene",
        "version": 1,
        "name": "box_sweep",
        "nodes": {"inlet": [0.0, 0.0, 0.0], "mouth": [1.0, 0.0, 0.0]},
        "segments": [
            {"id": "s1", "from": "inlet", "to": "mouth", "shape": "straight", "diameter": 0.1}
        ],
        "terminals": [
            {"node": "mouth", "center": [1.3, 0.0, 0.0], "size": 0.6, "open_face": "-x"}
        ],
        "start": {"node": "inlet", "segment": "s1"},
    }


# ------------------------------------------------------------- aiming ----


def solve_aim(
    base_r: np.ndarray,
    base_p: np.ndarray,
    target_world,
    geometry: TipGeometry | None = None,
) -> tuple[float, float]:
    """Joystick (x, y) that points the tip heading at a world target.

    Fixed-point iteration: the heading tilts from the local +z by exactly
    the bend angle, so aim the heading at the target as seen from the
    current tip position, recompute the tip position, repeat.
    """
    geometry = geometry or TipGeometry()
    v = base_r.T @ (np.asarray(target_world, dtype=float) - np.asarray(base_p, dtype=float))
    theta = math.degrees(math.atan2(math.hypot(v[0], v[1]), v[2]))
    phi = math.degrees(math.atan2(v[1], v[0])) if math.hypot(v[0], v[1]) > 1e-12 else 0.0
    for _ in range(40):
        theta = min(theta, geometry.max_bend_deg)
        _, p_tip = forward_tip_frame(BendCommand(theta, phi), geometry)
        d = v - p_tip
        theta = math.degrees(math.atan2(math.hypot(d[0], d[1]), d[2]))
        phi = math.degrees(math.atan2(d[1], d[0])) if math.hypot(d[0], d[1]) > 1e-12 else phi
    theta = min(theta, geometry.max_bend_deg)
    m = theta / geometry.max_bend_deg
    return (
        round(m * math.cos(math.radians(phi)), 6),
        round(m * math.sin(math.radians(phi)), 6),
    )


def _frame_for(tangent) -> np.ndarray:
    from .network import frame_from_tangent

    return frame_from_tangent(np.asarray(tangent, dtype=float))


# ------------------------------------------------------------ scripts ----


def raster_script(
    aim_sigma_deg: float = 0.0,
    cone_half_angle_deg: float = 4.5,
    seed: int = 0,
    name: str | None = None,
) -> dict:
    """Raster every cell of the straight_grid sheet: grow to the box, then
    one spray pulse per cell, row by row."""
    scene_doc = straight_grid_scene()
    scene = scene_from_dict(scene_doc)
    grid = scene.grids["mouth"]
    base_r = _frame_for([1.0, 0.0, 0.0])
    base_p = np.array(scene.network.nodes["mouth"], dtype=float)

    commands = [
        {"t": 0.0, "kind": "set_pressure", "args": {"kpa": 60.0}},
        {"t": 4.5, "kind": "set_pressure", "args": {"kpa": 0.0}},
    ]
    t = 5.0
    for row in range(grid.rows):
        for col in range(grid.cols):
            x, y = solve_aim(base_r, base_p, grid.cell_center(row, col))
            commands.append({"t": round(t, 3), "kind": "joystick", "args": {"x": x, "y": y}})
            commands.append({"t": round(t + 0.05, 3), "kind": "spray", "args": {"on": True}})
            commands.append({"t": round(t + 0.06, 3), "kind": "spray", "args": {"on": False}})
            t += 0.1
    commands.append({"t": round(t, 3), "kind": "joystick", "args": {"x": 0.0, "y": 0.0}})

    return {
        "format": "pipescript",
        "version": 1,
        "name": name or (f"raster_sigma{aim_sigma_deg:g}" if aim_sigma_deg else "raster_zero_noise"),
        "scene": scene_doc,
        "seed": seed,
        "noise": {"aim_sigma_deg": aim_sigma_deg, "actuation_sigma_mm": 0.0},
        "spray": {
            "cone_half_angle_deg": cone_half_angle_deg,
            "range_m": 0.8,
            "flow": "aerosol_paint",
        },
        "commands": commands,
        "stop_time": round(t + 1.0, 3),
    }


def scenario1_script(seed: int = 0) -> dict:
    """Junction navigation: steer into the north branch of the T, then
    spray the four designated cells at the grid center."""
    scene_doc = t_network_scene()
    scene = scene_from_dict(scene_doc)
    grid = scene.grids["mouth_n"]
    base_r = _frame_for([0.0, 1.0, 0.0])
    base_p = np.array(scene.network.nodes["mouth_n"], dtype=float)
    cells = [[2, 4], [2, 5], [3, 4], [3, 5]]

    commands = [
        # steer toward azimuth 0 before the junction so the T picks north
        {"t": 0.0, "kind": "joystick", "args": {"x": 0.5, "y": 0.0}},
        {"t": 0.0, "kind": "set_pressure", "args": {"kpa": 60.0}},
        {"t": 3.5, "kind": "set_pressure", "args": {"kpa": 0.0}},
    ]
    t = 4.0
    for row, col in cells:
        x, y = solve_aim(base_r, base_p, grid.cell_center(row, col))
        commands.append({"t": round(t, 3), "kind": "joystick", "args": {"x": x, "y": y}})
        commands.append({"t": round(t + 0.05, 3), "kind": "spray", "args": {"on": True}})
        commands.append({"t": round(t + 0.06, 3), "kind": "spray", "args": {"on": False}})
        t += 0.2
    return {
        "format": "pipescript",
        "version": 1,
        "name": "scenario1_junction",
        "scene": scene_doc,
        "seed": seed,
        "noise": {"aim_sigma_deg": 0.0, "actuation_sigma_mm": 0.0},
        "spray": {"cone_half_angle_deg": 6.0, "range_m": 0.8, "flow": "aerosol_paint"},
        "commands": commands,
        "stop_time": round(t + 1.0, 3),
        "success": {"kind": "cells_hit", "node": "mouth_n", "cells": cells},
    }


def scenario3_script(seed: int = 0) -> dict:
    """Box sweep: grow into the bare box and wave the tip through bend
    rings while spraying foam, until every wall panel is well covered."""
    commands = [
        {"t": 0.0, "kind": "set_pressure", "args": {"kpa": 60.0}},
        {"t": 3.0, "kind": "set_pressure", "args": {"kpa": 0.0}},
        {"t": 3.5, "kind": "spray", "args": {"on": True}},
    ]
    t = 3.6
    poses = [(0.0, 0.0)]
    for theta in (30.0, 60.0, 85.0):
        for az in range(0, 360, 30):
            poses.append((theta, float(az)))
    for theta, az in poses:
        m = theta / 90.0
        x = round(m * math.cos(math.radians(az)), 6)
        y = round(m * math.sin(math.radians(az)), 6)
        commands.append({"t": round(t, 3), "kind": "joystick", "args": {"x": x, "y": y}})
        t += 0.15
    commands.append({"t": round(t, 3), "kind": "spray", "args": {"on": False}})
    commands.append({"t": round(t + 0.05, 3), "kind": "joystick", "args": {"x": 0.0, "y": 0.0}})
    return {
        "format": "pipescript",
        "version": 1,
        "name": "scenario3_box_sweep",
        "scene": box_sweep_scene(),
        "seed": seed,
        "noise": {"aim_sigma_deg": 0.0, "actuation_sigma_mm": 0.0},
        "spray": {"cone_half_angle_deg": 15.0, "range_m": 0.9, "flow": "foam"},
        "commands": commands,
        "stop_time": round(t + 1.0, 3),
        "success": {"kind": "panel_fraction", "node": "mouth", "fraction": 0.6},
    }


# ------------------------------------------------------- design inputs ----


def default_springs() -> dict:
    """The tip's return-spring pack and its working point, SI units."""
    return {
        "young_modulus": 190e9,
        "poisson_ratio": 0.27,
        "wire_diameter": 0.5e-3,
        "outer_diameter": 6.0e-3,
        "active_coils": 6,
        "free_length": 20e-3,
        "working_displacement": 5e-3,
        "spring_count": 5,
        "spool_radius": 12.5e-3,
        "required_travel": 14.5e-3,
    }


def write_default_assets(root: str | Path) -> list[Path]:
    """Write the shipped scenes, scripts and design inputs under root.
    Returns the files written."""
    root = Path(root)
    written = []
    scenes = {
        "straight_grid.json": straight_grid_scene(),
        "t_network.json": t_network_scene(),
        "box_sweep.json": box_sweep_scene(),
    }
    scripts = {
        "raster_zero_noise.json": raster_script(aim_sigma_deg=0.0),
        "raster_sigma3.json": raster_script(aim_sigma_deg=3.0),
        "scenario1_junction.json": scenario1_script(),
        "scenario3_box_sweep.json": scenario3_script(),
    }
    for sub, docs in (("scenes", scenes), ("scripts", scripts)):
        d = root / sub
        d.mkdir(parents=True, exist_ok=True)
        for fname, doc in docs.items():
            p = d / fname
            p.write_text(json.dumps(doc, indent=1) + "\n")
            written.append(p)
    d = root / "design"
    d.mkdir(parents=True, exist_ok=True)
    p = d / "springs.json"
    p.write_text(json.dumps(default_springs(), indent=1) + "\n")
    written.append(p)
    from .mechcalc import SERVO_CATALOG, dump_servo_catalog

    p = d / "servo_catalog.csv"
    p.write_text(dump_servo_catalog(SERVO_CATALOG))
    written.append(p)
    return written
