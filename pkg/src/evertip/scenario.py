"""Scripted experiment runs.

Format "pipescript" version 1, JSON:

  {
    "format": "pipescript", "version": 1, "name": "raster",
    "scene": "scenes/straight_grid.json",      # path (relative to script)
    "seed": 0,                                  # or an inline scene object
    "noise": {"aim_sigma_deg": 0.0, "actuation_sigma_mm": 0.0},
    "spray": {"cone_half_angle_deg": 8.0, "range_m": 0.8},
    "config": {"max_length": 5.0},              # SimConfig overrides
    "commands": [{"t": 0.0, "kind": "set_pressure", "args": {"kpa": 60}}],
    "stop_time": 40.0,
    "success": {"kind": "cells_hit", "node": "mouth", "cells": [[2, 3]]}
  }

Success kinds: "cells_hit" (every listed [row, col] sprayed),
"panel_fraction" (every wall panel of a terminal at or above a fraction),
"coverage_percent" (grid coverage at least min_percent). Success is latched
the first tick it becomes true; the run still continues to stop_time so
coverage numbers are comparable across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .protocol import ProtocolError, validate_command
from .scene import Scene, load_scene, scene_from_dict, scene_to_dict
from .session import SessionWriter, build_header, drive, summarize
from .simulator import NoiseModel, SimConfig, Simulator
from .spray import SpraySpec

FORMAT = "pipescript"
VERSION = 1


class ScriptError(ValueError):
    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class ScenarioScript:
    name: str
    scene: Scene
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    spray: SpraySpec = field(default_factory=SpraySpec)
    config: SimConfig = field(default_factory=SimConfig)
    commands: tuple[tuple[float, str, dict], ...] = ()  # (t_s, kind, args)
    stop_time: float = 10.0
    success: dict | None = None

    def __post_init__(self):
        if self.stop_time <= 0:
            raise ScriptError("stop_time", "must be > 0")
        last_t = -1.0
        for t, kind, args in self.commands:
            if t < 0 or t > self.stop_time:
                raise ScriptError(
                    "commands", f"command at t={t} outside [0, stop_time]"
                )
            if t < last_t:
                raise ScriptError("commands", "commands must be sorted by t")
            last_t = t
            try:
                validate_command(kind, args)
            except ProtocolError as e:
                raise ScriptError("commands", f"t={t}: {e}") from None
        if self.success is not None:
            _check_success_spec(self.success, self.scene)


def _check_success_spec(spec: dict, scene: Scene) -> None:
    kind = spec.get("kind")
    if kind == "cells_hit":
        node = spec.get("node")
        if node not in scene.grids:
            raise ScriptError("success.node", f"no grid at terminal {node!r}")
        cells = spec.get("cells")
        if not isinstance(cells, list) or not cells:
            raise ScriptError("success.cells", "expected a non-empty list of [row, col]")
        g = scene.grids[node]
        for cell in cells:
            if (
                not isinstance(cell, list)
                or len(cell) != 2
                or not all(isinstance(v, int) for v in cell)
                or not (0 <= cell[0] < g.rows and 0 <= cell[1] < g.cols)
            ):
                raise ScriptError("success.cells", f"bad cell {cell!r}")
    elif kind == "panel_fraction":
        node = spec.get("node")
        if node not in scene.network.terminals:
            raise ScriptError("success.node", f"no terminal at node {node!r}")
        frac = spec.get("fraction")
        if not isinstance(frac, (int, float)) or not 0 < frac <= 1:
            raise ScriptError("success.fraction", "expected a fraction in (0, 1]")
    elif kind == "coverage_percent":
        node = spec.get("node")
        if node not in scene.grids:
            raise ScriptError("success.node", f"no grid at terminal {node!r}")
        mp = spec.get("min_percent")
        if not isinstance(mp, (int, float)) or not 0 < mp <= 100:
            raise ScriptError("success.min_percent", "expected a percent in (0, 100]")
    else:
        raise ScriptError("success.kind", f"unknown success kind {kind!r}")


def success_reached(spec: dict | None, sim: Simulator) -> bool | None:
    """Evaluate the success predicate against the live simulator. None when
    the script declares no predicate."""
    if spec is None:
        return None
    kind = spec["kind"]
    if kind == "cells_hit":
        grid = sim.grids[spec["node"]]
        return all(bool(grid.hit[r, c]) for r, c in spec["cells"])
    if kind == "panel_fraction":
        fracs = sim.panel_cov[spec["node"]].fractions()
        return all(f >= spec["fraction"] for f in fracs.values())
    if kind == "coverage_percent":
        return sim.grids[spec["node"]].percent >= spec["min_percent"]
    raise ScriptError("success.kind", f"unknown success kind {kind!r}")


def script_from_dict(doc: dict, base_dir: str | Path = ".", source: str = "<dict>") -> ScenarioScript:
    if not isinstance(doc, dict):
        raise ScriptError("$", f"script root must be an object, got {type(doc).__name__}")
    if doc.get("format") != FORMAT:
        raise ScriptError("format", f"expected {FORMAT!r}, got {doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise ScriptError("version", f"unsupported version {doc.get('version')!r}")
    name = doc.get("name", Path(source).stem)

    scene_ref = doc.get("scene")
    if isinstance(scene_ref, str):
        scene = load_scene(Path(base_dir) / scene_ref)
    elif isinstance(scene_ref, dict):
        scene = scene_from_dict(scene_ref, source=f"{source}#scene")
    else:
        raise ScriptError("scene", "expected a scene path or an inline scene object")

    try:
        noise = NoiseModel(**doc.get("noise", {}))
    except (TypeError, ValueError) as e:
        raise ScriptError("noise", str(e)) from None
    try:
        spray = SpraySpec(**doc.get("spray", {}))
    except (TypeError, ValueError) as e:
        raise ScriptError("spray", str(e)) from None
    try:
        config = SimConfig.from_dict({**SimConfig().to_dict(), **doc.get("config", {})})
    except (TypeError, ValueError) as e:
        raise ScriptError("config", str(e)) from None

    commands = []
    cmds_doc = doc.get("commands", [])
    if not isinstance(cmds_doc, list):
        raise ScriptError("commands", "expected an array")
    for i, cd in enumerate(cmds_doc):
        where = f"commands[{i}]"
        if not isinstance(cd, dict):
            raise ScriptError(where, "expected an object")
        for key in ("t", "kind"):
            if key not in cd:
                raise ScriptError(where, f"missing field {key!r}")
        commands.append((float(cd["t"]), str(cd["kind"]), dict(cd.get("args", {}))))

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScriptError("seed", f"expected an integer, got {seed!r}")

    return ScenarioScript(
        name=name,
        scene=scene,
        seed=seed,
        noise=noise,
        spray=spray,
        config=config,
        commands=tuple(commands),
        stop_time=float(doc.get("stop_time", 10.0)),
        success=doc.get("success"),
    )


def load_script(path: str | Path) -> ScenarioScript:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScriptError(str(path), f"cannot read script: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScriptError(f"{path}:{e.lineno}:{e.colno}", f"invalid JSON: {e.msg}") from None
    return script_from_dict(doc, base_dir=path.parent, source=str(path))


@dataclass
class RunResult:
    script_name: str
    seed: int
    summary: dict[str, Any]
    log_path: Path | None
    success: bool | None

    @property
    def sprayed_count(self) -> int | None:
        return self.summary.get("sprayed_count")

    @property
    def coverage_percent(self) -> float | None:
        return self.summary.get("coverage_percent")


def run_scenario(
    script: ScenarioScript,
    seed: int | None = None,
    out: str | Path | None = None,
) -> RunResult:
    """Run a script to its stop time, optionally recording a session log."""
    use_seed = script.seed if seed is None else int(seed)
    sim = Simulator(
        script.scene,
        config=script.config,
        spray=script.spray,
        noise=script.noise,
        seed=use_seed,
    )
    dt = script.config.dt
    total_ticks = round(script.stop_time / dt)
    cmds = [(round(t / dt), kind, args) for t, kind, args in script.commands]

    header = build_header(
        scene_to_dict(script.scene),
        script.config,
        script.spray,
        script.noise,
        use_seed,
        name=script.name,
    )

    latched: list[bool] = []

    def check_success(s: Simulator):
        if script.success is not None and not latched:
            if success_reached(script.success, s):
                latched.append(True)
                s.emit_event("success", dict(script.success))

    writer = SessionWriter(out, header) if out is not None else None
    try:
        drive(
            sim,
            cmds,
            total_ticks,
            on_frame=writer.frame if writer else None,
            on_event=writer.event if writer else None,
            on_command=(
                (lambda t_ms, seq, kind, args, warns: _log_cmd(writer, t_ms, seq, kind, args, warns))
                if writer
                else None
            ),
            on_tick=check_success,
        )
        success = (bool(latched)) if script.success is not None else None
        summary = summarize(sim, success, total_ticks)
        if writer:
            writer.summary(summary)
    finally:
        if writer:
            writer.close()
    return RunResult(
        script_name=script.name,
        seed=use_seed,
        summary=summary,
        log_path=Path(out) if out is not None else None,
        success=success,
    )


def _log_cmd(writer: SessionWriter, t_ms: int, seq: int, kind: str, args: dict, warns: list[str]):
    writer.command(t_ms, seq, kind, args)
    for w in warns:
        writer.warning(w, seq)
