"""Command line entry points.

  evertip serve --scene scenes/straight_grid.json --port 8770 [--ws-port 8771]
  evertip run --script scripts/raster_sigma3.json --seed 4 --out runs/r4.jsonl
  evertip replay --log runs/r4.jsonl
  evertip report --log runs/*.jsonl
  evertip design-check --springs design/springs.json --servos design/servo_catalog.csv
  evertip assets --dir .
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

from . import gateway as gateway_mod
from . import session as session_mod
from .mechcalc import (
    SERVO_CATALOG,
    ActuationRequirement,
    SpoolSpec,
    SpringSpec,
    format_report,
    load_servo_catalog,
    required_torque,
    servo_feasibility,
    shear_modulus,
    spring_constant,
    spring_force,
)
from .presets import write_default_assets
from .scenario import ScriptError, load_script, run_scenario
from .scene import SceneError, load_scene
from .simulator import NoiseModel, SimConfig
from .spray import SpraySpec, coverage_stats


def _load_serve_config(path: str | None):
    """serve config file: {"sim": {...}, "spray": {...}, "noise": {...},
    "seed": 0}, everything optional."""
    doc = {}
    if path:
        doc = json.loads(Path(path).read_text())
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: config root must be an object")
    sim_doc = {**SimConfig().to_dict(), **doc.get("sim", {})}
    config = SimConfig.from_dict(sim_doc)
    spray = SpraySpec(**doc.get("spray", {}))
    noise = NoiseModel(**doc.get("noise", {}))
    seed = int(doc.get("seed", 0))
    return config, spray, noise, seed


def _cmd_serve(args) -> int:
    scene = load_scene(args.scene)
    config, spray, noise, seed = _load_serve_config(args.config)
    if args.seed is not None:
        seed = args.seed
    print(
        f"serving scene {scene.name!r} on tcp {args.host}:{args.port}"
        + (f", ws {args.host}:{args.ws_port}" if args.ws_port else "")
        + (" (realtime)" if args.realtime else " (free-running)")
    )
    try:
        asyncio.run(
            gateway_mod.serve(
                scene,
                config=config,
                spray=spray,
                noise=noise,
                seed=seed,
                host=args.host,
                port=args.port,
                ws_port=args.ws_port,
                realtime=args.realtime,
                record=args.record,
            )
        )
    except KeyboardInterrupt:
        print("stopped")
    return 0


def _cmd_run(args) -> int:
    script = load_script(args.script)
    out = args.out
    if out is None:
        seed = script.seed if args.seed is None else args.seed
        out = f"{script.name}_seed{seed}.jsonl"
    result = run_scenario(script, seed=args.seed, out=out)
    s = result.summary
    print(f"run {result.script_name!r} seed={result.seed} -> {result.log_path}")
    print(f"  end_time={s['end_time']}s everted={s['everted_length']:.3f}m status={s['status']}")
    if "sprayed_count" in s:
        print(f"  coverage: {s['sprayed_count']}/60 cells = {s['coverage_percent']}%")
    for node, fracs in s.get("panel_fractions", {}).items():
        pretty = ", ".join(f"{k}={v:.2f}" for k, v in fracs.items())
        print(f"  panels[{node}]: {pretty}")
    if result.success is not None:
        print(f"  success: {result.success}")
    return 0


def _cmd_replay(args) -> int:
    try:
        result = session_mod.replay(args.log)
    except session_mod.ReplayError as e:
        print(f"replay refused: {e}")
        return 2
    if result.ok:
        print(f"replay OK: {result.frames_checked} frames identical")
        return 0
    print(f"replay FAILED: {result.detail} (after {result.frames_checked} matching frames)")
    return 1


def _cmd_report(args) -> int:
    counts = []
    for log_path in args.log:
        rec = session_mod.read_log(log_path)
        if rec.summary is None or "sprayed_count" not in rec.summary:
            print(f"{log_path}: no grid coverage in this log", file=sys.stderr)
            return 2
        counts.append(rec.summary["sprayed_count"])
    report = coverage_stats(counts)
    print(report.format_table())
    return 0


def _cmd_design_check(args) -> int:
    doc = json.loads(Path(args.springs).read_text())
    spring = SpringSpec(
        young_modulus=doc["young_modulus"],
        poisson_ratio=doc["poisson_ratio"],
        wire_diameter=doc["wire_diameter"],
        outer_diameter=doc["outer_diameter"],
        active_coils=doc["active_coils"],
        free_length=doc["free_length"],
    )
    x = doc["working_displacement"]
    count = doc["spring_count"]
    spool = SpoolSpec(radius=doc.get("spool_radius", 0.0125))
    travel = doc.get("required_travel", 0.0145)

    g = shear_modulus(spring.young_modulus, spring.poisson_ratio)
    k = spring_constant(spring)
    f_each = spring_force(k, x)
    req = ActuationRequirement(total_force=f_each * count, required_displacement=travel)
    torque = required_torque(req, spool)

    catalog = SERVO_CATALOG
    if args.servos:
        catalog = load_servo_catalog(Path(args.servos))
    report = servo_feasibility(catalog, req, spool, supply=args.supply)

    print(f"shear modulus      G = {g / 1e9:.2f} GPa")
    print(f"spring constant    k = {k:.1f} N/m")
    print(f"spring force       F = {f_each:.3f} N each x {count} = {req.total_force:.3f} N")
    print(f"required torque    tau = {torque:.4f} Nm at spool r = {spool.radius * 1e3:.1f} mm")
    print(f"required travel    {travel * 1e3:.1f} mm")
    print()
    print(format_report(report))
    return 0


def _cmd_assets(args) -> int:
    written = write_default_assets(args.dir)
    for p in written:
        print(p)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evertip",
        description="Tendon-steered continuum tip on an eversion robot: "
        "simulator, design calculator and teleoperation gateway.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the teleoperation gateway")
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--config", help="config JSON ({sim, spray, noise, seed})")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8770, help="TCP port")
    p.add_argument("--ws-port", type=int, default=None, help="WebSocket port")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--realtime", action="store_true", help="pace ticks to the wall clock")
    p.add_argument("--record", default=None, help="write a session log here")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("run", help="run a scripted scenario")
    p.add_argument("--script", required=True, help="script JSON file")
    p.add_argument("--seed", type=int, default=None, help="override the script seed")
    p.add_argument("--out", default=None, help="session log path (default <name>_seed<N>.jsonl)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("replay", help="re-run a session log and verify telemetry")
    p.add_argument("--log", required=True)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("report", help="coverage table from one or more run logs")
    p.add_argument("--log", required=True, nargs="+")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("design-check", help="spring/servo design arithmetic")
    p.add_argument("--springs", required=True, help="springs JSON file")
    p.add_argument("--servos", default=None, help="servo catalog CSV (default: built-in)")
    p.add_argument("--supply", default="6V", choices=["4.8V", "6V"])
    p.set_defaults(func=_cmd_design_check)

    p = sub.add_parser("assets", help="write the built-in scenes and scripts")
    p.add_argument("--dir", default=".", help="output root")
    p.set_defaults(func=_cmd_assets)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SceneError, ScriptError, session_mod.ReplayError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
