"""Run logs and deterministic replay.

A session log is JSON Lines: a header line carrying everything needed to
rebuild the simulation (scene, config, spray, noise, seed, protocol
version) plus a hash over all of it, then command/warning/event/telemetry
lines in the order they happened, then one summary line.

Replay rebuilds the simulator from the header, refuses to run if the
stored hash does not match the header contents (any tampering with seed,
scene or config invalidates the log), re-applies the logged commands at
their recorded ticks and checks the regenerated telemetry against the
logged frames byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

from .protocol import (
    PROTOCOL_VERSION,
    CommandMessage,
    Event,
    TelemetryFrame,
    WarningReply,
    decode_line,
    encode_message,
)
from .scene import scene_from_dict
from .simulator import NoiseModel, SimConfig, Simulator
from .spray import SpraySpec

LOG_FORMAT = "evertip-log"
LOG_VERSION = 1


class ReplayError(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(core: dict) -> str:
    return hashlib.sha256(canonical_json(core).encode()).hexdigest()


def build_header(
    scene_doc: dict,
    config: SimConfig,
    spray: SpraySpec,
    noise: NoiseModel,
    seed: int,
    name: str = "",
) -> dict:
    core = {
        "scene": scene_doc,
        "config": config.to_dict(),
        "spray": {
            "cone_half_angle_deg": spray.cone_half_angle_deg,
            "range_m": spray.range_m,
            "flow": spray.flow,
        },
        "noise": noise.to_dict(),
        "seed": int(seed),
        "protocol": PROTOCOL_VERSION,
    }
    return {
        "type": "header",
        "format": LOG_FORMAT,
        "version": LOG_VERSION,
        "name": name,
        **core,
        "config_hash": config_hash(core),
    }


def verify_header(header: dict) -> None:
    if header.get("type") != "header" or header.get("format") != LOG_FORMAT:
        raise ReplayError("not an evertip run log (bad header line)")
    if header.get("version") != LOG_VERSION:
        raise ReplayError(f"unsupported log version {header.get('version')!r}")
    core = {
        k: header[k] for k in ("scene", "config", "spray", "noise", "seed", "protocol")
    }
    want = config_hash(core)
    got = header.get("config_hash")
    if got != want:
        raise ReplayError(
            "config hash mismatch: log header was altered or is from a "
            f"different setup (stored {got!r}, computed {want!r})"
        )


def simulator_from_header(header: dict) -> Simulator:
    verify_header(header)
    scene = scene_from_dict(header["scene"], source=header.get("name", "<log>"))
    return Simulator(
        scene,
        config=SimConfig.from_dict(header["config"]),
        spray=SpraySpec(**header["spray"]),
        noise=NoiseModel(**header["noise"]),
        seed=header["seed"],
    )


class SessionWriter:
    """Appends log lines as the run happens. Use as a context manager."""

    def __init__(self, path: str | Path, header: dict):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w")
        self._fh.write(canonical_json(header) + "\n")

    def command(self, tick_ms: int, seq: int, kind: str, args: dict):
        self._fh.write(
            encode_message(CommandMessage(seq=seq, t_ms=tick_ms, kind=kind, args=args))
            + "\n"
        )

    def warning(self, message: str, seq: int | None = None):
        self._fh.write(encode_message(WarningReply(message, seq)) + "\n")

    def event(self, ev: Event):
        self._fh.write(encode_message(ev) + "\n")

    def frame(self, fr: TelemetryFrame):
        self._fh.write(encode_message(fr) + "\n")

    def summary(self, doc: dict):
        self._fh.write(canonical_json({"type": "summary", **doc}) + "\n")

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass
class LogRecords:
    header: dict
    commands: list[CommandMessage]
    frames: list[TelemetryFrame]
    events: list[Event]
    summary: dict | None
    frame_lines: list[str]  # raw JSON lines, for byte-level comparison


def read_log(path: str | Path) -> LogRecords:
    path = Path(path)
    header = None
    commands: list[CommandMessage] = []
    frames: list[TelemetryFrame] = []
    events: list[Event] = []
    frame_lines: list[str] = []
    summary = None
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise ReplayError(f"{path}:{lineno}: invalid JSON: {e.msg}") from None
            t = doc.get("type")
            if t == "header":
                header = doc
            elif t == "cmd":
                commands.append(
                    CommandMessage(doc["seq"], doc["t_ms"], doc["kind"], doc.get("args", {}))
                )
            elif t == "telemetry":
                frames.append(decode_line(line))
                frame_lines.append(line)
            elif t == "event":
                events.append(Event(doc["sim_time"], doc["name"], doc.get("data", {})))
            elif t == "summary":
                summary = doc
            elif t == "warning":
                pass
            else:
                raise ReplayError(f"{path}:{lineno}: unknown record type {t!r}")
    if header is None:
        raise ReplayError(f"{path}: no header line found")
    return LogRecords(header, commands, frames, events, summary, frame_lines)


def drive(
    sim: Simulator,
    commands: Iterable[tuple[int, str, dict]],
    total_ticks: int,
    on_frame: Callable[[TelemetryFrame], None] | None = None,
    on_event: Callable[[Event], None] | None = None,
    on_command: Callable[[int, int, str, dict, list[str]], None] | None = None,
    on_tick: Callable[[Simulator], None] | None = None,
) -> None:
    """The canonical scripted run loop, shared by record and replay.

    commands is (tick, kind, args), sorted by tick. Each loop pass applies
    the commands due at the current tick, emits a telemetry frame when the
    tick is on the frame cadence, then steps. A final frame lands after the
    last step when the stop tick is on the cadence.
    """
    pending = sorted(commands, key=lambda c: c[0])
    tpf = sim.config.ticks_per_frame
    i = 0
    seq = 0

    def flush_events():
        for ev in sim.take_events():
            if on_event:
                on_event(ev)

    while sim.tick < total_ticks:
        while i < len(pending) and pending[i][0] <= sim.tick:
            tick, kind, args = pending[i]
            warnings = sim.apply(kind, args)
            if on_command:
                on_command(round(sim.tick * sim.config.dt * 1000), seq, kind, args, warnings)
            seq += 1
            i += 1
        flush_events()
        if sim.tick % tpf == 0 and on_frame:
            on_frame(sim.frame())
        sim.step()
        flush_events()
        if on_tick:
            on_tick(sim)
    while i < len(pending):  # commands at the stop tick still apply
        _, kind, args = pending[i]
        warnings = sim.apply(kind, args)
        if on_command:
            on_command(round(sim.tick * sim.config.dt * 1000), seq, kind, args, warnings)
        seq += 1
        i += 1
    flush_events()
    if sim.tick % tpf == 0 and on_frame:
        on_frame(sim.frame())


@dataclass
class ReplayResult:
    ok: bool
    frames_checked: int
    mismatch_at: int | None = None  # index of first diverging frame
    detail: str = ""


def replay(path: str | Path) -> ReplayResult:
    """Re-run a log and compare regenerated telemetry byte for byte."""
    rec = read_log(path)
    sim = simulator_from_header(rec.header)
    dt = sim.config.dt
    cmds = [
        (round(c.t_ms / 1000.0 / dt), c.kind, c.args) for c in rec.commands
    ]
    if rec.summary is not None and "total_ticks" in rec.summary:
        total_ticks = int(rec.summary["total_ticks"])
    elif rec.frames:
        total_ticks = round(rec.frames[-1].sim_time / dt)
    else:
        total_ticks = max((t for t, _, _ in cmds), default=0)

    regenerated: list[str] = []
    drive(
        sim,
        cmds,
        total_ticks,
        on_frame=lambda fr: regenerated.append(encode_message(fr)),
    )
    checked = 0
    for idx, (want, got) in enumerate(zip(rec.frame_lines, regenerated)):
        if want != got:
            return ReplayResult(False, checked, idx, f"frame {idx} diverges")
        checked += 1
    if len(regenerated) != len(rec.frame_lines):
        return ReplayResult(
            False,
            checked,
            checked,
            f"frame count differs: log has {len(rec.frame_lines)}, "
            f"replay produced {len(regenerated)}",
        )
    return ReplayResult(True, checked)


def summarize(sim: Simulator, success: bool | None, total_ticks: int) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "total_ticks": total_ticks,
        "end_time": round(total_ticks * sim.config.dt, 9),
        "everted_length": sim.ev.everted_length,
        "status": sim.ev.status,
        "sprayed_counts": sim.coverage_counts(),
        "panel_fractions": sim.panel_fractions(),
    }
    grids = sim.grids
    if len(grids) == 1:
        g = next(iter(grids.values()))
        doc["sprayed_count"] = g.sprayed_count
        doc["coverage_percent"] = g.percent
    if success is not None:
        doc["success"] = success
    return doc
