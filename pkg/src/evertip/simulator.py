"""Deterministic fixed-tick simulator tying the robot models together.

One Simulator owns the eversion state, the path through the pipe network,
the commanded tip bend, spray bookkeeping and the RNG. Every tick is
dt seconds; sim time is tick_index * dt, and telemetry frames are keyed to
sim time (a whole number of ticks per frame), so the same seed, scene and
command sequence always reproduce the same frames bit for bit. Wall-clock
pacing, when wanted, lives in the callers.

Commands are applied between ticks: callers drain their command sources,
call apply() for each, then step(). Two targets set in the same gap mean
the last writer wins, which is exactly how a human racing a 10 ms tick
should expect it to behave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import eversion
from .eversion import EversionState
from .kinematics import (
    BEND_STRAIGHT,
    TipGeometry,
    TipPose,
    bend_from_displacements,
    forward_tip_frame,
    joystick_to_bend,
    servo_angles_for,
    tendon_displacements,
)
from .mechcalc import SERVO_CATALOG, ServoSpec, SpoolSpec
from .network import advance_along_network, start_path, tip_frame, tip_point
from .protocol import PAYLOADS, Event, ProtocolError, TelemetryFrame
from .scene import Scene
from .spray import SpraySpec, TargetGrid, cone_mask, spray_hits


def _servo_by_name(name: str) -> ServoSpec:
    for s in SERVO_CATALOG:
        if s.name == name:
            return s
    raise ValueError(f"unknown servo {name!r}")


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step simulation parameters. Times s, lengths m, pressure kPa."""

    dt: float = 0.01
    telemetry_hz: float = 20.0
    regulator_tau: float = 0.15
    growth_rate: float = 0.02  # m/s of growth per kPa above threshold
    growth_threshold: float = 10.0
    max_length: float = 5.0
    junction_deadband_deg: float = 15.0
    spool_radius: float = 0.0125
    servo_name: str = "DM-S0090MD"
    panel_samples: int = 5  # per side, for terminal wall coverage
    panel_hit_fraction: float = 0.6
    geometry: TipGeometry = field(default_factory=TipGeometry)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        tpf = 1.0 / (self.telemetry_hz * self.dt)
        if abs(tpf - round(tpf)) > 1e-9 or round(tpf) < 1:
            raise ValueError(
                f"telemetry period must be a whole number of ticks "
                f"(dt={self.dt}, hz={self.telemetry_hz})"
            )
        _servo_by_name(self.servo_name)

    @property
    def ticks_per_frame(self) -> int:
        return round(1.0 / (self.telemetry_hz * self.dt))

    @property
    def servo(self) -> ServoSpec:
        return _servo_by_name(self.servo_name)

    @property
    def spool(self) -> SpoolSpec:
        return SpoolSpec(radius=self.spool_radius)

    def to_dict(self) -> dict:
        g = self.geometry
        return {
            "dt": self.dt,
            "telemetry_hz": self.telemetry_hz,
            "regulator_tau": self.regulator_tau,
            "growth_rate": self.growth_rate,
            "growth_threshold": self.growth_threshold,
            "max_length": self.max_length,
            "junction_deadband_deg": self.junction_deadband_deg,
            "spool_radius": self.spool_radius,
            "servo_name": self.servo_name,
            "panel_samples": self.panel_samples,
            "panel_hit_fraction": self.panel_hit_fraction,
            "geometry": {
                "disc_count": g.disc_count,
                "disc_spacing": g.disc_spacing,
                "disc_diameter": g.disc_diameter,
                "tendon_pitch_radius": g.tendon_pitch_radius,
                "max_bend_deg": g.max_bend_deg,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SimConfig":
        doc = dict(doc)
        geo = doc.pop("geometry", None)
        kwargs = {k: doc[k] for k in doc}
        if geo is not None:
            kwargs["geometry"] = TipGeometry(**geo)
        return cls(**kwargs)


@dataclass(frozen=True)
class NoiseModel:
    """Zero means off. Aim noise tilts the spray axis per event; actuation
    noise perturbs tendon displacements each tick."""

    aim_sigma_deg: float = 0.0
    actuation_sigma_mm: float = 0.0

    def __post_init__(self):
        if self.aim_sigma_deg < 0 or self.actuation_sigma_mm < 0:
            raise ValueError("noise sigmas must be >= 0")

    def to_dict(self) -> dict:
        return {
            "aim_sigma_deg": self.aim_sigma_deg,
            "actuation_sigma_mm": self.actuation_sigma_mm,
        }


@dataclass
class PanelCoverage:
    """Hit bookkeeping for one terminal's five wall panels."""

    node: str
    points: dict[str, np.ndarray]  # panel name -> (n, 3) sample points
    normals: dict[str, tuple[float, float, float]]
    hits: dict[str, np.ndarray]  # panel name -> (n,) bool

    def fractions(self) -> dict[str, float]:
        return {name: float(h.mean()) for name, h in sorted(self.hits.items())}


class Simulator:
    """Fixed-tick engine. Deterministic for a given (scene, config, spray,
    noise, seed, command sequence)."""

    def __init__(
        self,
        scene: Scene,
        config: SimConfig | None = None,
        spray: SpraySpec | None = None,
        noise: NoiseModel | None = None,
        seed: int = 0,
    ):
        self.scene = scene
        self.config = config or SimConfig()
        self.spray_spec = spray or SpraySpec()
        self.noise = noise or NoiseModel()
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)

        self.net = scene.network
        self.path = start_path(self.net)
        self.ev = EversionState(max_length=self.config.max_length)
        self.bend = BEND_STRAIGHT
        self.payload = "sprayer"
        self.spray_on = False
        self.estopped = False
        self.tick = 0
        self.frame_seq = 0
        self._bend_eff = BEND_STRAIGHT
        self._last_block: str | None = None
        self._pending_events: list[Event] = []

        self.grids: dict[str, TargetGrid] = {
            node: g.fresh() for node, g in scene.grids.items()
        }
        self.panel_cov: dict[str, PanelCoverage] = {}
        for node, term in self.net.terminals.items():
            pts, normals, hits = {}, {}, {}
            for panel in term.panels():
                pts[panel.name] = panel.sample_points(self.config.panel_samples)
                normals[panel.name] = panel.normal
                hits[panel.name] = np.zeros(len(pts[panel.name]), dtype=bool)
            self.panel_cov[node] = PanelCoverage(node, pts, normals, hits)

    # ------------------------------------------------------------- time --

    @property
    def sim_time(self) -> float:
        return self.tick * self.config.dt

    # --------------------------------------------------------- commands --

    def apply(self, kind: str, args: dict) -> list[str]:
        """Apply one operator command. Returns human-readable warnings for
        anything accepted-but-adjusted; raises ProtocolError on nonsense."""
        warnings: list[str] = []
        if kind == "joystick":
            self.bend = joystick_to_bend(
                float(args["x"]), float(args["y"]), self.config.geometry
            )
        elif kind == "set_pressure":
            if self.estopped:
                warnings.append("estopped: pressure target ignored until resume")
            else:
                self.ev = replace(self.ev, target_pressure=float(args["kpa"]))
        elif kind == "spray":
            on = bool(args["on"])
            if on and self.estopped:
                warnings.append("estopped: spray ignored until resume")
            elif on and self.payload != "sprayer":
                warnings.append(
                    f"payload is {self.payload!r}, not the sprayer; ignoring"
                )
            else:
                self.spray_on = on
        elif kind == "retract":
            want = float(args["length_m"])
            dl = min(want, self.ev.everted_length)
            if dl < want:
                warnings.append(
                    f"retract clamped to {dl:.6g} m (only that much everted)"
                )
            self.path, self.ev = retract(self.path, self.ev, dl)
            self._last_block = None
            self.emit_event("retract", {"length_m": dl})
        elif kind == "select_payload":
            payload = args["payload"]
            if payload not in PAYLOADS:
                raise ProtocolError(
                    f"payload must be one of {PAYLOADS}", field="args.payload"
                )
            if payload != self.payload:
                self.payload = payload
                if payload != "sprayer":
                    self.spray_on = False
                self.emit_event("payload", {"payload": payload})
        elif kind == "estop":
            self.estopped = True
            self.spray_on = False
            self.ev = replace(
                self.ev, target_pressure=0.0, status=eversion.HOLDING
            )
            self.emit_event("estop", {})
        elif kind == "resume":
            self.estopped = False
            self.emit_event("resume", {})
        else:
            raise ProtocolError(f"unknown command kind {kind!r}", field="kind")
        return warnings

    def emit_event(self, name: str, data: dict):
        self._pending_events.append(Event(self.sim_time, name, data))

    def take_events(self) -> list[Event]:
        out, self._pending_events = self._pending_events, []
        return out

    # ------------------------------------------------------------- tick --

    def step(self):
        cfg = self.config
        self.ev = eversion.pressure_step(self.ev, cfg.dt, cfg.regulator_tau)

        # effective bend: commanded, or perturbed by actuation noise
        if self.noise.actuation_sigma_mm > 0:
            d = np.array(tendon_displacements(self.bend, cfg.geometry))
            d += self.rng.normal(0.0, self.noise.actuation_sigma_mm * 1e-3, 4)
            d = np.clip(d, 0.0, None)
            # opposite tendons cannot both pull; keep only the net of each pair
            for i in (0, 1):
                slack = min(d[i], d[i + 2])
                d[i] -= slack
                d[i + 2] -= slack
            self._bend_eff = bend_from_displacements(tuple(d), cfg.geometry)
        else:
            self._bend_eff = self.bend

        if self.estopped:
            self.ev = replace(self.ev, status=eversion.HOLDING)
        else:
            demand = eversion.growth_demand(
                self.ev, cfg.dt, cfg.growth_rate, cfg.growth_threshold
            )
            if demand > 0:
                try_dl = min(demand, self.ev.max_length - self.ev.everted_length)
                res = advance_along_network(
                    self.path,
                    self.net,
                    try_dl,
                    steer=self.bend,
                    deadband_deg=cfg.junction_deadband_deg,
                )
                self.path = res.path
                point = tip_point(self.net, self.path)
                self.ev = eversion.growth_step(
                    self.ev,
                    cfg.dt,
                    cfg.growth_rate,
                    cfg.growth_threshold,
                    free_length=res.consumed,
                    tip_point=(float(point[0]), float(point[1]), float(point[2])),
                )
                for ekind, node, detail in res.events:
                    if ekind == "junction":
                        self.emit_event("junction", {"node": node, "branch": detail})
                block = res.blocked if self.ev.status == eversion.BLOCKED else None
                if block != self._last_block:
                    if block is not None:
                        self.emit_event("blocked", {"reason": block})
                    self._last_block = block
            else:
                self.ev = replace(self.ev, status=eversion.HOLDING)
                self._last_block = None

        if self.spray_on and self.payload == "sprayer":
            self._spray_once()

        self.tick += 1

    def _tip_pose_world(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(position, heading, rotation) of the continuum tip in the world."""
        base_r = tip_frame(self.net, self.path)
        base_p = tip_point(self.net, self.path)
        r_local, p_local = forward_tip_frame(self._bend_eff, self.config.geometry)
        r = base_r @ r_local
        p = base_p + base_r @ p_local
        return p, r[:, 2].copy(), r

    def _spray_once(self):
        pos, heading, _ = self._tip_pose_world()
        if self.noise.aim_sigma_deg > 0:
            sigma = math.radians(self.noise.aim_sigma_deg)
            g = self.rng.normal(0.0, sigma, 2)
            # tilt in the two directions orthogonal to the heading
            basis = _orthobasis(heading)
            heading = heading + g[0] * basis[0] + g[1] * basis[1]
            heading /= np.linalg.norm(heading)
        pose = TipPose(
            (float(pos[0]), float(pos[1]), float(pos[2])),
            (float(heading[0]), float(heading[1]), float(heading[2])),
        )
        for node in sorted(self.grids):
            grid = self.grids[node]
            before = grid.sprayed_count
            cells = spray_hits(pose, self.spray_spec, grid)
            if grid.sprayed_count > before:
                self.emit_event(
                    "spray_hits",
                    {
                        "node": node,
                        "cells": sorted([r, c] for r, c in cells),
                        "sprayed_count": grid.sprayed_count,
                    },
                )
        for node in sorted(self.panel_cov):
            cov = self.panel_cov[node]
            for name in sorted(cov.points):
                mask = cone_mask(
                    pos, heading, self.spray_spec, cov.points[name], cov.normals[name]
                )
                new = mask & ~cov.hits[name]
                if new.any():
                    cov.hits[name] |= mask
                    self.emit_event(
                        "panel_hits",
                        {
                            "node": node,
                            "panel": name,
                            "fraction": float(cov.hits[name].mean()),
                        },
                    )

    # -------------------------------------------------------- telemetry --

    def frame(self) -> TelemetryFrame:
        pos, heading, rot = self._tip_pose_world()
        disp = tendon_displacements(self.bend, self.config.geometry)
        servo = servo_angles_for(disp, self.config.spool, self.config.servo)
        coverage = self._coverage_dict()
        pov = self._pov_cells(pos, rot)
        frame = TelemetryFrame(
            seq=self.frame_seq,
            sim_time=round(self.sim_time, 9),
            status=self.ev.status,
            pressure_kpa=self.ev.pressure,
            target_kpa=self.ev.target_pressure,
            everted_length=self.ev.everted_length,
            tip_position=(float(pos[0]), float(pos[1]), float(pos[2])),
            tip_heading=(float(heading[0]), float(heading[1]), float(heading[2])),
            bend_deg=self.bend.magnitude_deg,
            bend_azimuth_deg=self.bend.direction_deg,
            servo_angles_deg=servo.angles_deg,
            payload=self.payload,
            spray_on=self.spray_on,
            estopped=self.estopped,
            coverage=coverage,
            pov=pov,
        )
        self.frame_seq += 1
        return frame

    def _coverage_dict(self) -> dict[str, Any] | None:
        out: dict[str, Any] = {}
        if self.grids:
            cells = {
                node: {"sprayed_count": g.sprayed_count, "percent": g.percent}
                for node, g in sorted(self.grids.items())
            }
            total = sum(g.sprayed_count for g in self.grids.values())
            out["cells"] = cells
            out["sprayed_count"] = total
        if self.panel_cov:
            out["panels"] = {
                node: cov.fractions() for node, cov in sorted(self.panel_cov.items())
            }
        return out or None

    def _pov_cells(self, pos: np.ndarray, rot: np.ndarray) -> list[dict] | None:
        """Cell centers projected into the tip camera (pinhole, +z forward)."""
        if not self.grids:
            return None
        out = []
        for node in sorted(self.grids):
            grid = self.grids[node]
            local = (grid.centers() - pos) @ rot  # world -> camera
            for idx in range(local.shape[0]):
                z = local[idx, 2]
                if z <= 1e-6:
                    continue
                r, c = divmod(idx, grid.cols)
                out.append(
                    {
                        "r": int(r),
                        "c": int(c),
                        "x": round(float(local[idx, 0] / z), 4),
                        "y": round(float(local[idx, 1] / z), 4),
                        "hit": bool(grid.hit[r, c]),
                    }
                )
        return out

    # ---------------------------------------------------------- queries --

    def coverage_counts(self) -> dict[str, int]:
        return {node: g.sprayed_count for node, g in sorted(self.grids.items())}

    def panel_fractions(self) -> dict[str, dict[str, float]]:
        return {node: cov.fractions() for node, cov in sorted(self.panel_cov.items())}


def retract(path, state, delta_l):
    """Retract delta_l of body: rewind the path and pop the wall ledger.
    Returns (path, state); raises if more than the everted length is asked."""
    from .network import rewind_path

    new_state = eversion.retract_state(state, delta_l)
    new_path = rewind_path(path, min(delta_l, path.length))
    return new_path, new_state


def _orthobasis(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ref = np.array([0.0, 0.0, 1.0]) if abs(h[2]) < 0.99 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(ref, h)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(h, e1)
    return e1, e2
