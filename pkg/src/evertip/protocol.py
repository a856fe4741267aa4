"""Wire protocol: JSON Lines, one message per line, over TCP or WebSocket.

Message families (the "type" field):

  hello      server -> client on connect: protocol version, role granted
  cmd        client -> server: operator command, seq strictly increasing
  telemetry  server -> clients at the telemetry rate
  event      server -> clients on discrete happenings (junction, hits, ...)
  error      server -> client when a message is rejected; names the field
  warning    server -> client for dropped-but-survivable input (stale seq)

Commands carry (seq, t_ms, kind, args). Decoding is strict: unknown types,
unknown kinds, missing or mistyped fields all raise ProtocolError naming
the offending field so the sender can fix its encoder.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

PROTOCOL_VERSION = 1

COMMAND_KINDS = {
    "joystick": ("x", "y"),
    "set_pressure": ("kpa",),
    "spray": ("on",),
    "retract": ("length_m",),
    "select_payload": ("payload",),
    "estop": (),
    "resume": (),
}

PAYLOADS = ("sprayer", "sensor")

ROLES = ("operator", "observer")


class ProtocolError(ValueError):
    """Rejected message. `field` names what was wrong where that is known."""

    def __init__(self, message: str, *, field: str | None = None):
        self.field = field
        super().__init__(message)


@dataclass(frozen=True)
class Hello:
    protocol: int = PROTOCOL_VERSION
    role: str = "observer"
    server: str = "evertip"

    def __post_init__(self):
        if self.role not in ROLES:
            raise ProtocolError(f"unknown role {self.role!r}", field="role")


@dataclass(frozen=True)
class CommandMessage:
    seq: int
    t_ms: int
    kind: str
    args: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        validate_command(self.kind, self.args, seq=self.seq)


@dataclass(frozen=True)
class TelemetryFrame:
    seq: int
    sim_time: float
    status: str
    pressure_kpa: float
    target_kpa: float
    everted_length: float
    tip_position: tuple[float, float, float]
    tip_heading: tuple[float, float, float]
    bend_deg: float
    bend_azimuth_deg: float
    servo_angles_deg: tuple[float, float, float, float]
    payload: str = "sprayer"
    spray_on: bool = False
    estopped: bool = False
    coverage: dict[str, Any] | None = None
    pov: list[dict[str, Any]] | None = None


@dataclass(frozen=True)
class Event:
    sim_time: float
    name: str
    data: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ErrorReply:
    message: str
    field: str | None = None
    seq: int | None = None


@dataclass(frozen=True)
class WarningReply:
    message: str
    seq: int | None = None


_TYPES = {
    "hello": Hello,
    "cmd": CommandMessage,
    "telemetry": TelemetryFrame,
    "event": Event,
    "error": ErrorReply,
    "warning": WarningReply,
}
_TYPE_NAMES = {cls: name for name, cls in _TYPES.items()}


def validate_command(kind: str, args: dict, seq: int | None = None) -> None:
    if not isinstance(kind, str) or kind not in COMMAND_KINDS:
        raise ProtocolError(
            f"unknown command kind {kind!r} (known: {sorted(COMMAND_KINDS)})",
            field="kind",
        )
    if not isinstance(args, dict):
        raise ProtocolError(f"args must be an object, got {type(args).__name__}", field="args")
    expected = COMMAND_KINDS[kind]
    for name in expected:
        if name not in args:
            raise ProtocolError(
                f"command {kind!r} missing argument {name!r}", field=f"args.{name}"
            )
    for name in args:
        if name not in expected:
            raise ProtocolError(
                f"command {kind!r} does not take argument {name!r}", field=f"args.{name}"
            )
    def _num(name):
        v = args[name]
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ProtocolError(
                f"argument {name!r} must be a number, got {v!r}", field=f"args.{name}"
            )
        return float(v)

    if kind == "joystick":
        for name in ("x", "y"):
            v = _num(name)
            if not -1.0 <= v <= 1.0:
                raise ProtocolError(
                    f"joystick {name} must be in [-1, 1], got {v}", field=f"args.{name}"
                )
    elif kind == "set_pressure":
        if _num("kpa") < 0:
            raise ProtocolError("pressure target must be >= 0", field="args.kpa")
    elif kind == "spray":
        if not isinstance(args["on"], bool):
            raise ProtocolError("spray 'on' must be a boolean", field="args.on")
    elif kind == "retract":
        if _num("length_m") < 0:
            raise ProtocolError("retract length must be >= 0", field="args.length_m")
    elif kind == "select_payload":
        if args["payload"] not in PAYLOADS:
            raise ProtocolError(
                f"payload must be one of {PAYLOADS}, got {args['payload']!r}",
                field="args.payload",
            )
    if seq is not None and (not isinstance(seq, int) or isinstance(seq, bool) or seq < 0):
        raise ProtocolError(f"seq must be a non-negative integer, got {seq!r}", field="seq")


def encode_message(msg) -> str:
    """One JSON line (no trailing newline) for any protocol dataclass."""
    name = _TYPE_NAMES.get(type(msg))
    if name is None:
        raise ProtocolError(f"not a protocol message: {type(msg).__name__}")
    doc = {"type": name, **asdict(msg)}
    # drop empty optionals to keep lines short
    doc = {k: v for k, v in doc.items() if v is not None}
    return json.dumps(doc, separators=(",", ":"))


def _tuple3(value, where: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ProtocolError(f"{where} must be [x, y, z]", field=where)
    return tuple(float(v) for v in value)


def decode_line(line: str):
    """Parse one line into its message dataclass. Blank lines return None.
    Anything else malformed raises ProtocolError."""
    line = line.strip()
    if not line:
        return None
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"invalid JSON at column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ProtocolError("message must be a JSON object")
    mtype = doc.pop("type", None)
    if mtype not in _TYPES:
        raise ProtocolError(
            f"unknown message type {mtype!r} (known: {sorted(_TYPES)})", field="type"
        )
    cls = _TYPES[mtype]
    try:
        if cls is CommandMessage:
            return CommandMessage(
                seq=doc["seq"], t_ms=doc["t_ms"], kind=doc["kind"],
                args=doc.get("args", {}),
            )
        if cls is TelemetryFrame:
            return TelemetryFrame(
                seq=int(doc["seq"]),
                sim_time=float(doc["sim_time"]),
                status=doc["status"],
                pressure_kpa=float(doc["pressure_kpa"]),
                target_kpa=float(doc["target_kpa"]),
                everted_length=float(doc["everted_length"]),
                tip_position=_tuple3(doc["tip_position"], "tip_position"),
                tip_heading=_tuple3(doc["tip_heading"], "tip_heading"),
                bend_deg=float(doc["bend_deg"]),
                bend_azimuth_deg=float(doc["bend_azimuth_deg"]),
                servo_angles_deg=tuple(float(v) for v in doc["servo_angles_deg"]),
                payload=doc.get("payload", "sprayer"),
                spray_on=bool(doc.get("spray_on", False)),
                estopped=bool(doc.get("estopped", False)),
                coverage=doc.get("coverage"),
                pov=doc.get("pov"),
            )
        return cls(**doc)
    except ProtocolError:
        raise
    except KeyError as e:
        raise ProtocolError(f"missing field {e.args[0]!r}", field=str(e.args[0])) from None
    except (TypeError, ValueError) as e:
        raise ProtocolError(f"bad {mtype} message: {e}") from None


def encode_lines(messages) -> str:
    return "".join(encode_message(m) + "\n" for m in messages)
