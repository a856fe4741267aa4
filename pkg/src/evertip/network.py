"""Pipe network geometry and the path of a robot growing through it.

A network is a graph of nodes joined by straight or circular-arc segments,
with optional junction rules (which branch a steering command selects) and
terminal boxes (open-faced enclosures the robot sprays into). All lengths
are metres; azimuths and steering angles are degrees.

A RobotPath records the ordered segment traversals plus the arc-length
offset into the last one. Each traversal snapshots its segment length, so
retraction can rewind without the network in hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

Vec = tuple[float, float, float]

JUNCTION_DEADBAND_DEG = 15.0  # steering weaker than this means "go straight"

_UP = np.array([0.0, 0.0, 1.0])
_REF = np.array([1.0, 0.0, 0.0])  # fallback when tangent is near vertical


class NetworkError(ValueError):
    """Bad network topology or geometry."""


def _vec(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (3,):
        raise NetworkError(f"expected a 3-vector, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Segment:
    """One pipe run between two nodes. shape is 'straight' or 'arc'; an arc
    is the minor circular arc from end to end about `center`, which must be
    equidistant from both ends and not collinear with them."""

    id: str
    node_a: str
    node_b: str
    shape: str = "straight"
    center: Vec | None = None
    diameter: float = 0.1

    def __post_init__(self):
        if self.shape not in ("straight", "arc"):
            raise NetworkError(f"segment {self.id!r}: unknown shape {self.shape!r}")
        if self.shape == "arc" and self.center is None:
            raise NetworkError(f"segment {self.id!r}: arc needs a center point")
        if self.node_a == self.node_b:
            raise NetworkError(f"segment {self.id!r}: loops onto node {self.node_a!r}")
        if self.diameter <= 0:
            raise NetworkError(f"segment {self.id!r}: diameter must be > 0")


@dataclass(frozen=True)
class Junction:
    """Branch-selection rule at a node of degree >= 2. azimuths maps segment
    id to the steering azimuth (deg, in the arriving tip frame) that selects
    it; `straight` names the branch taken when steering is inside the
    deadband, if any."""

    node: str
    azimuths: dict[str, float] = field(default_factory=dict)
    straight: str | None = None


@dataclass(frozen=True)
class WallPanel:
    """One rectangular wall of a terminal box. origin is a corner; the panel
    spans origin + s*u*width + t*v*height for s, t in [0, 1]. u, v are unit
    vectors and u x v faces into the box."""

    name: str
    origin: Vec
    u: Vec
    v: Vec
    width: float
    height: float

    def sample_points(self, per_side: int) -> np.ndarray:
        """(per_side^2, 3) interior grid of sample points, cell centers."""
        o, u, v = _vec(self.origin), _vec(self.u), _vec(self.v)
        fr = (np.arange(per_side) + 0.5) / per_side
        pts = (
            o
            + fr[None, :, None] * u * self.width
            + fr[:, None, None] * v * self.height
        )
        return pts.reshape(-1, 3)

    @property
    def normal(self) -> Vec:
        n = np.cross(_vec(self.u), _vec(self.v))
        n /= np.linalg.norm(n)
        return (float(n[0]), float(n[1]), float(n[2]))


_FACES = ("+x", "-x", "+y", "-y", "+z", "-z")


@dataclass(frozen=True)
class Terminal:
    """Axis-aligned cubic enclosure at the end of a run. The open face is
    the one the pipe enters through; the other five are spray targets."""

    node: str
    center: Vec
    size: float
    open_face: str

    def __post_init__(self):
        if self.size <= 0:
            raise NetworkError(f"terminal at {self.node!r}: size must be > 0")
        if self.open_face not in _FACES:
            raise NetworkError(
                f"terminal at {self.node!r}: open_face must be one of {_FACES}"
            )

    def panels(self) -> tuple[WallPanel, ...]:
        """The five closed walls, normals pointing into the box."""
        c = _vec(self.center)
        h = self.size / 2.0
        axes = {"x": np.array([1.0, 0, 0]), "y": np.array([0, 1.0, 0]), "z": np.array([0, 0, 1.0])}
        out = []
        for face in _FACES:
            if face == self.open_face:
                continue
            sign = 1.0 if face[0] == "+" else -1.0
            n_out = sign * axes[face[1]]  # outward wall direction from center
            # pick u, v so that u x v = -n_out (into the box)
            others = [a for a in "xyz" if a != face[1]]
            u = axes[others[0]]
            v = axes[others[1]]
            if np.dot(np.cross(u, v), -n_out) < 0:
                u, v = v, u
            origin = c + n_out * h - u * h - v * h
            out.append(
                WallPanel(
                    name=face,
                    origin=tuple(float(x) for x in origin),
                    u=tuple(float(x) for x in u),
                    v=tuple(float(x) for x in v),
                    width=self.size,
                    height=self.size,
                )
            )
        return tuple(out)


@dataclass(frozen=True)
class PipeNetwork:
    nodes: dict[str, Vec]
    segments: dict[str, Segment]
    junctions: dict[str, Junction] = field(default_factory=dict)
    terminals: dict[str, Terminal] = field(default_factory=dict)
    start_node: str = ""
    start_segment: str = ""

    def __post_init__(self):
        for seg in self.segments.values():
            for n in (seg.node_a, seg.node_b):
                if n not in self.nodes:
                    raise NetworkError(f"segment {seg.id!r}: unknown node {n!r}")
            if seg.shape == "arc":
                self._check_arc(seg)
        if self.start_node not in self.nodes:
            raise NetworkError(f"start node {self.start_node!r} not in nodes")
        if self.start_segment not in self.segments:
            raise NetworkError(f"start segment {self.start_segment!r} not in segments")
        seg = self.segments[self.start_segment]
        if self.start_node not in (seg.node_a, seg.node_b):
            raise NetworkError(
                f"start segment {self.start_segment!r} does not touch start node"
            )
        for jn in self.junctions.values():
            if jn.node not in self.nodes:
                raise NetworkError(f"junction at unknown node {jn.node!r}")
            incident = set(self.incident(jn.node))
            for sid in jn.azimuths:
                if sid not in incident:
                    raise NetworkError(
                        f"junction {jn.node!r}: azimuth for non-incident segment {sid!r}"
                    )
            if jn.straight is not None and jn.straight not in incident:
                raise NetworkError(
                    f"junction {jn.node!r}: straight branch {jn.straight!r} not incident"
                )
        for term in self.terminals.values():
            if term.node not in self.nodes:
                raise NetworkError(f"terminal at unknown node {term.node!r}")

    def _check_arc(self, seg: Segment):
        a = _vec(self.nodes[seg.node_a])
        b = _vec(self.nodes[seg.node_b])
        c = _vec(seg.center)
        ra, rb = np.linalg.norm(a - c), np.linalg.norm(b - c)
        if ra < 1e-9 or rb < 1e-9:
            raise NetworkError(f"segment {seg.id!r}: arc center coincides with an endpoint")
        if abs(ra - rb) > 1e-6 * max(ra, rb) + 1e-9:
            raise NetworkError(
                f"segment {seg.id!r}: center not equidistant from endpoints "
                f"({ra:.6g} vs {rb:.6g})"
            )
        cosang = float(np.dot(a - c, b - c) / (ra * rb))
        if cosang < -1.0 + 1e-9:
            raise NetworkError(
                f"segment {seg.id!r}: arc endpoints are diametrically opposite; "
                "split the arc in two"
            )

    def incident(self, node: str) -> list[str]:
        return sorted(
            s.id for s in self.segments.values() if node in (s.node_a, s.node_b)
        )

    # -- per-segment geometry, directional (parameterised by the entry node) --

    def segment_length(self, seg_id: str) -> float:
        seg = self.segments[seg_id]
        a = _vec(self.nodes[seg.node_a])
        b = _vec(self.nodes[seg.node_b])
        if seg.shape == "straight":
            return float(np.linalg.norm(b - a))
        c = _vec(seg.center)
        r = float(np.linalg.norm(a - c))
        cosang = float(np.clip(np.dot(a - c, b - c) / r**2, -1.0, 1.0))
        return r * math.acos(cosang)

    def _arc_basis(self, seg: Segment, entry: str):
        start = seg.node_a if entry == seg.node_a else seg.node_b
        end = seg.node_b if start == seg.node_a else seg.node_a
        a = _vec(self.nodes[start])
        b = _vec(self.nodes[end])
        c = _vec(seg.center)
        r = float(np.linalg.norm(a - c))
        u = (a - c) / r
        w = (b - c) - np.dot(b - c, u) * u
        w /= np.linalg.norm(w)
        return c, r, u, w

    def point_at(self, seg_id: str, entry: str, s: float) -> np.ndarray:
        """World point at arc length s along seg_id, entering from node `entry`."""
        seg = self.segments[seg_id]
        if entry not in (seg.node_a, seg.node_b):
            raise NetworkError(f"node {entry!r} is not an end of segment {seg_id!r}")
        a = _vec(self.nodes[entry])
        other = seg.node_b if entry == seg.node_a else seg.node_a
        b = _vec(self.nodes[other])
        if seg.shape == "straight":
            length = float(np.linalg.norm(b - a))
            return a + (b - a) * (s / length)
        c, r, u, w = self._arc_basis(seg, entry)
        ang = s / r
        return c + r * (math.cos(ang) * u + math.sin(ang) * w)

    def tangent_at(self, seg_id: str, entry: str, s: float) -> np.ndarray:
        """Unit tangent, pointing in the direction of travel."""
        seg = self.segments[seg_id]
        a = _vec(self.nodes[entry])
        other = seg.node_b if entry == seg.node_a else seg.node_a
        b = _vec(self.nodes[other])
        if seg.shape == "straight":
            t = b - a
            return t / np.linalg.norm(t)
        c, r, u, w = self._arc_basis(seg, entry)
        ang = s / r
        return -math.sin(ang) * u + math.cos(ang) * w


def frame_from_tangent(tangent: np.ndarray) -> np.ndarray:
    """Right-handed orthonormal frame (columns x, y, z) with z along the
    tangent. x is horizontal (world-up x z) when the tangent is not near
    vertical, else built from world +x."""
    z = tangent / np.linalg.norm(tangent)
    ref = _UP if abs(float(np.dot(z, _UP))) < 0.99 else _REF
    x = np.cross(ref, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


@dataclass(frozen=True)
class Traversal:
    segment_id: str
    entry_node: str
    length: float  # snapshot of segment length, so rewind needs no network


@dataclass(frozen=True)
class RobotPath:
    traversals: tuple[Traversal, ...]
    offset: float  # arc length into the last traversal

    def __post_init__(self):
        if not self.traversals:
            raise NetworkError("a path needs at least one traversal")
        if not -1e-12 <= self.offset <= self.traversals[-1].length + 1e-12:
            raise NetworkError(
                f"offset {self.offset} outside segment of length "
                f"{self.traversals[-1].length}"
            )

    @property
    def length(self) -> float:
        return sum(t.length for t in self.traversals[:-1]) + self.offset

    @property
    def current(self) -> Traversal:
        return self.traversals[-1]


def start_path(net: PipeNetwork) -> RobotPath:
    tr = Traversal(
        net.start_segment, net.start_node, net.segment_length(net.start_segment)
    )
    return RobotPath((tr,), 0.0)


def exit_node(net: PipeNetwork, trav: Traversal) -> str:
    seg = net.segments[trav.segment_id]
    return seg.node_b if trav.entry_node == seg.node_a else seg.node_a


def tip_point(net: PipeNetwork, path: RobotPath) -> np.ndarray:
    t = path.current
    return net.point_at(t.segment_id, t.entry_node, path.offset)


def tip_tangent(net: PipeNetwork, path: RobotPath) -> np.ndarray:
    t = path.current
    return net.tangent_at(t.segment_id, t.entry_node, path.offset)


def tip_frame(net: PipeNetwork, path: RobotPath) -> np.ndarray:
    return frame_from_tangent(tip_tangent(net, path))


def select_branch(
    net: PipeNetwork,
    node: str,
    arrived_by: str,
    steer_magnitude_deg: float,
    steer_azimuth_deg: float,
    deadband_deg: float = JUNCTION_DEADBAND_DEG,
) -> tuple[str | None, str | None]:
    """Pick the outgoing segment at a junction.

    Steering inside the deadband takes the declared straight branch, if any.
    Otherwise the branch whose tabulated azimuth is nearest the steering
    azimuth (circular distance) wins; ties go to the lexically first id.
    Returns (segment_id, None) or (None, reason).
    """
    jn = net.junctions.get(node)
    if jn is None:
        candidates = [s for s in net.incident(node) if s != arrived_by]
        if not candidates:
            return None, "dead_end"
        if len(candidates) == 1:
            return candidates[0], None
        return None, "unmarked_junction"
    if steer_magnitude_deg < deadband_deg:
        if jn.straight is not None and jn.straight != arrived_by:
            return jn.straight, None
        return None, "no_straight_branch"
    best = None
    best_key = None
    for sid, az in sorted(jn.azimuths.items()):
        if sid == arrived_by:
            continue
        delta = abs((steer_azimuth_deg - az + 180.0) % 360.0 - 180.0)
        if best_key is None or delta < best_key:
            best, best_key = sid, delta
    if best is None:
        return None, "no_branch"
    return best, None


@dataclass(frozen=True)
class AdvanceResult:
    path: RobotPath
    consumed: float  # how much of delta_l was actually used
    blocked: str | None  # reason growth stopped short, if it did
    events: tuple[tuple[str, str, str], ...]  # (kind, node, detail)


def advance_along_network(
    path: RobotPath,
    net: PipeNetwork,
    delta_l: float,
    steer=None,
    deadband_deg: float = JUNCTION_DEADBAND_DEG,
) -> AdvanceResult:
    """Push the tip delta_l further along the network, crossing junctions
    using the current steering command (anything with magnitude_deg and
    direction_deg, e.g. a BendCommand; None steers nowhere). Stops early at
    terminals, dead ends and junctions it cannot resolve."""
    if delta_l < 0:
        raise ValueError(f"delta_l must be >= 0, got {delta_l}")
    steer_magnitude_deg = 0.0 if steer is None else float(steer.magnitude_deg)
    steer_azimuth_deg = 0.0 if steer is None else float(steer.direction_deg)
    traversals = list(path.traversals)
    offset = path.offset
    left = delta_l
    events: list[tuple[str, str, str]] = []
    blocked = None
    while True:
        cur = traversals[-1]
        room = cur.length - offset
        if left <= room:
            offset += left
            left = 0.0
            break
        # reach the far node and decide where to go next
        left -= room
        offset = cur.length
        node = exit_node(net, cur)
        if node in net.terminals:
            blocked = "terminal"
            events.append(("terminal", node, cur.segment_id))
            break
        nxt, reason = select_branch(
            net, node, cur.segment_id, steer_magnitude_deg, steer_azimuth_deg, deadband_deg
        )
        if nxt is None:
            blocked = reason
            events.append(("blocked", node, reason or ""))
            break
        events.append(("junction", node, nxt))
        traversals.append(Traversal(nxt, node, net.segment_length(nxt)))
        offset = 0.0
    new_path = RobotPath(tuple(traversals), offset)
    return AdvanceResult(new_path, delta_l - left, blocked, tuple(events))


def rewind_path(path: RobotPath, delta_l: float) -> RobotPath:
    """Pull the tip back delta_l along its own history, dropping traversals
    it fully backs out of. Needs no network: traversals carry their length."""
    if delta_l < 0:
        raise ValueError(f"delta_l must be >= 0, got {delta_l}")
    if delta_l > path.length + 1e-9:
        raise ValueError(
            f"cannot rewind {delta_l} m along a {path.length} m path"
        )
    traversals = list(path.traversals)
    offset = path.offset
    left = delta_l
    while left > offset and len(traversals) > 1:
        left -= offset
        traversals.pop()
        offset = traversals[-1].length
    offset = max(0.0, offset - left)
    return RobotPath(tuple(traversals), offset)
