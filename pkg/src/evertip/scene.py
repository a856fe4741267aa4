"""Scene files: a pipe network plus spray targets, as structured text.

Format "pipescene" version 1, JSON. Top level:

  {
    "format": "pipescene", "version": 1, "name": "...",
    "nodes": {"inlet": [0, 0, 0], ...},
    "segments": [{"id": "s1", "from": "inlet", "to": "j1",
                  "shape": "straight" | "arc", "center": [x, y, z],
                  "diameter": 0.1}, ...],
    "junctions": [{"node": "j1", "azimuths": {"s2": 90, "s3": 270},
                   "straight": "s4"}, ...],
    "terminals": [{"node": "mouth", "center": [x, y, z], "size": 0.6,
                   "open_face": "-x",
                   "grid": {"cell_size": 0.042, "origin": [...],
                            "u": [...], "v": [...]}}, ...],
    "start": {"node": "inlet", "segment": "s1"}
  }

Loader errors carry the JSON path of the offending field so scene authors
can find it ("terminals[0].grid.u: ...").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .network import Junction, NetworkError, PipeNetwork, Segment, Terminal
from .spray import TargetGrid

FORMAT = "pipescene"
VERSION = 1


class SceneError(ValueError):
    """Malformed scene file. `where` is the JSON path of the bad field."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise SceneError(where, f"missing required field {key!r}")
    return obj[key]


def _point(value, where: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise SceneError(where, f"expected [x, y, z], got {value!r}")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise SceneError(where, f"expected three numbers, got {value!r}") from None


def _number(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SceneError(where, f"expected a number, got {value!r}")
    return float(value)


def _string(value, where: str) -> str:
    if not isinstance(value, str):
        raise SceneError(where, f"expected a string, got {value!r}")
    return value


@dataclass(frozen=True)
class Scene:
    name: str
    network: PipeNetwork
    grids: dict[str, TargetGrid] = field(default_factory=dict)  # terminal node -> grid
    raw: dict = field(default_factory=dict, repr=False)  # canonical dict form

    @property
    def grid(self) -> TargetGrid | None:
        """The scene's single grid, when there is exactly one."""
        if len(self.grids) == 1:
            return next(iter(self.grids.values()))
        return None


def scene_from_dict(doc: dict, source: str = "<dict>") -> Scene:
    if not isinstance(doc, dict):
        raise SceneError("$", f"scene root must be an object, got {type(doc).__name__}")
    fmt = _need(doc, "format", "$")
    if fmt != FORMAT:
        raise SceneError("format", f"expected {FORMAT!r}, got {fmt!r}")
    ver = _need(doc, "version", "$")
    if ver != VERSION:
        raise SceneError("version", f"unsupported version {ver!r} (this build reads {VERSION})")
    name = _string(doc.get("name", Path(source).stem), "name")

    nodes_doc = _need(doc, "nodes", "$")
    if not isinstance(nodes_doc, dict) or not nodes_doc:
        raise SceneError("nodes", "expected a non-empty object of node id -> [x, y, z]")
    nodes = {
        _string(nid, "nodes"): _point(pos, f"nodes.{nid}")
        for nid, pos in nodes_doc.items()
    }

    segs_doc = _need(doc, "segments", "$")
    if not isinstance(segs_doc, list) or not segs_doc:
        raise SceneError("segments", "expected a non-empty array")
    segments: dict[str, Segment] = {}
    for i, sd in enumerate(segs_doc):
        where = f"segments[{i}]"
        if not isinstance(sd, dict):
            raise SceneError(where, "expected an object")
        sid = _string(_need(sd, "id", where), f"{where}.id")
        if sid in segments:
            raise SceneError(f"{where}.id", f"duplicate segment id {sid!r}")
        shape = _string(sd.get("shape", "straight"), f"{where}.shape")
        center = None
        if "center" in sd:
            center = _point(sd["center"], f"{where}.center")
        try:
            segments[sid] = Segment(
                id=sid,
                node_a=_string(_need(sd, "from", where), f"{where}.from"),
                node_b=_string(_need(sd, "to", where), f"{where}.to"),
                shape=shape,
                center=center,
                diameter=_number(sd.get("diameter", 0.1), f"{where}.diameter"),
            )
        except NetworkError as e:
            raise SceneError(where, str(e)) from None

    junctions: dict[str, Junction] = {}
    for i, jd in enumerate(doc.get("junctions", [])):
        where = f"junctions[{i}]"
        if not isinstance(jd, dict):
            raise SceneError(where, "expected an object")
        node = _string(_need(jd, "node", where), f"{where}.node")
        if node in junctions:
            raise SceneError(f"{where}.node", f"duplicate junction at node {node!r}")
        az_doc = jd.get("azimuths", {})
        if not isinstance(az_doc, dict):
            raise SceneError(f"{where}.azimuths", "expected an object of segment id -> degrees")
        azimuths = {
            _string(sid, f"{where}.azimuths"): _number(az, f"{where}.azimuths.{sid}")
            for sid, az in az_doc.items()
        }
        straight = jd.get("straight")
        if straight is not None:
            straight = _string(straight, f"{where}.straight")
        junctions[node] = Junction(node=node, azimuths=azimuths, straight=straight)

    terminals: dict[str, Terminal] = {}
    grids: dict[str, TargetGrid] = {}
    for i, td in enumerate(doc.get("terminals", [])):
        where = f"terminals[{i}]"
        if not isinstance(td, dict):
            raise SceneError(where, "expected an object")
        node = _string(_need(td, "node", where), f"{where}.node")
        if node in terminals:
            raise SceneError(f"{where}.node", f"duplicate terminal at node {node!r}")
        try:
            terminals[node] = Terminal(
                node=node,
                center=_point(_need(td, "center", where), f"{where}.center"),
                size=_number(_need(td, "size", where), f"{where}.size"),
                open_face=_string(_need(td, "open_face", where), f"{where}.open_face"),
            )
        except NetworkError as e:
            raise SceneError(where, str(e)) from None
        if "grid" in td:
            gd = td["grid"]
            gw = f"{where}.grid"
            if not isinstance(gd, dict):
                raise SceneError(gw, "expected an object")
            try:
                grids[node] = TargetGrid(
                    cell_size=_number(_need(gd, "cell_size", gw), f"{gw}.cell_size"),
                    origin=_point(_need(gd, "origin", gw), f"{gw}.origin"),
                    u=_point(_need(gd, "u", gw), f"{gw}.u"),
                    v=_point(_need(gd, "v", gw), f"{gw}.v"),
                )
            except ValueError as e:
                if isinstance(e, SceneError):
                    raise
                raise SceneError(gw, str(e)) from None

    start_doc = _need(doc, "start", "$")
    if not isinstance(start_doc, dict):
        raise SceneError("start", "expected {node, segment}")
    start_node = _string(_need(start_doc, "node", "start"), "start.node")
    start_segment = _string(_need(start_doc, "segment", "start"), "start.segment")

    try:
        net = PipeNetwork(
            nodes=nodes,
            segments=segments,
            junctions=junctions,
            terminals=terminals,
            start_node=start_node,
            start_segment=start_segment,
        )
    except NetworkError as e:
        raise SceneError("$", str(e)) from None
    return Scene(name=name, network=net, grids=grids, raw=doc)


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SceneError(str(path), f"cannot read scene file: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError(
            f"{path}:{e.lineno}:{e.colno}", f"invalid JSON: {e.msg}"
        ) from None
    return scene_from_dict(doc, source=str(path))


def scene_to_dict(scene: Scene) -> dict:
    """Canonical dict form, as embedded in run logs."""
    if scene.raw:
        return scene.raw
    net = scene.network
    doc: dict = {
        "format": FORMAT,
        "version": VERSION,
        "name": scene.name,
        "nodes": {nid: list(pos) for nid, pos in net.nodes.items()},
        "segments": [
            {
                "id": s.id,
                "from": s.node_a,
                "to": s.node_b,
                "shape": s.shape,
                **({"center": list(s.center)} if s.center is not None else {}),
                "diameter": s.diameter,
            }
            for s in net.segments.values()
        ],
        "junctions": [
            {
                "node": j.node,
                "azimuths": dict(j.azimuths),
                **({"straight": j.straight} if j.straight is not None else {}),
            }
            for j in net.junctions.values()
        ],
        "terminals": [
            {
                "node": t.node,
                "center": list(t.center),
                "size": t.size,
                "open_face": t.open_face,
                **(
                    {
                        "grid": {
                            "cell_size": scene.grids[t.node].cell_size,
                            "origin": list(scene.grids[t.node].origin),
                            "u": list(scene.grids[t.node].u),
                            "v": list(scene.grids[t.node].v),
                        }
                    }
                    if t.node in scene.grids
                    else {}
                ),
            }
            for t in net.terminals.values()
        ],
        "start": {"node": net.start_node, "segment": net.start_segment},
    }
    return doc
