"""Scene file loading and the error diagnostics it promises."""

import json

import pytest

from evertip.presets import straight_grid_scene, t_network_scene
from evertip.scene import SceneError, load_scene, scene_from_dict, scene_to_dict


def test_load_preset_scene():
    scene = scene_from_dict(straight_grid_scene())
    assert scene.name == "straight_grid"
    assert scene.network.start_node == "inlet"
    assert scene.grid is not None
    assert scene.grid.rows == 6 and scene.grid.cols == 10
    assert "mouth" in scene.network.terminals


def test_t_network_scene_structure():
    scene = scene_from_dict(t_network_scene())
    assert set(scene.grids) == {"mouth_n", "mouth_s"}
    assert scene.grid is None  # ambiguous with two grids
    jn = scene.network.junctions["j1"]
    assert jn.straight == "s_e"
    assert jn.azimuths == {"s_n": 0.0, "s_s": 180.0}


def test_round_trip_to_dict():
    doc = straight_grid_scene()
    scene = scene_from_dict(doc)
    assert scene_to_dict(scene) == doc


def err(doc):
    with pytest.raises(SceneError) as ei:
        scene_from_dict(doc)
    return ei.value


def test_missing_top_level_fields():
    e = err({})
    assert "format" in str(e)


def test_wrong_format_tag():
    e = err({"format": "stl", "version": 1})
    assert "format" in str(e)


def test_segment_diagnostics_name_the_field():
    doc = straight_grid_scene()
    doc = json.loads(json.dumps(doc))  # deep copy
    del doc["segments"][0]["from"]
    e = err(doc)
    assert e.where == "segments[0]"
    assert "'from'" in str(e)


def test_bad_point_diagnostics():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["nodes"]["inlet"] = [0, 0]
    e = err(doc)
    assert "inlet" in e.where


def test_unknown_node_reference():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["segments"][0]["to"] = "ghost"
    e = err(doc)
    assert "ghost" in str(e)


def test_duplicate_segment_id():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["segments"].append(dict(doc["segments"][0]))
    e = err(doc)
    assert "duplicate" in str(e).lower()


def test_junction_unknown_branch():
    doc = json.loads(json.dumps(t_network_scene()))
    doc["junctions"][0]["azimuths"]["ghost_arm"] = 45.0
    e = err(doc)
    assert "ghost_arm" in str(e)


def test_terminal_bad_open_face():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["terminals"][0]["open_face"] = "-q"
    e = err(doc)
    assert "open_face" in str(e) or "-q" in str(e)


def test_terminal_at_unknown_node():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["terminals"][0]["node"] = "ghost"
    e = err(doc)
    assert "ghost" in str(e)


def test_grid_bad_axes():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["terminals"][0]["grid"]["u"] = [0, -2, 0]
    e = err(doc)
    assert "unit vector" in str(e)
    assert "terminals[0].grid" in e.where


def test_number_where_string_expected():
    doc = json.loads(json.dumps(straight_grid_scene()))
    doc["segments"][0]["id"] = 7
    e = err(doc)
    assert "segments[0].id" in e.where


def test_load_scene_reports_json_position(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"format": "pipescene",\n  "version": 1,\n  oops\n}')
    with pytest.raises(SceneError) as ei:
        load_scene(p)
    assert "3" in str(ei.value)  # line number of the bad token


def test_load_scene_missing_file(tmp_path):
    with pytest.raises(SceneError, match="cannot read"):
        load_scene(tmp_path / "nope.json")


def test_load_scene_happy_path(tmp_path):
    p = tmp_path / "scene.json"
    p.write_text(json.dumps(straight_grid_scene()))
    scene = load_scene(p)
    assert scene.name == "straight_grid"
