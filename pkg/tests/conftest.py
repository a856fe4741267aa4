import pytest

from evertip.presets import straight_grid_scene, t_network_scene
from evertip.scene import scene_from_dict


@pytest.fixture
def grid_scene():
    """Straight pipe into a glove box with the 6x10 target grid."""
    return scene_from_dict(straight_grid_scene())


@pytest.fixture
def t_scene():
    """T junction with north/south boxes and a straight-ahead run."""
    return scene_from_dict(t_network_scene())
