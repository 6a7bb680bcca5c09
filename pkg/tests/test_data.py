"""Tests for `implicit_shape_matching.data` module."""
import pytest

from implicit_shape_matching.data import PkgDataAccess
from implicit_shape_matching.scene import Scene

# Globals
BUNDLED = ["gamma_one_2d", "rest_3d", "square_drop_2d", "stiff_square_2d"]

pkg = PkgDataAccess()


def test_example_class():
    assert isinstance(pkg, PkgDataAccess)


def test_list_scenes():
    assert PkgDataAccess.list_scenes() == BUNDLED


@pytest.mark.parametrize("name", BUNDLED)
def test_scene_example(name):
    assert PkgDataAccess.locate_scene(name).endswith(f"{name}.json")
    scene = PkgDataAccess.load_scene(name)
    assert isinstance(scene, Scene)
    assert scene.name == name


def test_missing_scene():
    with pytest.raises(FileNotFoundError, match="square_drop_2d"):
        PkgDataAccess.locate_scene("no_such_scene")
