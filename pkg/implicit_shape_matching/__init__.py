"""Top-level package for implicit-shape-matching."""
from implicit_shape_matching.data import PkgDataAccess
from implicit_shape_matching.model import ShapeMatchingModel
from implicit_shape_matching.scene import Scene
from implicit_shape_matching.scene import random_scene
from implicit_shape_matching.scene import read_scene

__all__ = ["PkgDataAccess", "Scene", "ShapeMatchingModel", "random_scene", "read_scene"]
