"""Sub-level module 'data' of the implicit-shape-matching package."""
from .access import PkgDataAccess

__all__ = ["PkgDataAccess"]
