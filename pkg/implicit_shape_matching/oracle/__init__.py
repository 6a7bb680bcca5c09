"""Sub-level module 'oracle' of the implicit-shape-matching package."""
from .compare import ComparisonReport
from .compare import compare
from .difference import FdConfig
from .difference import FdHessian
from .difference import fd_gradient
from .difference import fd_hessian
from .difference import fd_jacobian

__all__ = [
    "ComparisonReport",
    "FdConfig",
    "FdHessian",
    "compare",
    "fd_gradient",
    "fd_hessian",
    "fd_jacobian",
]
