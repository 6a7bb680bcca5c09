"""
Sub-level module 'integrator' of the implicit-shape-matching package.

Time integration of M qddot = m g - F(q, qdot) with the shape matching and
damping forces F. The implicit schemes (backward Euler, BDF2) solve every
step with Newton iterations on the analytic Hessians; symplectic Euler is the
explicit reference.

"""
from .config import IntegratorConfig
from .config import StepStats
from .newton import implicit_step
from .schemes import residual
from .schemes import system_matrix
from .simulate import Trajectory
from .simulate import simulate
from .simulate import step

__all__ = [
    "IntegratorConfig",
    "StepStats",
    "Trajectory",
    "implicit_step",
    "residual",
    "simulate",
    "step",
    "system_matrix",
]
