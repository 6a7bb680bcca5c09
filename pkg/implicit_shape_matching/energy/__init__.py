"""
Sub-level module 'energy' of the implicit-shape-matching package.

The shape matching potential V = 1/2 sum_r k_r |d_r|^2 with deviations
d_r = q_r - B q0_r - t, the Rayleigh damping pseudo-potential, and their
analytic gradients and Hessians.

- potential: deviations, V, its gradient and Hessian.
- damping: V_da, V_db, the damping force and its two Hessians.
- total: fused force and positional Hessian consumed by the integrator.

"""
from .blocks import EnergyReport
from .blocks import HessianBlocks
from .context import DerivativeContext
from .damping import damping_energy
from .damping import damping_force
from .damping import damping_position_hessian
from .damping import damping_velocity_hessian
from .params import EnergyParams
from .potential import deviation_jacobian
from .potential import deviations
from .potential import energy
from .potential import gradient
from .potential import hessian
from .total import mechanical_energy
from .total import total_force
from .total import total_position_hessian

__all__ = [
    "DerivativeContext",
    "EnergyParams",
    "EnergyReport",
    "HessianBlocks",
    "damping_energy",
    "damping_force",
    "damping_position_hessian",
    "damping_velocity_hessian",
    "deviation_jacobian",
    "deviations",
    "energy",
    "gradient",
    "hessian",
    "mechanical_energy",
    "total_force",
    "total_position_hessian",
]
