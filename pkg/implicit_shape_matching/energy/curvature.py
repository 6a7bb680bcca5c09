"""
Dense assembly of the rotation curvature terms.

Both the potential and the damping Hessians need, for every coordinate pair,
a contraction of the second derivative of R q0_r. The assembly walks the
columns (l, b): one directional solve yields w_{lb,ia} for all (i, a), the
column is filled and the solve is discarded.
"""
from logging import getLogger
from typing import NamedTuple
from typing import Optional

import numpy as np

from ..errors import CapacityExceeded
from ..kinematics.algebra import hat
from ..kinematics.algebra import rotate_coefficients
from ..rotation.second import omega_rate
from .context import DerivativeContext

LOG = getLogger(__name__)

HESSIAN_MAX_PARTICLES = 4096


class Curvature(NamedTuple):
    """
    Rotation curvature of one state.

    Attributes
    ----------
    contraction : np.ndarray
        Entry [i*d + a, l*d + b] is tr((hat(w_lb) hat(w_ia) - hat(w_{lb,ia})) P)
        for the requested moment P.
    path : Optional[np.ndarray]
        Entry [r*d + p, l*d + b] is the p-th component of
        hat(sum_ia qdot_ia w_{lb,ia}) p_r + hat(W) hat(w_lb) p_r, the
        derivative of the velocity-driven rotation term of d_r. Only present
        if velocities were requested.
    """

    contraction: np.ndarray
    path: Optional[np.ndarray]


def check_capacity(n_particles: int, max_particles: int) -> None:
    if n_particles > max_particles:
        raise CapacityExceeded(
            f"Dense Hessian of {n_particles} particles exceeds the guard of "
            f"{max_particles} particles."
        )


def _combine(table: np.ndarray, direction: np.ndarray, dim: int) -> np.ndarray:
    if dim == 2:
        return np.asarray(np.sum(table * direction))
    return np.einsum("ij,ijk->k", direction, table)


def rotation_curvature(
    context: DerivativeContext, moment: np.ndarray, with_path: bool = False
) -> Curvature:
    """
    Rotation curvature assembly

    Parameters
    ----------
    context : DerivativeContext
        Derivative context of the state.
    moment : np.ndarray
        Moment matrix P = sum_r k_r v_r (R q0_r)^T.
    with_path : bool, default False
        Also assemble the velocity path term of the damping Hessian.

    Returns
    -------
    Curvature
        The dense contraction and, optionally, the path term.

    """
    shape, polar, omega = context.shape, context.polar, context.omega
    n, d = shape.n_particles, shape.dim
    size = n * d
    contraction = np.zeros((size, size))
    path = np.zeros((size, size)) if with_path else None

    velocities = context.state.velocities
    spin_hat = hat(context.spin, d)
    unit = np.zeros((n, d))
    for l in range(n):
        for b in range(d):
            unit[l, b] = 1.0
            table = omega_rate(shape, polar, omega, unit, context.factor)
            unit[l, b] = 0.0

            outer = omega.matrices[l, b]
            first = np.einsum("iapq,qp->ia", outer @ omega.matrices, moment)
            second = np.einsum("iapq,qp->ia", hat(table, d), moment)
            contraction[:, l * d + b] = (first - second).reshape(-1)

            if path is not None:
                swept = rotate_coefficients(
                    _combine(table, velocities, d), context.rotated, d
                )
                carried = context.rotated @ (spin_hat @ outer).T
                path[:, l * d + b] = (swept + carried).reshape(-1)
    LOG.debug("Assembled rotation curvature of %s coordinates.", size)
    return Curvature(contraction, path)
