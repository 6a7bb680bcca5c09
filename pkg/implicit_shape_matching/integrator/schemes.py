"""
Discretizations of M a = m g - F(q, qdot) for the implicit schemes.

The implicit steps solve for the end-of-step velocity v. Positions follow
affinely from it, q = base + v / kappa, with

    backward Euler  base = q_n,                  kappa = 1 / dt
    BDF2            base = (4 q_n - q_{n-1}) / 3, kappa = 3 / (2 dt)

so the residual is a function of either unknown and
dr/dq = kappa dr/dv.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..energy.context import DerivativeContext
from ..energy.damping import damping_velocity_hessian
from ..energy.damping import mass_matrix
from ..energy.params import EnergyParams
from ..energy.total import total_force
from ..energy.total import total_position_hessian
from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from .config import IntegratorConfig


@dataclass(frozen=True)
class Discretization:
    """
    History-dependent part of one implicit step.

    Attributes
    ----------
    dt : float
        Time step.
    current : KinematicState
        State at the start of the step.
    older : Optional[KinematicState]
        State one step earlier; with it the step is BDF2, without it
        backward Euler.
    """

    dt: float
    current: KinematicState
    older: Optional[KinematicState] = None

    @classmethod
    def of(
        cls,
        cfg: IntegratorConfig,
        current: KinematicState,
        older: Optional[KinematicState] = None,
    ) -> "Discretization":
        """BDF2 if the scheme asks for it and a history state exists."""
        return cls(cfg.dt, current, older if cfg.scheme == "bdf2" else None)

    @property
    def is_bdf2(self) -> bool:
        return self.older is not None

    @property
    def kappa(self) -> float:
        return 1.5 / self.dt if self.is_bdf2 else 1.0 / self.dt

    @property
    def base(self) -> np.ndarray:
        if self.older is None:
            return self.current.positions
        return (4.0 * self.current.positions - self.older.positions) / 3.0

    def positions_of(self, velocities: np.ndarray) -> np.ndarray:
        return self.base + velocities / self.kappa

    def velocities_of(self, positions: np.ndarray) -> np.ndarray:
        return self.kappa * (positions - self.base)

    def acceleration(self, velocities: np.ndarray) -> np.ndarray:
        if self.older is None:
            return (velocities - self.current.velocities) / self.dt
        return (
            3.0 * velocities
            - 4.0 * self.current.velocities
            + self.older.velocities
        ) / (2.0 * self.dt)

    def implied_state(
        self, free_velocities: np.ndarray, free: np.ndarray
    ) -> KinematicState:
        """
        End-of-step state of the free velocities

        Pinned particles keep the positions of the current state and have
        zero velocity.

        """
        velocities = np.zeros_like(self.current.positions)
        velocities[free] = free_velocities.reshape(-1, velocities.shape[1])
        positions = self.positions_of(velocities)
        positions[~free] = self.current.positions[~free]
        return KinematicState(positions, velocities)

    def from_positions(self, positions: np.ndarray, free: np.ndarray) -> KinematicState:
        """End-of-step state whose velocities follow from `positions`."""
        positions = np.asarray(positions, dtype=np.float64)
        velocities = self.velocities_of(positions)
        velocities[~free] = 0.0
        return KinematicState(positions, velocities)


def coordinate_mask(free: np.ndarray, dim: int) -> np.ndarray:
    return np.repeat(free, dim)


def residual_of(
    state: KinematicState,
    disc: Discretization,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    context: Optional[DerivativeContext] = None,
) -> np.ndarray:
    """M a + F(q, v) - m g over the free particles, flattened."""
    free = cfg.free_mask(shape)
    masses = shape.masses[:, None]
    gravity = cfg.gravity_vector(shape.dim)
    out = (
        masses * disc.acceleration(state.velocities)
        + total_force(state, shape, params, context)
        - masses * gravity
    )
    return out[free].reshape(-1)


def velocity_jacobian(
    state: KinematicState,
    disc: Discretization,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    context: Optional[DerivativeContext] = None,
) -> np.ndarray:
    """
    Residual derivative with respect to the free end-of-step velocities

    kappa M + H_q / kappa + H_v, with the positional Hessian H_q of the total
    force and the damping velocity Hessian H_v.

    """
    if context is None:
        context = DerivativeContext.build(state, shape, params)
    kappa = disc.kappa
    positional = total_position_hessian(
        state,
        shape,
        params,
        gauss_newton=not cfg.use_full_hessian,
        context=context,
    )
    viscous = damping_velocity_hessian(state, shape, params, context=context)
    matrix = (
        kappa * np.diag(mass_matrix(shape))
        + positional.matrix / kappa
        + viscous.matrix
    )
    coords = coordinate_mask(cfg.free_mask(shape), shape.dim)
    return matrix[np.ix_(coords, coords)]


def residual(
    state_next: KinematicState,
    state_prev: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    older: Optional[KinematicState] = None,
) -> np.ndarray:
    """
    Implicit step residual

    Evaluates M a + F(q_{n+1}, v_{n+1}) - m g over the free particles, with
    v_{n+1} implied by the positions of `state_next` through the scheme
    (the velocities stored on `state_next` are not used).

    Parameters
    ----------
    state_next : KinematicState
        Candidate end-of-step positions.
    state_prev : KinematicState
        State at the start of the step.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    cfg : IntegratorConfig
        Integrator settings.
    older : Optional[KinematicState]
        State before `state_prev`, used by BDF2.

    Returns
    -------
    np.ndarray
        Flat residual of the free coordinates.

    """
    disc = Discretization.of(cfg, state_prev, older)
    state = disc.from_positions(state_next.positions, cfg.free_mask(shape))
    return residual_of(state, disc, shape, params, cfg)


def system_matrix(
    state_next: KinematicState,
    state_prev: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    older: Optional[KinematicState] = None,
) -> np.ndarray:
    """
    Implicit step system matrix

    The analytic derivative of `residual` with respect to the free end-of-step
    positions, kappa^2 M + H_q + kappa H_v. For backward Euler this is
    M / dt^2 + H_q + H_v / dt.

    Returns
    -------
    np.ndarray
        Square matrix over the free coordinates.

    """
    disc = Discretization.of(cfg, state_prev, older)
    state = disc.from_positions(state_next.positions, cfg.free_mask(shape))
    return disc.kappa * velocity_jacobian(state, disc, shape, params, cfg)
