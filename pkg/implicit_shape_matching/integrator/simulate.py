"""Time stepping surface shared by the implicit and explicit schemes."""
from dataclasses import dataclass
from dataclasses import field
from logging import getLogger
from typing import Callable
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from ..energy.params import EnergyParams
from ..energy.total import mechanical_energy
from ..energy.total import total_force
from ..errors import NewtonDiverged
from ..errors import ShapeMatchingError
from ..errors import StepFailure
from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from ..utils.store import ArrayStore
from .config import IntegratorConfig
from .config import StepStats
from .newton import implicit_step

LOG = getLogger(__name__)


def symplectic_euler_step(
    state: KinematicState, shape: RestShape, params: EnergyParams, cfg: IntegratorConfig
) -> Tuple[KinematicState, StepStats]:
    """
    Explicit reference step

    v_{n+1} = v_n + dt M^-1 (m g - F(q_n, v_n)), q_{n+1} = q_n + dt v_{n+1};
    pinned particles stay in place.

    """
    free = cfg.free_mask(shape)
    gravity = cfg.gravity_vector(shape.dim)
    energy_before = mechanical_energy(state, shape, params, gravity)
    force = total_force(state, shape, params)
    with np.errstate(over="ignore", invalid="ignore"):
        velocities = state.velocities + cfg.dt * (
            gravity - force / shape.masses[:, None]
        )
        velocities[~free] = 0.0
        positions = state.positions + cfg.dt * velocities
    new_state = KinematicState(positions, velocities)
    stats = StepStats(
        newton_iters=0,
        residual_norm=0.0,
        condition=1.0,
        energy_before=energy_before,
        energy_after=mechanical_energy(new_state, shape, params, gravity),
    )
    return new_state, stats


def step(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    older: Optional[KinematicState] = None,
) -> Tuple[KinematicState, StepStats]:
    """
    Advances the state by one time step of the configured scheme.

    Parameters
    ----------
    state : KinematicState
        State at the start of the step.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    cfg : IntegratorConfig
        Integrator settings.
    older : Optional[KinematicState]
        Previous state; BDF2 falls back to backward Euler without it.

    Returns
    -------
    Tuple[KinematicState, StepStats]
        The new state and the step statistics.

    """
    state.check_against(shape)
    if cfg.scheme == "symplectic-euler":
        return symplectic_euler_step(state, shape, params, cfg)
    return implicit_step(state, shape, params, cfg, older)


@dataclass
class Trajectory:
    """
    Emitted frames of a simulation.

    Attributes
    ----------
    frames : List[int]
        Frame numbers of the emitted states, 0 being the initial state.
    states : List[KinematicState]
        The emitted states.
    stats : List[StepStats]
        Statistics of every step taken (not only the emitted ones).
    """

    frames: List[int] = field(default_factory=list)
    states: List[KinematicState] = field(default_factory=list)
    stats: List[StepStats] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def final(self) -> KinematicState:
        return self.states[-1]

    @property
    def total_newton_iters(self) -> int:
        return sum(s.newton_iters for s in self.stats)

    def emit(self, frame: int, state: KinematicState) -> None:
        self.frames.append(frame)
        self.states.append(state)


def simulate(
    initial: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    n_steps: int,
    stride: int = 1,
    callback: Optional[Callable[[int, KinematicState, StepStats], None]] = None,
) -> Trajectory:
    """
    Simulation

    Repeats `step` and emits the initial state and every `stride`-th frame,
    the last frame always included. BDF2 starts with one backward Euler step
    and then keeps the two most recent states in an ArrayStore.

    Parameters
    ----------
    initial : KinematicState
        Initial state.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    cfg : IntegratorConfig
        Integrator settings.
    n_steps : int
        Number of steps.
    stride : int, default 1
        Emit every `stride`-th frame.
    callback : Optional[Callable[[int, KinematicState, StepStats], None]]
        Called after every step with the frame, the new state and its stats.

    Returns
    -------
    Trajectory
        The emitted frames and per-step statistics.

    Raises
    ------
    StepFailure
        If a step fails; names the frame and the last residual norm.

    """
    if n_steps < 0 or stride < 1:
        raise ValueError(f"Invalid n_steps={n_steps} or stride={stride}.")
    initial.check_against(shape)

    store = ArrayStore()
    store.create("positions", 2)
    store.create("velocities", 2)
    store["positions"] = initial.positions
    store["velocities"] = initial.velocities

    trajectory = Trajectory()
    trajectory.emit(0, initial)
    state = initial
    for frame in range(1, n_steps + 1):
        older = None
        if store.depth("positions") == 2:
            older = KinematicState(
                store.previous("positions"), store.previous("velocities")
            )
        try:
            state, stats = step(state, shape, params, cfg, older)
        except NewtonDiverged as err:
            raise StepFailure(frame, err.stats.residual_norm, err) from err
        except ShapeMatchingError as err:
            raise StepFailure(frame, None, err) from err

        store["positions"] = state.positions
        store["velocities"] = state.velocities
        trajectory.stats.append(stats)
        if frame % stride == 0 or frame == n_steps:
            trajectory.emit(frame, state)
        LOG.debug(
            "Frame %s: %s Newton iterations, residual %.3e.",
            frame,
            stats.newton_iters,
            stats.residual_norm,
        )
        if callback is not None:
            callback(frame, state, stats)
    return trajectory
