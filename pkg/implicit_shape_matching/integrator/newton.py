"""Newton iteration of one implicit step."""
from logging import getLogger
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from ..energy.context import DerivativeContext
from ..energy.params import EnergyParams
from ..energy.total import mechanical_energy
from ..errors import DegenerateAlongPath
from ..errors import InvertedOrDegenerate
from ..errors import NewtonDiverged
from ..errors import NonFiniteState
from ..errors import SingularG
from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from ..utils.linalg import shifted_factorize
from .config import CONDITION_LIMIT
from .config import LINE_SEARCH_HALVINGS
from .config import SHIFT_START
from .config import IntegratorConfig
from .config import StepStats
from .schemes import Discretization
from .schemes import residual_of
from .schemes import velocity_jacobian

LOG = getLogger(__name__)

_PATH_ERRORS = (InvertedOrDegenerate, SingularG, NonFiniteState)


class _Iterate:
    """A Newton iterate with its context and residual."""

    def __init__(
        self,
        velocities: np.ndarray,
        disc: Discretization,
        free: np.ndarray,
        shape: RestShape,
        params: EnergyParams,
        cfg: IntegratorConfig,
    ) -> None:
        self.velocities = velocities
        self.state = disc.implied_state(velocities, free)
        self.context = DerivativeContext.build(self.state, shape, params)
        self.residual = residual_of(self.state, disc, shape, params, cfg, self.context)
        self.norm = float(np.linalg.norm(self.residual))


def _try_iterate(*args) -> Optional[_Iterate]:
    try:
        candidate = _Iterate(*args)
    except _PATH_ERRORS as err:
        LOG.debug("Line search trial rejected: %s", err)
        return None
    return candidate if np.isfinite(candidate.norm) else None


def _line_search(
    current: _Iterate, direction: np.ndarray, *args
) -> Tuple[Optional[_Iterate], int]:
    """
    Backtracking on the residual norm

    Halves the step until the residual norm decreases, at most
    LINE_SEARCH_HALVINGS times. Without a decrease the best finite trial is
    returned.

    """
    best = None  # type: Optional[_Iterate]
    t = 1.0
    for halvings in range(LINE_SEARCH_HALVINGS + 1):
        trial = _try_iterate(current.velocities + t * direction, *args)
        if trial is not None:
            if trial.norm < current.norm:
                return trial, halvings
            if best is None or trial.norm < best.norm:
                best = trial
        t *= 0.5
    LOG.debug("Line search found no decrease, taking the best trial.")
    return best, LINE_SEARCH_HALVINGS


def implicit_step(
    state: KinematicState,
    shape: RestShape,
    params: EnergyParams,
    cfg: IntegratorConfig,
    older: Optional[KinematicState] = None,
) -> Tuple[KinematicState, StepStats]:
    """
    Implicit Newton step

    Solves the step residual for the free end-of-step velocities, starting
    from the current velocities (positions q_n + dt v_n). Every iterate solves
    the dense system with LU factors, shifting the diagonal only if the
    factorization fails, followed by a backtracking line search on the
    residual norm.

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
        Previous state for BDF2.

    Returns
    -------
    Tuple[KinematicState, StepStats]
        The end-of-step state and the step statistics.

    Raises
    ------
    DegenerateAlongPath
        If the initial guess or every line search trial is degenerate.
    NewtonDiverged
        If the iteration cap is reached; carries the best iterate.

    """
    disc = Discretization.of(cfg, state, older)
    free = cfg.free_mask(shape)
    gravity = cfg.gravity_vector(shape.dim)
    tol = cfg.tolerance(shape)
    args = (disc, free, shape, params, cfg)

    try:
        energy_before = mechanical_energy(state, shape, params, gravity)
        current = _Iterate(state.velocities[free].reshape(-1), *args)
    except _PATH_ERRORS as err:
        raise DegenerateAlongPath(
            f"Initial Newton guess is degenerate: {err}"
        ) from err

    history: List[float] = [current.norm]
    best = current
    condition = 1.0
    iters = 0
    while current.norm > tol and iters < cfg.newton_max_iters:
        jacobian = velocity_jacobian(
            current.state, disc, shape, params, cfg, current.context
        )
        factors = shifted_factorize(jacobian, CONDITION_LIMIT, SHIFT_START)
        condition = factors.condition
        direction = factors.solve(-current.residual)
        trial, halvings = _line_search(current, direction, *args)
        iters += 1
        if trial is None:
            raise DegenerateAlongPath(
                f"Every line search trial of Newton iteration {iters} is degenerate."
            )
        LOG.debug(
            "Newton iteration %s: residual %.6e (%s halvings).",
            iters,
            trial.norm,
            halvings,
        )
        current = trial
        history.append(current.norm)
        if current.norm < best.norm:
            best = current

    stats = StepStats(
        newton_iters=iters,
        residual_norm=current.norm,
        condition=condition,
        energy_before=energy_before,
        energy_after=mechanical_energy(
            current.state, shape, params, gravity, current.context
        ),
        residual_history=tuple(history),
    )
    if current.norm > tol:
        LOG.warning(
            "Newton stopped after %s iterations with residual %.6e > %.6e.",
            iters,
            current.norm,
            tol,
        )
        raise NewtonDiverged(
            f"Newton did not reach {tol:.3e} in {iters} iterations "
            f"(residual {current.norm:.6e}).",
            best.state,
            stats,
        )
    return current.state, stats
