"""Integrator settings and per-step statistics."""
from dataclasses import dataclass
from dataclasses import field
from typing import FrozenSet
from typing import Optional
from typing import Tuple

import numpy as np

from ..kinematics.shape import RestShape

SCHEMES = ("backward-euler", "bdf2", "symplectic-euler")
IMPLICIT_SCHEMES = ("backward-euler", "bdf2")

LINE_SEARCH_HALVINGS = 16
SHIFT_START = 1e-8
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class IntegratorConfig:
    """
    Time stepping settings.

    Attributes
    ----------
    dt : float
        Time step, by default 1/60.
    scheme : str
        'backward-euler' (default), 'bdf2' or the explicit reference
        'symplectic-euler'.
    newton_tol : Optional[float]
        Residual norm at which Newton stops. None selects
        1e-9 sqrt(n) max(1, max_r k_r * diameter, M |g|).
    newton_max_iters : int
        Newton iteration cap, by default 32.
    use_full_hessian : bool
        Use the full positional Hessian (True) or its Gauss-Newton part.
    gravity : Optional[Tuple[float, ...]]
        Uniform acceleration, zero if None.
    pinned : FrozenSet[int]
        Indices of particles held at their positions.
    """

    dt: float = 1.0 / 60.0
    scheme: str = "backward-euler"
    newton_tol: Optional[float] = None
    newton_max_iters: int = 32
    use_full_hessian: bool = True
    gravity: Optional[Tuple[float, ...]] = None
    pinned: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive and finite, got {self.dt}.")
        if self.scheme not in SCHEMES:
            raise ValueError(
                f"Unknown scheme '{self.scheme}', expected one of {', '.join(SCHEMES)}."
            )
        if self.newton_max_iters < 1:
            raise ValueError(
                f"newton_max_iters must be at least 1, got {self.newton_max_iters}."
            )
        if self.newton_tol is not None and not self.newton_tol > 0.0:
            raise ValueError(f"newton_tol must be positive, got {self.newton_tol}.")
        if self.gravity is not None:
            object.__setattr__(self, "gravity", tuple(float(g) for g in self.gravity))
        object.__setattr__(self, "pinned", frozenset(int(i) for i in self.pinned))

    @property
    def is_implicit(self) -> bool:
        return self.scheme in IMPLICIT_SCHEMES

    def gravity_vector(self, dim: int) -> np.ndarray:
        if self.gravity is None:
            return np.zeros(dim)
        if len(self.gravity) != dim:
            raise ValueError(
                f"Gravity has {len(self.gravity)} components, the scene is {dim}D."
            )
        return np.array(self.gravity, dtype=np.float64)

    def free_mask(self, shape: RestShape) -> np.ndarray:
        """Boolean mask of the particles that are not pinned."""
        mask = np.ones(shape.n_particles, dtype=bool)
        for index in self.pinned:
            if not 0 <= index < shape.n_particles:
                raise ValueError(
                    f"Pinned index {index} outside of 0..{shape.n_particles - 1}."
                )
            mask[index] = False
        return mask

    def force_scale(self, shape: RestShape) -> float:
        """max(1, max_r k_r * diameter, M |g|), the force unit of the residual."""
        gravity = float(np.linalg.norm(self.gravity_vector(shape.dim)))
        return max(
            1.0,
            float(np.max(shape.stiffness)) * shape.diameter,
            shape.total_mass * gravity,
        )

    def tolerance(self, shape: RestShape) -> float:
        if self.newton_tol is not None:
            return self.newton_tol
        return float(1e-9 * np.sqrt(shape.n_particles) * self.force_scale(shape))


@dataclass(frozen=True)
class StepStats:
    """
    Statistics of one time step.

    Attributes
    ----------
    newton_iters : int
        Newton iterations taken (0 for the explicit scheme).
    residual_norm : float
        Final residual norm.
    condition : float
        Pivot-ratio condition estimate of the last linear solve.
    energy_before : float
        Mechanical energy (kinetic + V - sum m g.q) before the step.
    energy_after : float
        Mechanical energy after the step.
    residual_history : Tuple[float, ...]
        Residual norm at every Newton iterate, the initial guess first.
    """

    newton_iters: int
    residual_norm: float
    condition: float
    energy_before: float
    energy_after: float
    residual_history: Tuple[float, ...] = ()
