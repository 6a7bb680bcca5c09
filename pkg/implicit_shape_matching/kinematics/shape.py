"""Rest shape precomputation, kinematic states and mass-weighted moments."""
from dataclasses import dataclass
from logging import getLogger
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from ..errors import DegenerateRestShape
from ..errors import DimensionMismatch
from ..errors import InvalidParticleWeights
from ..errors import NonFiniteState

LOG = getLogger(__name__)

CONDITION_LIMIT = 1e12


def _frozen(array: ArrayLike) -> np.ndarray:
    out = np.array(array, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class RestShape:
    """
    Immutable rest-pose data of a shape matching cloud.

    Attributes
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    rest_positions : np.ndarray
        Rest coordinates q0_r (n x d), centered so that sum_r m_r q0_r = 0.
    masses : np.ndarray
        Positive particle masses m_r.
    total_mass : float
        M = sum_r m_r.
    stiffness : np.ndarray
        Non-negative per-particle stiffness k_r.
    a_s : np.ndarray
        Rest covariance A_s = (1/M) sum_r m_r q0_r q0_r^T (d x d).
    a_s_inv : np.ndarray
        Inverse of A_s.
    """

    dim: int
    rest_positions: np.ndarray
    masses: np.ndarray
    total_mass: float
    stiffness: np.ndarray
    a_s: np.ndarray
    a_s_inv: np.ndarray

    @property
    def n_particles(self) -> int:
        return int(self.rest_positions.shape[0])

    @property
    def mass_fractions(self) -> np.ndarray:
        """m_r / M per particle."""
        return self.masses / self.total_mass

    @property
    def diameter(self) -> float:
        """Largest extent of the rest cloud along a coordinate axis."""
        extent = self.rest_positions.max(axis=0) - self.rest_positions.min(axis=0)
        return float(extent.max())

    def __repr__(self) -> str:
        return (
            f"RestShape(dim={self.dim}, n_particles={self.n_particles}, "
            f"total_mass={self.total_mass})"
        )


@dataclass(frozen=True)
class KinematicState:
    """
    Positions and velocities of all particles.

    Attributes
    ----------
    positions : np.ndarray
        World-space positions q_r (n x d).
    velocities : np.ndarray
        Velocities of the particles (n x d).
    """

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self) -> None:
        positions = _frozen(self.positions)
        velocities = _frozen(self.velocities)
        if positions.ndim != 2 or positions.shape != velocities.shape:
            raise DimensionMismatch(
                f"Positions {positions.shape} and velocities {velocities.shape} "
                "must be matching (n, d) arrays."
            )
        if not (np.all(np.isfinite(positions)) and np.all(np.isfinite(velocities))):
            raise NonFiniteState("Kinematic state holds non-finite entries.")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "velocities", velocities)

    @classmethod
    def at_rest(
        cls, positions: ArrayLike, velocities: Optional[ArrayLike] = None
    ) -> "KinematicState":
        """State with the given positions and zero (or given) velocities."""
        positions = np.asarray(positions, dtype=np.float64)
        if velocities is None:
            velocities = np.zeros_like(positions)
        return cls(positions, np.asarray(velocities, dtype=np.float64))

    @property
    def n_particles(self) -> int:
        return int(self.positions.shape[0])

    def check_against(self, shape: RestShape) -> None:
        """Raises DimensionMismatch if the state does not fit `shape`."""
        if self.positions.shape != shape.rest_positions.shape:
            raise DimensionMismatch(
                f"State of shape {self.positions.shape} does not match rest shape "
                f"{shape.rest_positions.shape}."
            )


def build_rest_shape(
    raw_positions: ArrayLike,
    masses: ArrayLike,
    stiffness: Optional[ArrayLike] = None,
) -> RestShape:
    """
    Rest shape precomputation

    Re-centers the rest positions on their center of mass and precomputes the
    rest covariance A_s and its inverse.

    Parameters
    ----------
    raw_positions : ArrayLike
        Rest positions (n x d), d in {2, 3}, n >= d + 1.
    masses : ArrayLike
        Positive masses, length n.
    stiffness : Optional[ArrayLike]
        Non-negative stiffness per particle, by default 1 for all.

    Returns
    -------
    RestShape
        The immutable rest shape.

    Raises
    ------
    DimensionMismatch
        On ragged input or lengths that do not agree.
    DegenerateRestShape
        If A_s is singular or its condition number exceeds 1e12.

    """
    try:
        raw = np.array(raw_positions, dtype=np.float64)
        mass = np.array(masses, dtype=np.float64).reshape(-1)
    except ValueError as err:
        raise DimensionMismatch(f"Ragged rest shape input: {err}") from err
    if raw.ndim != 2 or raw.shape[1] not in (2, 3):
        raise DimensionMismatch(
            f"Rest positions must be an (n, 2) or (n, 3) array, got {raw.shape}."
        )
    n, dim = raw.shape
    k = np.ones(n) if stiffness is None else np.array(stiffness, dtype=np.float64)
    k = k.reshape(-1)
    if mass.shape != (n,) or k.shape != (n,):
        raise DimensionMismatch(
            f"Expected {n} masses and stiffnesses, got {mass.shape[0]} and "
            f"{k.shape[0]}."
        )
    if n < dim + 1:
        raise DegenerateRestShape(
            f"At least {dim + 1} particles are required in {dim}D, got {n}."
        )
    if not np.all(np.isfinite(raw)):
        raise DegenerateRestShape("Rest positions hold non-finite entries.")
    if not np.all(mass > 0.0):
        raise InvalidParticleWeights("All masses must be positive.")
    if not np.all(k >= 0.0):
        raise InvalidParticleWeights("All stiffnesses must be non-negative.")

    total_mass = float(mass.sum())
    com = (mass @ raw) / total_mass
    rest = raw - com
    a_s = np.einsum("r,rp,rq->pq", mass, rest, rest) / total_mass

    condition = np.linalg.cond(a_s)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise DegenerateRestShape(
            f"Rest covariance is degenerate (condition number {condition:.3e})."
        )
    a_s_inv = np.linalg.solve(a_s, np.eye(dim))
    LOG.debug(
        "Rest shape with %s particles in %sD (cond(A_s) = %.3e).", n, dim, condition
    )
    return RestShape(
        dim=dim,
        rest_positions=_frozen(rest),
        masses=_frozen(mass),
        total_mass=total_mass,
        stiffness=_frozen(k),
        a_s=_frozen(a_s),
        a_s_inv=_frozen(a_s_inv),
    )


def center_of_mass(state: KinematicState, shape: RestShape) -> np.ndarray:
    """Mass-weighted mean t = (1/M) sum_r m_r q_r of the current positions."""
    state.check_against(shape)
    return (shape.masses @ state.positions) / shape.total_mass


def covariance_asym(state: KinematicState, shape: RestShape) -> np.ndarray:
    """
    Asymmetric covariance

    A_a = (1/M) sum_r m_r (q_r - t) q0_r^T between current and rest positions.

    Parameters
    ----------
    state : KinematicState
        Current positions.
    shape : RestShape
        Rest shape the state belongs to.

    Returns
    -------
    np.ndarray
        The d x d matrix A_a.

    """
    t = center_of_mass(state, shape)
    return (
        np.einsum(
            "r,rp,rq->pq", shape.masses, state.positions - t, shape.rest_positions
        )
        / shape.total_mass
    )
