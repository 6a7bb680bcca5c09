"""Per-state bundle of everything the energy derivatives share."""
from dataclasses import dataclass
from functools import cached_property
from logging import getLogger
from typing import Optional

import numpy as np

from ..kinematics.algebra import cross
from ..kinematics.algebra import rotate_coefficients
from ..kinematics.polar import PolarPair
from ..kinematics.polar import polar_decompose
from ..kinematics.shape import KinematicState
from ..kinematics.shape import RestShape
from ..kinematics.shape import center_of_mass
from ..kinematics.shape import covariance_asym
from ..rotation.first import GFactor
from ..rotation.first import OmegaFirst
from ..rotation.first import omega_first
from .params import EnergyParams

LOG = getLogger(__name__)


def blend_matrix(
    shape: RestShape, params: EnergyParams, covariance: np.ndarray, polar: PolarPair
) -> np.ndarray:
    """B = gamma A_a A_s^-1 + (1 - gamma) R."""
    return (
        params.gamma * covariance @ shape.a_s_inv
        + params.rotation_weight * polar.r_mat
    )


def linear_weights(shape: RestShape, params: EnergyParams) -> np.ndarray:
    """
    Position-independent part of the deviation Jacobian

    Entry [r, i] is the scalar weight of the identity in dd_r/dq_i apart from
    the rotation branch: delta_ri - m_i/M - gamma (m_i/M) q0_i^T A_s^-1 q0_r.

    """
    rest = shape.rest_positions
    coupling = rest @ shape.a_s_inv @ rest.T
    fractions = shape.mass_fractions[None, :]
    return np.eye(shape.n_particles) - fractions - params.gamma * fractions * coupling


@dataclass(frozen=True)
class DerivativeContext:
    """
    Immutable derivative context of one kinematic state.

    Built once per state and shared by the potential, damping and total
    evaluations. The dense deviation Jacobian is only assembled on demand.

    Attributes
    ----------
    state : KinematicState
        Positions and velocities.
    shape : RestShape
        The rest shape.
    params : EnergyParams
        Energy parameters.
    polar : PolarPair
        Polar factors of the current covariance A_a.
    factor : GFactor
        Factorization of G.
    omega : OmegaFirst
        First-order rotation coefficients.
    center : np.ndarray
        Center of mass t.
    covariance : np.ndarray
        A_a.
    weights : np.ndarray
        `linear_weights` of the shape (n x n).
    rotated : np.ndarray
        Rotated rest positions p_r = R q0_r (n x d).
    deviations : np.ndarray
        d_r (n x d).
    velocity_deviations : np.ndarray
        Rates of d_r along the velocities (n x d).
    """

    state: KinematicState
    shape: RestShape
    params: EnergyParams
    polar: PolarPair
    factor: GFactor
    omega: OmegaFirst
    center: np.ndarray
    covariance: np.ndarray
    weights: np.ndarray
    rotated: np.ndarray
    deviations: np.ndarray
    velocity_deviations: np.ndarray

    @classmethod
    def build(
        cls,
        state: KinematicState,
        shape: RestShape,
        params: EnergyParams,
        polar: Optional[PolarPair] = None,
    ) -> "DerivativeContext":
        """
        Evaluates the covariance, its polar factors and the rotation
        coefficients of `state`.

        Raises
        ------
        DimensionMismatch
            If the state does not fit the shape.
        InvertedOrDegenerate
            If A_a has no proper polar factor.
        SingularG
            If G is numerically singular.

        """
        state.check_against(shape)
        center = center_of_mass(state, shape)
        covariance = covariance_asym(state, shape)
        polar = polar_decompose(covariance) if polar is None else polar
        factor = GFactor(polar)
        omega = omega_first(shape, polar, factor)
        weights = linear_weights(shape, params)

        blend = blend_matrix(shape, params, covariance, polar)
        deviations = state.positions - shape.rest_positions @ blend.T - center
        rotated = shape.rest_positions @ polar.r_mat.T

        spin = omega.combine(state.velocities)
        velocity_deviations = weights @ state.velocities
        if not params.is_linear:
            velocity_deviations = velocity_deviations - (
                params.rotation_weight * rotate_coefficients(spin, rotated, shape.dim)
            )
        return cls(
            state=state,
            shape=shape,
            params=params,
            polar=polar,
            factor=factor,
            omega=omega,
            center=center,
            covariance=covariance,
            weights=weights,
            rotated=rotated,
            deviations=deviations,
            velocity_deviations=velocity_deviations,
        )

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def spin(self) -> np.ndarray:
        """Angular rate sum_ij qdot_ij w_ij of the best-fit rotation."""
        return self.omega.combine(self.state.velocities)

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """
        Applies the transposed deviation Jacobian

        Returns sum_r k_r (dd_r/dq_i)^T v_r for every particle i without
        assembling the Jacobian.

        Parameters
        ----------
        vectors : np.ndarray
            One d-vector v_r per particle (n x d).

        Returns
        -------
        np.ndarray
            Table of shape (n, d).

        """
        weighted = self.shape.stiffness[:, None] * vectors
        out = self.weights.T @ weighted
        if self.params.is_linear:
            return out
        torque = cross(self.rotated, weighted, self.dim).sum(axis=0)
        if self.dim == 2:
            twist = self.omega.vectors * torque
        else:
            twist = np.einsum("ijk,k->ij", self.omega.vectors, torque)
        return out - self.params.rotation_weight * twist

    def moment(self, vectors: np.ndarray) -> np.ndarray:
        """P = sum_r k_r v_r (R q0_r)^T."""
        return np.einsum("r,rp,rq->pq", self.shape.stiffness, vectors, self.rotated)

    @cached_property
    def jacobian(self) -> np.ndarray:
        """
        Dense deviation Jacobian

        Entry [r*d + p, i*d + j] is d(d_r)_p / dq_ij.

        """
        n, d = self.shape.n_particles, self.dim
        dense = np.kron(self.weights, np.eye(d))
        if not self.params.is_linear:
            # turned[r, i, j, p] = (w_ij x p_r)_p
            turned = rotate_coefficients(
                self.omega.vectors[None], self.rotated[:, None, None, :], d
            )
            dense -= self.params.rotation_weight * turned.transpose(0, 3, 1, 2).reshape(
                n * d, n * d
            )
        dense.setflags(write=False)
        LOG.debug("Assembled dense deviation Jacobian of size %s.", dense.shape)
        return dense

    def jacobian_block(self, r: int, i: int) -> np.ndarray:
        d = self.dim
        return self.jacobian[r * d : (r + 1) * d, i * d : (i + 1) * d]
