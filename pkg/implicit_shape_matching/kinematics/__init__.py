"""
Sub-level module 'kinematics' of the implicit-shape-matching package.

Everything the derivative code builds on: the rest shape with its mass-weighted
covariance, kinematic states, the asymmetric covariance of a deformed cloud
and its polar decomposition into a rotation and a symmetric stretch.

- build_rest_shape: Re-centers a rest cloud and precomputes A_s and its inverse.
- covariance_asym: Covariance A_a between current and rest positions.
- polar_decompose: Scaled Newton polar decomposition A_a = R S.
- hat / skew_vec: Cross-product matrices and their inverse map.

"""
from .algebra import hat
from .algebra import skew_vec
from .polar import PolarPair
from .polar import polar_decompose
from .shape import KinematicState
from .shape import RestShape
from .shape import build_rest_shape
from .shape import center_of_mass
from .shape import covariance_asym

__all__ = [
    "KinematicState",
    "PolarPair",
    "RestShape",
    "build_rest_shape",
    "center_of_mass",
    "covariance_asym",
    "hat",
    "polar_decompose",
    "skew_vec",
]
