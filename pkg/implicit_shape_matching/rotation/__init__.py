"""
Sub-level module 'rotation' of the implicit-shape-matching package.

Derivatives of the polar rotation R(q) of the covariance A_a with respect to
the particle coordinates, using the convention dR/dq_ij = hat(w_ij) R.

- first: G factorization, the coefficient table w_ij and dR q0 / dq_i.
- second: dS/dq, second-order coefficients per direction and the contractions
  of d^2(R q0) used by the energy Hessians.

"""
from .first import GFactor
from .first import OmegaFirst
from .first import omega_first
from .first import rotation_jacobian_apply
from .second import omega_rate
from .second import omega_second
from .second import rotation_hessian_contract
from .second import rotation_hessian_moment
from .second import rotation_second_derivative
from .second import s_derivative
from .second import stretch_rate

__all__ = [
    "GFactor",
    "OmegaFirst",
    "omega_first",
    "omega_rate",
    "omega_second",
    "rotation_hessian_contract",
    "rotation_hessian_moment",
    "rotation_jacobian_apply",
    "rotation_second_derivative",
    "s_derivative",
    "stretch_rate",
]
