"""Exceptions raised by the implicit-shape-matching package."""
from typing import TYPE_CHECKING
from typing import Any
from typing import Optional

if TYPE_CHECKING:  # pragma: no cover
    from .integrator.config import StepStats
    from .kinematics.shape import KinematicState


class ShapeMatchingError(Exception):
    """Base class of all errors raised by this package."""


class DimensionMismatch(ShapeMatchingError, ValueError):
    """Input arrays are ragged or disagree in particle count or dimension."""


class NonFiniteState(ShapeMatchingError, ValueError):
    """A kinematic state holds NaN or infinite entries."""


class DegenerateRestShape(ShapeMatchingError, ValueError):
    """The rest covariance A_s is singular or numerically near-singular."""


class InvalidParticleWeights(ShapeMatchingError, ValueError):
    """A mass is not positive or a stiffness is negative."""


class InvertedOrDegenerate(ShapeMatchingError, ArithmeticError):
    """The covariance A_a has no proper polar factor (det(A_a) too small)."""


class SingularG(ShapeMatchingError, ArithmeticError):
    """The rotation derivative operator G = (tr(S)I - S)R^T is singular."""


class CapacityExceeded(ShapeMatchingError, MemoryError):
    """A dense assembly would exceed the configured particle count guard."""


class ShapeMismatch(ShapeMatchingError, ValueError):
    """Two arrays handed to a comparison do not have the same shape."""


class OracleEvalFailure(ShapeMatchingError, RuntimeError):
    """A finite-difference evaluation failed at a perturbed coordinate."""

    def __init__(self, coordinate: int, cause: BaseException) -> None:
        super().__init__(
            f"Evaluation failed when perturbing coordinate {coordinate}: {cause}"
        )
        self.coordinate = coordinate
        self.cause = cause


class DegenerateAlongPath(InvertedOrDegenerate):
    """The Newton path of an implicit step entered a degenerate configuration."""


class NewtonDiverged(ShapeMatchingError, RuntimeError):
    """Newton iterations were exhausted without reaching the tolerance."""

    def __init__(
        self, message: str, state: "KinematicState", stats: "StepStats"
    ) -> None:
        super().__init__(message)
        self.state = state
        self.stats = stats


class StepFailure(ShapeMatchingError, RuntimeError):
    """A simulation aborted because one of its steps failed."""

    def __init__(
        self, frame: int, residual_norm: Optional[float], cause: BaseException
    ) -> None:
        residual = "n/a" if residual_norm is None else f"{residual_norm:.6e}"
        super().__init__(
            f"Step failed at frame {frame} (residual: {residual}): {cause}"
        )
        self.frame = frame
        self.residual_norm = residual_norm
        self.cause = cause


class SceneError(ShapeMatchingError, ValueError):
    """A scene file is malformed; `key` names the offending entry."""

    def __init__(self, key: str, reason: Any) -> None:
        super().__init__(f"Invalid scene key '{key}': {reason}")
        self.key = key
        self.reason = reason
