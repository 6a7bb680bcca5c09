from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnergyParams:
    """
    Physical parameters of the shape matching and damping energies.

    Attributes
    ----------
    gamma : float
        Blend between the linear fit A_a A_s^-1 (gamma = 1) and the rigid fit
        R (gamma = 0), by default 0.5.
    alpha : float
        Stiffness-proportional damping coefficient (time units), by default 0.
    beta : float
        Mass-proportional damping coefficient (1/time units), by default 0.
    """

    gamma: float = 0.5
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("gamma", "alpha", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"Energy parameter '{name}' must be finite.")
            object.__setattr__(self, name, float(value))
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}.")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError(
                f"Damping coefficients must be non-negative, got alpha="
                f"{self.alpha}, beta={self.beta}."
            )

    @property
    def rotation_weight(self) -> float:
        """Weight 1 - gamma of the rotation branch of the blend matrix."""
        return 1.0 - self.gamma

    @property
    def is_linear(self) -> bool:
        """True if the rotation branch does not contribute (gamma = 1)."""
        return self.gamma == 1.0
