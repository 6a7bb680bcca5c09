"""Result containers of the energy evaluations."""
from dataclasses import dataclass
from typing import Optional
from typing import Tuple

import numpy as np
from scipy.linalg import eigvalsh


@dataclass(frozen=True)
class EnergyReport:
    """
    Value and gradient of the shape matching potential.

    Attributes
    ----------
    value : float
        V = 1/2 sum_r k_r |d_r|^2.
    gradient : np.ndarray
        dV/dq_i per particle (n x d).
    deviations : np.ndarray
        Goal deviations d_r (n x d).
    velocity_deviations : Optional[np.ndarray]
        Rates of the deviations along the velocities, if requested.
    """

    value: float
    gradient: np.ndarray
    deviations: np.ndarray
    velocity_deviations: Optional[np.ndarray] = None

    @property
    def gradient_norm(self) -> float:
        return float(np.linalg.norm(self.gradient))


@dataclass(frozen=True)
class HessianBlocks:
    """
    Dense grid of d x d second-derivative blocks.

    The matrix is stored flat with entry [i*d + a, l*d + b] holding the
    derivative of force component (i, a) with respect to coordinate (l, b),
    so the block H_li is matrix[i*d:(i+1)*d, l*d:(l+1)*d].
    """

    matrix: np.ndarray
    dim: int

    @property
    def n_particles(self) -> int:
        return self.matrix.shape[0] // self.dim

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def block(self, l: int, i: int) -> np.ndarray:
        d = self.dim
        return self.matrix[i * d : (i + 1) * d, l * d : (l + 1) * d]

    def row_sums(self) -> np.ndarray:
        """sum_l H_li for every particle i, shape (n, d, d)."""
        n, d = self.n_particles, self.dim
        return self.matrix.reshape(n, d, n, d).sum(axis=2)

    def asymmetry(self) -> float:
        """Relative asymmetry |H - H^T|_F / |H|_F, zero for a zero matrix."""
        norm = np.linalg.norm(self.matrix)
        if norm == 0.0:
            return 0.0
        return float(np.linalg.norm(self.matrix - self.matrix.T) / norm)

    def eigenvalue_range(self) -> Tuple[float, float]:
        """Extremal eigenvalues of the symmetric part."""
        sym = 0.5 * (self.matrix + self.matrix.T)
        values = eigvalsh(sym)
        return float(values[0]), float(values[-1])

    def __add__(self, other: "HessianBlocks") -> "HessianBlocks":
        if self.matrix.shape != other.matrix.shape or self.dim != other.dim:
            raise ValueError("Cannot add Hessians of different layouts.")
        return HessianBlocks(self.matrix + other.matrix, self.dim)
