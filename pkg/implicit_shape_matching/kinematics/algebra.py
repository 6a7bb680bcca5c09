"""
Small-matrix algebra shared by the kinematics and derivative code.

Rotation coefficients are 3-vectors in 3D and scalars in 2D. All functions
broadcast over leading axes, so a table of coefficients of shape (n, d, 3)
(or (n, d) in 2D) maps to a stack of (n, d, 3, 3) (or (n, d, 2, 2)) matrices.
"""
import numpy as np


def hat(w: np.ndarray, dim: int = 3) -> np.ndarray:
    """
    Cross-product matrix

    Builds the antisymmetric matrix with hat(w) @ x = w x x. In 2D the
    coefficient is a scalar and the result is [[0, -w], [w, 0]].

    Parameters
    ----------
    w : np.ndarray
        Rotation coefficients, shape (..., 3) in 3D or (...) in 2D.
    dim : int, default 3
        Spatial dimension, 2 or 3.

    Returns
    -------
    np.ndarray
        Antisymmetric matrices of shape (..., dim, dim).

    """
    w = np.asarray(w, dtype=np.float64)
    if dim == 2:
        out = np.zeros(w.shape + (2, 2))
        out[..., 0, 1] = -w
        out[..., 1, 0] = w
        return out
    if dim != 3:
        raise ValueError(f"Unsupported dimension {dim}, expected 2 or 3.")
    if w.shape[-1:] != (3,):
        raise ValueError(f"3D rotation coefficients need a trailing 3, got {w.shape}.")
    out = np.zeros(w.shape[:-1] + (3, 3))
    out[..., 0, 1] = -w[..., 2]
    out[..., 0, 2] = w[..., 1]
    out[..., 1, 0] = w[..., 2]
    out[..., 1, 2] = -w[..., 0]
    out[..., 2, 0] = -w[..., 1]
    out[..., 2, 1] = w[..., 0]
    return out


def skew_vec(m: np.ndarray) -> np.ndarray:
    """
    Rotation coefficient of the antisymmetric part

    Returns the unique coefficient w with hat(w) = (m - m^T) / 2.

    Parameters
    ----------
    m : np.ndarray
        Square matrices of shape (..., d, d) with d in {2, 3}.

    Returns
    -------
    np.ndarray
        Coefficients, shape (..., 3) in 3D and (...) in 2D.

    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape[-2:] == (2, 2):
        return 0.5 * (m[..., 1, 0] - m[..., 0, 1])
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"Expected 2x2 or 3x3 matrices, got {m.shape}.")
    return 0.5 * np.stack(
        (
            m[..., 2, 1] - m[..., 1, 2],
            m[..., 0, 2] - m[..., 2, 0],
            m[..., 1, 0] - m[..., 0, 1],
        ),
        axis=-1,
    )


def cross(a: np.ndarray, b: np.ndarray, dim: int) -> np.ndarray:
    """
    Cross product in rotation-coefficient space

    For 3D vectors this is the usual cross product. For 2D vectors it is the
    scalar a_x b_y - a_y b_x, and for two 2D rotation coefficients (scalars)
    the product vanishes.

    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if dim == 3:
        return np.cross(a, b)
    if a.shape[-1:] == (2,) and b.shape[-1:] == (2,):
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return np.zeros(np.broadcast_shapes(a.shape, b.shape))


def rotate_coefficients(w: np.ndarray, v: np.ndarray, dim: int) -> np.ndarray:
    """Applies hat(w) to vectors v with broadcasting, i.e. w x v."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if dim == 3:
        return np.cross(w, v)
    perp = np.stack((-v[..., 1], v[..., 0]), axis=-1)
    return w[..., None] * perp
