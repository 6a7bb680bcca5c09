"""Scene files: parsing, validation and procedural scenes."""
import json
from dataclasses import dataclass
from logging import getLogger
from pathlib import Path
from typing import Any
from typing import Dict
from typing import Mapping
from typing import Optional
from typing import Union

import numpy as np
from scipy.linalg import cholesky
from scipy.linalg import qr
from scipy.linalg import solve_triangular

from .energy.params import EnergyParams
from .errors import SceneError
from .errors import ShapeMatchingError
from .integrator.config import IntegratorConfig
from .kinematics.shape import KinematicState
from .kinematics.shape import RestShape
from .kinematics.shape import build_rest_shape

LOG = getLogger(__name__)

SCENE_KEYS = frozenset({"name", "dim", "particles", "params", "integrator", "seed"})
PARTICLE_KEYS = frozenset(
    {
        "rest_position",
        "mass",
        "stiffness",
        "initial_position",
        "initial_velocity",
        "pinned",
    }
)
PARAM_KEYS = frozenset({"gamma", "alpha", "beta"})
INTEGRATOR_KEYS = frozenset(
    {"dt", "scheme", "newton_tol", "max_iters", "gravity", "use_full_hessian"}
)


@dataclass(frozen=True)
class Scene:
    """
    A parsed scene.

    Attributes
    ----------
    name : str
        Scene name, used for file names and logs.
    shape : RestShape
        Rest shape of the particle cloud.
    initial : KinematicState
        Initial positions and velocities.
    params : EnergyParams
        Energy parameters.
    integrator : IntegratorConfig
        Integrator settings, including the pinned particles.
    seed : Optional[int]
        Seed of a procedural scene.
    """

    name: str
    shape: RestShape
    initial: KinematicState
    params: EnergyParams
    integrator: IntegratorConfig
    seed: Optional[int] = None

    @property
    def dim(self) -> int:
        return self.shape.dim


def _check_keys(section: Mapping[str, Any], allowed: frozenset, prefix: str) -> None:
    if not isinstance(section, Mapping):
        raise SceneError(prefix or "<root>", "expected an object")
    for key in section:
        if key not in allowed:
            raise SceneError(f"{prefix}{key}", "unknown key")


def _vector(value: Any, dim: int, key: str) -> np.ndarray:
    try:
        out = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as err:
        raise SceneError(key, f"not a numeric vector ({err})") from err
    if out.shape != (dim,) or not np.all(np.isfinite(out)):
        raise SceneError(key, f"expected {dim} finite numbers, got {value!r}")
    return out


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(key, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        raise SceneError(key, f"expected a finite number, got {value!r}")
    return float(value)


def parse_scene(data: Mapping[str, Any], name: str = "scene") -> Scene:
    """
    Scene parsing

    Parameters
    ----------
    data : Mapping[str, Any]
        Decoded scene document.
    name : str, default 'scene'
        Fallback name if the document has no 'name'.

    Returns
    -------
    Scene
        The validated scene.

    Raises
    ------
    SceneError
        On unknown keys, missing keys or invalid values; `key` names the
        offending entry (e.g. 'particles[3].mass').

    """
    _check_keys(data, SCENE_KEYS, "")
    for key in ("dim", "particles"):
        if key not in data:
            raise SceneError(key, "missing")
    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim not in (2, 3):
        raise SceneError("dim", f"expected 2 or 3, got {dim!r}")
    particles = data["particles"]
    if not isinstance(particles, list) or not particles:
        raise SceneError("particles", "expected a non-empty list")

    rest, masses, stiffness, positions, velocities, pinned = [], [], [], [], [], []
    for index, particle in enumerate(particles):
        prefix = f"particles[{index}]."
        _check_keys(particle, PARTICLE_KEYS, prefix)
        if "rest_position" not in particle:
            raise SceneError(f"{prefix}rest_position", "missing")
        rest_position = _vector(
            particle["rest_position"], dim, f"{prefix}rest_position"
        )
        rest.append(rest_position)
        masses.append(_number(particle.get("mass", 1.0), f"{prefix}mass"))
        stiffness.append(_number(particle.get("stiffness", 1.0), f"{prefix}stiffness"))
        positions.append(
            _vector(particle["initial_position"], dim, f"{prefix}initial_position")
            if "initial_position" in particle
            else rest_position
        )
        velocities.append(
            _vector(particle["initial_velocity"], dim, f"{prefix}initial_velocity")
            if "initial_velocity" in particle
            else np.zeros(dim)
        )
        flag = particle.get("pinned", False)
        if not isinstance(flag, bool):
            raise SceneError(f"{prefix}pinned", f"expected true or false, got {flag!r}")
        if flag:
            pinned.append(index)
        if not masses[-1] > 0.0:
            raise SceneError(f"{prefix}mass", "must be positive")
        if not stiffness[-1] >= 0.0:
            raise SceneError(f"{prefix}stiffness", "must be non-negative")

    params_data = data.get("params", {})
    _check_keys(params_data, PARAM_KEYS, "params.")
    try:
        params = EnergyParams(
            **{k: _number(v, f"params.{k}") for k, v in params_data.items()}
        )
    except ValueError as err:
        if isinstance(err, SceneError):
            raise
        raise SceneError("params", err) from err

    integrator = _parse_integrator(data.get("integrator", {}), dim, pinned)

    try:
        shape = build_rest_shape(rest, masses, stiffness)
        initial = KinematicState(np.array(positions), np.array(velocities))
    except ShapeMatchingError as err:
        raise SceneError("particles", err) from err

    seed = data.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise SceneError("seed", f"expected an integer, got {seed!r}")
    scene = Scene(
        name=str(data.get("name", name)),
        shape=shape,
        initial=initial,
        params=params,
        integrator=integrator,
        seed=seed,
    )
    LOG.info(
        "Parsed scene '%s' with %s particles in %sD.",
        scene.name,
        shape.n_particles,
        dim,
    )
    return scene


def _parse_integrator(section: Any, dim: int, pinned: list) -> IntegratorConfig:
    _check_keys(section, INTEGRATOR_KEYS, "integrator.")
    kwargs: Dict[str, Any] = {"pinned": frozenset(pinned)}
    if "dt" in section:
        kwargs["dt"] = _number(section["dt"], "integrator.dt")
    if "scheme" in section:
        kwargs["scheme"] = section["scheme"]
    if section.get("newton_tol") is not None:
        kwargs["newton_tol"] = _number(section["newton_tol"], "integrator.newton_tol")
    if "max_iters" in section:
        max_iters = section["max_iters"]
        if isinstance(max_iters, bool) or not isinstance(max_iters, int):
            raise SceneError(
                "integrator.max_iters", f"expected an integer, got {max_iters!r}"
            )
        kwargs["newton_max_iters"] = max_iters
    if "gravity" in section:
        gravity = _vector(section["gravity"], dim, "integrator.gravity")
        kwargs["gravity"] = tuple(float(g) for g in gravity)
    if "use_full_hessian" in section:
        kwargs["use_full_hessian"] = bool(section["use_full_hessian"])
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as err:
        raise SceneError("integrator", err) from err


def read_scene(path: Union[str, Path]) -> Scene:
    """Reads and parses a JSON scene file."""
    path = Path(path)
    LOG.info("Reading scene from '%s' ...", path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SceneError("<file>", f"invalid JSON ({err})") from err
    except UnicodeDecodeError as err:
        raise SceneError("<file>", f"not UTF-8 text ({err.reason})") from err
    return parse_scene(data, name=path.stem)


def random_scene(
    n: int,
    dim: int,
    seed: int,
    gamma: float = 0.5,
    alpha: float = 0.1,
    beta: float = 0.05,
    stretch: float = 0.2,
    noise: float = 0.05,
) -> Scene:
    """
    Procedural scene

    A whitened random rest cloud (A_s = I before the per-axis scaling) is
    deformed by a symmetric positive definite stretch, rotated, translated and
    perturbed per particle. Masses and stiffnesses are drawn from [0.5, 2],
    velocities from a standard normal distribution scaled by 0.3.

    Parameters
    ----------
    n : int
        Number of particles, at least dim + 1.
    dim : int
        2 or 3.
    seed : int
        Seed of the random generator.
    gamma : float, default 0.5
        Blend weight.
    alpha : float, default 0.1
        Stiffness damping.
    beta : float, default 0.05
        Mass damping.
    stretch : float, default 0.2
        Magnitude of the symmetric stretch.
    noise : float, default 0.05
        Per-particle position noise.

    Returns
    -------
    Scene
        The scene, named 'random_<n>_<dim>d_<seed>'.

    """
    if dim not in (2, 3):
        raise ValueError(f"Unsupported dimension {dim}, expected 2 or 3.")
    if n < dim + 1:
        raise ValueError(f"A {dim}D scene needs at least {dim + 1} particles.")
    rng = np.random.default_rng(seed)
    masses = rng.uniform(0.5, 2.0, size=n)
    stiffness = rng.uniform(0.5, 2.0, size=n)

    # Whitened rest cloud with per-axis scales
    raw = rng.normal(size=(n, dim))
    raw -= (masses @ raw) / masses.sum()
    covariance = np.einsum("r,rp,rq->pq", masses, raw, raw) / masses.sum()
    lower = cholesky(covariance, lower=True)
    rest = solve_triangular(lower, raw.T, lower=True).T
    rest = rest * rng.uniform(0.7, 1.4, size=dim)

    # Deformation: SPD stretch, rotation, translation, noise
    b_mat = rng.uniform(-1.0, 1.0, size=(dim, dim))
    deform = np.eye(dim) + stretch * 0.5 * (b_mat + b_mat.T)
    q_mat, r_mat = qr(rng.normal(size=(dim, dim)))
    q_mat = q_mat * np.sign(np.diag(r_mat))
    if np.linalg.det(q_mat) < 0.0:
        q_mat[:, 0] = -q_mat[:, 0]
    positions = rest @ (q_mat @ deform).T + rng.normal(size=dim)
    positions += noise * rng.normal(size=(n, dim))
    velocities = 0.3 * rng.normal(size=(n, dim))

    shape = build_rest_shape(rest, masses, stiffness)
    return Scene(
        name=f"random_{n}_{dim}d_{seed}",
        shape=shape,
        initial=KinematicState(positions, velocities),
        params=EnergyParams(gamma=gamma, alpha=alpha, beta=beta),
        integrator=IntegratorConfig(),
        seed=seed,
    )
