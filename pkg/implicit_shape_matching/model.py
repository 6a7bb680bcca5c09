"""The scene-driven shape matching model."""
from dataclasses import replace
from logging import getLogger
from pathlib import Path
from time import perf_counter
from typing import Dict
from typing import Optional
from typing import Union

import numpy as np

from .energy.context import DerivativeContext
from .energy.damping import damping_energy
from .energy.potential import gradient
from .energy.potential import hessian
from .integrator.config import StepStats
from .integrator.simulate import Trajectory
from .integrator.simulate import simulate
from .kinematics.shape import KinematicState
from .scene import Scene

LOG = getLogger(__name__)


class ShapeMatchingModel:
    """
    Class for simulating a shape matching scene.

    Attributes
    ----------
    LOG_FRAME_RATE : int
        Rate of the progress logs in frames.
    EXPORT_COORDINATES : str
        Coordinate labels of the exported columns, the first `dim` are used.
    """

    LOG_FRAME_RATE = 50
    EXPORT_COORDINATES = "xyz"

    def __init__(
        self,
        scene: Scene,
        scheme: Optional[str] = None,
        gauss_newton: bool = False,
    ) -> None:
        """
        Class constructor for the ShapeMatchingModel class.

        Parameters
        ----------
        scene : Scene
            The scene to simulate.
        scheme : Optional[str]
            Overrides the integration scheme of the scene.
        gauss_newton : bool, default False
            Use the Gauss-Newton part of the positional Hessian only.

        Returns
        -------
        None

        """
        self.scene = scene
        self.gauss_newton = gauss_newton
        cfg = scene.integrator
        if scheme is not None:
            cfg = replace(cfg, scheme=scheme)
        if gauss_newton:
            cfg = replace(cfg, use_full_hessian=False)
        self.cfg = cfg

        # Run state
        self.trajectory = None  # type: Optional[Trajectory]
        self.wall_time = 0.0

    @property
    def model_name(self) -> str:
        return self.scene.name

    @property
    def n_steps(self) -> int:
        return 0 if self.trajectory is None else len(self.trajectory.stats)

    def __repr__(self) -> str:
        return (
            "ShapeMatchingModel("
            + f"scene={self.scene.name!r}, scheme={self.cfg.scheme!r}, "
            + f"gauss_newton={self.gauss_newton})"
        )

    def __str__(self) -> str:
        """
        Print method of the ShapeMatchingModel class.

        Returns
        -------
        str
            Information about the scene and the run.

        """
        params = self.scene.params
        return (
            f"ShapeMatchingModel '{self.model_name}' "
            f"with {self.scene.shape.n_particles} particles in {self.scene.dim}D:"
            f"\n - scheme:     {self.cfg.scheme:>20}"
            f"\n - dt:         {self.cfg.dt:20.6f} [s]"
            f"\n - gamma:      {params.gamma:20.3f}"
            f"\n - alpha:      {params.alpha:20.3f}"
            f"\n - beta:       {params.beta:20.3f}"
            f"\n - pinned:     {len(self.cfg.pinned):20d}"
            f"\n - steps:      {self.n_steps:20d}"
        )

    def simulate(self, n_steps: int, stride: int = 1) -> Trajectory:
        """
        Simulates the scene from its initial state.

        Parameters
        ----------
        n_steps : int
            Number of time steps.
        stride : int, default 1
            Keep every `stride`-th frame.

        Returns
        -------
        Trajectory
            The kept frames and the statistics of every step.

        Raises
        ------
        StepFailure
            If a step fails.

        """
        LOG.info(
            "Simulating %s steps of '%s' with %s ...",
            n_steps,
            self.model_name,
            self.cfg.scheme,
        )
        start = perf_counter()
        self.trajectory = simulate(
            self.scene.initial,
            self.scene.shape,
            self.scene.params,
            self.cfg,
            n_steps,
            stride,
            callback=self._log_progress,
        )
        self.wall_time = perf_counter() - start
        LOG.info("Simulation finished after %.2f seconds.", self.wall_time)
        return self.trajectory

    def _log_progress(
        self, frame: int, state: KinematicState, stats: StepStats
    ) -> None:
        if frame % self.LOG_FRAME_RATE:
            return
        LOG.info(
            "Frame %s: energy %.6e, %s Newton iterations, max |v| %.3e",
            frame,
            stats.energy_after,
            stats.newton_iters,
            float(np.max(np.abs(state.velocities))),
        )

    def summary(self) -> str:
        """One-line run summary: steps, total Newton iterations and wall time."""
        total = 0 if self.trajectory is None else self.trajectory.total_newton_iters
        return (
            f"steps={self.n_steps} newton_iters={total} "
            f"wall_time={self.wall_time:.3f}s"
        )

    def energy_report(self, state: Optional[KinematicState] = None) -> Dict[str, float]:
        """
        Energies and derivative summary of a state.

        Parameters
        ----------
        state : Optional[KinematicState]
            State to report, the initial state of the scene if None.

        Returns
        -------
        Dict[str, float]
            V, V_da, V_db, V_d, the gradient norm and the extremal
            eigenvalues of the (symmetrized) potential Hessian.

        """
        shape, params = self.scene.shape, self.scene.params
        state = self.scene.initial if state is None else state
        context = DerivativeContext.build(state, shape, params)
        report = gradient(state, shape, params, context=context)
        v_da, v_db, v_d = damping_energy(state, shape, params, context)
        blocks = hessian(
            state, shape, params, gauss_newton=self.gauss_newton, context=context
        )
        eig_min, eig_max = blocks.eigenvalue_range()
        return {
            "V": report.value,
            "V_da": v_da,
            "V_db": v_db,
            "V_d": v_d,
            "grad_norm": report.gradient_norm,
            "hess_eig_min": eig_min,
            "hess_eig_max": eig_max,
        }

    # Export ------------------------------------------------------------------
    def export(self, file_path: Union[str, Path]) -> None:
        """
        Exports the kept frames as CSV.

        One row per particle and frame with the columns
        frame,particle,px,py[,pz],vx,vy[,vz]; values are written as the
        shortest decimal that reads back to the same double.

        Parameters
        ----------
        file_path : Union[str, Path]
            Destination of the CSV file.

        Raises
        ------
        ValueError
            If nothing has been simulated yet.

        """
        if self.trajectory is None:
            raise ValueError("Nothing to export, call 'simulate' first.")
        file_path = Path(file_path)
        LOG.info("Exporting trajectory to '%s' ...", file_path)
        self._export_csv(file_path, self.trajectory)

    def _export_csv(self, file_path: Path, trajectory: Trajectory) -> None:
        axes = self.EXPORT_COORDINATES[: self.scene.dim]
        header = ",".join(
            ["frame", "particle"]
            + [f"p{a}" for a in axes]
            + [f"v{a}" for a in axes]
        )
        n = self.scene.shape.n_particles
        rows = [
            [str(frame), str(r)]
            + [repr(float(x)) for x in state.positions[r]]
            + [repr(float(v)) for v in state.velocities[r]]
            for frame, state in zip(trajectory.frames, trajectory.states)
            for r in range(n)
        ]
        LOG.debug("Writing %i lines to '%s' ...", len(rows), file_path)
        np.savetxt(
            file_path,
            np.array(rows, dtype=object),
            delimiter=",",
            comments="",
            newline="\n",
            fmt="%s",
            header=header,
        )
