"""
Damped Newton method for the discrete energy E_nu

Each iteration solves M_nu d = -grad E_nu and takes the largest step 2^-i
that keeps every Laguerre cell open. The returned potential is
psi_nu = Phi* + log int e^{-Phi*}, which integrates e^{-psi_nu} to 1.
"""
from dataclasses import dataclass, field
from typing import List, Optional
import logging
import time

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.settings import settings
from src.energy.functional import EnergyReport, evaluate, hessian
from src.energy.regularized import regularized_matrix
from src.exceptions import DampingFailedError, InvalidMeasureError, MaxIterationsExceededError
from src.geometry.laguerre import (
    LaguerreDiagram,
    WeightVector,
    build_diagram,
    eval_phi_star,
    lower_envelope,
    regular_triangulation,
)
from src.measure.discrete_measure import DiscreteMeasure

logger = logging.getLogger(__name__)

# damping after this iteration is unusual and gets a warning
LATE_DAMPING_ITERATION = 5


class SolverConfig(BaseModel):
    """Stopping and linear-solve parameters of the damped Newton loop"""
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(default=1e-10, gt=0)
    max_newton_iterations: int = Field(default=100, gt=0)
    max_damping_bisections: int = Field(default=60, gt=0)
    linear_tolerance: float = Field(default=1e-12, gt=0)
    linear_max_iterations: Optional[int] = Field(default=None, gt=0)  # None means 20 * N

    @classmethod
    def from_settings(cls, **overrides) -> "SolverConfig":
        """Defaults from the environment-backed settings; None overrides are ignored"""
        values = {
            "tolerance": settings.tolerance,
            "max_newton_iterations": settings.max_newton_iterations,
            "max_damping_bisections": settings.max_damping_bisections,
            "linear_tolerance": settings.linear_tolerance,
            "linear_max_iterations": settings.linear_max_iterations or None,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class TraceEntry:
    k: int
    residual: float
    energy: float
    tau: Optional[float] = None  # None on the final, converged iterate
    linear_iterations: int = 0
    linear_residual: float = 0.0

    @property
    def damped(self) -> bool:
        return self.tau is not None and self.tau != 1.0


@dataclass
class SolveTrace:
    entries: List[TraceEntry] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def iterations(self) -> int:
        """Number of Newton steps taken"""
        return sum(entry.tau is not None for entry in self.entries)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([entry.residual for entry in self.entries])

    @property
    def damped(self) -> List[bool]:
        return [entry.damped for entry in self.entries]

    @property
    def damped_iterations(self) -> int:
        return sum(self.damped)

    @property
    def final_residual(self) -> float:
        return self.entries[-1].residual

    def superlinear_tail(self) -> bool:
        """
        Once two consecutive full steps were taken, the ratios
        residual_{k+1} / residual_k keep decreasing.
        """
        residuals = self.residuals
        start = next(
            (k for k in range(1, len(self.entries))
             if not self.entries[k - 1].damped and not self.entries[k].damped and self.entries[k].tau is not None),
            None,
        )
        if start is None or len(residuals) - start < 3:
            return True
        ratios = residuals[start + 1:] / residuals[start:-1]
        return bool(np.all(np.diff(ratios) < 0))


@dataclass(frozen=True)
class Potential:
    """psi_nu(x) = Phi*(x) + normalization"""
    points: np.ndarray
    Phi: WeightVector
    normalization: float
    cell_masses: np.ndarray = field(repr=False)  # m_i / T at termination
    diagram: LaguerreDiagram = field(default=None, repr=False)

    def evaluate(self, x) -> np.ndarray:
        return eval_phi_star(self.points, self.Phi, x) + self.normalization

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)

    def phi_values(self) -> np.ndarray:
        """phi_nu(y_i) = Phi**(y_i) - normalization, the Legendre transform at the support"""
        envelope, _ = lower_envelope(self.points, self.Phi)
        return envelope - self.normalization


def initial_guess(nu: DiscreteMeasure) -> WeightVector:
    """Phi_i = |y_i|^2 / 2, whose Laguerre diagram is the Voronoi diagram"""
    return WeightVector(0.5 * np.einsum("ij,ij->i", nu.points, nu.points))


def _residual(report: EnergyReport, nu_norm: float) -> float:
    return float(np.linalg.norm(report.gradient)) / nu_norm


def solve(nu: DiscreteMeasure, config: SolverConfig = None, initial: WeightVector = None):
    """Run the damped Newton loop and return (Potential, SolveTrace)"""
    config = config or SolverConfig.from_settings()
    points = nu.points
    Phi = np.array((initial or initial_guess(nu)).values, dtype=float)
    nu_norm = float(np.linalg.norm(nu.weights))
    trace = SolveTrace()
    started = time.perf_counter()

    triangulation = regular_triangulation(points, Phi)
    if not triangulation.is_in_U:
        raise InvalidMeasureError("initial weight vector leaves some Laguerre cell without interior")
    for k in range(config.max_newton_iterations + 1):
        diagram = build_diagram(points, Phi, triangulation=triangulation)
        report = evaluate(nu, Phi, diagram)
        residual = _residual(report, nu_norm)

        if residual <= config.tolerance:
            trace.entries.append(TraceEntry(k=k, residual=residual, energy=report.energy))
            trace.wall_time = time.perf_counter() - started
            logger.info(f"Converged after {k} Newton iterations: residual {residual:.3e}, energy {report.energy:.12g}")
            if not trace.superlinear_tail():
                logger.warning("Residual ratios did not decrease monotonically after the damping phase")
            potential = Potential(
                points=points,
                Phi=WeightVector(Phi),
                normalization=report.log_total_mass,
                cell_masses=report.probabilities,
                diagram=diagram,
            )
            return potential, trace

        if k == config.max_newton_iterations:
            raise MaxIterationsExceededError(
                f"no convergence after {k} Newton iterations (residual {residual:.3e} > {config.tolerance:.1e})"
            )

        H = hessian(nu, Phi, diagram, report)
        direction, info = regularized_matrix(H, points).solve(
            -report.gradient, rtol=config.linear_tolerance, maxiter=config.linear_max_iterations
        )

        tau = None
        for i in range(config.max_damping_bisections + 1):
            candidate = Phi + 2.0 ** -i * direction
            triangulation = regular_triangulation(points, candidate)
            if triangulation.is_in_U:
                tau = 2.0 ** -i
                break
        if tau is None:
            raise DampingFailedError(
                f"iteration {k}: no step 2^-i with i <= {config.max_damping_bisections} keeps all cells open"
            )

        trace.entries.append(TraceEntry(
            k=k, residual=residual, energy=report.energy, tau=tau,
            linear_iterations=info.iterations, linear_residual=info.residual,
        ))
        logger.info(f"Newton iteration {k}: residual {residual:.3e}, tau {tau:g}, CG iterations {info.iterations}")
        if tau != 1.0 and k >= LATE_DAMPING_ITERATION:
            logger.warning(f"Damping (tau = {tau:g}) at Newton iteration {k}")
        Phi = candidate
