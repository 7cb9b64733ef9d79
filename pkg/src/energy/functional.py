"""
Discrete energy E_nu(Phi) = sum_i Phi_i nu_i + I(Phi), I(Phi) = -log int e^{-Phi*},
with its gradient and Hessian

With m_i the mass of Lag_i(Phi), T = sum_i m_i and p = m / T:
    grad E = nu - p
    H = p p^T - diag(p) + L
where L is the weighted graph Laplacian of the diagram with edge weights
w_ij = EdgeMass_ij / (|y_i - y_j| T). The formulas hold for Phi in U.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from src.geometry.laguerre import LaguerreDiagram, as_values, build_diagram
from src.measure.discrete_measure import DiscreteMeasure
from src.quadrature.exponential import DiagramMasses, diagram_masses

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    total_mass: float
    cell_masses: np.ndarray
    gradient: np.ndarray
    I_value: float
    probabilities: np.ndarray = field(repr=False)  # m_i / T
    masses: DiagramMasses = field(repr=False)

    @property
    def log_total_mass(self) -> float:
        return -self.I_value


@dataclass(frozen=True)
class HessianMatrix:
    """H = sparse_part + p p^T; the rank-one term is only applied, never stored"""
    sparse_part: csr_matrix
    rank_one: np.ndarray

    @property
    def shape(self):
        return self.sparse_part.shape

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.sparse_part @ v + self.rank_one * (self.rank_one @ v)

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        return self.matvec(v)

    def toarray(self) -> np.ndarray:
        """Dense copy, meant for small instances"""
        return self.sparse_part.toarray() + np.outer(self.rank_one, self.rank_one)


def evaluate(nu: DiscreteMeasure, Phi, diagram: LaguerreDiagram = None) -> EnergyReport:
    """E_nu, its gradient and the cell masses at Phi"""
    values = as_values(Phi, nu.size)
    if diagram is None:
        diagram = build_diagram(nu.points, values)

    masses = diagram_masses(diagram)
    total = masses.total
    probabilities = masses.cell / total
    I_value = -masses.log_total
    energy = float(values @ nu.weights) + I_value

    return EnergyReport(
        energy=energy,
        total_mass=float(np.exp(masses.log_total)),
        cell_masses=masses.cell * np.exp(masses.shift),
        gradient=nu.weights - probabilities,
        I_value=I_value,
        probabilities=probabilities,
        masses=masses,
    )


def edge_weights(diagram: LaguerreDiagram, report: EnergyReport) -> np.ndarray:
    """w_ij = EdgeMass_ij / (|y_i - y_j| T) for every diagram edge"""
    y = diagram.points
    i, j = diagram.edge_cells[:, 0], diagram.edge_cells[:, 1]
    return report.masses.edge / (np.linalg.norm(y[i] - y[j], axis=1) * report.masses.total)


def hessian(nu: DiscreteMeasure, Phi, diagram: LaguerreDiagram, report: EnergyReport) -> HessianMatrix:
    """Second derivatives of E_nu assembled edge by edge over the diagram, rays included"""
    n = nu.size
    i, j = diagram.edge_cells[:, 0], diagram.edge_cells[:, 1]
    w = edge_weights(diagram, report)
    p = report.probabilities

    rows = np.concatenate([i, j, i, j, np.arange(n)])
    cols = np.concatenate([j, i, i, j, np.arange(n)])
    data = np.concatenate([-w, -w, w, w, -p])
    sparse_part = coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    return HessianMatrix(sparse_part=sparse_part, rank_one=p.copy())
