"""
Comparison of a computed potential with the exact solution

psi_nu is only determined up to translation and an additive constant, so
the discrete Legendre transform phi_nu is first shifted by the affine function
a + <v, y> minimizing ||phi_mu - phi_nu - a - <v, .>||_{L2(nu)}. On the
primal side the same gauge reads psi_aligned(x) = psi_nu(x - v) - a.

The sup norm uses the Legendre isometry: sup(psi_nu - psi_mu) equals
sup(phi_mu - phi_nu), and both one-sided suprema are attained at vertices of
the piecewise affine objects, diagram vertices for x and support points for y.
"""
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np

from src.exceptions import SingularSystemError
from src.measure.discrete_measure import DiscreteMeasure
from src.measure.exact_solutions import ExactSolution
from src.solver.damped_newton import Potential

logger = logging.getLogger(__name__)

# rays are probed at this multiple of diam(supp mu) from their origin
RAY_PROBE = 5.0


@dataclass(frozen=True)
class Alignment:
    a: float
    v: np.ndarray


@dataclass(frozen=True)
class ErrorReport:
    l_inf: float
    l2_nu: float
    l1_nu: float
    ray_exceeds_vertex_max: bool = False


def align_values(exact: ExactSolution, nu: DiscreteMeasure, phi_nu: np.ndarray) -> Tuple[Alignment, np.ndarray]:
    """Weighted least-squares alignment of given values phi_nu(y_i)"""
    y = nu.points
    w = nu.weights
    residual = exact.phi(y) - phi_nu
    design = np.column_stack([np.ones(len(y)), y])
    normal = design.T @ (design * w[:, None])
    try:
        a, v1, v2 = np.linalg.solve(normal, design.T @ (w * residual))
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"alignment normal matrix is singular: {e}") from e
    v = np.array([v1, v2])
    return Alignment(a=float(a), v=v), phi_nu + a + y @ v


def align(exact: ExactSolution, nu: DiscreteMeasure, solved: Potential) -> Tuple[Alignment, np.ndarray]:
    """Alignment of phi_nu = Phi** - c and the aligned values at the support points"""
    return align_values(exact, nu, solved.phi_values())


def _support_diameter(exact: ExactSolution) -> float:
    corners = np.asarray(exact.support, dtype=float)
    return float(np.max(np.linalg.norm(corners[:, None, :] - corners[None, :, :], axis=-1)))


def error_norms(exact: ExactSolution, nu: DiscreteMeasure, solved: Potential, alignment: Alignment) -> ErrorReport:
    y = nu.points
    aligned = solved.phi_values() + alignment.a + y @ alignment.v
    diff = exact.phi(y) - aligned
    l2_nu = float(np.sqrt(nu.weights @ diff ** 2))
    l1_nu = float(nu.weights @ np.abs(diff))

    diagram = solved.diagram
    # psi_aligned(x_v + v) = Phi*(x_v) + c - a
    offset = solved.normalization - alignment.a
    vertex_gap = exact.psi(diagram.vertices + alignment.v) - (diagram.vertex_values + offset)
    l_inf = max(float(vertex_gap.max()), float(diff.max()))

    ray = diagram.is_ray
    t = RAY_PROBE * _support_diameter(exact)
    start = diagram.edge_start[ray]
    direction = diagram.edge_direction[ray]
    owner = diagram.edge_cells[ray, 0]
    probe = diagram.vertices[start] + t * direction
    # Phi* is affine along the ray with slope <direction, y_i> for either adjacent cell
    phi_star = diagram.vertex_values[start] + t * np.einsum("ij,ij->i", direction, y[owner])
    ray_gap = exact.psi(probe + alignment.v) - (phi_star + offset)
    exceeds = bool(len(ray_gap) and ray_gap.max() > vertex_gap.max())
    if exceeds:
        logger.warning(
            f"psi_mu - psi_nu at a probed ray point ({ray_gap.max():.3e}) exceeds its maximum "
            f"over diagram vertices ({vertex_gap.max():.3e})"
        )

    return ErrorReport(l_inf=l_inf, l2_nu=l2_nu, l1_nu=l1_nu, ray_exceeds_vertex_max=exceeds)
