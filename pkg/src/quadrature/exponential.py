"""
Exact integrals of exponentials of affine functions over Laguerre cells and edges

On Lag_i(Phi) the integrand is e^{-Phi*(x)} = e^{phi_i - <x, y_i>}. Its
divergence-free reduction uses F(x) = -e^{phi_i - <x, y>} y / |y|^2, whose
divergence is the integrand, so a cell integral is a sum over boundary edges
of -<y, n_e> / |y|^2 times the line integral of the integrand along the edge.
Along an edge the integrand is e^{a - c t} and integrates in closed form.
"""
from dataclasses import dataclass
import logging

import numpy as np

from src.exceptions import DivergentIntegralError
from src.geometry.laguerre import Cell, Edge, LaguerreDiagram, rot_ccw, rot_cw

logger = logging.getLogger(__name__)

# below this |c L| the series branch of stable_exp_segment is used
SERIES_SWITCH = 1e-4


def stable_exp_segment(c, L):
    """
    Integral of e^{-c t} for t in [0, L], accurate to full relative precision
    for every c. Vectorized over c and L.
    """
    c, L = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(L, dtype=float))
    shape = c.shape
    c, L = c.ravel(), L.ravel()
    cl = c * L
    small = np.abs(cl) < SERIES_SWITCH
    out = np.empty_like(cl)
    out[small] = L[small] * (1.0 - cl[small] / 2.0 + cl[small] ** 2 / 6.0 - cl[small] ** 3 / 24.0)
    large = ~small
    out[large] = -np.expm1(-cl[large]) / c[large]
    out = out.reshape(shape)
    return out if out.ndim else float(out)


def _segment_integral(a0, a1, c, L):
    """Integral of e^{a0 - c t} on [0, L] where a1 = a0 - c L, taken from the larger end"""
    forward = c >= 0
    base = np.where(forward, a0, a1)
    return np.exp(base) * stable_exp_segment(np.abs(c), L)


def exp_mass_edge(edge: Edge, y, phi_i: float) -> float:
    """Integral of e^{phi_i - <x, y>} along a segment or ray, with respect to length"""
    y = np.asarray(y, dtype=float)
    a0 = phi_i - float(edge.start @ y)
    c = float(edge.direction @ y)
    if edge.is_ray:
        if c <= 0:
            raise DivergentIntegralError(
                f"divergent edge integral: ray direction {edge.direction} has <direction, y> = {c:.3e} <= 0"
            )
        return float(np.exp(a0) / c)
    L = float(np.linalg.norm(edge.end - edge.start))
    a1 = phi_i - float(edge.end @ y)
    return float(_segment_integral(a0, a1, c, L))


def _boundary(cell: Cell):
    """(start, end or None, unit direction, outward normal) for every boundary piece"""
    v = cell.vertices
    pieces = []
    if not cell.bounded:
        pieces.append((v[0], None, cell.ray_in, rot_ccw(cell.ray_in)))
    closing = len(v) if cell.bounded else len(v) - 1
    for m in range(closing):
        start, end = v[m], v[(m + 1) % len(v)]
        if np.array_equal(start, end):
            continue
        direction = (end - start) / np.linalg.norm(end - start)
        pieces.append((start, end, direction, rot_cw(direction)))
    if not cell.bounded:
        pieces.append((v[-1], None, cell.ray_out, rot_cw(cell.ray_out)))
    return pieces


def polygon_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def exp_mass_cell(cell: Cell, y, phi_i: float) -> float:
    """Integral of e^{phi_i - <x, y>} over the cell"""
    y = np.asarray(y, dtype=float)
    if not cell.bounded:
        for ray in (cell.ray_in, cell.ray_out):
            if ray @ y <= 0:
                raise DivergentIntegralError(
                    f"divergent integral over cell {cell.owner}: ray {ray} has <ray, y> = {ray @ y:.3e} <= 0"
                )

    # exponents are shifted by their maximum, reached at a vertex
    shift = float(np.max(phi_i - cell.vertices @ y))
    if not np.any(y):
        return float(np.exp(phi_i) * polygon_area(cell.vertices))

    total = 0.0
    yy = float(y @ y)
    for start, end, direction, normal in _boundary(cell):
        edge = Edge(i=cell.owner, j=-1, start=start, end=end, direction=direction)
        total += -float(normal @ y) / yy * exp_mass_edge(edge, y, phi_i - shift)
    return float(np.exp(shift) * total)


@dataclass(frozen=True)
class DiagramMasses:
    """
    Cell and edge masses of a whole diagram, all scaled by e^{-shift}; the
    scale cancels in every ratio used by the energy.
    """
    cell: np.ndarray  # (N,) m_i e^{-shift}
    edge: np.ndarray  # (E,) EdgeMass_ij e^{-shift}
    shift: float

    @property
    def total(self) -> float:
        return float(np.sum(self.cell))

    @property
    def log_total(self) -> float:
        return self.shift + float(np.log(self.total))


def diagram_masses(diagram: LaguerreDiagram) -> DiagramMasses:
    """
    All cell masses m_i and edge masses of a diagram in one vectorized pass.
    Every edge is integrated once and its line integral is shared by the two
    cells it separates.
    """
    y = diagram.points
    i, j = diagram.edge_cells[:, 0], diagram.edge_cells[:, 1]
    exponents = -diagram.vertex_values
    shift = float(exponents.max())
    a0 = exponents[diagram.edge_start] - shift
    c = 0.5 * np.einsum("ij,ij->i", diagram.edge_direction, y[i] + y[j])

    ray = diagram.is_ray
    edge = np.empty(len(i))
    if np.any(c[ray] <= 0):
        bad = np.flatnonzero(ray)[np.argmin(c[ray])]
        raise DivergentIntegralError(
            f"divergent edge integral on the ray between cells {i[bad]} and {j[bad]}: <direction, y> = {c[bad]:.3e}"
        )
    edge[ray] = np.exp(a0[ray]) / c[ray]
    seg = ~ray
    a1 = exponents[diagram.edge_end[seg]] - shift
    edge[seg] = _segment_integral(a0[seg], a1, c[seg], diagram.edge_length[seg])

    # outward normal of cell i along the edge
    normal = y[j] - y[i]
    normal /= np.linalg.norm(normal, axis=1, keepdims=True)
    sq = np.einsum("ij,ij->i", y, y)
    origin = sq == 0
    inv_sq = np.divide(1.0, sq, out=np.zeros_like(sq), where=~origin)
    from_i = -np.einsum("ij,ij->i", y[i], normal) * inv_sq[i] * edge
    from_j = np.einsum("ij,ij->i", y[j], normal) * inv_sq[j] * edge

    n = len(y)
    cell = np.bincount(i, from_i, minlength=n) + np.bincount(j, from_j, minlength=n)
    for k in np.flatnonzero(origin & diagram.triangulation.extreme):
        c_k = diagram.cell(int(k))
        if not c_k.bounded:
            raise DivergentIntegralError(f"divergent integral: cell {k} of the origin is unbounded")
        cell[k] = np.exp(diagram.phi[k] - shift) * polygon_area(c_k.vertices)

    return DiagramMasses(cell=cell, edge=edge, shift=shift)
