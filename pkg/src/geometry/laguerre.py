"""
Laguerre diagrams of weighted point sets in the plane

The cell of y_i is Lag_i(Phi) = {x : <x, y_j - y_i> <= Phi_j - Phi_i for all j},
the region where Phi*(x) = max_j <x, y_j> - Phi_j is attained by i. The diagram
is obtained by duality from the lower convex hull of the lifted points
(y_i, Phi_i): every lower facet is a triangle of the regular triangulation and
maps to a diagram vertex, every triangulation edge maps to a diagram edge
(a ray for edges on the boundary of conv{y_i}), and every point that is a
vertex of the lower hull owns a cell with nonempty interior.

Qhull provides the candidate triangulation. Its local convexity is then
verified with exact predicates and repaired by edge flips, so in_U is an exact
decision for the given floating point input.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError

from src.exceptions import DegenerateSupportError, InvalidMeasureError
from src.geometry.predicates import lifted_midpoint_below, orient2d, orient3d

logger = logging.getLogger(__name__)


def rot_cw(v: np.ndarray) -> np.ndarray:
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def rot_ccw(v: np.ndarray) -> np.ndarray:
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class WeightVector:
    """Dual variables Phi_i, one per support point"""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidMeasureError(f"weight vector must be one-dimensional, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidMeasureError("weight vector entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise InvalidMeasureError(f"points must have shape (N, 2), got {points.shape}")
    if not np.all(np.isfinite(points)):
        raise InvalidMeasureError("points must be finite")
    return points


def as_values(Phi, n: int) -> np.ndarray:
    values = Phi.values if isinstance(Phi, WeightVector) else WeightVector(Phi).values
    if len(values) != n:
        raise InvalidMeasureError(f"weight vector has length {len(values)}, expected {n}")
    return values


def _check_planar(points: np.ndarray):
    if len(points) < 3:
        raise DegenerateSupportError(f"degenerate support: {len(points)} points cannot span the plane")
    other = np.flatnonzero(np.any(points != points[0], axis=1))
    if len(other) == 0 or not np.any(orient2d(points[0], points[other[0]], points)):
        raise DegenerateSupportError("degenerate support: all points are collinear")


def _third(triangle, p: int, q: int) -> int:
    return next(v for v in triangle if v != p and v != q)


def _edge_tables(triangles: np.ndarray, n: int):
    """
    Interior edges (a, b, t, u, c, d): triangle t = (a, b, c) and u = (b, a, d),
    both counterclockwise. Boundary edges (a, b, t): a -> b runs counterclockwise
    along the boundary of the triangulation with t = (a, b, c) on its left.
    """
    src = triangles.ravel()
    dst = triangles[:, [1, 2, 0]].ravel()
    opposite = triangles[:, [2, 0, 1]].ravel()
    owner = np.repeat(np.arange(len(triangles)), 3)

    keys = src * n + dst
    order = np.argsort(keys)
    sorted_keys = keys[order]
    twin_keys = dst * n + src
    pos = np.minimum(np.searchsorted(sorted_keys, twin_keys), len(keys) - 1)
    has_twin = sorted_keys[pos] == twin_keys
    twin = order[pos]

    first = has_twin & (src < dst)
    interior = (src[first], dst[first], owner[first], owner[twin[first]],
                opposite[first], opposite[twin[first]])
    boundary = (src[~has_twin], dst[~has_twin], owner[~has_twin])
    return interior, boundary


def _lawson_repair(points: np.ndarray, lifted: np.ndarray, triangles: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Flip edges along which the lifted surface is not convex. Returns the
    triangles and whether every edge is now locally convex. A bad edge whose
    quadrilateral is not strictly convex cannot be flipped; one of its vertices
    then lies strictly above the lower hull of the other three points.
    """
    (a, b, _, _, c, d), _ = _edge_tables(triangles, len(points))
    signs = orient3d(lifted[a], lifted[b], lifted[c], lifted[d])
    if not np.any(signs < 0):
        return triangles, True

    tris = [list(t) for t in triangles.tolist()]
    halfedges = {}
    for t, (p, q, r) in enumerate(tris):
        halfedges[(p, q)] = t
        halfedges[(q, r)] = t
        halfedges[(r, p)] = t

    stack = [(int(p), int(q)) for p, q in zip(a[signs < 0], b[signs < 0])]
    flips = 0
    limit = 10 * len(tris) + 100
    while stack:
        p, q = stack.pop()
        t, u = halfedges.get((p, q)), halfedges.get((q, p))
        if t is None or u is None:
            continue
        r, s = _third(tris[t], p, q), _third(tris[u], q, p)
        if orient3d(lifted[p], lifted[q], lifted[r], lifted[s]) >= 0:
            continue
        if orient2d(points[p], points[s], points[r]) <= 0 or orient2d(points[q], points[r], points[s]) <= 0:
            logger.debug(f"Edge ({p}, {q}) is not locally convex and cannot be flipped")
            return np.array(tris, dtype=np.int64), False

        tris[t] = [p, s, r]
        tris[u] = [q, r, s]
        del halfedges[(p, q)], halfedges[(q, p)]
        halfedges[(p, s)] = halfedges[(s, r)] = halfedges[(r, p)] = t
        halfedges[(q, r)] = halfedges[(r, s)] = halfedges[(s, q)] = u
        stack.extend([(p, s), (s, q), (q, r), (r, p)])

        flips += 1
        if flips > limit:
            logger.warning(f"Edge flipping did not terminate after {flips} flips")
            return np.array(tris, dtype=np.int64), False

    logger.debug(f"Repaired the hull triangulation with {flips} edge flips")
    return np.array(tris, dtype=np.int64), True


@dataclass(frozen=True)
class RegularTriangulation:
    """Projection of the lower convex hull of the lifted points (y_i, heights_i)"""
    points: np.ndarray
    heights: np.ndarray
    triangles: np.ndarray  # (T, 3) counterclockwise
    locally_convex: bool

    @cached_property
    def lifted(self) -> np.ndarray:
        return np.column_stack([self.points, self.heights])

    @cached_property
    def _tables(self):
        return _edge_tables(self.triangles, len(self.points))

    @property
    def interior_edges(self) -> Tuple[np.ndarray, ...]:
        return self._tables[0]

    @property
    def boundary_edges(self) -> Tuple[np.ndarray, ...]:
        return self._tables[1]

    @cached_property
    def bending(self) -> np.ndarray:
        """Exact sign of the fold of the lifted surface across each interior edge"""
        a, b, _, _, c, d = self.interior_edges
        L = self.lifted
        return orient3d(L[a], L[b], L[c], L[d])

    @cached_property
    def halfedges(self) -> Dict[Tuple[int, int], int]:
        table = {}
        for t, (p, q, r) in enumerate(self.triangles.tolist()):
            table[(p, q)] = t
            table[(q, r)] = t
            table[(r, p)] = t
        return table

    @cached_property
    def boundary_successor(self) -> Dict[int, int]:
        a, b, _ = self.boundary_edges
        return dict(zip(a.tolist(), b.tolist()))

    @cached_property
    def present(self) -> np.ndarray:
        mask = np.zeros(len(self.points), dtype=bool)
        mask[self.triangles.ravel()] = True
        return mask

    @cached_property
    def extreme(self) -> np.ndarray:
        """
        Vertices of the lower hull, i.e. indices whose Laguerre cell has
        nonempty interior. An interior vertex is extreme unless its bending
        edges are absent or form one straight crease; a boundary vertex is
        extreme at a corner of conv{y_i}, and on a straight part of the
        boundary when the lifted boundary polyline bends strictly there.
        """
        n = len(self.points)
        a, b, *_ = self.interior_edges
        folds = self.bending > 0
        count = np.bincount(a[folds], minlength=n) + np.bincount(b[folds], minlength=n)

        ba, bb, _ = self.boundary_edges
        on_boundary = np.zeros(n, dtype=bool)
        on_boundary[ba] = True

        inner = self.present & ~on_boundary
        extreme = inner & (count >= 3)
        for i in np.flatnonzero(inner & (count == 2)):
            incident = np.flatnonzero(folds & ((a == i) | (b == i)))
            j, k = (int(b[e]) if a[e] == i else int(a[e]) for e in incident)
            y = self.points
            crease = orient2d(y[i], y[j], y[k]) == 0 and np.dot(y[j] - y[i], y[k] - y[i]) < 0
            extreme[i] = not crease

        predecessor = np.empty(n, dtype=np.int64)
        successor = np.empty(n, dtype=np.int64)
        successor[ba] = bb
        predecessor[bb] = ba
        corners = ba[orient2d(self.points[predecessor[ba]], self.points[ba], self.points[successor[ba]]) > 0]
        extreme[corners] = True
        L = self.lifted
        for i in np.setdiff1d(ba, corners):
            extreme[i] = lifted_midpoint_below(L[predecessor[i]], L[i], L[successor[i]])
        return extreme

    @property
    def is_in_U(self) -> bool:
        """Every point owns a cell with nonempty interior"""
        return bool(self.locally_convex and np.all(self.extreme))

    @cached_property
    def dual_vertices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per triangle: the gradient x_t of its lifted plane and Phi*(x_t)"""
        T = self.triangles
        y, h = self.points, self.heights
        A = np.stack([y[T[:, 1]] - y[T[:, 0]], y[T[:, 2]] - y[T[:, 0]]], axis=1)
        rhs = np.stack([h[T[:, 1]] - h[T[:, 0]], h[T[:, 2]] - h[T[:, 0]]], axis=1)
        x = np.linalg.solve(A, rhs[..., None])[..., 0]
        values = np.mean([np.einsum("ij,ij->i", x, y[T[:, k]]) - h[T[:, k]] for k in range(3)], axis=0)
        return x, values


def regular_triangulation(points, heights) -> RegularTriangulation:
    """Lower hull of the lifted points, checked and repaired with exact predicates"""
    points = as_points(points)
    heights = as_values(heights, len(points))
    _check_planar(points)

    lifted = np.column_stack([points, heights])
    # a point high above the centroid keeps the hull full-dimensional for flat heights
    top = np.append(points.mean(axis=0), heights.max() + np.ptp(heights) + np.ptp(points) + 1.0)
    top_index = len(points)
    try:
        hull = ConvexHull(np.vstack([lifted, top]))
    except QhullError as e:
        raise DegenerateSupportError(f"degenerate support: convex hull failed ({e})") from e

    lower = hull.simplices[(hull.equations[:, 2] < 0) & np.all(hull.simplices != top_index, axis=1)]
    y = points
    signs = orient2d(y[lower[:, 0]], y[lower[:, 1]], y[lower[:, 2]])
    lower = lower[signs != 0].astype(np.int64)
    flip = signs[signs != 0] < 0
    lower[flip] = lower[flip][:, [0, 2, 1]]

    triangles, locally_convex = _lawson_repair(points, lifted, lower)
    if not locally_convex:
        logger.debug("Lower hull triangulation is not locally convex after repair")
    return RegularTriangulation(points=points, heights=heights, triangles=triangles, locally_convex=locally_convex)


@dataclass(frozen=True)
class Cell:
    """
    Convex polygon Lag_i(Phi) with counterclockwise vertices. Unbounded cells
    carry ray_in (arriving at the first vertex) and ray_out (leaving from the
    last vertex). neighbor_of_edge lists the adjacent point index for each
    boundary edge in traversal order: ray_in, the segments, ray_out.
    """
    owner: int
    vertices: np.ndarray
    ray_in: Optional[np.ndarray] = None
    ray_out: Optional[np.ndarray] = None
    neighbor_of_edge: Tuple[int, ...] = ()

    @property
    def bounded(self) -> bool:
        return self.ray_in is None


@dataclass(frozen=True)
class Edge:
    """Lag_i and Lag_j meet along a segment start -> end, or a ray from start"""
    i: int
    j: int
    start: np.ndarray
    end: Optional[np.ndarray]
    direction: np.ndarray

    @property
    def is_ray(self) -> bool:
        return self.end is None

    @classmethod
    def segment(cls, start, end, i: int = -1, j: int = -1) -> "Edge":
        start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
        return cls(i=i, j=j, start=start, end=end, direction=_unit(end - start))

    @classmethod
    def ray(cls, start, direction, i: int = -1, j: int = -1) -> "Edge":
        return cls(i=i, j=j, start=np.asarray(start, dtype=float), end=None,
                   direction=_unit(np.asarray(direction, dtype=float)))


@dataclass(frozen=True)
class LaguerreDiagram:
    points: np.ndarray
    phi: np.ndarray
    triangulation: RegularTriangulation
    vertices: np.ndarray         # (V, 2) merged diagram vertices
    vertex_values: np.ndarray    # Phi* at the vertices
    triangle_vertex: np.ndarray  # (T,) vertex index of each triangle
    edge_cells: np.ndarray       # (E, 2) indices i, j of the adjacent cells
    edge_start: np.ndarray       # (E,) vertex index
    edge_end: np.ndarray         # (E,) vertex index, -1 for rays
    edge_direction: np.ndarray   # (E, 2) unit direction
    edge_length: np.ndarray      # (E,) inf for rays

    @property
    def triangles(self) -> np.ndarray:
        return self.triangulation.triangles

    @property
    def is_ray(self) -> np.ndarray:
        return self.edge_end < 0

    @property
    def owners(self) -> np.ndarray:
        return np.flatnonzero(self.triangulation.extreme)

    @property
    def edges(self) -> List[Edge]:
        return [
            Edge(
                i=int(i), j=int(j),
                start=self.vertices[s],
                end=None if e < 0 else self.vertices[e],
                direction=d,
            )
            for (i, j), s, e, d in zip(self.edge_cells, self.edge_start, self.edge_end, self.edge_direction)
        ]

    @cached_property
    def cells(self) -> List[Cell]:
        return [self.cell(int(i)) for i in self.owners]

    def cell(self, i: int) -> Cell:
        """Cell of point i, which must be a vertex of the lower hull"""
        tri = self.triangulation
        halfedges = tri.halfedges
        T = self._triangle_list

        j = tri.boundary_successor.get(i)
        boundary = j is not None
        if not boundary:
            first = T[self._incidence[i]]
            j = first[(first.index(i) + 1) % 3]

        # triangles around i in counterclockwise order; hinges[s] is the vertex
        # shared by fan[s] and fan[s + 1]
        start = t = halfedges[(i, j)]
        j_first = j
        fan, hinges = [], []
        while True:
            k = _third(T[t], i, j)
            fan.append(t)
            hinges.append(k)
            t = halfedges.get((i, k))
            j = k
            if t is None or t == start:
                break

        labels = self.triangle_vertex[fan].tolist()
        if not boundary:
            shift = next((s for s in range(len(labels)) if labels[s] != labels[s - 1]), 0)
            labels = labels[shift:] + labels[:shift]
            hinges = hinges[shift:] + hinges[:shift]

        ids, neighbors = [labels[0]], []
        for s in range(1, len(labels)):
            if labels[s] != ids[-1]:
                ids.append(labels[s])
                neighbors.append(hinges[s - 1])

        if not boundary:
            if len(ids) > 1:
                neighbors.append(hinges[-1])
            return Cell(owner=i, vertices=self.vertices[ids], neighbor_of_edge=tuple(neighbors))

        y = self.points
        j_last = hinges[-1]
        return Cell(
            owner=i,
            vertices=self.vertices[ids],
            ray_in=_unit(rot_cw(y[j_first] - y[i])),
            ray_out=_unit(rot_ccw(y[j_last] - y[i])),
            neighbor_of_edge=tuple([j_first] + neighbors + [j_last]),
        )

    @cached_property
    def _triangle_list(self) -> List[List[int]]:
        return self.triangles.tolist()

    @cached_property
    def _incidence(self) -> np.ndarray:
        first = np.full(len(self.points), -1, dtype=np.int64)
        first[self.triangles.ravel()] = np.repeat(np.arange(len(self.triangles)), 3)
        return first


def build_diagram(points, Phi, triangulation: RegularTriangulation = None) -> LaguerreDiagram:
    """
    Laguerre diagram of (points, Phi). Triangles on one plane of the lifted
    surface (zero fold by the exact predicate) share one diagram vertex and
    the zero-length edges between them are dropped. Nearly coplanar triangles
    keep their own vertices, joined by a short edge.
    """
    points = as_points(points)
    values = as_values(Phi, len(points))
    tri = triangulation if triangulation is not None else regular_triangulation(points, values)

    x, x_values = tri.dual_vertices
    a, b, t, u, _, _ = tri.interior_edges
    close = tri.bending == 0
    graph = coo_matrix((np.ones(int(close.sum())), (t[close], u[close])), shape=(len(x), len(x)))
    n_vertices, labels = connected_components(graph, directed=False)
    if n_vertices < len(x):
        logger.debug(f"Merged {len(x) - n_vertices} coincident diagram vertices")

    counts = np.bincount(labels, minlength=n_vertices)
    vertices = np.column_stack([
        np.bincount(labels, x[:, 0], minlength=n_vertices) / counts,
        np.bincount(labels, x[:, 1], minlength=n_vertices) / counts,
    ])
    vertex_values = np.bincount(labels, x_values, minlength=n_vertices) / counts

    seg_start, seg_end = labels[t], labels[u]
    seg_vector = vertices[seg_end] - vertices[seg_start]
    seg_length = np.linalg.norm(seg_vector, axis=1)
    keep = (seg_start != seg_end) & (seg_length > 0)

    ra, rb, rt = tri.boundary_edges
    ray_direction = _unit(rot_cw(points[rb] - points[ra]))

    return LaguerreDiagram(
        points=points,
        phi=values,
        triangulation=tri,
        vertices=vertices,
        vertex_values=vertex_values,
        triangle_vertex=labels,
        edge_cells=np.concatenate([np.column_stack([a[keep], b[keep]]), np.column_stack([ra, rb])]),
        edge_start=np.concatenate([seg_start[keep], labels[rt]]),
        edge_end=np.concatenate([seg_end[keep], np.full(len(ra), -1, dtype=labels.dtype)]),
        edge_direction=np.concatenate([seg_vector[keep] / seg_length[keep, None], ray_direction]),
        edge_length=np.concatenate([seg_length[keep], np.full(len(ra), np.inf)]),
    )


def in_U(points, Phi) -> bool:
    """True iff every Laguerre cell of (points, Phi) has nonempty interior"""
    points = as_points(points)
    tri = regular_triangulation(points, as_values(Phi, len(points)))
    return tri.is_in_U


def eval_phi_star(points, Phi, x) -> np.ndarray:
    """Phi*(x) = max_i <x, y_i> - Phi_i for x of shape (2,) or (..., 2)"""
    points = as_points(points)
    values = as_values(Phi, len(points))
    x = np.asarray(x, dtype=float)
    return np.max(x @ points.T - values, axis=-1)


def lower_envelope(points, Phi) -> Tuple[np.ndarray, RegularTriangulation]:
    """
    Phi**(y_i), the largest convex function below the data. Vertices of the
    lower hull keep their value; every other point gets the hull height, i.e.
    the maximum over triangles t of <x_t, y_i> - Phi*(x_t).
    """
    points = as_points(points)
    values = as_values(Phi, len(points))
    tri = regular_triangulation(points, values)
    if not tri.locally_convex:
        raise InvalidMeasureError("lower envelope undefined: the lifted triangulation is not locally convex")

    envelope = values.copy()
    hidden = np.flatnonzero(~tri.extreme)
    if len(hidden):
        x, x_values = tri.dual_vertices
        envelope[hidden] = np.max(points[hidden] @ x.T - x_values, axis=1)
    return envelope, tri
