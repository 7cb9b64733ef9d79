"""
Regularized Newton matrix M_nu = H + 1 1^T + v_1 v_1^T + v_2 v_2^T, v_k = (y_i)_k

H vanishes on constants and, for centered nu, on the coordinate functions;
the rank-3 correction removes that kernel. M_nu is kept as a sparse matrix
plus a rank-4 factor U U^T with U = [p, 1, y_1, y_2] and is solved with
Jacobi-preconditioned conjugate gradients.
"""
from dataclasses import dataclass
from typing import Tuple
import logging

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import LinearOperator, cg

from src.energy.functional import HessianMatrix
from src.exceptions import SingularSystemError

logger = logging.getLogger(__name__)

# slack on the attainable residual of a floating point product M d
ROUNDING_SLACK = 64.0


@dataclass(frozen=True)
class LinearSolveInfo:
    iterations: int
    residual: float  # relative true residual |M d - b| / |b|


class RegularizedMatrix(LinearOperator):
    def __init__(self, hessian: HessianMatrix, points):
        points = np.asarray(points, dtype=float)
        n = hessian.shape[0]
        self.sparse = hessian.sparse_part
        self.factor = np.column_stack([hessian.rank_one, np.ones(n), points[:, 0], points[:, 1]])
        super().__init__(dtype=float, shape=(n, n))

    def _matvec(self, v):
        v = np.ravel(v)
        return self.sparse @ v + self.factor @ (self.factor.T @ v)

    def _rmatvec(self, v):
        return self._matvec(v)

    def diagonal(self) -> np.ndarray:
        return self.sparse.diagonal() + np.einsum("ij,ij->i", self.factor, self.factor)

    def toarray(self) -> np.ndarray:
        return self.sparse.toarray() + self.factor @ self.factor.T

    def _rounding_level(self, d: np.ndarray) -> float:
        """Size of the rounding error committed when forming M d"""
        abs_product = abs(self.sparse) @ np.abs(d) + np.abs(self.factor) @ (np.abs(self.factor).T @ np.abs(d))
        return ROUNDING_SLACK * np.finfo(float).eps * float(np.linalg.norm(abs_product))

    def solve(self, rhs: np.ndarray, rtol: float = 1e-12, maxiter: int = None) -> Tuple[np.ndarray, LinearSolveInfo]:
        """
        Solve M d = rhs to relative residual rtol. The target is relaxed to the
        rounding level of the product M d when it lies below it; a solve that
        misses the resulting target raises SingularSystemError.
        """
        rhs = np.asarray(rhs, dtype=float)
        n = self.shape[0]
        scale = float(np.linalg.norm(rhs))
        if scale == 0.0:
            return np.zeros(n), LinearSolveInfo(iterations=0, residual=0.0)

        diagonal = self.diagonal()
        if np.any(diagonal <= 0):
            raise SingularSystemError("regularized matrix has a nonpositive diagonal entry")
        preconditioner = diags(1.0 / diagonal)

        iterations = 0

        def count(_):
            nonlocal iterations
            iterations += 1

        maxiter = maxiter or 20 * n
        d, info = cg(self, rhs, rtol=rtol, atol=0.0, maxiter=maxiter, M=preconditioner, callback=count)
        residual = float(np.linalg.norm(self.matvec(d) - rhs))
        target = max(rtol * scale, self._rounding_level(d))
        if residual > target:
            raise SingularSystemError(
                f"linear solve stopped at relative residual {residual / scale:.3e} "
                f"after {iterations} iterations (cg info {info}, target {target / scale:.3e})"
            )
        if info != 0:
            logger.debug(f"CG stopped with info {info} but the true residual {residual / scale:.3e} meets the target")
        return d, LinearSolveInfo(iterations=iterations, residual=residual / scale)


def regularized_matrix(hessian: HessianMatrix, points) -> RegularizedMatrix:
    return RegularizedMatrix(hessian, points)
