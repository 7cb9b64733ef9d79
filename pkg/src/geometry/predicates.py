"""
Orientation predicates for planar points and their lifts (y, Phi)

Every predicate is a two-stage filter: the determinant is evaluated in floating
point together with a forward error bound, and only the entries whose sign is
not certified by the bound are recomputed exactly with rational arithmetic.
The returned signs are therefore exact for the given float inputs.
"""
from fractions import Fraction
import logging

import numpy as np

logger = logging.getLogger(__name__)

epsilon = np.finfo(float).eps / 2.0
ccwerrboundA = (3.0 + 16.0 * epsilon) * epsilon
o3derrboundA = (7.0 + 56.0 * epsilon) * epsilon


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _orient2d_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def _orient3d_exact(a, b, c, d) -> int:
    ad = [Fraction(a[k]) - Fraction(d[k]) for k in range(3)]
    bd = [Fraction(b[k]) - Fraction(d[k]) for k in range(3)]
    cd = [Fraction(c[k]) - Fraction(d[k]) for k in range(3)]
    det = (ad[0] * (bd[1] * cd[2] - bd[2] * cd[1])
           + bd[0] * (cd[1] * ad[2] - cd[2] * ad[1])
           + cd[0] * (ad[1] * bd[2] - ad[2] * bd[1]))
    return -_sign(det)


def orient2d(a, b, c) -> np.ndarray:
    """
    Sign of the turn a -> b -> c: +1 counterclockwise, -1 clockwise, 0 collinear.
    Arguments are arrays of shape (..., 2) broadcast against each other.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(p, dtype=float) for p in (a, b, c)))
    shape = a.shape[:-1]
    a, b, c = (p.reshape(-1, 2) for p in (a, b, c))

    detleft = (a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1])
    detright = (a[:, 1] - c[:, 1]) * (b[:, 0] - c[:, 0])
    det = detleft - detright
    errbound = ccwerrboundA * (np.abs(detleft) + np.abs(detright))

    signs = np.sign(det).astype(np.int64)
    for k in np.flatnonzero(np.abs(det) <= errbound):
        signs[k] = _orient2d_exact(a[k], b[k], c[k])
    return signs.reshape(shape)


def orient3d(a, b, c, d) -> np.ndarray:
    """
    Sign of the height of d above the plane through a, b, c, where a, b, c are
    counterclockwise in the (x, y) projection: +1 above, -1 below, 0 coplanar.
    Arguments are lifted points of shape (..., 3).
    """
    a, b, c, d = np.broadcast_arrays(*(np.asarray(p, dtype=float) for p in (a, b, c, d)))
    shape = a.shape[:-1]
    a, b, c, d = (p.reshape(-1, 3) for p in (a, b, c, d))
    ad = a - d
    bd = b - d
    cd = c - d

    bdxcdy = bd[:, 0] * cd[:, 1]
    cdxbdy = cd[:, 0] * bd[:, 1]
    cdxady = cd[:, 0] * ad[:, 1]
    adxcdy = ad[:, 0] * cd[:, 1]
    adxbdy = ad[:, 0] * bd[:, 1]
    bdxady = bd[:, 0] * ad[:, 1]

    det = (ad[:, 2] * (bdxcdy - cdxbdy)
           + bd[:, 2] * (cdxady - adxcdy)
           + cd[:, 2] * (adxbdy - bdxady))
    permanent = ((np.abs(bdxcdy) + np.abs(cdxbdy)) * np.abs(ad[:, 2])
                 + (np.abs(cdxady) + np.abs(adxcdy)) * np.abs(bd[:, 2])
                 + (np.abs(adxbdy) + np.abs(bdxady)) * np.abs(cd[:, 2]))
    errbound = o3derrboundA * permanent

    signs = -np.sign(det).astype(np.int64)
    uncertain = np.flatnonzero(np.abs(det) <= errbound)
    if len(uncertain):
        logger.debug(f"orient3d: {len(uncertain)} of {len(det)} signs need exact evaluation")
    for k in uncertain:
        signs[k] = _orient3d_exact(a[k], b[k], c[k], d[k])
    return signs.reshape(shape)


def lifted_midpoint_below(a, m, b) -> bool:
    """
    For lifted points whose projections a, m, b are collinear with m between
    a and b: True iff m lies strictly below the segment from a to b.
    """
    a = [Fraction(float(v)) for v in a]
    m = [Fraction(float(v)) for v in m]
    b = [Fraction(float(v)) for v in b]
    ux, uy = b[0] - a[0], b[1] - a[1]
    full = ux * ux + uy * uy
    part = (m[0] - a[0]) * ux + (m[1] - a[1]) * uy
    return m[2] * full < a[2] * (full - part) + b[2] * part
