"""The Hessian metric of the log-volume barrier on a volume-positive cone.

For a degree-``n`` volume polynomial ``Vol`` the potential is
``F = -log Vol`` and the metric is its Hessian in the flat coordinates:

    g(u, v) = P_1(u) P_1(v) / Vol^2 - P_2(u, v) / Vol,

with ``P_k`` the tensor contractions from :mod:`conegeom.tensors`.  The
module also provides the radial/primitive splitting of tangent vectors, the
induced metric on volume level sets, and a sampling check that a linear map
intertwining two volume polynomials is an isometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    NotPrimitive,
    VolumeNotPositive,
)
from .tensors import (
    IntersectionTensor,
    TangentVector,
    as_point,
    as_vector,
    vol_derivatives,
    volume,
)

__all__ = [
    "MetricAtPoint",
    "metric_at",
    "primitive_decompose",
    "levelset_metric",
    "pullback_check",
    "PullbackReport",
    "is_positive_definite",
]

PRIMITIVITY_RTOL = 1e-8
PD_PIVOT_RTOL = 1e-10


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric data at one base point.

    Attributes
    ----------
    g : ndarray
        Symmetric N x N metric matrix.
    vol : float
        Volume polynomial value, positive.
    grad_logvol : ndarray
        First derivatives of the potential ``F = -log Vol`` (note the sign:
        these are the negatives of the log-volume gradient).
    point : ndarray
        Base point coordinates.
    """

    g: np.ndarray
    vol: float
    grad_logvol: np.ndarray
    point: np.ndarray

    def __post_init__(self):
        for name in ("g", "grad_logvol", "point"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def norm_sq(self, u) -> float:
        u = as_vector(u).u
        return float(u @ self.g @ u)

    def inner(self, u, v) -> float:
        u = as_vector(u).u
        v = as_vector(v).u
        return float(u @ self.g @ v)


def is_positive_definite(g: np.ndarray, pivot_rtol: float = PD_PIVOT_RTOL) -> bool:
    """Cholesky-style factorization with a scale-aware pivot floor.

    Pivots are compared against ``pivot_rtol * trace(g) / N`` so the test is
    invariant under overall rescaling of the matrix.
    """
    a = np.array(g, dtype=float)
    n = a.shape[0]
    floor = pivot_rtol * np.trace(a) / n
    if not np.isfinite(floor):
        return False
    for k in range(n):
        piv = a[k, k]
        if piv <= floor or not np.isfinite(piv):
            return False
        row = a[k, k + 1:] / piv
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], row)
    return True


def metric_at(c: IntersectionTensor, point) -> MetricAtPoint:
    """Evaluate the Hessian metric ``-Hess log Vol`` at a point.

    Raises
    ------
    VolumeNotPositive
        If ``Vol(t) <= 0``.
    NotPositiveDefinite
        If the point is claimed to lie in the positivity cone but the metric
        fails the factorization test (the claim is then untenable).
    """
    pt = as_point(point)
    t = pt.t
    vol = volume(c, pt)
    if vol <= 0.0:
        raise VolumeNotPositive(f"volume {vol!r} at point {t.tolist()} is not positive")
    v1, v2 = vol_derivatives(c, pt, 2)
    g = np.outer(v1, v1) / vol**2 - v2 / vol
    g = 0.5 * (g + g.T)
    data = MetricAtPoint(g=g, vol=vol, grad_logvol=-v1 / vol, point=t)
    if pt.claimed_kahler and not is_positive_definite(g):
        raise NotPositiveDefinite(
            "metric is not positive-definite at a point claimed to lie in the cone"
        )
    return data


def primitive_decompose(c: IntersectionTensor, point, u):
    """Split ``u = u0 * t + u1`` with ``u1`` primitive at ``t``.

    ``u0 = P_1(u; t) / (n Vol(t))``, which makes ``P_1(u1; t) = 0``.  Returns
    the pair ``(u0, u1)``.
    """
    pt = as_point(point)
    uvec = as_vector(u).u
    if uvec.shape != (c.N,):
        raise DimensionMismatch(f"tangent vector has shape {uvec.shape}, expected ({c.N},)")
    vol = volume(c, pt)
    if vol <= 0.0:
        raise VolumeNotPositive(f"volume {vol!r} is not positive")
    (v1,) = vol_derivatives(c, pt, 1)
    u0 = float(v1 @ uvec) / (c.n * vol)
    u1 = uvec - u0 * pt.t
    # A radial input leaves only rounding junk in u1; make it exactly zero so
    # the primitive part stays primitive by the levelset tolerance.
    if np.linalg.norm(u1) <= 1e-14 * max(np.linalg.norm(uvec), abs(u0) * np.linalg.norm(pt.t)):
        u1 = np.zeros_like(u1)
    return u0, TangentVector(u1)


def _primitivity_bound(c: IntersectionTensor, t: np.ndarray, u: np.ndarray) -> float:
    tn = np.linalg.norm(t)
    return PRIMITIVITY_RTOL * np.linalg.norm(u) * tn ** (c.n - 1) * c.max_abs_entry()


def levelset_metric(c: IntersectionTensor, point, u, v) -> float:
    """Metric induced on the volume level set: ``-(1/Vol) P_2(u, v; t)``.

    Both arguments must be primitive at the base point; a vector whose radial
    pairing exceeds the documented tolerance raises :class:`NotPrimitive`.
    """
    pt = as_point(point)
    uvec = as_vector(u).u
    vvec = as_vector(v).u
    vol = volume(c, pt)
    if vol <= 0.0:
        raise VolumeNotPositive(f"volume {vol!r} is not positive")
    v1, v2 = vol_derivatives(c, pt, 2)
    for name, w in (("u", uvec), ("v", vvec)):
        p1 = float(v1 @ w)
        if abs(p1) > _primitivity_bound(c, pt.t, w):
            raise NotPrimitive(f"{name} is not primitive at the base point (P_1 = {p1!r})")
    return float(-(uvec @ v2 @ vvec) / vol)


@dataclass(frozen=True)
class PullbackReport:
    """Residuals of the volume and metric intertwining identities."""

    max_vol_residual: float
    max_metric_residual: float
    tol: float
    n_points: int

    @property
    def passed(self) -> bool:
        return max(self.max_vol_residual, self.max_metric_residual) < self.tol


def pullback_check(
    cX: IntersectionTensor,
    cY: IntersectionTensor,
    A: np.ndarray,
    p: float,
    points,
    tol: float = 1e-10,
) -> PullbackReport:
    """Verify ``Vol_X(A t) = p Vol_Y(t)`` and ``A^T g_X(A t) A = g_Y(t)``.

    Both identities hold exactly when ``A`` intertwines the two volume
    polynomials with positive degree factor ``p``; the report records the
    largest relative residual over the supplied sample points.

    Parameters
    ----------
    cX, cY : IntersectionTensor
        Target and source tensors; ``A`` maps source coordinates (dim ``N_Y``)
        to target coordinates (dim ``N_X``).
    A : ndarray of shape (N_X, N_Y)
    p : float, positive
    points : iterable of source-cone points with ``Vol_Y > 0``
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (cX.N, cY.N):
        raise DimensionMismatch(f"map has shape {A.shape}, expected ({cX.N}, {cY.N})")
    if p <= 0:
        raise ValueError(f"degree factor p must be positive, got {p!r}")
    if cX.n != cY.n:
        raise DimensionMismatch("tensors must have the same degree")
    max_vol = 0.0
    max_met = 0.0
    count = 0
    for point in points:
        ty = as_point(point).t
        tx = A @ ty
        vol_y = volume(cY, ty)
        if vol_y <= 0:
            raise VolumeNotPositive(f"sample point {ty.tolist()} has nonpositive volume")
        vol_x = volume(cX, tx)
        max_vol = max(max_vol, abs(vol_x - p * vol_y) / abs(p * vol_y))
        gy = metric_at(cY, ty).g
        gx = metric_at(cX, tx).g
        resid = A.T @ gx @ A - gy
        max_met = max(max_met, float(np.max(np.abs(resid)) / max(np.max(np.abs(gy)), 1e-300)))
        count += 1
    if count == 0:
        raise ValueError("pullback_check requires at least one sample point")
    return PullbackReport(max_vol_residual=max_vol, max_metric_residual=max_met, tol=tol, n_points=count)
