"""Christoffel symbols, Riemann tensor and sectional curvature of the cone metric.

All coordinate derivatives of the potential ``F = -log Vol`` are polynomial
and evaluated exactly, so the Christoffel symbols (``Gamma_{ijk} = F_{ijk}/2``
in the flat coordinates, where the metric derivative is totally symmetric)
and the Riemann tensor come out at machine precision.  A finite-difference
oracle built only from metric evaluations is provided for cross-validation.

Index conventions, fixed once for the whole package:

* ``R(x, y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_{[x,y]} z``;
* the covariant array is ``R[a, b, k, l] = g(R(e_k, e_l) e_a, e_b)``;
* sectional curvature ``K(u, v) = R(u, v, v, u) / (g(u,u) g(v,v) - g(u,v)^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlane, SingularMetric
from .metric import MetricAtPoint, metric_at
from .tensors import IntersectionTensor, as_point, as_vector, vol_derivatives

__all__ = [
    "CurvatureAtPoint",
    "christoffel_at",
    "riemann_at",
    "sectional",
    "sectional_from_curvature",
    "fd_curvature_oracle",
]

CONDITION_LIMIT = 1e12
GRAM_RTOL = 1e-12


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Connection and curvature data of the cone metric at one point.

    ``gamma_first`` holds ``Gamma_{ijk}`` (first index lowered, symmetric in
    the last two), ``gamma_second`` holds ``Gamma^l_{jk}`` indexed
    ``[l, j, k]``, and ``riemann`` is the covariant array described in the
    module docstring (``None`` when only the Christoffel part was requested).

    When the metric is positive-definite the assembly also retains the
    curvature expressed in a g-orthonormal frame (``riemann_white`` together
    with the frame change ``white``, the transpose Cholesky factor);
    sectional curvatures contracted there do not suffer the condition-number
    amplification of the flat-coordinate components.
    """

    gamma_first: np.ndarray
    gamma_second: np.ndarray
    riemann: np.ndarray | None
    base: np.ndarray
    metric: MetricAtPoint
    cond: float
    riemann_white: np.ndarray | None = None
    white: np.ndarray | None = None

    def __post_init__(self):
        for name in ("gamma_first", "gamma_second", "riemann", "base", "riemann_white", "white"):
            a = getattr(self, name)
            if a is None:
                continue
            a = np.asarray(a, dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def _potential_third(vol, v1, v2, v3):
    # F_{ijk} for F = -log Vol, assembled from the exact Vol derivatives.
    sym3 = (
        np.einsum("ij,k->ijk", v2, v1)
        + np.einsum("ik,j->ijk", v2, v1)
        + np.einsum("jk,i->ijk", v2, v1)
    )
    log3 = v3 / vol - sym3 / vol**2 + 2.0 * np.einsum("i,j,k->ijk", v1, v1, v1) / vol**3
    return -log3


def _potential_fourth(vol, v1, v2, v3, v4):
    # F_{ijkl} for F = -log Vol.
    sym31 = (
        np.einsum("ijk,l->ijkl", v3, v1)
        + np.einsum("ijl,k->ijkl", v3, v1)
        + np.einsum("ikl,j->ijkl", v3, v1)
        + np.einsum("jkl,i->ijkl", v3, v1)
    )
    sym22 = (
        np.einsum("ij,kl->ijkl", v2, v2)
        + np.einsum("ik,jl->ijkl", v2, v2)
        + np.einsum("il,jk->ijkl", v2, v2)
    )
    sym211 = (
        np.einsum("ij,k,l->ijkl", v2, v1, v1)
        + np.einsum("ik,j,l->ijkl", v2, v1, v1)
        + np.einsum("il,j,k->ijkl", v2, v1, v1)
        + np.einsum("jk,i,l->ijkl", v2, v1, v1)
        + np.einsum("jl,i,k->ijkl", v2, v1, v1)
        + np.einsum("kl,i,j->ijkl", v2, v1, v1)
    )
    log4 = (
        v4 / vol
        - (sym31 + sym22) / vol**2
        + 2.0 * sym211 / vol**3
        - 6.0 * np.einsum("i,j,k,l->ijkl", v1, v1, v1, v1) / vol**4
    )
    return -log4


def _metric_inverse(g: np.ndarray):
    cond = float(np.linalg.cond(g))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMetric(f"metric condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    g_inv = np.linalg.solve(g, np.eye(g.shape[0]))
    return g_inv, cond


def christoffel_at(c: IntersectionTensor, point) -> CurvatureAtPoint:
    """Christoffel symbols of the cone metric (Riemann part left unset)."""
    pt = as_point(point)
    data = metric_at(c, pt)
    v1, v2, v3 = vol_derivatives(c, pt, 3)
    f3 = _potential_third(data.vol, v1, v2, v3)
    g_inv, cond = _metric_inverse(data.g)
    gamma1 = 0.5 * f3
    gamma2 = np.einsum("lm,mjk->ljk", g_inv, gamma1)
    return CurvatureAtPoint(
        gamma_first=gamma1,
        gamma_second=gamma2,
        riemann=None,
        base=pt.t,
        metric=data,
        cond=cond,
    )


def _assemble_riemann(g, g_inv, gamma2, dgamma2):
    # dgamma2[i, l, j, k] = d_i Gamma^l_{jk}
    r_up = (
        np.einsum("iljk->lijk", dgamma2)
        - np.einsum("jlik->lijk", dgamma2)
        + np.einsum("lim,mjk->lijk", gamma2, gamma2)
        - np.einsum("ljm,mik->lijk", gamma2, gamma2)
    )
    # R[a, b, k, l] = g(R(e_k, e_l) e_a, e_b); R(e_k, e_l) e_a has
    # components r_up[m, k, l, a].
    return np.einsum("bm,mkla->abkl", g, r_up)


def _riemann_from_potential(g, g_inv, f3, f4):
    # Coordinate formula R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
    # + Gamma Gamma - Gamma Gamma with exact potential derivatives, where
    # d_i Gamma^l_{jk} = (g^{lm} F_{mjki} - g^{la} F_{aib} g^{bm} F_{mjk}) / 2.
    # The fourth-derivative term is symmetric in (i, j) and cancels in the
    # tensor; it is kept because the coordinate formula is the contract here.
    gamma2 = 0.5 * np.einsum("lm,mjk->ljk", g_inv, f3)
    dgamma2 = 0.5 * (
        np.einsum("lm,mjki->iljk", g_inv, f4)
        - np.einsum("la,aib,bm,mjk->iljk", g_inv, f3, g_inv, f3)
    )
    return _assemble_riemann(g, g_inv, gamma2, dgamma2)


def riemann_at(c: IntersectionTensor, point, whiten: bool = True) -> CurvatureAtPoint:
    """Riemann curvature of the cone metric from exact potential derivatives.

    With ``whiten`` (default) and a positive-definite metric, the coordinate
    formula is evaluated after the exact linear change of coordinates that
    maps the metric to the identity; the flat-coordinate components are then
    transformed back.  This removes the condition-number amplification that
    plain evaluation suffers near the boundary, and additionally keeps the
    frame components for stable sectional-curvature contractions.  With
    ``whiten=False`` the formula is evaluated directly in the given
    coordinates (the validation reference).
    """
    pt = as_point(point)
    data = metric_at(c, pt)
    v1, v2, v3, v4 = vol_derivatives(c, pt, 4)
    f3 = _potential_third(data.vol, v1, v2, v3)
    f4 = _potential_fourth(data.vol, v1, v2, v3, v4)
    g_inv, cond = _metric_inverse(data.g)
    gamma1 = 0.5 * f3
    gamma2 = np.einsum("lm,mjk->ljk", g_inv, gamma1)

    chol = None
    if whiten:
        try:
            chol = np.linalg.cholesky(data.g)
        except np.linalg.LinAlgError:
            chol = None  # indefinite metric: fall back to direct assembly
    if chol is None:
        riem = _riemann_from_potential(data.g, g_inv, f3, f4)
        return CurvatureAtPoint(
            gamma_first=gamma1,
            gamma_second=gamma2,
            riemann=riem,
            base=pt.t,
            metric=data,
            cond=cond,
        )

    # x = W xw with W = L^-T sends g to (almost exactly) the identity.
    w = np.linalg.solve(chol.T, np.eye(c.N))
    g_w = w.T @ data.g @ w
    g_w_inv = np.linalg.solve(g_w, np.eye(c.N))
    f3_w = np.einsum("abc,aA,bB,cC->ABC", f3, w, w, w)
    f4_w = np.einsum("abcd,aA,bB,cC,dD->ABCD", f4, w, w, w, w)
    riem_w = _riemann_from_potential(g_w, g_w_inv, f3_w, f4_w)
    riem = np.einsum("ABKL,aA,bB,kK,lL->abkl", riem_w, chol, chol, chol, chol)
    return CurvatureAtPoint(
        gamma_first=gamma1,
        gamma_second=gamma2,
        riemann=riem,
        base=pt.t,
        metric=data,
        cond=cond,
        riemann_white=riem_w,
        white=chol.T,
    )


def sectional_from_curvature(curv: CurvatureAtPoint, u, v) -> float:
    """Sectional curvature of span{u, v} from precomputed curvature data."""
    if curv.riemann is None:
        raise ValueError("curvature data lacks the Riemann tensor")
    uvec = as_vector(u).u
    vvec = as_vector(v).u
    g = curv.metric.g
    guu = float(uvec @ g @ uvec)
    gvv = float(vvec @ g @ vvec)
    guv = float(uvec @ g @ vvec)
    gram = guu * gvv - guv**2
    if gram <= GRAM_RTOL * abs(guu * gvv):
        raise DegeneratePlane("tangent vectors do not span a 2-plane")
    if curv.riemann_white is not None:
        uw = curv.white @ uvec
        vw = curv.white @ vvec
        num = float(np.einsum("abkl,a,b,k,l->", curv.riemann_white, uw, vw, vw, uw))
    else:
        num = float(np.einsum("abkl,a,b,k,l->", curv.riemann, uvec, vvec, vvec, uvec))
    return num / gram


def sectional(c: IntersectionTensor, point, u, v) -> float:
    """Sectional curvature of the 2-plane spanned by ``u`` and ``v`` at a point.

    Uses the Gram-normalized quotient, so the result is invariant under any
    invertible reparametrization of the plane and under dilations of the base
    point.
    """
    return sectional_from_curvature(riemann_at(c, point), u, v)


def fd_curvature_oracle(c: IntersectionTensor, point, step: float) -> CurvatureAtPoint:
    """Curvature via central finite differences of the metric alone.

    Independent of the exact-derivative route: only ``metric_at`` evaluations
    enter, combined through the Koszul formula and the coordinate expression
    for the curvature.  Intended for tests; accuracy is ``O(step^2)``.
    """
    pt = as_point(point)
    t = pt.t
    N = c.N
    scale = 1.0 + float(np.max(np.abs(t)))
    if step <= 0 or step < 1e-12 * scale:
        raise ValueError(f"step {step!r} underflows at this point scale")

    def gmat(x):
        return metric_at(c, x).g

    data = metric_at(c, pt)
    g0 = data.g
    h = float(step)
    eye = np.eye(N)

    gp = [gmat(t + h * eye[i]) for i in range(N)]
    gm = [gmat(t - h * eye[i]) for i in range(N)]
    dg = np.stack([(gp[i] - gm[i]) / (2 * h) for i in range(N)])

    d2g = np.zeros((N, N, N, N))
    for i in range(N):
        d2g[i, i] = (gp[i] - 2 * g0 + gm[i]) / h**2
        for j in range(i + 1, N):
            gpp = gmat(t + h * eye[i] + h * eye[j])
            gpm = gmat(t + h * eye[i] - h * eye[j])
            gmp = gmat(t - h * eye[i] + h * eye[j])
            gmm = gmat(t - h * eye[i] - h * eye[j])
            mixed = (gpp - gpm - gmp + gmm) / (4 * h**2)
            d2g[i, j] = mixed
            d2g[j, i] = mixed

    # Koszul: Gamma_{ijk} = (d_j g_{ik} + d_k g_{ij} - d_i g_{jk}) / 2.
    gamma1 = 0.5 * (
        np.einsum("jik->ijk", dg)
        - np.einsum("ijk->ijk", dg)
        + np.einsum("kij->ijk", dg)
    )
    g_inv, cond = _metric_inverse(g0)
    gamma2 = np.einsum("lm,mjk->ljk", g_inv, gamma1)

    # d_i Gamma_{mjk} from second differences of the metric.
    dgamma1 = 0.5 * (
        np.einsum("ijmk->imjk", d2g)
        + np.einsum("ikmj->imjk", d2g)
        - np.einsum("imjk->imjk", d2g)
    )
    dginv = -np.einsum("la,iab,bm->ilm", g_inv, dg, g_inv)
    dgamma2 = np.einsum("ilm,mjk->iljk", dginv, gamma1) + np.einsum(
        "lm,imjk->iljk", g_inv, dgamma1
    )

    r_up = (
        np.einsum("iljk->lijk", dgamma2)
        - np.einsum("jlik->lijk", dgamma2)
        + np.einsum("lim,mjk->lijk", gamma2, gamma2)
        - np.einsum("ljm,mik->lijk", gamma2, gamma2)
    )
    riem = np.einsum("bm,mkla->abkl", g0, r_up)
    return CurvatureAtPoint(
        gamma_first=gamma1,
        gamma_second=gamma2,
        riemann=riem,
        base=t,
        metric=data,
        cond=cond,
    )
