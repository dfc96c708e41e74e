import numpy as np
import pytest

from conegeom.curvature import (
    christoffel_at,
    fd_curvature_oracle,
    riemann_at,
    sectional,
    sectional_from_curvature,
)
from conegeom.errors import DegeneratePlane, SingularMetric
from conegeom.metric import metric_at
from conegeom.tensors import IntersectionTensor

from conftest import anchor_of, random_interior_point

CUBIC = IntersectionTensor(n=3, N=1, entries={(0, 0, 0): 6.0})
BLOWUP = IntersectionTensor(n=2, N=2, entries={(0, 0): 1.0, (1, 1): -1.0})
RANK3 = IntersectionTensor(n=2, N=3, entries={(0, 1): 1.0, (2, 2): -2.0})
CURVED3 = IntersectionTensor(n=3, N=3, entries={(0, 0, 0): 0.6, (0, 1, 2): 1.0})


def symmetry_residuals(r):
    scale = max(float(np.max(np.abs(r))), 1e-300)
    return {
        "antisym_front": float(np.max(np.abs(r + np.einsum("abkl->bakl", r)))) / scale,
        "antisym_back": float(np.max(np.abs(r + np.einsum("abkl->ablk", r)))) / scale,
        "pair": float(np.max(np.abs(r - np.einsum("abkl->klab", r)))) / scale,
        "bianchi": float(
            np.max(np.abs(r + np.einsum("abkl->aklb", r) + np.einsum("abkl->albk", r)))
        )
        / scale,
    }


def rel_tensor_err(a, b, g):
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(g))) ** 2)
    return float(np.max(np.abs(a - b))) / scale


class TestChristoffel:
    def test_one_modulus_closed_form(self):
        # F = -3 log t: F''' = -6/t^3, so Gamma_first = -3 and Gamma^1_11 = -1
        # at t = 1, matching the geodesic equation t'' = t'^2 / t of the log
        # metric (unit-speed solution exp(s/sqrt(3))).
        curv = christoffel_at(CUBIC, [1.0])
        assert curv.gamma_first[0, 0, 0] == pytest.approx(-3.0, abs=1e-13)
        assert curv.gamma_second[0, 0, 0] == pytest.approx(-1.0, abs=1e-13)
        curv2 = christoffel_at(CUBIC, [2.0])
        assert curv2.gamma_second[0, 0, 0] == pytest.approx(-0.5, abs=1e-13)

    def test_lower_pair_symmetry(self):
        rng = np.random.default_rng(0)
        t = random_interior_point(RANK3, np.array([1.0, 1.0, 0.0]), rng)
        curv = christoffel_at(RANK3, t)
        assert np.allclose(curv.gamma_first, np.swapaxes(curv.gamma_first, 1, 2))
        assert np.allclose(curv.gamma_second, np.swapaxes(curv.gamma_second, 1, 2))

    def test_matches_fd_koszul_on_surfaces(self):
        rng = np.random.default_rng(1)
        for c, anchor in ((BLOWUP, [2.0, 1.0]), (RANK3, [1.0, 1.0, 0.0])):
            for _ in range(5):
                t = random_interior_point(c, np.asarray(anchor, float), rng)
                exact = christoffel_at(c, t)
                fd = fd_curvature_oracle(c, t, 1e-4)
                scale = max(
                    float(np.max(np.abs(exact.gamma_first))),
                    float(np.max(np.abs(exact.metric.g))) ** 1.5,
                )
                err = float(np.max(np.abs(exact.gamma_first - fd.gamma_first))) / scale
                assert err < 1e-6

    def test_degree_two_uses_no_third_derivative(self):
        # For n = 2 the cubic Vol-derivative vanishes, yet the potential still
        # has nonzero third derivatives from the log.
        curv = christoffel_at(BLOWUP, [2.0, 1.0])
        assert np.max(np.abs(curv.gamma_first)) > 0

    def test_singular_metric_detected(self):
        degenerate = IntersectionTensor(n=2, N=2, entries={(0, 0): 2.0, (0, 1): 1e-9})
        with pytest.raises(SingularMetric):
            christoffel_at(degenerate, [1.0, 0.0])


class TestRiemann:
    def test_one_dimensional_cone_is_flat(self):
        curv = riemann_at(CUBIC, [1.3])
        assert np.all(curv.riemann == 0.0)

    def test_symmetries_and_bianchi(self):
        rng = np.random.default_rng(2)
        for c, anchor in ((RANK3, [1.0, 1.0, 0.0]), (CURVED3, [1.0, 1.0, 1.0])):
            t = random_interior_point(c, np.asarray(anchor, float), rng)
            res = symmetry_residuals(riemann_at(c, t).riemann)
            for value in res.values():
                assert value < 1e-12

    def test_matches_fd_oracle(self):
        rng = np.random.default_rng(3)
        for c, anchor in (
            (BLOWUP, [2.0, 1.0]),
            (RANK3, [1.0, 1.0, 0.0]),
            (CURVED3, [1.0, 1.0, 1.0]),
        ):
            for _ in range(4):
                t = random_interior_point(c, np.asarray(anchor, float), rng, spread=0.15)
                exact = riemann_at(c, t)
                fd = fd_curvature_oracle(c, t, 3e-4)
                assert rel_tensor_err(exact.riemann, fd.riemann, exact.metric.g) < 1e-5

    def test_whitened_assembly_matches_direct_coordinates(self):
        # The frame-whitened evaluation is an optimization; the plain
        # flat-coordinate formula is the reference it must reproduce.
        rng = np.random.default_rng(14)
        for c, anchor in ((RANK3, [1.0, 1.0, 0.0]), (CURVED3, [1.0, 1.0, 1.0])):
            for _ in range(5):
                t = random_interior_point(c, np.asarray(anchor, float), rng, spread=0.15)
                fast = riemann_at(c, t, whiten=True)
                ref = riemann_at(c, t, whiten=False)
                scale = max(float(np.max(np.abs(ref.riemann))), 1e-12)
                assert float(np.max(np.abs(fast.riemann - ref.riemann))) / scale < 1e-11
                assert fast.riemann_white is not None and ref.riemann_white is None

    def test_dilation_invariance(self):
        rng = np.random.default_rng(4)
        t = random_interior_point(CURVED3, np.array([1.0, 1.0, 1.0]), rng)
        s = 2.3
        r_t = riemann_at(CURVED3, t).riemann
        r_st = riemann_at(CURVED3, s * t).riemann
        assert np.allclose(r_st, r_t / s**4, rtol=1e-10, atol=1e-12)
        u, v = rng.normal(size=3), rng.normal(size=3)
        assert sectional(CURVED3, t, u, v) == pytest.approx(
            sectional(CURVED3, s * t, u, v), rel=1e-10
        )

    def test_surface_sectional_nonpositive(self):
        # Raw random pairs may be nearly parallel, which amplifies rounding in
        # the exactly-zero directions; 1e-8 absorbs that. g-orthonormalized
        # planes (as the scanner draws them) stay at 1e-10.
        rng = np.random.default_rng(5)
        for c, anchor in ((BLOWUP, [2.0, 1.0]), (RANK3, [1.0, 1.0, 0.0])):
            for _ in range(10):
                t = random_interior_point(c, np.asarray(anchor, float), rng)
                u, v = rng.normal(size=c.N), rng.normal(size=c.N)
                assert sectional(c, t, u, v) <= 1e-8
                g = metric_at(c, t).g
                u = u / np.sqrt(u @ g @ u)
                w = v - (v @ g @ u) * u
                w = w / np.sqrt(w @ g @ w)
                assert sectional(c, t, u, w) <= 1e-10

    def test_surface_level_plane_value(self):
        # Degree-2 cones split as a flat radial line times a rescaled
        # hyperboloid; planes tangent to the level set have K = -1/2 and
        # planes containing the radial direction are flat.
        rng = np.random.default_rng(6)
        t = random_interior_point(RANK3, np.array([1.0, 1.0, 0.0]), rng)
        from conegeom.metric import primitive_decompose

        _, p1 = primitive_decompose(RANK3, t, rng.normal(size=3))
        _, p2 = primitive_decompose(RANK3, t, rng.normal(size=3))
        assert sectional(RANK3, t, p1, p2) == pytest.approx(-0.5, abs=1e-10)
        assert sectional(RANK3, t, t, p1.u + 0.3 * np.asarray(t)) == pytest.approx(0.0, abs=1e-10)


class TestSectional:
    def test_parallel_vectors_rejected(self):
        with pytest.raises(DegeneratePlane):
            sectional(BLOWUP, [2.0, 1.0], [1.0, 0.3], [2.0, 0.6])

    def test_reparametrization_invariance(self):
        rng = np.random.default_rng(7)
        t = random_interior_point(CURVED3, np.array([1.0, 1.0, 1.0]), rng)
        u, v = rng.normal(size=3), rng.normal(size=3)
        base = sectional(CURVED3, t, u, v)
        for _ in range(5):
            a, b = rng.uniform(0.2, 3.0, size=2) * rng.choice([-1.0, 1.0], size=2)
            mix = rng.normal()
            assert sectional(CURVED3, t, a * u, b * v + mix * u) == pytest.approx(base, rel=1e-9)

    def test_from_curvature_matches_direct(self):
        rng = np.random.default_rng(8)
        t = random_interior_point(CURVED3, np.array([1.0, 1.0, 1.0]), rng)
        curv = riemann_at(CURVED3, t)
        u, v = rng.normal(size=3), rng.normal(size=3)
        assert sectional_from_curvature(curv, u, v) == sectional(CURVED3, t, u, v)


class TestFdOracle:
    def test_richardson_order(self):
        # Halving the step should cut the Christoffel error about fourfold.
        rng = np.random.default_rng(9)
        t = random_interior_point(CURVED3, np.array([1.0, 1.0, 1.0]), rng)
        exact = christoffel_at(CURVED3, t).gamma_first
        err = {}
        for h in (2e-2, 1e-2):
            fd = fd_curvature_oracle(CURVED3, t, h).gamma_first
            err[h] = float(np.max(np.abs(fd - exact)))
        ratio = err[2e-2] / err[1e-2]
        assert 2.5 < ratio < 6.0

    def test_one_dimensional_zero_curvature(self):
        fd = fd_curvature_oracle(CUBIC, [1.0], 1e-4)
        assert np.max(np.abs(fd.riemann)) < 1e-9

    def test_lower_index_symmetry(self):
        fd = fd_curvature_oracle(BLOWUP, [2.0, 1.0], 1e-4)
        assert np.allclose(fd.gamma_first, np.swapaxes(fd.gamma_first, 1, 2))

    def test_step_underflow(self):
        with pytest.raises(ValueError):
            fd_curvature_oracle(BLOWUP, [2.0, 1.0], 1e-15)
