import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from bernstein_helmholtz import bernstein as bn
from bernstein_helmholtz import multiplier as mp
from bernstein_helmholtz import sphere as sp
from bernstein_helmholtz import testfn as tf
from bernstein_helmholtz.errors import (
    BudgetExceeded,
    ConstantSymbol,
    DimensionMismatch,
    DomainError,
    UnsupportedOrder,
)

FOUR_PI = 4 * np.pi
# u(r) for the uniform density on S^2 from scipy.integrate.quad of
# int_0^pi exp(-i r cos t) 2 pi sin t dt
RADIAL_ORACLE = {1.0: 10.574236256325822, 2.5: 3.008249106072195}


def _bstar_oracle(R):
    """(1/R) int_{|x|<R} 16 pi^2 sin^2 r / r^2 dx for the uniform density on S^2."""
    return 64 * np.pi**3 * (0.5 - np.sin(2 * R) / (4 * R))


def _monomial_integral(a, b, c):
    """int_{S^2} x^a y^b z^c for even exponents."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    g = special.gamma
    return 2 * g((a + 1) / 2) * g((b + 1) / 2) * g((c + 1) / 2) / g((a + b + c + 3) / 2)


class TestQuadrature:
    @pytest.mark.parametrize("degree", [0, 3, 20, 101])
    def test_circle_length(self, degree):
        assert sp.make_quadrature(2, degree).weights.sum() == pytest.approx(2 * np.pi, rel=1e-14)

    def test_sphere_area(self):
        q = sp.make_quadrature(3, 20)
        assert abs(q.weights.sum() - FOUR_PI) <= 1e-12
        np.testing.assert_allclose(np.linalg.norm(q.nodes, axis=1), 1.0, rtol=1e-15)

    def test_second_moment(self):
        q = sp.make_quadrature(3, 20)
        assert abs(q.integrate(q.nodes[:, 0] ** 2) - FOUR_PI / 3) <= 1e-12

    @given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
    def test_polynomial_exactness(self, a, b, c):
        q = sp.make_quadrature(3, 18)
        x, y, z = q.nodes.T
        np.testing.assert_allclose(q.integrate(x**a * y**b * z**c), _monomial_integral(a, b, c), atol=1e-12)

    @given(st.integers(-10, 10))
    def test_trig_exactness(self, m):
        q = sp.make_quadrature(2, 20)
        th = np.arctan2(q.nodes[:, 1], q.nodes[:, 0])
        expected = 2 * np.pi if m == 0 else 0.0
        assert abs(q.integrate(np.exp(1j * m * th)) - expected) < 1e-12

    @pytest.mark.parametrize("d, degree", [(4, 10), (3, 201), (2, -1)])
    def test_domain(self, d, degree):
        with pytest.raises(DomainError):
            sp.make_quadrature(d, degree)


class TestDensities:
    def test_point_nodes_must_be_unit(self):
        with pytest.raises(DomainError):
            sp.PointMasses(2, [[1.0, 0.1]], [1.0])
        with pytest.raises(DimensionMismatch):
            sp.PointMasses(3, [[1.0, 0.0]], [1.0])

    def test_harmonic_order_cap(self):
        with pytest.raises(DomainError):
            sp.HarmonicCoeffs(2, np.ones(2 * 65 + 1))
        with pytest.raises(DomainError):
            sp.HarmonicCoeffs(3, np.ones(5))

    def test_projection_recovers_harmonics(self, rng):
        c = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        h = sp.HarmonicCoeffs(3, c)
        smooth = sp.SmoothDensity(3, h)
        back = sp.project_harmonics(smooth, sp.make_quadrature(3, 12), order=3)
        np.testing.assert_allclose(back.coeffs, c, atol=1e-12)

    def test_real_harmonics_orthonormal(self):
        q = sp.make_quadrature(3, 16)
        B = sp.harmonic_basis(3, 4, q.nodes)
        gram = (np.conj(B).T * q.weights) @ B
        np.testing.assert_allclose(gram, np.eye(25), atol=1e-12)


class TestHerglotz:
    def test_origin(self):
        u = sp.herglotz(sp.uniform_density(3), np.zeros(3), sp.make_quadrature(3, 40))
        assert abs(u - FOUR_PI) <= 1e-12

    @pytest.mark.parametrize("r", [1.0, 2.5])
    def test_radial_oracle(self, r):
        q = sp.make_quadrature(3, 40)
        u = sp.herglotz(sp.uniform_density(3), np.array([0.0, r, 0.0]), q)
        assert abs(u - RADIAL_ORACLE[r]) <= 1e-8
        assert abs(u - FOUR_PI * math.sin(r) / r) <= 1e-8

    def test_point_mass(self):
        u = sp.herglotz(sp.PointMasses(2, [[1.0, 0.0]], [1.0]), np.array([np.pi, 0.0]))
        assert u == pytest.approx(-1.0, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sp.herglotz(sp.uniform_density(3), np.zeros(3), sp.make_quadrature(2, 10))
        with pytest.raises(DimensionMismatch):
            sp.herglotz(sp.PointMasses(2, [[0.0, 1.0]], [1.0]), np.zeros(3))

    def test_parity(self, rng):
        # real even density: Phi(xi) = 1 + xi_1^2 + xi_2 xi_3
        dens = sp.SmoothDensity(3, lambda xi: 1 + xi[..., 0] ** 2 + xi[..., 1] * xi[..., 2])
        q = sp.make_quadrature(3, 40)
        x = rng.uniform(-3, 3, (20, 3))
        u = sp.herglotz(dens, x, q)
        assert np.max(np.abs(u.imag)) <= 1e-12

    @pytest.mark.parametrize("r", [0.5, 2.0, 5.0])
    def test_degree_convergence(self, r):
        dens = sp.SmoothDensity(3, lambda xi: np.exp(xi[..., 2]))
        x = r * np.array([0.6, 0.0, 0.8])
        base = int(4 * r + 20)
        a = sp.herglotz(dens, x, sp.make_quadrature(3, base))
        b = sp.herglotz(dens, x, sp.make_quadrature(3, 2 * base))
        assert abs(a - b) <= 1e-10

    def test_lattice_point_masses_solve(self, nonconstant):
        dens = sp.PointMasses(2, [[1, 0], [0, -1], [-1, 0]], [1.0, 2.0j, -0.5])
        g = mp.GridFunction(2, 32, 2 * np.pi, np.zeros((32, 32)))
        u = g.with_values(sp.herglotz(dens, g.coordinates()))
        for f in nonconstant:
            assert mp.helmholtz_residual(u, f).res_f <= 1e-12

    def test_one_dimensional_sphere(self):
        a, b = 2.0, -1.0j
        dens = sp.PointMasses(1, [[1.0], [-1.0]], [a, b])
        g = mp.GridFunction(1, 16, 2 * np.pi, np.zeros(16))
        x = g.coordinates()
        u = g.with_values(sp.herglotz(dens, x))
        np.testing.assert_allclose(u.values, a * np.exp(-1j * x[:, 0]) + b * np.exp(1j * x[:, 0]), atol=1e-14)
        assert mp.helmholtz_residual(u, bn.fractional(0.5)).res_f <= 1e-12


class TestLayers:
    def test_order_zero_is_herglotz(self, rng):
        dens = sp.PointMasses(3, [[0, 0, 1], [0.6, 0.8, 0]], [1.0, 2.0])
        x = rng.standard_normal((5, 3))
        np.testing.assert_allclose(sp.herglotz_layer(sp.LayerSpec(0, dens), x), sp.herglotz(dens, x), rtol=1e-15)

    def test_order_one_point_mass(self):
        c, x = 1.5 - 0.5j, np.array([2.0, 0.3, -1.0])
        dens = sp.PointMasses(3, [[1.0, 0.0, 0.0]], [c])
        u = sp.herglotz_layer(sp.LayerSpec(1, dens), x)
        assert u == pytest.approx(1j * c * x[0] * np.exp(-1j * x[0]), rel=1e-15)

    def test_order_one_uniform_at_origin(self):
        u = sp.herglotz_layer(sp.LayerSpec(1, sp.uniform_density(3)), np.zeros(3), sp.make_quadrature(3, 10))
        assert abs(u) <= 1e-14

    def test_order_limit(self):
        with pytest.raises(UnsupportedOrder):
            sp.LayerSpec(3, sp.uniform_density(3))

    def test_demo_examples(self):
        assert sp.layer_residual_demo(bn.affine(0.0, 1.0)).ratio == pytest.approx(1.0, abs=1e-10)
        assert sp.layer_residual_demo(bn.fractional(0.5)).ratio == pytest.approx(0.5, abs=1e-6)
        assert sp.layer_residual_demo(bn.log1p()).ratio == pytest.approx(0.5, abs=1e-6)

    def test_demo_residual_shape(self):
        rep = sp.layer_residual_demo(bn.log1p())
        mode = np.exp(-1j * rep.x)
        np.testing.assert_allclose(rep.r_lap, 2j * mode, atol=1e-9)
        np.testing.assert_allclose(rep.r_f, 2j * 0.5 * mode, atol=1e-9)

    def test_demo_catalogue(self, nonconstant):
        for f in nonconstant:
            assert sp.layer_residual_demo(f).ratio == pytest.approx(f.fprime1, abs=1e-6), f.name

    def test_demo_gates(self):
        with pytest.raises(ConstantSymbol):
            sp.layer_residual_demo(bn.affine(2.0, 0.0))
        with pytest.raises(UnsupportedOrder):
            sp.layer_residual_demo(bn.log1p(), k=2)


class TestBStar:
    def test_zero_density(self):
        res = sp.bstar_norm(sp.PointMasses(3, [[0, 0, 1]], [0.0]), 50.0)
        assert res.sup == 0.0

    def test_uniform_profile(self):
        res = sp.bstar_norm(sp.uniform_density(3), 200.0, sp.make_quadrature(3, 32))
        np.testing.assert_allclose(res.g, _bstar_oracle(res.R), rtol=1e-10)
        assert res.g[-1] == pytest.approx(32 * np.pi**3, rel=0.01)
        assert 32 * np.pi**3 <= res.sup <= 40 * np.pi**3
        assert res.limit == pytest.approx(32 * np.pi**3, rel=1e-12)

    def test_circle_limit(self):
        # uniform density on S^1: |u|^2 = 4 pi^2 J0(r)^2, limit 2 (2 pi) ||1||^2 = 8 pi^2
        res = sp.bstar_norm(sp.uniform_density(2), 400.0, sp.make_quadrature(2, 32))
        assert res.limit == pytest.approx(8 * np.pi**2, rel=1e-12)
        assert res.g[-1] == pytest.approx(res.limit, rel=0.01)

    def test_direct_matches_bessel(self):
        dens = sp.HarmonicCoeffs(3, [1.0, 0.3, -0.2j, 0.5])
        q = sp.make_quadrature(3, 24)
        a = sp.bstar_norm(dens, 6.0, num=8)
        b = sp.bstar_norm(dens, 6.0, q, num=8, method="direct")
        with pytest.raises(DomainError):
            sp.bstar_norm(dens, 6.0, num=8, method="direct")
        np.testing.assert_allclose(a.g, b.g, rtol=1e-10)

    def test_point_masses_grow(self):
        res = sp.bstar_norm(sp.PointMasses(3, [[1, 0, 0]], [1.0]), 100.0)
        # |u| = 1 everywhere so g(R) = (4/3) pi R^2
        np.testing.assert_allclose(res.g, 4 / 3 * np.pi * res.R**2, rtol=1e-10)
        assert res.limit is None

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            sp.bstar_norm(sp.uniform_density(3), 200.0, sp.make_quadrature(3, 200), method="direct")

    def test_projection_budget(self):
        with pytest.raises(BudgetExceeded):
            sp.project_harmonics(sp.uniform_density(3), sp.make_quadrature(3, 200))

    def test_range(self):
        with pytest.raises(DomainError):
            sp.bstar_norm(sp.uniform_density(3), 600.0, sp.make_quadrature(3, 8))


class TestExtension:
    def test_constant_phi(self):
        bump = tf.make_bump(0.5)
        E = sp.extension_operator(lambda th: np.ones(th.shape[:-1]), bump)
        r = np.linspace(0.1, 2.0, 50)
        x = np.stack([r, np.zeros_like(r)], axis=-1)
        np.testing.assert_allclose(E(x), bump(r), rtol=0)

    def test_inside_zero_region(self):
        E = sp.extension_operator(lambda th: 1 + th[..., 0], tf.make_bump(0.5))
        assert E(np.array([[0.3, 0.0], [0.0, -0.3]])).tolist() == [0.0, 0.0]

    def test_round_trip(self):
        q = sp.make_quadrature(3, 10)
        phi = lambda th: np.cos(th[..., 0]) + th[..., 2] ** 2
        E = sp.extension_operator(phi, tf.make_bump(0.4))
        np.testing.assert_allclose(E(q.nodes), phi(q.nodes), rtol=1e-15)

    @staticmethod
    def _radial_power(phi, p):
        def tilde(xi):
            r = np.linalg.norm(xi, axis=-1)
            return r**p * phi(xi / r[..., None])

        return tilde

    def test_gamma_quotient_limit(self):
        phi = lambda th: np.cos(2 * th[..., 0]) + th[..., 1]
        tilde = self._radial_power(phi, 3)
        e = np.array([0.6, 0.8])
        vals = []
        for k in range(2, 9):
            for s in (1, -1):
                vals.append(float(sp.gamma_quotient(tilde, phi, (1 + s * 10.0**-k) * e)))
        assert np.all(np.isfinite(vals)) and max(map(abs, vals)) < 10
        # (r^3 - 1) / (r^2 - 1) -> 3/2
        assert vals[-1] == pytest.approx(1.5 * phi(e), rel=1e-7)

    def test_gamma_leading_term(self):
        phi = lambda th: np.cos(2 * th[..., 0]) + th[..., 1]
        e = np.array([0.6, 0.8])
        xi6 = (1 + 1e-6) * e
        tilde = self._radial_power(phi, 2)
        gap = abs(float(sp.gamma_quotient(tilde, phi, xi6)) - float(sp.gamma_leading_term(tilde, xi6)))
        assert gap <= 1e-6
        # the Taylor remainder is first order in |xi| - 1
        tilde = self._radial_power(phi, 3)
        gaps = []
        for k in (4, 5, 6):
            xi = (1 + 10.0**-k) * e
            gaps.append(abs(float(sp.gamma_quotient(tilde, phi, xi)) - float(sp.gamma_leading_term(tilde, xi))))
        assert gaps[0] / gaps[1] == pytest.approx(10, rel=0.05)
        assert gaps[1] / gaps[2] == pytest.approx(10, rel=0.05)

    def test_gamma_of_extension(self):
        phi = lambda th: 1 + th[..., 0]
        E = sp.extension_operator(phi, tf.make_bump(0.5))
        for k in range(2, 9):
            xi = np.array([(1 + 10.0**-k), 0.0])
            assert float(sp.gamma_quotient(E, phi, xi)) == 0.0
