import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bernstein_helmholtz import bernstein as bn
from bernstein_helmholtz import testfn as tf
from bernstein_helmholtz.errors import DomainError

# max |rho'(r)| / center for annulus(2, 0.4, 0.9), from a 2e6-point 1-D gradient of the profile
C1_ORACLE = 16.000000002677552
# sup of |x|^2 phi_hat(x) for annulus(2, 0.6, 1.4), dense 1-D radial sampling
SEMINORM00_ORACLE = 1.5087280763563329


class TestBump:
    def test_examples(self):
        b = tf.make_bump(0.5)
        assert b(1.0) == 1.0
        assert b(0.5) == 0.0
        assert 0.0 < b(1.2) < 1.0

    @given(st.floats(0.01, 0.99), st.floats(0.0, 3.0))
    def test_invariants(self, eps, r):
        b = tf.make_bump(eps)
        v = float(b(r))
        assert 0.0 <= v <= 1.0
        if abs(r - 1.0) <= eps / 4:
            assert v == 1.0
        if abs(r - 1.0) >= eps / 2:
            assert v == 0.0

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.3, 1.5])
    def test_domain(self, eps):
        with pytest.raises(DomainError):
            tf.make_bump(eps)

    def test_smoothstep(self):
        s = np.linspace(-1, 2, 301)
        v = tf.smoothstep(s)
        assert np.all(v[s <= 0] == 0) and np.all(v[s >= 1] == 1)
        assert np.all(np.diff(v) >= 0)
        np.testing.assert_allclose(tf.smoothstep(0.5), 0.5, rtol=1e-15)


class TestZTestFunction:
    def test_vanishes_inside(self):
        phi = tf.ZTestFunction.annulus(3, 0.5, 1.2, factor=lambda x: 1 + x[..., 0] ** 2)
        x = np.random.default_rng(1).uniform(-1, 1, (2000, 3))
        x = x[np.linalg.norm(x, axis=1) < phi.r0]
        assert np.all(phi(x) == 0.0)

    def test_annulus_radii(self):
        phi = tf.ZTestFunction.annulus(2, 0.6, 1.4)
        assert phi.r0 == pytest.approx(0.6) and phi.r1 == pytest.approx(1.4)

    def test_taylor_zero(self):
        assert tf.taylor_constant(tf.zero_test_function(2), 1) == 0.0

    def test_taylor_against_radial_oracle(self):
        phi = tf.ZTestFunction.annulus(2, 0.4, 0.9)
        c = tf.taylor_constant(phi, 1)
        assert 0 < c <= C1_ORACLE * (1 + 1e-3)
        assert c == pytest.approx(C1_ORACLE, rel=0.02)

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_taylor_refinement(self, N):
        phi = tf.ZTestFunction.annulus(2, 0.4, 0.9)
        a, b = tf.taylor_constant(phi, N, 64), tf.taylor_constant(phi, N, 128)
        assert abs(a - b) <= 0.05 * b

    @pytest.mark.parametrize("N", [1, 2, 3, 4])
    def test_taylor_bound(self, N):
        phi = tf.ZTestFunction.annulus(2, 0.4, 0.9)
        C = tf.taylor_constant(phi, N)
        rng = np.random.default_rng(N)
        r = rng.uniform(0, 1, 1000)
        th = rng.uniform(0, 2 * np.pi, 1000)
        x = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
        assert np.all(np.abs(phi(x)) <= C * r**N + 1e-15)

    def test_multi_indices(self):
        assert tf.multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
        assert len(tf.multi_indices(3, 3)) == 10

    def test_fd_partial_polynomial(self):
        g = lambda x: x[..., 0] ** 3 * x[..., 1] ** 2
        x = np.array([[0.7, -1.3]])
        np.testing.assert_allclose(tf.fd_partial(g, x, (1, 1), 1e-3), 3 * 0.49 * 2 * -1.3, rtol=1e-6)
        np.testing.assert_allclose(tf.fd_partial(g, x, (3, 0), 1e-2), 6 * 1.69, rtol=1e-10)


class TestSmoothExtension:
    def test_zero_inside(self):
        phi = tf.ZTestFunction.annulus(2, 0.5, 1.2)
        table = tf.smooth_extension_check(bn.log1p(), phi, (0, 0), radii=[0.25])
        assert table.values[0] == 0.0

    def test_decreasing_towards_support_edge(self):
        phi = tf.ZTestFunction.annulus(2, 0.1, 0.3)
        table = tf.smooth_extension_check(bn.fractional(0.5), phi, (0, 0), radii=[0.2, 0.15, 0.11])
        e = table.direction
        oracle = [float(np.sqrt(r * r) * phi(r * e[None, :])[0]) for r in table.radii]
        np.testing.assert_allclose(table.values, oracle, rtol=1e-14)
        assert table.values[0] > table.values[1] > table.values[2] > 0

    def test_default_table(self):
        phi = tf.ZTestFunction.annulus(2, 0.1, 0.3)
        table = tf.smooth_extension_check(bn.fractional(0.5), phi, (1, 0))
        assert table.radii.size == 20
        assert np.all(np.isfinite(table.values))
        assert np.all(table.values[table.radii < phi.r0] < 1e-10)

    def test_beta_order(self):
        phi = tf.ZTestFunction.annulus(2, 0.1, 0.3)
        with pytest.raises(DomainError):
            tf.smooth_extension_check(bn.log1p(), phi, (2, 2))


class TestSeminorm:
    def test_zero(self):
        r = tf.seminorm(bn.log1p(), tf.zero_test_function(2), (1, 0), (0, 1))
        assert r.value == 0.0

    def test_identity_symbol(self):
        phi = tf.ZTestFunction.annulus(2, 0.6, 1.4)
        r = tf.seminorm(bn.affine(0.0, 1.0), phi, (0, 0), (0, 0), resolution=256)
        assert r.value <= SEMINORM00_ORACLE * (1 + 1e-12)
        assert r.value == pytest.approx(SEMINORM00_ORACLE, rel=1e-3)

    @pytest.mark.parametrize("alpha, beta", [((1, 0), (0, 1)), ((2, 1), (1, 1)), ((0, 3), (2, 0))])
    def test_refinement(self, alpha, beta):
        phi = tf.ZTestFunction.annulus(2, 0.6, 1.4)
        f = bn.fractional(0.5)
        a = tf.seminorm(f, phi, alpha, beta, 256).value
        b = tf.seminorm(f, phi, alpha, beta, 512).value
        assert np.isfinite(b) and b > 0
        assert abs(a - b) <= 0.05 * b

    @given(st.integers(1, 50))
    def test_scaling_is_linear(self, n):
        phi = tf.ZTestFunction.annulus(2, 0.6, 1.4)
        f = bn.log1p()
        base = tf.seminorm(f, phi, (1, 1), (1, 0), 64).value
        scaled = tf.seminorm(f, phi.scaled(1.0 / n), (1, 1), (1, 0), 64).value
        assert scaled == pytest.approx(base / n, rel=1e-12)

    def test_leibniz(self):
        phi = tf.ZTestFunction.annulus(2, 0.6, 1.4, factor=lambda x: np.cos(x[..., 0]))
        rng = np.random.default_rng(5)
        r = rng.uniform(0.7, 1.3, 50)
        th = rng.uniform(0, 2 * np.pi, 50)
        x = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
        for f in (bn.fractional(0.5), bn.log1p()):
            for axis in (0, 1):
                direct, rule = tf.leibniz_first_order(f, phi, x, axis)
                scale = np.max(np.abs(rule))
                np.testing.assert_allclose(direct, rule, atol=1e-6 * scale)
