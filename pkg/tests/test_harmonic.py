import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulus_dilation import (
    AliasingError,
    AnnulusParams,
    BoundaryData1D,
    DomainError,
    TruncationOrderError,
    eval_harmonic_1d,
    fourier_coeffs,
    harmonic_measure,
    solve_dirichlet_1d,
)
from annulus_dilation.harmonic import CIRCLE_INNER, CIRCLE_OUTER, radial_response
from conftest import PARAMS, R


def coeff_array(order, entries):
    c = np.zeros(2 * order + 1, dtype=complex)
    for n, v in entries.items():
        c[n + order] = v
    return c


def real_trig_samples(coeffs, order, n_samples):
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    ns = np.arange(-order, order + 1)
    return (np.exp(1j * np.outer(theta, ns)) @ coeffs).real


class TestFourierCoeffs:
    def test_constant(self):
        c = fourier_coeffs(np.ones(8), 2)
        assert c[2] == pytest.approx(1.0, abs=1e-14)
        assert np.max(np.abs(np.delete(c, 2))) < 1e-14

    def test_single_mode(self):
        theta = 2 * np.pi * np.arange(16) / 16
        c = fourier_coeffs(np.exp(1j * theta), 2)
        assert c[3] == pytest.approx(1.0, abs=1e-14)  # n = +1 slot
        assert abs(c[2]) < 1e-14

    def test_cos3(self):
        theta = 2 * np.pi * np.arange(8) / 8
        c = fourier_coeffs(np.cos(3 * theta), 3)
        # direct-summation oracle
        expected = np.array(
            [np.mean(np.cos(3 * theta) * np.exp(-1j * n * theta)) for n in range(-3, 4)]
        )
        assert np.allclose(c, expected, atol=1e-14)
        assert c[0] == pytest.approx(0.5, abs=1e-14)
        assert c[6] == pytest.approx(0.5, abs=1e-14)

    def test_aliasing_guard(self):
        with pytest.raises(AliasingError):
            fourier_coeffs(np.ones(8), 4)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 4), st.integers(0, 1))
    def test_exact_recovery_of_trig_polys(self, n, sign):
        order = 5
        coeffs = coeff_array(order, {n if sign else -n: 1.3 - 0.4j})
        theta = 2 * np.pi * np.arange(2 * order + 1) / (2 * order + 1)
        ns = np.arange(-order, order + 1)
        samples = np.exp(1j * np.outer(theta, ns)) @ coeffs
        rec = fourier_coeffs(samples, order)
        assert np.allclose(rec, coeffs, atol=1e-13)


class TestSolveDirichlet:
    def test_constants(self):
        order = 3
        data = BoundaryData1D(coeff_array(order, {0: 1.0}), coeff_array(order, {0: 1.0}))
        u = solve_dirichlet_1d(PARAMS, data)
        assert u.a[order] == 1.0
        assert abs(u.b[order]) < 1e-15
        assert np.max(np.abs(np.delete(u.a, order))) == 0
        assert eval_harmonic_1d(u, 0.7) == pytest.approx(1.0, abs=1e-14)

    def test_cos_profile(self):
        order = 3
        data = BoundaryData1D(
            coeff_array(order, {1: 0.5, -1: 0.5}), coeff_array(order, {})
        )
        u = solve_dirichlet_1d(PARAMS, data)
        for rho in (0.55, 0.75, 0.9):
            expected = (rho - R**2 / rho) / (1 - R**2)
            assert eval_harmonic_1d(u, rho) == pytest.approx(expected, abs=1e-13)

    def test_log_profile(self):
        order = 2
        data = BoundaryData1D(coeff_array(order, {0: 1.0}), coeff_array(order, {}))
        u = solve_dirichlet_1d(PARAMS, data)
        z = math.sqrt(R) * np.exp(1.1j)
        assert eval_harmonic_1d(u, z) == pytest.approx(0.5, abs=1e-13)
        assert eval_harmonic_1d(u, 0.7) == pytest.approx(
            1 - math.log(0.7) / math.log(R), abs=1e-13
        )

    def test_reproduces_boundary_data(self):
        rng = np.random.default_rng(3)
        order = 6
        g = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        g = (g + g[::-1].conj()) / 2
        h = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        h = (h + h[::-1].conj()) / 2
        u = solve_dirichlet_1d(PARAMS, BoundaryData1D(g, h))
        theta = rng.uniform(0, 2 * np.pi, 40)
        ns = np.arange(-order, order + 1)
        basis = np.exp(1j * np.outer(theta, ns))
        assert np.allclose(
            eval_harmonic_1d(u, np.exp(1j * theta)), (basis @ g).real, atol=1e-10
        )
        assert np.allclose(
            eval_harmonic_1d(u, R * np.exp(1j * theta)), (basis @ h).real, atol=1e-10
        )

    def test_linearity(self):
        rng = np.random.default_rng(4)
        order = 5

        def random_data():
            g = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
            h = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
            return BoundaryData1D(g, h)

        d1, d2 = random_data(), random_data()
        alpha, beta = 1.7, -0.6
        combined = BoundaryData1D(
            alpha * d1.g_coeffs + beta * d2.g_coeffs,
            alpha * d1.h_coeffs + beta * d2.h_coeffs,
        )
        u1, u2, u12 = (solve_dirichlet_1d(PARAMS, d) for d in (d1, d2, combined))
        assert np.allclose(u12.a, alpha * u1.a + beta * u2.a, rtol=1e-13, atol=1e-15)
        assert np.allclose(u12.b, alpha * u1.b + beta * u2.b, rtol=1e-13, atol=1e-15)

    def test_max_modulus_sampled(self):
        rng = np.random.default_rng(5)
        order = 4
        g = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        g = (g + g[::-1].conj()) / 2
        h = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        h = (h + h[::-1].conj()) / 2
        u = solve_dirichlet_1d(PARAMS, BoundaryData1D(g, h))
        theta = 2 * np.pi * np.arange(256) / 256
        boundary = max(
            np.max(np.abs(eval_harmonic_1d(u, np.exp(1j * theta)))),
            np.max(np.abs(eval_harmonic_1d(u, R * np.exp(1j * theta)))),
        )
        rho = rng.uniform(R, 1.0, 2000)
        ang = rng.uniform(0, 2 * np.pi, 2000)
        interior = np.max(np.abs(eval_harmonic_1d(u, rho * np.exp(1j * ang))))
        assert interior <= boundary + 1e-8

    def test_truncation_order_guard(self):
        tiny = AnnulusParams(0.05)
        order = 300
        data = BoundaryData1D(
            coeff_array(order, {0: 1.0}), coeff_array(order, {0: 1.0})
        )
        with pytest.raises(TruncationOrderError):
            solve_dirichlet_1d(tiny, data)

    def test_eval_domain_error(self):
        data = BoundaryData1D(coeff_array(1, {0: 1.0}), coeff_array(1, {}))
        u = solve_dirichlet_1d(PARAMS, data)
        with pytest.raises(DomainError):
            eval_harmonic_1d(u, 1.5)
        with pytest.raises(DomainError):
            eval_harmonic_1d(u, 0.2)


def test_radial_response_interpolates_circles():
    ns = np.arange(0, 9)
    for circle, at_one, at_r in (
        (CIRCLE_OUTER, 1.0, 0.0),
        (CIRCLE_INNER, 0.0, 1.0),
    ):
        assert np.allclose(radial_response(PARAMS, circle, ns, np.array(1.0)), at_one)
        assert np.allclose(radial_response(PARAMS, circle, ns, np.array(R)), at_r)


class TestHarmonicMeasure:
    def test_boundary_point_mass(self):
        lam = np.exp(1j * np.pi / 3)
        mu = harmonic_measure(PARAMS, lam)
        assert mu.n_atoms == 1
        assert mu.points[0] == lam
        assert mu.total_mass == 1.0
        assert mu.circles[0] == CIRCLE_OUTER

    def test_geometric_mean_masses(self):
        lam = math.sqrt(R) * np.exp(0.4j)
        mu = harmonic_measure(PARAMS, lam)
        assert mu.outer_mass == pytest.approx(0.5, abs=1e-12)
        assert mu.inner_mass == pytest.approx(0.5, abs=1e-12)

    def test_log_masses(self):
        for rho in (0.55, 0.7, 0.9):
            mu = harmonic_measure(PARAMS, rho * np.exp(2.0j))
            expected_outer = 1 - math.log(rho) / math.log(R)
            assert mu.outer_mass == pytest.approx(expected_outer, abs=1e-10)
            assert 0.0 <= mu.outer_mass <= 1.0
            assert 0.0 <= mu.inner_mass <= 1.0
            assert mu.total_mass == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("rho", [0.6, 0.707, 0.85, 0.9])
    def test_moments_reproduce_holomorphic_monomials(self, rho):
        lam = rho * np.exp(-1.3j)
        mu = harmonic_measure(PARAMS, lam)
        for k in range(-3, 4):
            assert abs(mu.moment(k) - lam**k) < 1e-10

    def test_moment_box_grows_with_order(self):
        lam = 0.8 * np.exp(0.9j)
        mu = harmonic_measure(PARAMS, lam, n_grid=512, n_freq=64)
        errs = [abs(mu.moment(k) - lam**k) for k in range(-20, 21)]
        assert max(errs) < 1e-10

    def test_clipping_recorded_and_renormalized(self):
        # near the outer circle the truncated kernel dips negative at small grids
        lam = 0.95
        mu = harmonic_measure(PARAMS, lam, n_grid=64, n_freq=31)
        assert mu.clipped_mass > 0
        assert np.all(mu.weights >= 0)
        assert mu.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_domain_and_aliasing_errors(self):
        with pytest.raises(DomainError):
            harmonic_measure(PARAMS, 1.2)
        with pytest.raises(AliasingError):
            harmonic_measure(PARAMS, 0.7, n_grid=64, n_freq=64)

    def test_reproduces_harmonic_extension(self):
        # quadrature against a random band-limited harmonic function
        rng = np.random.default_rng(9)
        order = 5
        g = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        g = (g + g[::-1].conj()) / 2
        h = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        h = (h + h[::-1].conj()) / 2
        u = solve_dirichlet_1d(PARAMS, BoundaryData1D(g, h))
        for lam in (0.62 + 0.1j, 0.8 * np.exp(2.7j)):
            mu = harmonic_measure(PARAMS, lam)
            quad = float(np.sum(mu.weights * eval_harmonic_1d(u, mu.points)))
            assert quad == pytest.approx(float(eval_harmonic_1d(u, lam)), abs=1e-9)
