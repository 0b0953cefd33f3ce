import math

import numpy as np
import pytest

from annulus_dilation import (
    BoundaryDataMD,
    DiscretePolyMeasure,
    DomainError,
    eval_harmonic_1d,
    eval_md,
    moment,
    pushforward,
    solve_dirichlet_1d,
    solve_dirichlet_md,
    sup_norm_report,
)
from annulus_dilation.harmonic import BoundaryData1D, fourier_coeffs
from conftest import PARAMS, R


def face_samples_from_function(fun, m, n_samples):
    """Sample a function of the coordinates on every face of the product boundary."""
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    unit = np.exp(1j * theta)
    faces = {}
    for face in np.ndindex(*(2,) * m):
        axes = [(R if b else 1.0) * unit for b in face]
        mesh = np.meshgrid(*axes, indexing="ij")
        faces[tuple(face)] = fun(np.stack(mesh, axis=-1)).real
    return faces


def random_real_tensor(rng, m, order):
    shape = (2 * order + 1,) * m
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    flip = (slice(None, None, -1),) * m
    return (c + c[flip].conj()) / 2


class TestSolveMD:
    def test_constant(self):
        faces = face_samples_from_function(lambda z: np.ones(z.shape[:-1]), 2, 8)
        data = BoundaryDataMD.from_face_samples(2, faces, 2)
        u = solve_dirichlet_md(PARAMS, data)
        assert eval_md(u, [0.7, 0.8j]) == pytest.approx(1.0, abs=1e-13)

    def test_re_z1z2_is_its_own_extension(self):
        faces = face_samples_from_function(
            lambda z: np.real(z[..., 0] * z[..., 1]), 2, 16
        )
        data = BoundaryDataMD.from_face_samples(2, faces, 3)
        u = solve_dirichlet_md(PARAMS, data)
        pts = np.array(
            [
                [0.7, 0.6j],
                [0.9 * np.exp(0.3j), 0.55 * np.exp(-1.0j)],
                [1.0, 0.5],
                [0.5, 0.62 * np.exp(2.0j)],
            ]
        )
        assert np.allclose(eval_md(u, pts), np.real(pts[:, 0] * pts[:, 1]), atol=1e-12)

    def test_single_variable_data_matches_1d_extension(self):
        rng = np.random.default_rng(12)
        order = 4
        g1 = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        g1 = (g1 + g1[::-1].conj()) / 2
        h1 = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
        h1 = (h1 + h1[::-1].conj()) / 2

        n_samp = 2 * order + 1
        theta = 2 * np.pi * np.arange(n_samp) / n_samp
        ns = np.arange(-order, order + 1)
        basis = np.exp(1j * np.outer(theta, ns))
        g_vals, h_vals = (basis @ g1).real, (basis @ h1).real
        faces = {
            (0, 0): np.tile(g_vals[:, None], (1, n_samp)),
            (0, 1): np.tile(g_vals[:, None], (1, n_samp)),
            (1, 0): np.tile(h_vals[:, None], (1, n_samp)),
            (1, 1): np.tile(h_vals[:, None], (1, n_samp)),
        }
        data = BoundaryDataMD.from_face_samples(2, faces, order)
        u2 = solve_dirichlet_md(PARAMS, data)
        u1 = solve_dirichlet_1d(PARAMS, BoundaryData1D(g1, h1))

        rng_pts = np.random.default_rng(13)
        rho = rng_pts.uniform(R, 1.0, (50, 2))
        ang = rng_pts.uniform(0, 2 * np.pi, (50, 2))
        pts = rho * np.exp(1j * ang)
        assert np.allclose(
            eval_md(u2, pts), eval_harmonic_1d(u1, pts[:, 0]), atol=1e-10
        )

    def test_restriction_reproduces_face_data(self):
        rng = np.random.default_rng(21)
        order = 3
        faces = {f: random_real_tensor(rng, 2, order) for f in np.ndindex(2, 2)}
        data = BoundaryDataMD(m=2, order=order, faces=faces)
        u = solve_dirichlet_md(PARAMS, data)
        theta = rng.uniform(0, 2 * np.pi, 12)
        ns = np.arange(-order, order + 1)
        basis = np.exp(1j * np.outer(theta, ns))
        for face, coeffs in faces.items():
            radii = [R if b else 1.0 for b in face]
            pts = np.stack(
                [radii[0] * np.exp(1j * theta), radii[1] * np.exp(1j * theta)], axis=1
            )
            expected = np.einsum("pa,ab,pb->p", basis, coeffs, basis).real
            assert np.allclose(eval_md(u, pts), expected, atol=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            BoundaryDataMD(m=2, order=2, faces={(0, 0): np.zeros((5, 3))})

    def test_domain_error(self):
        faces = face_samples_from_function(lambda z: np.ones(z.shape[:-1]), 1, 8)
        u = solve_dirichlet_md(PARAMS, BoundaryDataMD.from_face_samples(1, faces, 2))
        with pytest.raises(DomainError):
            eval_md(u, [1.4])


class TestSupNorm:
    def test_constant(self):
        faces = face_samples_from_function(lambda z: np.ones(z.shape[:-1]), 2, 8)
        u = solve_dirichlet_md(PARAMS, BoundaryDataMD.from_face_samples(2, faces, 2))
        rep = sup_norm_report(u, 4)
        assert rep.interior_max == pytest.approx(1.0, abs=1e-12)
        assert rep.boundary_max == pytest.approx(1.0, abs=1e-12)

    def test_re_z1(self):
        faces = face_samples_from_function(lambda z: np.real(z[..., 0]), 2, 8)
        u = solve_dirichlet_md(PARAMS, BoundaryDataMD.from_face_samples(2, faces, 2))
        rep = sup_norm_report(u, 6)
        assert rep.boundary_max == pytest.approx(1.0, abs=1e-12)
        assert rep.interior_max <= rep.boundary_max + 1e-8

    def test_random_trig_data(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            faces = {f: random_real_tensor(rng, 2, 3) for f in np.ndindex(2, 2)}
            u = solve_dirichlet_md(PARAMS, BoundaryDataMD(m=2, order=3, faces=faces))
            rep = sup_norm_report(u, 5)
            assert rep.interior_max <= rep.boundary_max + 1e-8

    def test_density_guard(self):
        faces = face_samples_from_function(lambda z: np.ones(z.shape[:-1]), 1, 8)
        u = solve_dirichlet_md(PARAMS, BoundaryDataMD.from_face_samples(1, faces, 2))
        with pytest.raises(ValueError):
            sup_norm_report(u, 3)


class TestPushforward:
    def test_boundary_atom_fixed(self):
        lam = [np.exp(0.4j), R * np.exp(1.0j)]
        nu = DiscretePolyMeasure.point_mass(lam)
        nuhat = pushforward(PARAMS, nu)
        assert nuhat.n_atoms == 1
        assert np.allclose(nuhat.points[0], lam)
        assert nuhat.total_mass == pytest.approx(1.0)
        assert nuhat.support_tag == "distinguished_boundary"

    def test_geometric_mean_split_m1(self):
        lam = math.sqrt(R) * np.exp(0.2j)
        nuhat = pushforward(PARAMS, DiscretePolyMeasure.point_mass([lam]))
        outer = np.abs(np.abs(nuhat.points[:, 0]) - 1.0) < 1e-9
        assert float(np.sum(nuhat.weights[outer])) == pytest.approx(0.5, abs=1e-10)
        assert float(np.sum(nuhat.weights[~outer])) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("m", [1, 2])
    def test_monomial_moments(self, m):
        rng = np.random.default_rng(40 + m)
        lam = rng.uniform(0.6, 0.9, m) * np.exp(1j * rng.uniform(0, 2 * np.pi, m))
        nuhat = pushforward(PARAMS, DiscretePolyMeasure.point_mass(lam))
        for k in np.ndindex(*(7,) * m):
            kk = tuple(int(x) - 3 for x in k)
            expected = np.prod([lam[j] ** kk[j] for j in range(m)])
            assert abs(nuhat.moment(kk) - expected) < 1e-8

    def test_mass_preserved_for_probability_measure(self):
        nu = DiscretePolyMeasure.from_atoms([[0.7], [0.85j]], [0.25, 0.75])
        nuhat = pushforward(PARAMS, nu, n_grid=64, n_freq=16)
        assert nuhat.total_mass == pytest.approx(1.0, abs=1e-10)
        assert np.all(nuhat.weights >= 0)

    def test_merges_coincident_atoms(self):
        nu = DiscretePolyMeasure.from_atoms([[0.7, 0.8], [0.7, 0.8]], [0.5, 0.5])
        nuhat = pushforward(PARAMS, nu, n_grid=32, n_freq=8)
        assert nuhat.n_atoms == (2 * 32) ** 2
        assert nuhat.total_mass == pytest.approx(1.0, abs=1e-10)

    def test_atom_outside_domain(self):
        with pytest.raises(DomainError):
            pushforward(PARAMS, DiscretePolyMeasure.point_mass([1.3]))


class TestMoment:
    def test_total_mass(self):
        nu = DiscretePolyMeasure.from_atoms([[0.7, 0.8], [0.9, 0.6]], [0.3, 0.7])
        assert moment(nu, (0, 0)) == pytest.approx(1.0)

    def test_point_mass_negative_powers(self):
        nu = DiscretePolyMeasure.point_mass([1.0, R])
        assert moment(nu, (2, -1)) == pytest.approx(1 / R)

    def test_linear_in_weights(self):
        nu = DiscretePolyMeasure.from_atoms([[0.7], [0.8]], [0.5, 0.5])
        assert moment(nu, (1,)) == pytest.approx(0.75)

    def test_bad_index_length(self):
        nu = DiscretePolyMeasure.point_mass([0.7])
        with pytest.raises(ValueError):
            moment(nu, (1, 2))
