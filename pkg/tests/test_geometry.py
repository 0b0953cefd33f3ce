import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulus_dilation import (
    AnnulusParams,
    DomainError,
    PeakPointError,
    ResourceLimitError,
    boundary_grid,
    classify_point,
    peak_function,
    poly_boundary_grid,
)
from conftest import PARAMS, R


def test_params_validation():
    with pytest.raises(ValueError):
        AnnulusParams(0.0)
    with pytest.raises(ValueError):
        AnnulusParams(1.0)
    with pytest.raises(ValueError):
        AnnulusParams(-0.3)


@pytest.mark.parametrize(
    "z, expected",
    [
        (1.0, "outer_circle"),
        (0.5j, "inner_circle"),
        (0.7, "interior"),
        (1.2, "outside"),
        (0.3, "outside"),
        (-1.0, "outer_circle"),
    ],
)
def test_classify_point(z, expected):
    assert classify_point(PARAMS, z, 1e-12) == expected


def test_classify_boundary_precedence():
    # within tolerance of the circle, boundary wins over the open interior test
    assert classify_point(PARAMS, 1.0 - 1e-12, tol=1e-10) == "outer_circle"
    assert classify_point(PARAMS, 0.5 + 1e-12, tol=1e-10) == "inner_circle"
    with pytest.raises(ValueError):
        classify_point(PARAMS, 1.0, tol=-1.0)


def test_boundary_grid_smallest():
    atoms = boundary_grid(PARAMS, 1)
    assert len(atoms) == 2
    assert atoms[0].point == 1
    assert atoms[0].circle == "outer"
    assert atoms[0].weight == 1.0
    assert atoms[1].point == 0.5


def test_boundary_grid_m4():
    atoms = boundary_grid(PARAMS, 4)
    outer = [a for a in atoms if a.circle == "outer"]
    pts = np.array([a.point for a in outer])
    assert np.allclose(pts, [1, 1j, -1, -1j], atol=1e-15)
    assert all(a.weight == 0.25 for a in outer)


@pytest.mark.parametrize("n", [1, 3, 7, 64])
def test_boundary_grid_weights_sum(n):
    atoms = boundary_grid(PARAMS, n)
    for circle in ("outer", "inner"):
        total = math.fsum(a.weight for a in atoms if a.circle == circle)
        # 1/n is not a binary float for n=3,7; the sum is within one rounding
        assert abs(total - 1.0) <= 4 * np.finfo(float).eps

    moduli = np.abs([a.point for a in atoms])
    target = np.where([a.circle == "outer" for a in atoms], 1.0, R)
    assert np.max(np.abs(moduli - target)) <= 4 * np.spacing(1.0)

    with pytest.raises(ValueError):
        boundary_grid(PARAMS, 0)


def test_peak_function_peaks_at_a():
    assert peak_function(PARAMS, [1.0], [1.0]) == 1.0
    assert peak_function(PARAMS, [0.5], [0.5]) == 1.0
    a = [np.exp(0.7j), 0.5 * np.exp(-2.1j)]
    assert peak_function(PARAMS, a, a) == pytest.approx(1.0, abs=1e-15)


def test_peak_function_two_coordinates():
    v = peak_function(PARAMS, [1.0, 0.5], [-1.0, -0.5])
    assert abs(v) < 1
    # product of the two closed-form factors
    assert v == pytest.approx((1 / 3) * (-1 / 3), abs=1e-15)


def test_peak_function_errors():
    with pytest.raises(PeakPointError):
        peak_function(PARAMS, [0.7], [0.8])
    with pytest.raises(DomainError):
        peak_function(PARAMS, [1.0], [1.5])
    with pytest.raises(ValueError):
        peak_function(PARAMS, [1.0, 0.5], [1.0])


@settings(max_examples=60, deadline=None)
@given(
    theta=st.floats(0, 2 * math.pi),
    rho=st.floats(R, 1.0),
    phi=st.floats(0, 2 * math.pi),
)
def test_peak_function_strictly_below_one(theta, rho, phi):
    a = [complex(np.exp(1j * theta))]
    z = [complex(rho * np.exp(1j * phi))]
    if abs(z[0] - a[0]) > 1e-9:
        assert abs(peak_function(PARAMS, a, z)) < 1.0


def test_peak_function_sampled_product_domain():
    rng = np.random.default_rng(42)
    anchors = [
        [np.exp(2.2j), 0.5],
        [1.0, 0.5 * np.exp(0.3j)],
        [0.5 * np.exp(-1.0j), 0.5 * np.exp(2.9j)],
    ]
    rho = rng.uniform(R, 1.0, (4000, 2))
    ang = rng.uniform(0, 2 * np.pi, (4000, 2))
    zs = rho * np.exp(1j * ang)
    for a in anchors:
        vals = np.array([peak_function(PARAMS, a, z) for z in zs])
        assert np.all(np.abs(vals) < 1.0)
        assert peak_function(PARAMS, a, a) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m, n, expected", [(1, 2, 4), (2, 2, 16), (3, 2, 64)])
def test_poly_boundary_grid_counts(m, n, expected):
    grid = poly_boundary_grid(PARAMS, m, n)
    assert grid.n_atoms == expected
    assert grid.points.shape == (expected, m)


def test_poly_boundary_grid_face_weights():
    grid = poly_boundary_grid(PARAMS, 2, 2)
    for face in ((0, 0), (0, 1), (1, 0), (1, 1)):
        mask = np.all(grid.faces == face, axis=1)
        assert math.fsum(grid.weights[mask]) == pytest.approx(1.0, abs=1e-14)
    assert math.fsum(grid.weights) == pytest.approx(4.0, abs=1e-12)


def test_poly_boundary_grid_cap():
    with pytest.raises(ResourceLimitError):
        poly_boundary_grid(PARAMS, 4, 100, cap=1000)
