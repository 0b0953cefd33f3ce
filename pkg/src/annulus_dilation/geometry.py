"""Geometry of the annulus ``A_r = {r < |z| < 1}`` and its m-fold product.

Points of the product domain are plain sequences of complex numbers.  The
distinguished boundary of the product is the Cartesian product of the two
boundary circles (unit circle and circle of radius r), and `peak_function`
realizes the classical certificate: for every such point there is a function
of modulus one there and strictly less than one everywhere else on the
closed product domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, PeakPointError, ResourceLimitError

OUTER = "outer"
INNER = "inner"

#: default absolute tolerance for recognizing boundary points
BOUNDARY_TOL = 1e-10

#: default cap on the number of product-grid atoms
GRID_CAP = 10_000_000


@dataclass(frozen=True)
class AnnulusParams:
    """Inner radius of the annulus; the outer radius is fixed at 1."""

    r: float

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"inner radius must lie in (0, 1), got {self.r!r}")


@dataclass(frozen=True)
class BoundaryAtom:
    """One quadrature node on a boundary circle."""

    point: complex
    circle: str  # OUTER or INNER
    weight: float


def classify_point(params: AnnulusParams, z: complex, tol: float = BOUNDARY_TOL) -> str:
    """Locate ``z`` relative to the closed annulus.

    Returns one of ``"outer_circle"``, ``"inner_circle"``, ``"interior"``,
    ``"outside"``.  Boundary tags take precedence: a point within ``tol`` of
    either circle is classified as boundary even though it also satisfies the
    open interior inequalities.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    rho = abs(z)
    if abs(rho - 1.0) <= tol:
        return "outer_circle"
    if abs(rho - params.r) <= tol:
        return "inner_circle"
    if params.r + tol < rho < 1.0 - tol:
        return "interior"
    return "outside"


def in_closed_annulus(params: AnnulusParams, z: complex, tol: float = BOUNDARY_TOL) -> bool:
    return classify_point(params, z, tol) != "outside"


def circle_points(n_angles: int) -> np.ndarray:
    """``n_angles`` equispaced points on the unit circle, starting at 1."""
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    return np.exp(1j * theta)


def boundary_grid(params: AnnulusParams, n_angles: int) -> list[BoundaryAtom]:
    """Uniform quadrature grid on both boundary circles.

    Produces ``n_angles`` atoms of weight ``1/n_angles`` on each circle, so the
    weights on each circle sum to one (up to a final rounding of ``1/n``).
    """
    if n_angles < 1:
        raise ValueError("n_angles must be at least 1")
    unit = circle_points(n_angles)
    w = 1.0 / n_angles
    atoms = [BoundaryAtom(complex(p), OUTER, w) for p in unit]
    atoms += [BoundaryAtom(complex(params.r * p), INNER, w) for p in unit]
    return atoms


def peak_function(
    params: AnnulusParams,
    a: Sequence[complex],
    z: Sequence[complex],
    tol: float = BOUNDARY_TOL,
) -> complex:
    """Evaluate the peaking function of the boundary point ``a`` at ``z``.

    Coordinates of ``a`` on the outer circle use the factor ``a_k/(2a_k - z_k)``
    and coordinates on the inner circle use ``a_k/(2z_k - a_k)``; the value is
    the product over coordinates.  It equals 1 at ``z = a`` and has modulus
    strictly below 1 at every other point of the closed product domain.
    """
    if len(a) != len(z):
        raise ValueError("a and z must have the same number of coordinates")
    value = 1.0 + 0.0j
    for k, (ak, zk) in enumerate(zip(a, z)):
        tag = classify_point(params, ak, tol)
        if tag not in ("outer_circle", "inner_circle"):
            raise PeakPointError(
                f"coordinate {k} of the peak point is {tag}; it must lie on a boundary circle"
            )
        if classify_point(params, zk, tol) == "outside":
            raise DomainError(f"coordinate {k} of z lies outside the closed annulus")
        if tag == "outer_circle":
            value *= ak / (2.0 * ak - zk)
        else:
            value *= ak / (2.0 * zk - ak)
    return value


@dataclass(frozen=True)
class PolyGrid:
    """Product quadrature grid on the distinguished boundary.

    ``points[i, j]`` is the j-th coordinate of atom i, ``faces[i, j]`` is 0 if
    that coordinate sits on the outer circle and 1 on the inner circle, and
    ``weights[i]`` is the product of the per-circle weights.  Within each face
    (each fixed 0/1 pattern) the weights sum to one.
    """

    points: np.ndarray
    weights: np.ndarray
    faces: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]


def poly_boundary_grid(
    params: AnnulusParams,
    m: int,
    n_angles: int,
    cap: int = GRID_CAP,
) -> PolyGrid:
    """Cartesian product of per-coordinate boundary grids (``(2 n_angles)^m`` atoms)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if n_angles < 1:
        raise ValueError("n_angles must be at least 1")
    total = (2 * n_angles) ** m
    if total > cap:
        raise ResourceLimitError(
            f"product grid would hold {total} atoms, above the cap of {cap}"
        )
    unit = circle_points(n_angles)
    axis_points = np.concatenate([unit, params.r * unit])
    axis_faces = np.concatenate(
        [np.zeros(n_angles, dtype=np.uint8), np.ones(n_angles, dtype=np.uint8)]
    )
    mesh_p = np.meshgrid(*([axis_points] * m), indexing="ij")
    mesh_f = np.meshgrid(*([axis_faces] * m), indexing="ij")
    points = np.stack([g.ravel() for g in mesh_p], axis=1)
    faces = np.stack([g.ravel() for g in mesh_f], axis=1)
    weights = np.full(total, (1.0 / n_angles) ** m)
    return PolyGrid(points=points, weights=weights, faces=faces)
