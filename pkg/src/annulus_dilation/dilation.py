"""Constructive boundary-unitary dilation of commuting normal matrix tuples.

Pipeline: joint diagonalization gives an atomic spectral measure; each joint
eigenvalue's point mass is pushed to the distinguished boundary as a product
of discrete harmonic measures; the resulting positive operator-valued measure
is dilated to a projection-valued one a la Naimark (dilation space = direct
sum of the operator square-root ranges, one block per atom); coordinatewise
multiplication by the atom coordinates then defines the commuting tuple of
boundary unitaries.  Compressions of monomials in the unitaries reproduce the
monomials in the input tuple up to quadrature error, which the verification
report measures over a box of positive and negative powers.

Two storage modes coexist.  Small problems keep explicit per-atom operator
weights and materialize the isometry ``V`` and the diagonal unitaries
densely.  Large grids keep the factored form (per-eigenvalue product measure
times eigenprojection), for which every verified identity is evaluated
without materializing anything: ``V* U^k V = sum_i moment_i(k) P_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.linalg

from .calculus import MatrixTuple, _power_table
from .errors import (
    NotContractionError,
    NotDoublyCommutingError,
    PositivityError,
    PreconditionError,
    ResourceLimitError,
    SingularityError,
    StructureError,
)
from .geometry import AnnulusParams, classify_point
from .harmonic import DiscreteBoundaryMeasure
from .polyharmonic import DiscretePolyMeasure, pushforward
from .spectral import (
    EQ_DIAG_TOL,
    KERNEL_TERMS,
    MisraBound,
    SpectralDecomposition,
    VonNeumannReport,
    joint_diagonalize,
    misra_bound,
    misra_check,
    monomial_box_functions,
    von_neumann_sample,
)

#: cap on dense materialization of V (entries) and U_j (dimension)
DENSE_V_CAP = 50_000_000
DENSE_U_CAP = 8192

#: eigenvalues of an operator weight below this (times its norm) are treated as rank-deficient
RANK_TOL = 1e-12


@dataclass(frozen=True)
class OvmComponent:
    """One joint eigenvalue's share of the boundary operator measure.

    ``measure`` is the pushforward of the eigenvalue's point mass (a product
    of per-coordinate boundary measures) and ``basis`` holds orthonormal
    columns of the joint eigenspace, so the operator weight of an atom is
    ``measure.weight(atom) * basis basis*``.
    """

    measure: DiscretePolyMeasure
    basis: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


class BoundaryOVM:
    """Positive operator-valued measure on the distinguished boundary.

    Either explicit (``points`` with one PSD ``operators[i]`` per atom) or
    factored into `OvmComponent` parts.  In both forms the operators sum to
    the identity when built from a spectral decomposition of a contraction
    tuple.
    """

    def __init__(self, params, m, d, *, points=None, operators=None, components=None):
        if (points is None) == (components is None):
            raise ValueError("provide either explicit atoms or components")
        self.params = params
        self.m = m
        self.d = d
        self.points = None
        self.operators = None
        self.components = None
        if points is not None:
            self.points = np.atleast_2d(np.asarray(points, dtype=complex))
            self.operators = np.asarray(operators, dtype=complex)
            if self.operators.shape != (self.points.shape[0], d, d):
                raise ValueError("operators must be a (n_atoms, d, d) stack")
        else:
            self.components = list(components)

    @classmethod
    def from_operators(cls, params, points, operators) -> "BoundaryOVM":
        points = np.atleast_2d(np.asarray(points, dtype=complex))
        operators = np.asarray(operators, dtype=complex)
        return cls(
            params,
            points.shape[1],
            operators.shape[1],
            points=points,
            operators=operators,
        )

    @classmethod
    def from_components(cls, params, m, d, components) -> "BoundaryOVM":
        return cls(params, m, d, components=components)

    @property
    def is_factored(self) -> bool:
        return self.components is not None

    @property
    def n_atoms(self) -> int:
        if self.is_factored:
            return sum(c.measure.n_atoms for c in self.components)
        return self.points.shape[0]

    def sum_operator(self) -> np.ndarray:
        if self.is_factored:
            out = np.zeros((self.d, self.d), dtype=complex)
            for c in self.components:
                out += complex(c.measure.total_mass).real * c.projection
            return out
        return self.operators.sum(axis=0)

    def unit_defect(self) -> float:
        return float(np.linalg.norm(self.sum_operator() - np.eye(self.d), 2))

    def min_weight(self) -> float:
        """Most negative operator eigenvalue (factored: most negative atom weight)."""
        if self.is_factored:
            return float(
                min(min(p.weights.min() for p in c.measure.parts) for c in self.components)
            )
        return float(
            min(np.linalg.eigvalsh((a + a.conj().T) / 2.0).min() for a in self.operators)
        )

    @property
    def clipped_mass(self) -> float:
        if self.is_factored:
            return float(sum(c.measure.clipped_mass for c in self.components))
        return 0.0

    def materialize(self, cap: int = 200_000) -> "BoundaryOVM":
        """Explicit form with coincident atoms merged by exact coordinate equality."""
        if not self.is_factored:
            return self
        if self.n_atoms > cap:
            raise ResourceLimitError(
                f"{self.n_atoms} atoms exceed the materialization cap {cap}"
            )
        points = np.concatenate([c.measure.points for c in self.components], axis=0)
        view = points.view(float).reshape(points.shape[0], -1)
        _, first, inverse = np.unique(view, axis=0, return_index=True, return_inverse=True)
        merged = points[first]
        ops = np.zeros((merged.shape[0], self.d, self.d), dtype=complex)
        offset = 0
        for c in self.components:
            n = c.measure.n_atoms
            acc = np.zeros(merged.shape[0])
            np.add.at(acc, inverse[offset : offset + n], c.measure.weights.real)
            ops += acc[:, None, None] * c.projection[None, :, :]
            offset += n
        return BoundaryOVM.from_operators(self.params, merged, ops)


def boundary_ovm(
    decomp: SpectralDecomposition,
    params: AnnulusParams,
    n_grid: int = 256,
    n_freq: int = 64,
) -> BoundaryOVM:
    """Boundary operator measure of a jointly diagonalized normal tuple.

    Every joint eigenvalue must lie in the closed product annulus; its point
    mass is pushed to the distinguished boundary and attached to the
    eigenprojection.
    """
    eigenvalues = decomp.joint_eigenvalues
    p, m = eigenvalues.shape
    d = decomp.bases[0].shape[0]
    components = []
    for i in range(p):
        for j in range(m):
            if classify_point(params, eigenvalues[i, j]) == "outside":
                raise NotContractionError(
                    f"joint eigenvalue {i} has coordinate {eigenvalues[i, j]} outside "
                    "the closed annulus"
                )
        measure = pushforward(
            params,
            DiscretePolyMeasure.point_mass(eigenvalues[i]),
            n_grid=n_grid,
            n_freq=n_freq,
        )
        components.append(OvmComponent(measure=measure, basis=decomp.bases[i]))
    return BoundaryOVM.from_components(params, m, d, components)


class Dilation:
    """Isometry plus commuting boundary unitaries dilating a normal tuple.

    The dilation space is a direct sum of blocks, one per (atom, operator
    square-root range); ``V`` stacks the square-root factors and each ``U_j``
    is diagonal with the atom's j-th coordinate repeated along its block.
    Obtained from `naimark` (no unitaries yet) followed by
    `build_ar_unitaries`.
    """

    def __init__(
        self,
        params,
        m,
        d,
        *,
        block_points=None,
        block_factors=None,
        block_atom_index=None,
        components=None,
        n_grid=None,
        n_freq=None,
    ):
        self.params = params
        self.m = m
        self.d = d
        self.block_points = block_points
        self.block_factors = block_factors
        self.block_atom_index = block_atom_index
        self.components = components
        self.n_grid = n_grid
        self.n_freq = n_freq
        self.has_unitaries = False
        self._u_diag_cache: dict[int, np.ndarray] = {}

    @property
    def is_factored(self) -> bool:
        return self.components is not None

    @property
    def dilation_dim(self) -> int:
        if self.is_factored:
            return sum(c.measure.n_atoms * c.rank for c in self.components)
        return sum(f.shape[0] for f in self.block_factors)

    @property
    def n_atoms(self) -> int:
        if self.is_factored:
            return sum(c.measure.n_atoms for c in self.components)
        return int(self.block_atom_index.max()) + 1 if len(self.block_factors) else 0

    @property
    def clipped_mass(self) -> float:
        if self.is_factored:
            return float(sum(c.measure.clipped_mass for c in self.components))
        return 0.0

    def compress_monomial(self, k: Sequence[int]) -> np.ndarray:
        """``V* U^k V`` without materializing the dilation space."""
        k = tuple(int(kj) for kj in k)
        if len(k) != self.m:
            raise ValueError(f"multi-index must have {self.m} entries")
        out = np.zeros((self.d, self.d), dtype=complex)
        if self.is_factored:
            for c in self.components:
                out += c.measure.moment(k) * c.projection
            return out
        for coords, factor in zip(self.block_points, self.block_factors):
            scale = 1.0 + 0.0j
            for zj, kj in zip(coords, k):
                if kj:
                    scale *= zj ** float(kj)
            out += scale * (factor.conj().T @ factor)
        return out

    def unit_defect(self) -> float:
        return float(
            np.linalg.norm(self.compress_monomial((0,) * self.m) - np.eye(self.d), 2)
        )

    def compress_atom_projection(self, atom_index: int) -> np.ndarray:
        """``V* F(atom) V`` for one atom (explicit mode)."""
        if self.is_factored:
            raise ValueError("atom projections are indexed only in explicit mode")
        out = np.zeros((self.d, self.d), dtype=complex)
        for idx, factor in zip(self.block_atom_index, self.block_factors):
            if idx == atom_index:
                out += factor.conj().T @ factor
        return out

    def u_diag(self, j: int) -> np.ndarray:
        """Diagonal of ``U_j`` in the block order of ``V``."""
        if not self.has_unitaries:
            raise RuntimeError("unitaries not built yet; call build_ar_unitaries first")
        if j in self._u_diag_cache:
            return self._u_diag_cache[j]
        segments = []
        if self.is_factored:
            for c in self.components:
                coord = c.measure.points[:, j]
                segments.append(np.repeat(coord, c.rank))
        else:
            for coords, factor in zip(self.block_points, self.block_factors):
                segments.append(np.full(factor.shape[0], coords[j], dtype=complex))
        diag = np.concatenate(segments) if segments else np.empty(0, dtype=complex)
        self._u_diag_cache[j] = diag
        return diag

    def v_matrix(self, cap: int = DENSE_V_CAP) -> np.ndarray:
        """Dense ``(D, d)`` isometry (guarded by an entry cap)."""
        if self.dilation_dim * self.d > cap:
            raise ResourceLimitError(
                f"dense V would hold {self.dilation_dim * self.d} entries (cap {cap})"
            )
        rows = []
        if self.is_factored:
            for c in self.components:
                basis_h = c.basis.conj().T
                w = np.sqrt(np.maximum(c.measure.weights.real, 0.0))
                block = w[:, None, None] * basis_h[None, :, :]
                rows.append(block.reshape(-1, self.d))
        else:
            rows.extend(self.block_factors)
        return np.vstack(rows) if rows else np.empty((0, self.d), dtype=complex)

    def u_matrix(self, j: int, cap: int = DENSE_U_CAP) -> np.ndarray:
        """Dense diagonal ``U_j`` (guarded by a dimension cap)."""
        if self.dilation_dim > cap:
            raise ResourceLimitError(
                f"dense U_j would be {self.dilation_dim} x {self.dilation_dim} (cap {cap})"
            )
        return np.diag(self.u_diag(j))

    def atom_moduli(self) -> list[np.ndarray]:
        """Per-coordinate moduli of every atom coordinate in the support."""
        out = []
        if self.is_factored:
            for c in self.components:
                for part in c.measure.parts:
                    out.append(np.abs(part.points))
        else:
            for j in range(self.m):
                out.append(np.abs(np.asarray([p[j] for p in self.block_points])))
        return out


def naimark(ovm: BoundaryOVM, rank_tol: float = RANK_TOL) -> Dilation:
    """Dilate a positive operator measure to a projection-valued one.

    The dilation space is the direct sum over atoms of the ranges of the
    operator square roots (rank decided by ``rank_tol`` times the operator
    norm); ``V`` stacks the square-root factors, making ``V* F(atom) V`` the
    atom's operator and ``V* V`` the total mass, hence the identity for a
    unital measure.
    """
    if ovm.is_factored:
        components = []
        for c in ovm.components:
            parts = []
            for part in c.measure.parts:
                w = part.weights
                if w.min() < -1e-10:
                    raise PositivityError(
                        "component measure has a negative atom weight",
                        min_eigenvalue=float(w.min()),
                    )
                keep = w > 0.0
                parts.append(
                    DiscreteBoundaryMeasure(
                        part.points[keep],
                        w[keep],
                        part.circles[keep],
                        clipped_mass=part.clipped_mass,
                    )
                )
            measure = DiscretePolyMeasure.from_product(parts)
            components.append(OvmComponent(measure=measure, basis=c.basis))
        return Dilation(
            ovm.params, ovm.m, ovm.d, components=components
        )

    block_points = []
    block_factors = []
    block_atom_index = []
    for idx in range(ovm.points.shape[0]):
        a = ovm.operators[idx]
        vals, vecs = np.linalg.eigh((a + a.conj().T) / 2.0)
        if vals.min() < -1e-10:
            raise PositivityError(
                f"operator weight at atom {idx} has eigenvalue {vals.min():.3e}",
                min_eigenvalue=float(vals.min()),
            )
        norm_a = float(vals.max()) if vals.size else 0.0
        keep = vals > max(rank_tol * norm_a, 0.0)
        if not np.any(keep):
            continue
        factor = np.sqrt(vals[keep])[:, None] * vecs[:, keep].conj().T
        block_points.append(ovm.points[idx])
        block_factors.append(factor)
        block_atom_index.append(idx)
    return Dilation(
        ovm.params,
        ovm.m,
        ovm.d,
        block_points=block_points,
        block_factors=block_factors,
        block_atom_index=np.asarray(block_atom_index, dtype=int),
    )


def build_ar_unitaries(dilation: Dilation) -> Dilation:
    """Mark the coordinate multiplication unitaries as built.

    Each ``U_j`` is diagonal with the atoms' j-th coordinates, so it is normal
    with spectrum on the two boundary circles, and the ``U_j`` commute exactly.
    """
    for moduli in dilation.atom_moduli():
        off = np.minimum(np.abs(moduli - 1.0), np.abs(moduli - dilation.params.r))
        if off.size and float(off.max()) > 1e-9:
            raise PreconditionError(
                "an atom coordinate strays from the boundary circles",
                witness=float(off.max()),
            )
    dilation.has_unitaries = True
    return dilation


@dataclass(frozen=True)
class VerificationReport:
    """Residuals of the compression identity over a monomial box."""

    box_k: int
    residuals: np.ndarray  # shape (2K+1,)^m, index k + K per axis
    max_residual: float
    identity_residual: float
    n_grid: int | None = None
    n_freq: int | None = None
    clipped_mass: float = 0.0
    subspace_dim: int | None = None
    notes: dict = field(default_factory=dict)

    def residual(self, k: Sequence[int]) -> float:
        idx = tuple(int(kj) + self.box_k for kj in k)
        return float(self.residuals[idx])


def _as_matrices(matrices) -> list[np.ndarray]:
    if isinstance(matrices, MatrixTuple):
        return list(matrices.matrices)
    return [np.asarray(t, dtype=complex) for t in matrices]


def verify_dilation(
    matrices,
    dilation: Dilation,
    box_k: int = 3,
    subspace: np.ndarray | None = None,
    invariance_tol: float = 1e-8,
) -> VerificationReport:
    """Residuals ``|N^k - V* U^k V|`` over the full box ``|k_j| <= box_k``.

    Includes ``k = 0``, whose residual is ``|I - V* V|``.  Negative powers
    invert the unitaries atomwise (coordinate reciprocals) and the inputs via
    ``inv``.  With ``subspace`` (an isometric embedding ``W`` of a joint
    invariant subspace), the identity is checked in compression: the powers of
    the restricted tuple ``W* N_j W`` against ``W* (V* U^k V) W``; the defect
    of the restriction identity itself is reported in the notes.
    """
    mats = _as_matrices(matrices)
    if len(mats) != dilation.m:
        raise ValueError("tuple length disagrees with the dilation")
    notes: dict = {}
    if subspace is not None:
        w = np.asarray(subspace, dtype=complex)
        if w.ndim != 2 or w.shape[0] != dilation.d:
            raise ValueError("subspace embedding must be d x s")
        if np.linalg.norm(w.conj().T @ w - np.eye(w.shape[1])) > 1e-10:
            raise PreconditionError("subspace embedding is not an isometry")
        proj_out = np.eye(dilation.d) - w @ w.conj().T
        defects = [float(np.linalg.norm(proj_out @ t @ w, 2)) for t in mats]
        if max(defects) > invariance_tol:
            raise PreconditionError(
                "subspace is not jointly invariant", witness=max(defects)
            )
        targets = [w.conj().T @ t @ w for t in mats]
        notes["invariance_defect"] = max(defects)
        dim_check = w.shape[1]
    else:
        w = None
        targets = mats
        dim_check = dilation.d

    tables = [_power_table(t, box_k) for t in targets]
    shape = (2 * box_k + 1,) * dilation.m
    residuals = np.zeros(shape)
    restriction_defect = 0.0
    if w is not None:
        big_tables = [_power_table(t, box_k) for t in mats]
    for idx in np.ndindex(shape):
        k = tuple(i - box_k for i in idx)
        target = np.eye(dim_check, dtype=complex)
        for j, kj in enumerate(k):
            if kj:
                target = target @ tables[j][box_k + kj]
        compressed = dilation.compress_monomial(k)
        if w is not None:
            compressed = w.conj().T @ compressed @ w
            big = np.eye(dilation.d, dtype=complex)
            for j, kj in enumerate(k):
                if kj:
                    big = big @ big_tables[j][box_k + kj]
            restriction_defect = max(
                restriction_defect,
                float(np.linalg.norm(w.conj().T @ big @ w - target, 2)),
            )
        residuals[idx] = np.linalg.norm(target - compressed, 2)
    if w is not None:
        notes["restriction_defect"] = restriction_defect
    center = (box_k,) * dilation.m
    return VerificationReport(
        box_k=box_k,
        residuals=residuals,
        max_residual=float(residuals.max()),
        identity_residual=float(residuals[center]),
        n_grid=dilation.n_grid,
        n_freq=dilation.n_freq,
        clipped_mass=dilation.clipped_mass,
        subspace_dim=None if w is None else w.shape[1],
        notes=notes,
    )


def dilate_normal_tuple(
    matrices,
    params: AnnulusParams,
    n_grid: int = 256,
    n_freq: int = 64,
    box_k: int = 3,
    seed: int = 0,
) -> tuple[Dilation, VerificationReport]:
    """Full pipeline for a commuting normal tuple with spectrum in the domain.

    ``n_freq`` is clamped to the Nyquist order of the grid.  Inputs whose
    joint spectrum lies on the distinguished boundary dilate exactly (their
    measures are point masses inserted at the eigenvalues themselves).
    """
    mats = _as_matrices(matrices)
    decomp = joint_diagonalize(mats, seed=seed)
    n_freq_eff = max(1, min(n_freq, (n_grid - 1) // 2))
    ovm = boundary_ovm(decomp, params, n_grid=n_grid, n_freq=n_freq_eff)
    dil = naimark(ovm)
    dil.n_grid = n_grid
    dil.n_freq = n_freq_eff
    build_ar_unitaries(dil)
    report = verify_dilation(mats, dil, box_k=box_k)
    return dil, report


@dataclass(frozen=True)
class DC2Reduction:
    """Common triangular form of a doubly commuting family of 2x2 matrices.

    ``tag`` is "normal" when every member is diagonal in the common basis;
    otherwise exactly one member (``nonscalar_index``) is genuinely upper
    triangular and all others are scalar.
    """

    tag: Literal["normal", "reduced"]
    basis: np.ndarray
    triangles: tuple[tuple[complex, complex, complex], ...]  # (a, c, b) per member
    nonscalar_index: int | None = None
    scalars: dict = field(default_factory=dict)


def _is_exact_scalar(b: np.ndarray) -> bool:
    return b[0, 1] == 0 and b[1, 0] == 0 and b[0, 0] == b[1, 1]


def dc2_reduce(matrices, tol: float = 1e-10) -> DC2Reduction:
    """Verify double commutation and reduce to the forced structure.

    For a genuinely doubly commuting family in which some member has a nonzero
    superdiagonal, every other member must be a scalar multiple of the
    identity; the reduction recovers that index and the scalars.  Families
    violating double commutation are rejected with the offending pair and
    commutator norm.
    """
    mats = [np.asarray(b, dtype=complex) for b in matrices]
    for b in mats:
        if b.shape != (2, 2):
            raise ValueError("expected 2x2 matrices")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            scale = max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j]))
            comm = float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i]))
            if comm > tol * scale:
                raise NotDoublyCommutingError(
                    f"matrices {i} and {j} do not commute (norm {comm:.3e})",
                    pair=(i, j),
                    witness=comm,
                )
            adj = float(
                np.linalg.norm(mats[i] @ mats[j].conj().T - mats[j].conj().T @ mats[i])
            )
            if adj > tol * scale:
                raise NotDoublyCommutingError(
                    f"matrices {i} and {j} fail adjoint commutation (norm {adj:.3e})",
                    pair=(i, j),
                    witness=adj,
                )

    def near_scalar(b):
        mean = (b[0, 0] + b[1, 1]) / 2.0
        return np.linalg.norm(b - mean * np.eye(2)) <= tol * max(1.0, np.linalg.norm(b))

    nonscalar = [i for i, b in enumerate(mats) if not near_scalar(b)]
    if not nonscalar:
        triangles = tuple((b[0, 0], 0.0 + 0.0j, b[1, 1]) for b in mats)
        return DC2Reduction(
            tag="normal",
            basis=np.eye(2, dtype=complex),
            triangles=triangles,
            scalars={i: complex(b[0, 0]) for i, b in enumerate(mats)},
        )

    _, basis = scipy.linalg.schur(mats[nonscalar[0]], output="complex")
    tris = []
    for i, b in enumerate(mats):
        c = basis.conj().T @ b @ basis
        if abs(c[1, 0]) > tol * max(1.0, np.linalg.norm(b)):
            raise StructureError(
                f"matrix {i} is not triangular in the common basis "
                f"(lower entry {abs(c[1, 0]):.3e})"
            )
        tris.append((complex(c[0, 0]), complex(c[0, 1]), complex(c[1, 1])))

    with_super = [
        i for i, (a, c, b) in enumerate(tris) if abs(c) > tol * max(1.0, abs(a) + abs(b))
    ]
    if not with_super:
        return DC2Reduction(
            tag="normal",
            basis=basis,
            triangles=tuple(tris),
            scalars={},
        )
    if len(with_super) > 1:
        raise StructureError(
            f"two members ({with_super[0]}, {with_super[1]}) have nonzero "
            "superdiagonals; impossible under double commutation"
        )
    t = with_super[0]
    scalars = {}
    for i, (a, c, b) in enumerate(tris):
        if i == t:
            continue
        if abs(a - b) > tol * max(1.0, abs(a)):
            raise StructureError(
                f"member {i} has distinct diagonal alongside the nonscalar member "
                f"{t}; impossible under double commutation"
            )
        scalars[i] = complex(mats[i][0, 0]) if _is_exact_scalar(mats[i]) else (a + b) / 2.0
    return DC2Reduction(
        tag="reduced",
        basis=basis,
        triangles=tuple(tris),
        nonscalar_index=t,
        scalars=scalars,
    )


@dataclass(frozen=True)
class NotConstructive:
    """Certified non-normal case for which only existence of a dilation is known.

    Carries the structural reduction, the kernel-criterion verdict for the
    nonscalar member, and a sampled von Neumann report.  An annulus-unitary
    dilation of such a family exists by Agler's rational dilation theorem for
    the annulus, but no finite construction is performed here.
    """

    reduction: DC2Reduction
    certificate: str  # "yes" or "undetermined"
    misra: MisraBound | None
    von_neumann: VonNeumannReport
    note: str


def dilate_dc2(
    matrices,
    params: AnnulusParams,
    n_grid: int = 256,
    n_freq: int = 64,
    box_k: int = 3,
    terms: int = KERNEL_TERMS,
    tol: float = 1e-10,
    seed: int = 0,
):
    """Dilate a doubly commuting family of 2x2 contractions where possible.

    The normal branch (all superdiagonals vanish) delegates to
    `dilate_normal_tuple`.  Otherwise the single nonscalar member is certified
    as a contraction (kernel criterion plus von Neumann sampling) and a
    `NotConstructive` record is returned; failing certificates raise
    `NotContractionError`.
    """
    red = dc2_reduce(matrices, tol=tol)
    mats = [np.asarray(b, dtype=complex) for b in matrices]
    if red.tag == "normal":
        return dilate_normal_tuple(
            mats, params, n_grid=n_grid, n_freq=n_freq, box_k=box_k, seed=seed
        )

    t = red.nonscalar_index
    for i, s in red.scalars.items():
        if not (params.r - tol <= abs(s) <= 1.0 + tol):
            raise NotContractionError(
                f"scalar member {i} has modulus {abs(s)} outside the closed annulus"
            )
    a, c, b = red.triangles[t]
    vn = von_neumann_sample(
        params,
        MatrixTuple((mats[t],)),
        monomial_box_functions(1, 4),
        n_grid=max(64, n_grid // 4),
    )
    if vn.certified_not:
        raise NotContractionError(
            f"nonscalar member {t} violates the von Neumann inequality "
            f"(max ratio {vn.max_ratio:.6f})"
        )
    mb = None
    if abs(a - b) <= max(tol, EQ_DIAG_TOL) * max(1.0, abs(a)):
        w = (a + b) / 2.0
        tag = classify_point(params, w, tol)
        if tag == "outside":
            raise NotContractionError(
                f"nonscalar member {t} has spectrum {w} outside the closed annulus"
            )
        if tag != "interior":
            raise NotContractionError(
                f"nonscalar member {t} has boundary spectrum with a nilpotent part"
            )
        verdict = misra_check(params, w, c, terms)
        mb = misra_bound(params, w, terms)
        if verdict == "no":
            raise NotContractionError(
                f"nonscalar member {t} fails the kernel criterion: |c|={abs(c):.6f} "
                f"exceeds the bound {mb.bound:.6f}"
            )
        certificate = verdict
    else:
        certificate = "undetermined"
    note = (
        "the family reduces to one non-normal 2x2 member and scalars; an "
        "annulus-unitary dilation exists by Agler's rational dilation theorem, "
        "but no finite constructive procedure is implemented for this branch"
    )
    return NotConstructive(
        reduction=red,
        certificate=certificate,
        misra=mb,
        von_neumann=vn,
        note=note,
    )
