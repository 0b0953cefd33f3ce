"""Classification of matrices relative to the annulus.

Normal matrices are decided by their spectrum: contraction iff every
eigenvalue lies in the closed annulus, boundary-unitary iff every eigenvalue
modulus is 1 or r.  A non-normal 2x2 with equal diagonal ``[[w, c], [0, w]]``
is decided by the reproducing-kernel criterion: it is a contraction iff
``|c|`` does not exceed the reciprocal of the Hardy-kernel diagonal
``K(w) = sum_n |w|^{2n} / (1 + r^{2n})``.  Everything else gets a sampled
von Neumann report and an honest "undetermined".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.linalg

from .calculus import MatrixTuple, RationalFunction, eval_rational_matrix, monomial
from .errors import DomainError, PreconditionError, SingularityError
from .geometry import AnnulusParams, classify_point, poly_boundary_grid

Verdict = Literal["yes", "no", "undetermined"]

#: default number of kernel terms on each side of n = 0
KERNEL_TERMS = 200

#: eigenvalue-distance threshold for clustering in the joint diagonalization
CLUSTER_TOL = 1e-8

#: diagonal entries of a triangularized 2x2 within this are treated as equal;
#: a defective double eigenvalue splits by ~sqrt(eps) under conjugation noise
EQ_DIAG_TOL = 1e-6


def is_normal(t: np.ndarray, tol: float = 1e-10) -> bool:
    """Frobenius test of ``T T* = T* T`` relative to ``max(1, |T|_F^2)``."""
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("expected a square matrix")
    comm = np.linalg.norm(t @ t.conj().T - t.conj().T @ t)
    return bool(comm <= tol * max(1.0, np.linalg.norm(t) ** 2))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Joint eigenvalues and orthogonal eigenprojections of a commuting normal tuple.

    ``bases[i]`` holds orthonormal columns spanning the i-th joint eigenspace;
    ``projections[i] = bases[i] @ bases[i]*`` and the projections resolve the
    identity.
    """

    joint_eigenvalues: np.ndarray  # (p, m)
    bases: tuple[np.ndarray, ...]

    @property
    def projections(self) -> list[np.ndarray]:
        return [b @ b.conj().T for b in self.bases]

    @property
    def n_eigenvalues(self) -> int:
        return self.joint_eigenvalues.shape[0]

    @property
    def multiplicities(self) -> list[int]:
        return [b.shape[1] for b in self.bases]

    def reconstruct(self, j: int) -> np.ndarray:
        d = self.bases[0].shape[0]
        out = np.zeros((d, d), dtype=complex)
        for lam, b in zip(self.joint_eigenvalues[:, j], self.bases):
            out += lam * (b @ b.conj().T)
        return out


def _cluster_split(vals: np.ndarray) -> list[np.ndarray]:
    order = np.argsort(vals)
    scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
    groups = [[order[0]]]
    for idx in order[1:]:
        if vals[idx] - vals[groups[-1][-1]] <= CLUSTER_TOL * scale:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


def joint_diagonalize(
    matrices, tol: float = 1e-10, seed: int = 0
) -> SpectralDecomposition:
    """Common eigenbasis of commuting normal matrices.

    Diagonalizes a random real combination of the Hermitian and skew parts of
    all inputs, then refines any residual eigenvalue cluster recursively with
    fresh random combinations (falling back to splitting on the individual
    parts).  Deterministic for a fixed seed.
    """
    if isinstance(matrices, MatrixTuple):
        mats = list(matrices.matrices)
    else:
        mats = [np.asarray(t, dtype=complex) for t in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    d = mats[0].shape[0]
    for i, t in enumerate(mats):
        if t.shape != (d, d):
            raise ValueError("matrices must share a square shape")
        if not is_normal(t, tol):
            witness = float(np.linalg.norm(t @ t.conj().T - t.conj().T @ t))
            raise PreconditionError(f"matrix {i} is not normal", witness=witness)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = float(np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i]))
            if comm > tol * max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j])):
                raise PreconditionError(
                    f"matrices {i} and {j} do not commute", witness=comm
                )

    parts = []
    for t in mats:
        parts.append((t + t.conj().T) / 2.0)
        parts.append((t - t.conj().T) / 2.0j)
    rng = np.random.default_rng(seed)

    def split(basis: np.ndarray, depth: int) -> list[np.ndarray]:
        s = basis.shape[1]
        if s == 1:
            return [basis]
        compressed = [basis.conj().T @ p @ basis for p in parts]
        # a cluster on which every part acts as a scalar is a joint eigenspace
        if all(
            np.linalg.norm(c - (np.trace(c) / s) * np.eye(s))
            <= CLUSTER_TOL * max(1.0, np.linalg.norm(c))
            for c in compressed
        ):
            return [basis]
        if depth < 6:
            weights = rng.standard_normal(len(compressed))
            h = sum(w * c for w, c in zip(weights, compressed))
        else:
            # deterministic fallback: split on the first non-scalar part
            h = next(
                c
                for c in compressed
                if np.linalg.norm(c - (np.trace(c) / s) * np.eye(s))
                > CLUSTER_TOL * max(1.0, np.linalg.norm(c))
            )
        vals, vecs = np.linalg.eigh((h + h.conj().T) / 2.0)
        groups = _cluster_split(vals)
        if len(groups) == 1:
            return split(basis, depth + 1)
        leaves = []
        for g in groups:
            leaves.extend(split(basis @ vecs[:, g], depth + 1))
        return leaves

    bases = split(np.eye(d, dtype=complex), 0)
    eigenvalues = np.empty((len(bases), len(mats)), dtype=complex)
    for i, b in enumerate(bases):
        for j, t in enumerate(mats):
            eigenvalues[i, j] = np.trace(b.conj().T @ t @ b) / b.shape[1]
    decomp = SpectralDecomposition(joint_eigenvalues=eigenvalues, bases=tuple(bases))
    for j, t in enumerate(mats):
        err = np.linalg.norm(decomp.reconstruct(j) - t, 2)
        if err > 1e-9 * max(1.0, np.linalg.norm(t, 2)):
            raise PreconditionError(
                f"joint diagonalization failed to reconstruct matrix {j}",
                witness=float(err),
            )
    return decomp


@dataclass(frozen=True)
class MisraBound:
    """Partial kernel sum, the induced superdiagonal bound, and its truncation error."""

    k_hat: float
    bound: float
    truncation_error: float
    terms: int


def misra_bound(params: AnnulusParams, w: complex, terms: int = KERNEL_TERMS) -> MisraBound:
    """Diagonal of the annulus Hardy kernel at ``w`` and the induced bound.

    ``k_hat`` is the symmetric partial sum of ``|w|^{2n} / (1 + r^{2n})`` over
    ``|n| <= terms``; the truncation error bounds the two geometric tails.  The
    kernel diverges as ``w`` approaches either circle, so ``w`` must be a
    strict interior point.
    """
    if terms < 1:
        raise ValueError("terms must be at least 1")
    w = complex(w)
    if classify_point(params, w) != "interior":
        raise DomainError(
            f"kernel bound requires a strict interior point, got |w|={abs(w)}"
        )
    a = abs(w) ** 2
    b = params.r**2
    ns = np.arange(1, terms + 1, dtype=float)
    denom = 1.0 + b**ns
    k_hat = 0.5 + float(np.sum((a**ns + (b / a) ** ns) / denom))
    trunc = a ** (terms + 1) / (1.0 - a) + (b / a) ** (terms + 1) / (1.0 - b / a)
    return MisraBound(
        k_hat=k_hat, bound=1.0 / k_hat, truncation_error=float(trunc), terms=terms
    )


def misra_check(
    params: AnnulusParams, w: complex, c: complex, terms: int = KERNEL_TERMS
) -> Verdict:
    """Certified test of ``[[w, c], [0, w]]`` against the kernel bound.

    "yes" and "no" are conservative: the truncation error is charged against
    the answer, so both verdicts hold for the exact kernel; anything inside the
    uncertainty band is "undetermined".
    """
    if c == 0:
        return "yes"
    mb = misra_bound(params, w, terms)
    # the exact kernel value is >= k_hat, so 1/(k_hat + err) underestimates the bound
    certified_lo = min(mb.bound - mb.truncation_error, 1.0 / (mb.k_hat + mb.truncation_error))
    if abs(c) <= certified_lo:
        return "yes"
    if abs(c) > mb.bound + mb.truncation_error:
        return "no"
    return "undetermined"


@dataclass(frozen=True)
class VonNeumannEntry:
    label: str
    op_norm: float
    boundary_sup: float

    @property
    def ratio(self) -> float:
        return self.op_norm / self.boundary_sup


@dataclass(frozen=True)
class VonNeumannReport:
    entries: tuple[VonNeumannEntry, ...]
    tol: float = 1e-9

    @property
    def max_ratio(self) -> float:
        return max(e.ratio for e in self.entries)

    @property
    def certified_not(self) -> bool:
        """A single ratio above ``1 + tol`` certifies the tuple is not a contraction."""
        return self.max_ratio > 1.0 + self.tol


def von_neumann_sample(
    params: AnnulusParams,
    t: MatrixTuple,
    functions: Sequence[tuple[str, RationalFunction]] | Sequence[RationalFunction],
    n_grid: int = 64,
    tol: float = 1e-9,
) -> VonNeumannReport:
    """Compare ``|f(T)|`` with the sup of ``|f|`` over a distinguished-boundary grid.

    The sup of a modulus over the closed product domain is attained on the
    distinguished boundary, so the grid maximum is the right yardstick.  Ratios
    above ``1 + tol`` certify failure; ratios below one are evidence only.
    """
    grid = poly_boundary_grid(params, t.m, n_grid)
    entries = []
    for item in functions:
        label, f = item if isinstance(item, tuple) else (repr(item), item)
        sup = float(np.max(np.abs(f(grid.points))))
        norm = float(np.linalg.norm(eval_rational_matrix(f, t), 2))
        entries.append(VonNeumannEntry(label=label, op_norm=norm, boundary_sup=sup))
    return VonNeumannReport(entries=tuple(entries), tol=tol)


def monomial_box_functions(m: int, box_k: int) -> list[tuple[str, RationalFunction]]:
    """All monomials ``z^k`` with ``|k_j| <= box_k`` except ``k = 0``."""
    import itertools

    out = []
    for k in itertools.product(range(-box_k, box_k + 1), repeat=m):
        if any(k):
            out.append((f"z^{k}", monomial(m, k)))
    return out


@dataclass(frozen=True)
class ArClassification:
    is_normal: bool
    is_ar_contraction: Verdict
    is_ar_unitary: bool
    witnesses: dict = field(default_factory=dict)


def classify_ar(
    params: AnnulusParams,
    t: np.ndarray,
    tol: float = 1e-10,
    terms: int = KERNEL_TERMS,
    vn_box: int = 4,
    vn_grid: int = 64,
) -> ArClassification:
    """Three-valued contraction verdict with diagnostics.

    Normal matrices are decided exactly by their spectrum.  Non-normal 2x2
    matrices with equal diagonal go through the kernel criterion.  For anything
    else no decidable criterion is available, so the verdict is
    "undetermined" unless the sampled von Neumann report already certifies
    failure.
    """
    t = np.asarray(t, dtype=complex)
    witnesses: dict = {}
    normal = is_normal(t, tol)
    eigvals = np.linalg.eigvals(t)
    moduli = np.abs(eigvals)
    witnesses["eigenvalue_moduli"] = sorted(float(x) for x in moduli)

    if float(moduli.min()) <= tol:
        witnesses["singular"] = float(moduli.min())
        return ArClassification(normal, "no", False, witnesses)

    if normal:
        inside = bool(np.all(moduli >= params.r - tol) and np.all(moduli <= 1.0 + tol))
        on_boundary = bool(
            np.all((np.abs(moduli - 1.0) <= tol) | (np.abs(moduli - params.r) <= tol))
        )
        if not inside:
            witnesses["spectrum_outside"] = [
                float(x) for x in moduli if not (params.r - tol <= x <= 1.0 + tol)
            ]
        return ArClassification(normal, "yes" if inside else "no", on_boundary, witnesses)

    if t.shape == (2, 2):
        tri, _ = scipy.linalg.schur(t, output="complex")
        a, c, b = tri[0, 0], tri[0, 1], tri[1, 1]
        witnesses["triangular_form"] = [complex(a), complex(c), complex(b)]
        if abs(a - b) <= max(tol, EQ_DIAG_TOL) * max(1.0, abs(a)):
            w = (a + b) / 2.0
            tag = classify_point(params, w, tol)
            if tag == "outside":
                return ArClassification(normal, "no", False, witnesses)
            if tag != "interior":
                # boundary diagonal with a nonzero nilpotent part pushes |T| or
                # |r T^{-1}| above the boundary sup of z or r/z
                witnesses["boundary_diagonal"] = complex(w)
                return ArClassification(normal, "no", False, witnesses)
            verdict = misra_check(params, w, c, terms)
            mb = misra_bound(params, w, terms)
            witnesses["misra"] = {
                "w": complex(w),
                "c": complex(c),
                "k_hat": mb.k_hat,
                "bound": mb.bound,
                "truncation_error": mb.truncation_error,
            }
            return ArClassification(normal, verdict, False, witnesses)

    try:
        tup = MatrixTuple((t,))
        report = von_neumann_sample(
            params, tup, monomial_box_functions(1, vn_box), n_grid=vn_grid
        )
        witnesses["von_neumann_max_ratio"] = report.max_ratio
        if report.certified_not:
            return ArClassification(normal, "no", False, witnesses)
    except (SingularityError, PreconditionError) as exc:
        witnesses["von_neumann_error"] = str(exc)
    return ArClassification(normal, "undetermined", False, witnesses)


@dataclass(frozen=True)
class ArUnitaryDecomposition:
    """Conjugating unitary and the two unitary blocks ``Q* N Q = U1 (+) r U2``."""

    q: np.ndarray
    u_outer: np.ndarray
    u_inner: np.ndarray


def ar_unitary_decompose(
    params: AnnulusParams, n: np.ndarray, tol: float = 1e-10
) -> ArUnitaryDecomposition:
    """Split a boundary-unitary normal matrix into its two circle blocks.

    Returns ``Q`` and unitaries ``U1`` (outer circle part) and ``U2`` with
    ``Q* N Q = diag(U1, r U2)``; either block may be empty.
    """
    n = np.asarray(n, dtype=complex)
    if not is_normal(n, max(tol, 1e-10)):
        raise PreconditionError(
            "matrix is not normal",
            witness=float(np.linalg.norm(n @ n.conj().T - n.conj().T @ n)),
        )
    tri, z = scipy.linalg.schur(n, output="complex")
    diag = np.diag(tri)
    moduli = np.abs(diag)
    outer = np.abs(moduli - 1.0) <= tol
    inner = np.abs(moduli - params.r) <= tol
    bad = ~(outer | inner)
    if np.any(bad):
        raise PreconditionError(
            "matrix is not a boundary unitary; offending eigenvalue moduli "
            f"{sorted(float(x) for x in moduli[bad])}",
            witness=sorted(float(x) for x in moduli[bad]),
        )
    order = np.concatenate([np.flatnonzero(outer), np.flatnonzero(inner)])
    q = z[:, order]
    n_out = int(np.count_nonzero(outer))
    q1, q2 = q[:, :n_out], q[:, n_out:]
    u_outer = q1.conj().T @ n @ q1
    u_inner = (q2.conj().T @ n @ q2) / params.r
    return ArUnitaryDecomposition(q=q, u_outer=u_outer, u_inner=u_inner)


def involution_r_inverse(params: AnnulusParams, t: np.ndarray) -> np.ndarray:
    """The involution ``T -> r T^{-1}``; applying it twice returns ``T``."""
    t = np.asarray(t, dtype=complex)
    sv = np.linalg.svd(t, compute_uv=False)
    if sv[-1] <= 1e-14 * max(1.0, sv[0]):
        raise SingularityError("matrix is singular; r T^{-1} undefined")
    return params.r * np.linalg.inv(t)
