"""Laurent series and matrix functional calculus over the product annulus.

Rational functions with pole-free denominators on the closed product domain
expand into absolutely convergent Laurent series there.  Coefficients are
recovered by sampling on a torus of intermediate radius and scaling the FFT;
matrix evaluation sums memoized monomial powers (negative powers via matrix
inverses), which works for non-normal inputs as well.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    MatrixPoleError,
    PreconditionError,
    RationalPoleError,
    SingularityError,
)
from .geometry import AnnulusParams

#: minimum admissible |denominator| on the certification grid
DENOMINATOR_FLOOR = 1e-6

#: multiplicative safety factor on the extrapolated series tail
TAIL_MARGIN = 3.0

MultiIndex = tuple[int, ...]


def _as_points(z, m: int) -> tuple[np.ndarray, bool]:
    """Normalize to shape (..., m); a length-m sequence (or scalar, m=1) is one point."""
    pts = np.asarray(z, dtype=complex)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
        scalar = True
    elif pts.ndim == 1:
        pts = pts[None, :]
        scalar = True
    else:
        scalar = False
    if pts.shape[-1] != m:
        raise ValueError(f"points must have {m} coordinates")
    return pts, scalar


def _eval_poly(coeffs: Mapping[MultiIndex, complex], pts: np.ndarray) -> np.ndarray:
    """Evaluate a coefficient map at points of shape (..., m)."""
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for k, c in coeffs.items():
        term = np.full(pts.shape[:-1], c, dtype=complex)
        for j, kj in enumerate(k):
            if kj:
                term = term * pts[..., j] ** float(kj)
        out += term
    return out


@dataclass(frozen=True)
class RationalFunction:
    """Quotient ``p/q`` of polynomial coefficient maps over m variables.

    Keys are multi-degrees (tuples of nonnegative ints), values complex
    coefficients.  When ``params`` is given at construction, the denominator is
    certified numerically to be zero-free on the closed product annulus.
    """

    numer: Mapping[MultiIndex, complex]
    denom: Mapping[MultiIndex, complex]
    m: int
    params: AnnulusParams | None = None

    def __post_init__(self):
        for coeffs in (self.numer, self.denom):
            for k in coeffs:
                if len(k) != self.m or any(kj < 0 for kj in k):
                    raise ValueError(f"bad multi-degree {k!r} for m={self.m}")
        if not self.denom:
            raise ValueError("denominator must have at least one term")
        if self.params is not None:
            floor = denominator_min_modulus(self.params, self)
            if floor <= DENOMINATOR_FLOOR:
                raise RationalPoleError(
                    f"denominator dips to {floor:.3e} on the closed domain grid"
                )

    def __call__(self, z):
        pts, scalar = _as_points(z, self.m)
        num = _eval_poly(self.numer, pts)
        den = _eval_poly(self.denom, pts)
        values = num / den
        return complex(values[0]) if scalar else values

    def denominator_values(self, pts: np.ndarray) -> np.ndarray:
        return _eval_poly(self.denom, pts)


def _univariate_roots_in_domain(params: AnnulusParams, denom) -> list[complex]:
    """Roots of a one-variable denominator in (or within 1e-6 of) the closed annulus.

    The torus grid of `denominator_min_modulus` can miss zeros sitting between
    the sampled radii; in one variable the roots are available exactly.
    """
    deg = max(k[0] for k in denom)
    if deg == 0:
        return []
    c = np.zeros(deg + 1, dtype=complex)
    for (k,), v in denom.items():
        c[deg - k] = v
    return [
        complex(z)
        for z in np.roots(c)
        if params.r - 1e-6 <= abs(z) <= 1.0 + 1e-6
    ]


def denominator_min_modulus(
    params: AnnulusParams, f: RationalFunction, n_angles: int | None = None
) -> float:
    """Minimum |q| over tori with per-axis radii in {r, sqrt(r), 1}."""
    if n_angles is None:
        n_angles = 256 if f.m <= 2 else max(8, int(round(256 ** (2.0 / f.m))))
    radii = (params.r, math.sqrt(params.r), 1.0)
    angles = np.exp(2j * np.pi * np.arange(n_angles) / n_angles)
    floor = math.inf
    for combo in itertools.product(radii, repeat=f.m):
        mesh = np.meshgrid(*[rho * angles for rho in combo], indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=1)
        floor = min(floor, float(np.min(np.abs(f.denominator_values(pts)))))
    return floor


def monomial(m: int, k: Sequence[int]) -> RationalFunction:
    """The monomial ``z^k`` as a rational function (negative powers go downstairs)."""
    k = tuple(int(kj) for kj in k)
    num = tuple(max(kj, 0) for kj in k)
    den = tuple(max(-kj, 0) for kj in k)
    return RationalFunction(numer={num: 1.0}, denom={den: 1.0}, m=m)


@dataclass(frozen=True)
class MatrixTuple:
    """Commuting invertible square matrices of a shared dimension."""

    matrices: tuple[np.ndarray, ...]
    commute_tol: float = 1e-10

    def __post_init__(self):
        mats = tuple(np.asarray(t, dtype=complex) for t in self.matrices)
        if not mats:
            raise ValueError("at least one matrix required")
        d = mats[0].shape[0]
        for t in mats:
            if t.ndim != 2 or t.shape != (d, d):
                raise ValueError("matrices must be square and share a dimension")
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                comm = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i])
                scale = max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j]))
                if comm > self.commute_tol * scale:
                    raise PreconditionError(
                        f"matrices {i} and {j} do not commute", witness=float(comm)
                    )
        for i, t in enumerate(mats):
            sv = np.linalg.svd(t, compute_uv=False)
            if sv[-1] <= 1e-12 * max(1.0, sv[0]):
                raise SingularityError(f"matrix {i} is numerically singular")
        object.__setattr__(self, "matrices", mats)

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def d(self) -> int:
        return self.matrices[0].shape[0]


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated Laurent coefficients on the box ``[-K, K]^m``.

    ``coeffs[i_1, ..., i_m]`` is the coefficient of ``z^k`` with
    ``k_j = i_j - K``; ``sample_radius`` is the torus radius used to extract
    them.
    """

    coeffs: np.ndarray
    box_k: int
    m: int
    sample_radius: float

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        expected = (2 * self.box_k + 1,) * self.m
        if arr.shape != expected:
            raise ValueError(f"coefficient tensor must have shape {expected}")
        object.__setattr__(self, "coeffs", arr)

    def coeff(self, k: Sequence[int]) -> complex:
        idx = tuple(int(kj) + self.box_k for kj in k)
        return complex(self.coeffs[idx])


def laurent_coeffs(
    params: AnnulusParams,
    f: RationalFunction,
    box_k: int = 32,
    sample_radius: float | None = None,
    samples_per_axis: int | None = None,
) -> LaurentSeries:
    """Laurent coefficients of ``f`` from FFT of torus samples.

    Samples ``f`` on the torus of radius ``rho`` (default ``sqrt(r)``, which
    balances the growth of ``rho^{-k}`` against ``rho^{k}``) and divides the
    FFT by ``rho^{k_1 + ... + k_m}``.  Exact for Laurent polynomials supported
    in the box; oversampling (default ``4*box_k + 16`` per axis) keeps the
    aliased tail of true rationals far below coefficient size.
    """
    rho = math.sqrt(params.r) if sample_radius is None else float(sample_radius)
    if not params.r < rho < 1.0:
        raise ValueError(f"sample radius must lie strictly inside ({params.r}, 1)")
    n_samp = samples_per_axis or max(2 * box_k + 2, 4 * box_k + 16)
    if n_samp < 2 * box_k + 2:
        raise ValueError(f"need at least {2 * box_k + 2} samples per axis")
    floor = denominator_min_modulus(params, f)
    angles = rho * np.exp(2j * np.pi * np.arange(n_samp) / n_samp)
    mesh = np.meshgrid(*([angles] * f.m), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    den = f.denominator_values(pts)
    if floor <= DENOMINATOR_FLOOR or np.min(np.abs(den)) <= DENOMINATOR_FLOOR:
        raise RationalPoleError("denominator vanishes near the sampling torus")
    values = _eval_poly(f.numer, pts) / den
    spectrum = np.fft.fftn(values) / values.size
    ks = np.arange(-box_k, box_k + 1)
    box = spectrum[np.ix_(*([ks % n_samp] * f.m))]
    scale_1d = rho ** (-ks.astype(float))
    for axis in range(f.m):
        shape = [1] * f.m
        shape[axis] = 2 * box_k + 1
        box = box * scale_1d.reshape(shape)
    return LaurentSeries(coeffs=box, box_k=box_k, m=f.m, sample_radius=rho)


def _axis_powers(z: np.ndarray, box_k: int) -> np.ndarray:
    ks = np.arange(-box_k, box_k + 1)
    return z[..., None] ** ks.astype(float)


def eval_series_scalar(s: LaurentSeries, z) -> complex:
    """Sum the truncated series at a point (length-m sequence) or (..., m) array."""
    pts, scalar = _as_points(z, s.m)
    letters = "abcdefghijklmnopqrstuvwxyz"[: s.m]
    subscript = ",".join(f"...{c}" for c in letters) + "," + letters + "->..."
    mats = [_axis_powers(pts[..., j], s.box_k) for j in range(s.m)]
    values = np.einsum(subscript, *mats, s.coeffs)
    return complex(values[0]) if scalar else values


def _power_table(t: np.ndarray, box_k: int, t_inv: np.ndarray | None = None) -> np.ndarray:
    """Stack ``t^p`` for ``p = -box_k .. box_k`` by repeated multiplication."""
    d = t.shape[0]
    table = np.empty((2 * box_k + 1, d, d), dtype=complex)
    table[box_k] = np.eye(d)
    for p in range(1, box_k + 1):
        table[box_k + p] = table[box_k + p - 1] @ t
    if box_k > 0:
        if t_inv is None:
            try:
                t_inv = np.linalg.inv(t)
            except np.linalg.LinAlgError as exc:
                raise SingularityError("matrix is singular; negative powers undefined") from exc
        for p in range(1, box_k + 1):
            table[box_k - p] = table[box_k - p + 1] @ t_inv
    return table


def eval_series_matrix(s: LaurentSeries, t: MatrixTuple) -> np.ndarray:
    """Sum ``f_k T_1^{k_1} ... T_m^{k_m}`` over the coefficient box."""
    if t.m != s.m:
        raise ValueError("series and tuple disagree on the number of variables")
    tables = [_power_table(mat, s.box_k) for mat in t.matrices]
    acc = np.tensordot(s.coeffs, tables[-1], axes=([s.m - 1], [0]))
    for j in range(s.m - 2, -1, -1):
        # the box axis of variable j is always the last one left
        acc = np.einsum("kab,...kbc->...ac", tables[j], acc)
    return acc


def eval_rational_matrix(f: RationalFunction, t: MatrixTuple) -> np.ndarray:
    """Direct evaluation ``p(T) q(T)^{-1}``."""
    if t.m != f.m:
        raise ValueError("function and tuple disagree on the number of variables")
    deg = 0
    for coeffs in (f.numer, f.denom):
        for k in coeffs:
            deg = max(deg, max(k) if k else 0)
    tables = [_power_table(mat, deg) for mat in t.matrices]

    def poly_mat(coeffs):
        out = np.zeros((t.d, t.d), dtype=complex)
        for k, c in coeffs.items():
            term = np.eye(t.d, dtype=complex) * c
            for j, kj in enumerate(k):
                if kj:
                    term = term @ tables[j][deg + kj]
            out += term
        return out

    p_mat = poly_mat(f.numer)
    q_mat = poly_mat(f.denom)
    sv = np.linalg.svd(q_mat, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise MatrixPoleError("denominator is singular on this tuple (pole meets spectrum)")
    return np.linalg.solve(q_mat.conj().T, p_mat.conj().T).conj().T


def tuple_norms(params: AnnulusParams, t: MatrixTuple) -> list[tuple[float, float]]:
    """Per-coordinate pair (forward norm ``|T_j|``, backward norm ``|r T_j^{-1}|``)."""
    out = []
    for mat in t.matrices:
        sv = np.linalg.svd(mat, compute_uv=False)
        out.append((float(sv[0]), float(params.r / sv[-1])))
    return out


def tail_bound(
    params: AnnulusParams,
    s: LaurentSeries,
    norms: Sequence[tuple[float, float]],
) -> float:
    """Conservative bound on the series tail outside the box.

    Weighs coefficients by the monomial norms implied by ``norms`` (forward
    powers by the forward norm, negative powers by ``backward/r`` per step),
    sums them over max-degree shells, fits a geometric decay ratio to the
    outermost shells, and extrapolates with a safety margin.  Non-decaying
    shells yield ``inf`` with a warning.
    """
    if len(norms) != s.m:
        raise ValueError("need one norm pair per variable")
    ks = np.arange(-s.box_k, s.box_k + 1)
    weighted = np.abs(s.coeffs)
    for j, (fwd, bwd) in enumerate(norms):
        if fwd <= 0 or bwd <= 0:
            raise ValueError("norms must be positive")
        axis_w = np.where(ks >= 0, fwd ** np.maximum(ks, 0), (bwd / params.r) ** np.maximum(-ks, 0))
        shape = [1] * s.m
        shape[j] = ks.size
        weighted = weighted * axis_w.reshape(shape)
    shell_idx = np.abs(ks)
    level = shell_idx
    for j in range(1, s.m):
        shape_a = level.reshape(level.shape + (1,))
        level = np.maximum(shape_a, shell_idx)
    shells = np.bincount(level.ravel(), weights=weighted.ravel(), minlength=s.box_k + 1)

    # weighted shells at roundoff level are treated as exact zeros, so a
    # Laurent polynomial (whose outer coefficients are FFT noise) gets tail 0
    floor = max(1e-10, 1e-13 * float(shells.max()))
    window = shells[max(0, s.box_k - 3) :]
    if np.all(window <= floor):
        return 0.0
    nonzero = [(i, v) for i, v in enumerate(window) if v > floor]
    ratios = []
    for (ia, va), (ib, vb) in itertools.combinations(nonzero, 2):
        ratios.append((vb / va) ** (1.0 / (ib - ia)))
    if not ratios:
        warnings.warn("single nonzero outer shell: no decay evidence, tail unbounded")
        return math.inf
    q = max(ratios)
    if q >= 1.0:
        warnings.warn("outer coefficient shells are not decaying; tail bound is infinite")
        return math.inf
    base_level, base = max(nonzero)
    gap = len(window) - 1 - base_level  # shells between the base and the box edge
    return float(TAIL_MARGIN * base * q ** (gap + 1) / (1.0 - q))
