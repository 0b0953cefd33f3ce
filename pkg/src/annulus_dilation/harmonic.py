"""Dirichlet problem on the annulus via frequency matching.

A harmonic function on ``r < |z| < 1`` decomposes over angular frequencies:
the frequency-n part is ``(a_n rho^n + b_n rho^{-n}) e^{i n theta}`` for
``n != 0`` and ``a_0 + b_0 log(rho)`` for ``n = 0``.  Matching boundary data
given by Fourier coefficients on the two circles is a 2x2 linear solve per
frequency, which is never singular for ``0 < r < 1``.

The same frequency responses yield discrete harmonic measures: weights on a
uniform boundary grid that reproduce ``u(lambda)`` exactly for every harmonic
function with band-limited boundary trace.  These weights are the engine
behind the boundary measures used by the dilation construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AliasingError, DomainError, TruncationOrderError
from .geometry import INNER, OUTER, AnnulusParams, BoundaryAtom, classify_point

log = logging.getLogger(__name__)

#: circle codes used in array form
CIRCLE_OUTER = 0
CIRCLE_INNER = 1

#: weights more negative than this trigger the frequency-order raise / clipping
NEGATIVE_WEIGHT_FLOOR = -1e-8

#: largest |n| * log(1/r) for which rho**(-n) stays far from overflow
_MAX_LOG_POWER = 650.0


def fourier_coeffs(samples: Sequence[complex], order: int) -> np.ndarray:
    """Trapezoidal Fourier analysis of equispaced circle samples.

    Returns coefficients for frequencies ``-order..order`` (index ``n + order``),
    computed as ``(1/M) sum_j samples[j] exp(-2 pi i j n / M)``.  Exact for
    trigonometric polynomials of degree <= order when ``M >= 2*order + 1``.
    """
    x = np.asarray(samples, dtype=complex)
    if x.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    n_samp = x.shape[0]
    if n_samp < 2 * order + 1:
        raise AliasingError(
            f"{n_samp} samples cannot resolve frequency order {order}; "
            f"need at least {2 * order + 1}"
        )
    spectrum = np.fft.fft(x) / n_samp
    ns = np.arange(-order, order + 1)
    return spectrum[ns % n_samp]


def _check_order(params: AnnulusParams, order: int) -> None:
    if order * math.log(1.0 / params.r) > _MAX_LOG_POWER:
        raise TruncationOrderError(
            f"frequency order {order} overflows radial powers at r={params.r}"
        )


@dataclass(frozen=True)
class BoundaryData1D:
    """Fourier coefficients of boundary data on the two circles.

    ``g_coeffs[n + N]`` is the frequency-n coefficient of the data on the unit
    circle, ``h_coeffs`` the same for the circle of radius r (parametrized by
    angle, i.e. the value at ``r e^{i theta}``).
    """

    g_coeffs: np.ndarray
    h_coeffs: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g_coeffs, dtype=complex)
        h = np.asarray(self.h_coeffs, dtype=complex)
        if g.shape != h.shape or g.ndim != 1 or g.shape[0] % 2 != 1:
            raise ValueError("coefficient arrays must share an odd 1-d shape")
        object.__setattr__(self, "g_coeffs", g)
        object.__setattr__(self, "h_coeffs", h)

    @property
    def order(self) -> int:
        return (self.g_coeffs.shape[0] - 1) // 2

    @property
    def is_real(self) -> bool:
        """True when both traces are real-valued (conjugate-symmetric coefficients)."""
        g, h = self.g_coeffs, self.h_coeffs
        return bool(
            np.allclose(g, g[::-1].conj(), atol=1e-13)
            and np.allclose(h, h[::-1].conj(), atol=1e-13)
        )

    @classmethod
    def from_samples(cls, g_samples, h_samples, order: int) -> "BoundaryData1D":
        return cls(fourier_coeffs(g_samples, order), fourier_coeffs(h_samples, order))


@dataclass(frozen=True)
class HarmonicFunction1D:
    """Frequency-domain harmonic extension on the closed annulus.

    For ``n != 0`` the pair ``(a[n+N], b[n+N])`` multiplies ``rho^n`` and
    ``rho^{-n}``; at ``n = 0`` it multiplies 1 and ``log(rho)``.
    """

    r: float
    a: np.ndarray
    b: np.ndarray
    is_real: bool = True

    @property
    def order(self) -> int:
        return (self.a.shape[0] - 1) // 2


def solve_dirichlet_1d(params: AnnulusParams, data: BoundaryData1D) -> HarmonicFunction1D:
    """Match boundary coefficients per frequency.

    For ``n != 0`` solves ``a + b = g_n`` and ``a r^n + b r^{-n} = h_n``; the
    determinant ``r^{-n} - r^n`` is nonzero for every ``0 < r < 1``.  At
    ``n = 0``: ``a_0 = g_0`` and ``b_0 = (h_0 - g_0)/log(r)``.
    """
    n_ord = data.order
    _check_order(params, n_ord)
    r = params.r
    ns = np.arange(-n_ord, n_ord + 1)
    q = r ** np.abs(ns).astype(float)
    g, h = data.g_coeffs, data.h_coeffs
    den = 1.0 - q * q
    a = np.empty_like(g)
    b = np.empty_like(g)
    pos = ns > 0
    neg = ns < 0
    # stable forms: only q = r^{|n|} <= 1 appears
    a[pos] = (g[pos] - h[pos] * q[pos]) / den[pos]
    b[pos] = q[pos] * (h[pos] - g[pos] * q[pos]) / den[pos]
    a[neg] = q[neg] * (h[neg] - g[neg] * q[neg]) / den[neg]
    b[neg] = (g[neg] - h[neg] * q[neg]) / den[neg]
    a[n_ord] = g[n_ord]
    b[n_ord] = (h[n_ord] - g[n_ord]) / math.log(r)
    return HarmonicFunction1D(r=r, a=a, b=b, is_real=data.is_real)


def eval_harmonic_1d(u: HarmonicFunction1D, z, tol: float = 1e-10):
    """Evaluate the extension at points of the closed annulus.

    Accepts a scalar or an array of points.  Real-valued data yields real
    output.
    """
    params = AnnulusParams(u.r)
    zs = np.asarray(z, dtype=complex)
    scalar = zs.ndim == 0
    zs = np.atleast_1d(zs)
    rho = np.abs(zs)
    if np.any(rho < u.r - tol) or np.any(rho > 1.0 + tol):
        raise DomainError("evaluation point outside the closed annulus")
    rho = np.clip(rho, params.r, 1.0)
    theta = np.angle(zs)
    n_ord = u.order
    ns = np.arange(-n_ord, n_ord + 1)
    radial = rho[:, None] ** ns[None, :]  # rho^n, n signed
    radial_inv = radial[:, ::-1]  # rho^{-n}
    terms = u.a[None, :] * radial + u.b[None, :] * radial_inv
    # n = 0 slot means a_0 + b_0 log(rho)
    terms[:, n_ord] = u.a[n_ord] + u.b[n_ord] * np.log(rho)
    values = np.sum(terms * np.exp(1j * np.outer(theta, ns)), axis=1)
    if u.is_real:
        values = values.real
    return values[0] if scalar else values


def radial_response(params: AnnulusParams, circle: int, n_abs, rho):
    """Radial profile of the extension of ``e^{i n theta}`` on one circle, 0 on the other.

    Vectorized over nonnegative ``n_abs`` and radii ``rho`` (the profile is even
    in n).  All intermediate powers are of numbers <= 1, so the formulas are
    overflow-free at any order.
    """
    r = params.r
    n_abs = np.asarray(n_abs, dtype=float)
    rho = np.asarray(rho, dtype=float)
    rn = rho**n_abs
    qn = r**n_abs
    ratio = (r / rho) ** n_abs
    den = 1.0 - qn * qn
    with np.errstate(invalid="ignore", divide="ignore"):
        if circle == CIRCLE_OUTER:
            out = (rn - ratio * qn) / den
            out0 = 1.0 - np.log(rho) / math.log(r)
        else:
            out = (ratio - qn * rn) / den
            out0 = np.log(rho) / math.log(r)
    return np.where(n_abs == 0, out0, out)


@dataclass(frozen=True)
class DiscreteBoundaryMeasure:
    """Atomic measure on the two boundary circles with signed real weights."""

    points: np.ndarray
    weights: np.ndarray
    circles: np.ndarray
    clipped_mass: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=complex))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "circles", np.asarray(self.circles, dtype=np.int8))

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def outer_mass(self) -> float:
        return float(np.sum(self.weights[self.circles == CIRCLE_OUTER]))

    @property
    def inner_mass(self) -> float:
        return float(np.sum(self.weights[self.circles == CIRCLE_INNER]))

    def moment(self, k: int) -> complex:
        """Integral of ``z^k`` (k may be negative; atoms never vanish)."""
        if k == 0:
            return complex(np.sum(self.weights))
        return complex(np.sum(self.weights * self.points ** float(k)))

    def atoms(self) -> list[BoundaryAtom]:
        tags = {CIRCLE_OUTER: OUTER, CIRCLE_INNER: INNER}
        return [
            BoundaryAtom(complex(p), tags[int(c)], float(w))
            for p, c, w in zip(self.points, self.circles, self.weights)
        ]


def _synthesize_weights(params, lam, n_grid, order):
    """Grid weights ``(1/M) sum_n A_n(lam) e^{-i n theta_j}`` on both circles."""
    rho, theta = abs(lam), math.atan2(lam.imag, lam.real)
    ns = np.arange(-order, order + 1)
    phase = np.exp(1j * ns * theta)
    w = {}
    for circle in (CIRCLE_OUTER, CIRCLE_INNER):
        response = radial_response(params, circle, np.abs(ns), rho) * phase
        spectrum = np.zeros(n_grid, dtype=complex)
        np.add.at(spectrum, (-ns) % n_grid, response)
        w[circle] = np.fft.ifft(spectrum).real
    return w[CIRCLE_OUTER], w[CIRCLE_INNER]


def harmonic_measure(
    params: AnnulusParams,
    lam: complex,
    n_grid: int = 256,
    n_freq: int = 64,
    boundary_tol: float = 1e-10,
) -> DiscreteBoundaryMeasure:
    """Discrete harmonic measure of ``lam`` on the uniform boundary grid.

    For interior ``lam`` the weights are synthesized from the per-frequency
    responses, so that ``sum_j w_j u(atom_j) = u(lam)`` holds exactly for any
    harmonic ``u`` whose boundary trace is band-limited to the final order.
    Boundary ``lam`` yields the point mass at ``lam`` itself (atom inserted
    exactly, not snapped to the grid).

    Truncated weights can dip slightly negative.  If the dip is below
    ``NEGATIVE_WEIGHT_FLOOR`` the order is raised (up to 4x, capped at the
    Nyquist limit of the grid); any negative weights remaining after that are
    clipped to zero and the measure is renormalized to unit mass, with the
    clipped amount recorded on the result.
    """
    lam = complex(lam)
    tag = classify_point(params, lam, boundary_tol)
    if tag == "outside":
        raise DomainError(f"{lam} lies outside the closed annulus")
    if tag == "outer_circle":
        return DiscreteBoundaryMeasure([lam], [1.0], [CIRCLE_OUTER])
    if tag == "inner_circle":
        return DiscreteBoundaryMeasure([lam], [1.0], [CIRCLE_INNER])

    if n_freq < 1 or n_grid < 2 * n_freq + 1:
        raise AliasingError(
            f"n_grid={n_grid} cannot resolve n_freq={n_freq}; need n_grid >= 2*n_freq+1"
        )
    _check_order(params, min(4 * n_freq, (n_grid - 1) // 2))

    nyquist = (n_grid - 1) // 2
    orders = []
    for mult in (1, 2, 4):
        order = min(mult * n_freq, nyquist)
        if order not in orders:
            orders.append(order)
    for order in orders:
        w_out, w_in = _synthesize_weights(params, lam, n_grid, order)
        min_w = min(w_out.min(), w_in.min())
        if min_w >= NEGATIVE_WEIGHT_FLOOR:
            break

    clipped = 0.0
    if min_w < 0.0:
        clipped = -float(np.sum(w_out[w_out < 0])) - float(np.sum(w_in[w_in < 0]))
        w_out = np.maximum(w_out, 0.0)
        w_in = np.maximum(w_in, 0.0)
        total = w_out.sum() + w_in.sum()
        w_out /= total
        w_in /= total
        if min_w < NEGATIVE_WEIGHT_FLOOR:
            log.info(
                "harmonic measure at %s: clipped %.3e of negative weight at order %d",
                lam,
                clipped,
                order,
            )

    unit = np.exp(2j * np.pi * np.arange(n_grid) / n_grid)
    points = np.concatenate([unit, params.r * unit])
    weights = np.concatenate([w_out, w_in])
    circles = np.concatenate(
        [np.zeros(n_grid, dtype=np.int8), np.ones(n_grid, dtype=np.int8)]
    )
    return DiscreteBoundaryMeasure(points, weights, circles, clipped_mass=clipped)
