"""Shared builders for the test suite."""

import numpy as np

from annulus_dilation import AnnulusParams

R = 0.5
PARAMS = AnnulusParams(R)


def random_unitary(rng, d):
    q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return q


def random_moduli(rng, n, lo, hi):
    return rng.uniform(lo, hi, n)


def random_annulus_points(rng, n, lo=0.55, hi=0.95):
    """Interior points with moduli inside [lo, hi] (kept off both circles)."""
    return random_moduli(rng, n, lo, hi) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))


def commuting_normal_tuple(rng, d, m, lo=0.55, hi=0.95):
    """Commuting normals sharing a random eigenbasis, with given eigenvalue arrays."""
    q = random_unitary(rng, d)
    spectra = [random_annulus_points(rng, d, lo, hi) for _ in range(m)]
    mats = [q @ np.diag(s) @ q.conj().T for s in spectra]
    return mats, spectra, q


def random_unital_povm(rng, n_atoms, d):
    """Random PSD operators summing to the identity, on boundary atoms."""
    g = rng.standard_normal((n_atoms, d, d)) + 1j * rng.standard_normal((n_atoms, d, d))
    ops = np.einsum("nab,ncb->nac", g, g.conj())
    total = ops.sum(axis=0)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w**-0.5) @ v.conj().T
    ops = np.einsum("ab,nbc,cd->nad", inv_sqrt, ops, inv_sqrt)
    radii = np.where(rng.random(n_atoms) < 0.5, 1.0, R)
    points = (radii * np.exp(1j * rng.uniform(0, 2 * np.pi, n_atoms)))[:, None]
    return points, ops
