"""Seeded random matrices and states for property tests and demos."""
from __future__ import annotations

import numpy as np

from .hilbert import DensityMatrix, HilbertSpace


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_hermitian(dim: int, rng=None, scale: float = 1.0) -> np.ndarray:
    rng = _rng(rng)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary (QR with phase correction)."""
    rng = _rng(rng)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_ket(dim: int, rng=None) -> np.ndarray:
    rng = _rng(rng)
    k = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return k / np.linalg.norm(k)


def random_pure_state(space: HilbertSpace, rng=None) -> DensityMatrix:
    k = random_ket(space.dim, rng)
    return DensityMatrix(space, np.outer(k, k.conj()), check=False)


def random_density_matrix(space: HilbertSpace, rng=None, rank: int | None = None) -> DensityMatrix:
    """Ginibre-ensemble mixed state of the given rank (full rank by default)."""
    rng = _rng(rng)
    rank = space.dim if rank is None else rank
    g = rng.normal(size=(space.dim, rank)) + 1j * rng.normal(size=(space.dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(space, m / np.trace(m).real, check=False)
