"""Dense Hermitian spectral calculus.

Everything here is a pure function of its inputs.  ``eigh`` defaults to
LAPACK (through :func:`numpy.linalg.eigh`); a cyclic complex Jacobi solver is
kept alongside it as an independent route and for cross-checking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotDensityMatrix, NotHermitian

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
NEGATIVE_EIG_TOL = 1e-9
EIG_CLAMP = 1e-14


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite square complex array (``DensityMatrix`` accepted)."""
    m = np.asarray(getattr(m, "matrix", m))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise ``|m - m^dagger|``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(f"matrix is not Hermitian (max |m - m^H| = {defect:.3e})")


def eigh(m, method: str = "lapack", tol: float = HERMITIAN_TOL,
         max_sweeps: int = 100) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Hermitian matrix (checked entrywise against ``tol``).
    method : {"lapack", "jacobi"}
        ``"jacobi"`` runs :func:`jacobi_eigh`.
    max_sweeps : int
        Sweep budget for the Jacobi solver.

    Raises
    ------
    NotHermitian
        If ``max |m - m^H| > tol``.
    NoConvergence
        If the solver gives up.
    """
    m = as_matrix(m)
    check_hermitian(m, tol)
    # symmetrize away the tolerated defect so both solvers see the same input
    h = 0.5 * (m + m.conj().T)
    if method == "lapack":
        try:
            w, v = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc
        return SpectralDecomposition(w, v)
    if method == "jacobi":
        return jacobi_eigh(h, max_sweeps=max_sweeps)
    raise ValueError(f"unknown eigh method {method!r}")


def jacobi_eigh(h: np.ndarray, max_sweeps: int = 100) -> SpectralDecomposition:
    """Cyclic Jacobi diagonalization of a complex Hermitian matrix.

    Each (p, q) rotation first removes the phase of ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation.  Sweeps continue until the
    off-diagonal Frobenius norm falls below ``1e-15 * ||h||_F``.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        w = a.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return SpectralDecomposition(w[order], v[:, order])
    target = 1e-15 * scale
    for _ in range(max_sweeps):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(a.diagonal()) ** 2), 0.0))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], v[:, order])


def trace_norm(m) -> float:
    """Sum of singular values.  Rectangular input is allowed (realignment)."""
    m = np.asarray(getattr(m, "matrix", m))
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if m.shape[0] == m.shape[1] and hermiticity_defect(m) <= HERMITIAN_TOL:
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def density_spectrum(rho) -> np.ndarray:
    """Validated eigenvalues of a density matrix, tiny negatives clamped to zero."""
    m = as_matrix(rho)
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotDensityMatrix(f"not Hermitian (defect {defect:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"trace is {tr!r}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if w[0] < -NEGATIVE_EIG_TOL:
        raise NotDensityMatrix(f"negative eigenvalue {w[0]:.3e}")
    return np.where(w < EIG_CLAMP, 0.0, w)


def entropy_from_spectrum(w: np.ndarray) -> float:
    """Shannon entropy in bits of a probability vector, ``0 log 0 = 0``."""
    w = np.asarray(w, dtype=float)
    w = w[w >= EIG_CLAMP]
    return float(max(-np.sum(w * np.log2(w)), 0.0))


def von_neumann_entropy(rho) -> float:
    """``S = -Tr rho log2 rho`` in bits."""
    return entropy_from_spectrum(density_spectrum(rho))


def evolution_operator(dec: SpectralDecomposition, t: float, unit_scale: float) -> np.ndarray:
    """``U(t) = V diag(exp(-i * unit_scale * lambda * t)) V^dagger``.

    With eigenvalues in cm^-1 and ``t`` in fs, ``unit_scale`` is 2*pi*c in
    rad/(fs cm^-1).
    """
    v = dec.eigenvectors
    phases = np.exp(-1j * unit_scale * dec.eigenvalues * t)
    return (v * phases) @ v.conj().T
