"""Tensor-product bookkeeping: spaces, lifting, partial trace and transpose.

All matrices on a :class:`HilbertSpace` use the lexicographic (row-major)
index layout of its factors, first factor slowest.
"""
from __future__ import annotations

from dataclasses import dataclass, field, InitVar
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import DimMismatch, NotDensityMatrix, UnknownLabel
from .linalg import (HERMITIAN_TOL, NEGATIVE_EIG_TOL, TRACE_TOL,
                     hermiticity_defect)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor factors, each a ``(label, dim)`` pair."""

    factors: tuple

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        labels = [label for label, _ in factors]
        if not factors:
            raise ValueError("a HilbertSpace needs at least one factor")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate factor labels in {labels}")
        for label, dim in factors:
            if dim < 1:
                raise ValueError(f"factor {label!r} has dimension {dim}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, **dims: int) -> "HilbertSpace":
        """``HilbertSpace.of(dimer=2, vib=6)``; keyword order is factor order."""
        return cls(tuple(dims.items()))

    @property
    def labels(self) -> tuple:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple:
        return tuple(dim for _, dim in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"no factor labelled {label!r} in {self.labels}") from None

    def factor_dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def subspace(self, labels: Iterable[str]) -> "HilbertSpace":
        """Factors named in ``labels``, kept in this space's order."""
        wanted = set(labels)
        for label in wanted:
            self.index(label)
        return HilbertSpace(tuple(f for f in self.factors if f[0] in wanted))

    def __str__(self):
        return " ⊗ ".join(f"{label}({dim})" for label, dim in self.factors)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on a space.

    Pass ``check=False`` to skip the eigenvalue test on hot paths whose
    output is known to be valid (e.g. unitary conjugation of a valid state).
    """

    space: HilbertSpace
    matrix: np.ndarray = field(repr=False)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimMismatch(f"matrix shape {m.shape} does not fit space {self.space}")
        object.__setattr__(self, "matrix", m)
        if check:
            validate_density(m)

    @property
    def dim(self) -> int:
        return self.space.dim

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def expect(self, op: np.ndarray) -> float:
        """Real part of ``Tr[op rho]``."""
        return float(np.real(np.sum(np.asarray(op).T * self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))


def validate_density(m: np.ndarray) -> None:
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_TOL:
        raise NotDensityMatrix(f"not Hermitian (defect {defect:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"trace {tr!r} differs from 1")
    low = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
    if low < -NEGATIVE_EIG_TOL:
        raise NotDensityMatrix(f"negative eigenvalue {low:.3e}")


def pure_state(space: HilbertSpace, ket: np.ndarray) -> DensityMatrix:
    ket = np.asarray(ket, dtype=complex).ravel()
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix(space, np.outer(ket, ket.conj()))


def product_state(*states: DensityMatrix) -> DensityMatrix:
    space = HilbertSpace(tuple(f for s in states for f in s.space.factors))
    return DensityMatrix(space, kron(*(s.matrix for s in states)), check=False)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of operators, left factor slowest."""
    if not ops:
        raise ValueError("kron needs at least one operator")
    return reduce(np.kron, (np.asarray(op) for op in ops))


def lift(op: np.ndarray, space: HilbertSpace, target_label: str) -> np.ndarray:
    """Embed ``op`` on factor ``target_label``, identity on every other factor."""
    op = np.asarray(op)
    k = space.index(target_label)
    if op.shape != (space.dims[k],) * 2:
        raise DimMismatch(
            f"operator of shape {op.shape} cannot act on {target_label!r} (dim {space.dims[k]})"
        )
    left = int(np.prod(space.dims[:k]))
    right = int(np.prod(space.dims[k + 1:]))
    out = op
    if left > 1:
        out = np.kron(np.eye(left), out)
    if right > 1:
        out = np.kron(out, np.eye(right))
    return out


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every factor not in ``keep``."""
    keep = set([keep] if isinstance(keep, str) else keep)
    if not keep:
        raise ValueError("keep must name at least one factor")
    space = rho.space
    kept = space.subspace(keep)
    dims = list(space.dims)
    t = rho.matrix.reshape(dims + dims)
    n = len(dims)
    for k in reversed(range(len(space.factors))):
        if space.labels[k] in keep:
            continue
        t = np.trace(t, axis1=k, axis2=k + n)
        n -= 1
    return DensityMatrix(kept, t.reshape(kept.dim, kept.dim), check=False)


def partial_transpose(rho, target_label: str, space: HilbertSpace | None = None) -> np.ndarray:
    """Transpose the indices of one factor; returns a plain matrix.

    ``rho`` may be a :class:`DensityMatrix` or a raw matrix with ``space``.
    """
    if isinstance(rho, DensityMatrix):
        space, m = rho.space, rho.matrix
    else:
        if space is None:
            raise TypeError("space is required for a raw matrix")
        m = np.asarray(rho)
    k = space.index(target_label)
    dims = list(space.dims)
    n = len(dims)
    t = m.reshape(dims + dims).swapaxes(k, k + n)
    return t.reshape(space.dim, space.dim)


def ladder_operators(n_max: int):
    """Annihilation and creation operators on Fock levels ``0..n_max``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    return a, a.conj().T.copy()


def number_operator(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def basis_projector(dim: int, n: int) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    p[n, n] = 1.0
    return p


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
