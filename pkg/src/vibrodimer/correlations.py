"""Bipartite quantum-correlation quantifiers.

Entropies are in bits.  For discord the measured party is a qubit and the
measurement is a rank-1 orthogonal pair ``Π± = (1 ± n·σ)/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .hilbert import DensityMatrix, partial_trace, partial_transpose
from .linalg import EIG_CLAMP, entropy_from_spectrum, trace_norm, von_neumann_entropy

ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        a = frozenset([self.side_a] if isinstance(self.side_a, str) else self.side_a)
        b = frozenset([self.side_b] if isinstance(self.side_b, str) else self.side_b)
        if not a or not b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if a & b:
            raise ValueError(f"sides overlap on {sorted(a & b)}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def of(cls, a: Iterable[str] | str, b: Iterable[str] | str) -> "Bipartition":
        return cls(a, b)

    @property
    def labels(self) -> frozenset:
        return self.side_a | self.side_b


@dataclass(frozen=True)
class QubitProjector:
    """Measurement direction on the Bloch sphere."""

    theta: float
    phi: float

    @property
    def bloch_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @property
    def ket(self) -> np.ndarray:
        return np.array([np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)])

    def projectors(self):
        """``(Π+, Π-)``."""
        k = self.ket
        plus = np.outer(k, k.conj())
        return plus, np.eye(2) - plus


def _restrict(rho: DensityMatrix, bipartition: Bipartition | None):
    """Trace ``rho`` down to the bipartition's labels."""
    if bipartition is None:
        if len(rho.space.factors) != 2:
            raise ValueError("a bipartition is required for states with more than two factors")
        a, b = rho.space.labels
        return rho, Bipartition(a, b)
    if bipartition.labels != set(rho.space.labels):
        rho = partial_trace(rho, bipartition.labels)
    return rho, bipartition


def negativity(rho: DensityMatrix, transpose_label: str) -> float:
    """Sum of the magnitudes of the negative eigenvalues of ``rho^{T_label}``."""
    pt = partial_transpose(rho, transpose_label)
    w = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(max(0.0, -np.sum(w[w < 0.0])))


def realignment(rho: DensityMatrix, bipartition: Bipartition | None = None) -> np.ndarray:
    """``R(rho)[(i j), (k l)] = rho[(i k), (j l)]`` with ``i, j`` on side A."""
    rho, bp = _restrict(rho, bipartition)
    space = rho.space
    a_labels = [lab for lab in space.labels if lab in bp.side_a]
    b_labels = [lab for lab in space.labels if lab in bp.side_b]
    order = [space.index(lab) for lab in a_labels + b_labels]
    dims = list(space.dims)
    n = len(dims)
    t = rho.matrix.reshape(dims + dims).transpose(order + [k + n for k in order])
    da = int(np.prod([space.factor_dim(lab) for lab in a_labels]))
    db = int(np.prod([space.factor_dim(lab) for lab in b_labels]))
    t = t.reshape(da, db, da, db).transpose(0, 2, 1, 3)
    return t.reshape(da * da, db * db)


def binary_entropy(x: float) -> float:
    return entropy_from_spectrum([x, 1.0 - x])


def eof_lower_bound(rho: DensityMatrix, bipartition: Bipartition | None = None) -> float:
    """Lower bound on the entanglement of formation (ebits) for qubit ⊗ qudit states.

    ``Λ = max(||rho^{T_B}||_1, ||R(rho)||_1)``; the bound is zero for
    ``Λ <= 1`` and ``H2((1 + sqrt(1 - (Λ - 1)^2)) / 2)`` otherwise.
    """
    rho, bp = _restrict(rho, bipartition)
    qubit_side = [lab for lab in bp.side_a]
    dim_a = int(np.prod([rho.space.factor_dim(lab) for lab in qubit_side]))
    if dim_a != 2:
        raise ValueError(f"side A must be a qubit, got dimension {dim_a}")
    transposed = rho.matrix
    for lab in bp.side_b:
        transposed = partial_transpose(transposed, lab, space=rho.space)
    lam = max(trace_norm(transposed), trace_norm(realignment(rho, bp)))
    if lam <= 1.0:
        return 0.0
    excess = min(lam - 1.0, 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - excess * excess)))


def mutual_information(rho: DensityMatrix, bipartition: Bipartition | None = None) -> float:
    """``I = S(A) + S(B) - S(AB)`` in bits."""
    rho, bp = _restrict(rho, bipartition)
    s_a = von_neumann_entropy(partial_trace(rho, bp.side_a))
    s_b = von_neumann_entropy(partial_trace(rho, bp.side_b))
    return s_a + s_b - von_neumann_entropy(rho)


@dataclass(frozen=True)
class DiscordResult:
    value: float
    argmin: QubitProjector
    classical: float
    mutual_information: float
    grid_classical: float


def _blocks(rho: DensityMatrix, measured_label: str) -> np.ndarray:
    """Return ``T[a, b, a', b']`` with ``b`` the measured qubit index."""
    space = rho.space
    k = space.index(measured_label)
    other = 1 - k
    d = space.dims[other]
    t = rho.matrix.reshape(space.dims + space.dims)
    return t.transpose(other, k, other + 2, k + 2).reshape(d, 2, d, 2)


def _conditional_entropy(blocks: np.ndarray, rho_a: np.ndarray,
                         theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``Σ_j p_j S(rho_{A|j})`` for each measurement direction (vectorized)."""
    c = np.cos(theta / 2)
    s = np.exp(1j * phi) * np.sin(theta / 2)
    ket = np.stack([c, s], axis=-1)  # (..., 2)
    # unnormalized A-state for outcome "+": Σ conj(n_b) n_b' T[:, b, :, b']
    sigma_plus = np.einsum("...b,abcd,...d->...ac", ket.conj(), blocks, ket)
    sigma_minus = rho_a - sigma_plus
    total = np.zeros(theta.shape)
    for sigma in (sigma_plus, sigma_minus):
        sigma = 0.5 * (sigma + np.conj(np.swapaxes(sigma, -1, -2)))
        lam = np.linalg.eigvalsh(sigma)
        p = lam.sum(axis=-1)
        lam = np.where(lam < EIG_CLAMP, 0.0, lam)
        with np.errstate(divide="ignore", invalid="ignore"):
            neg_entropy = np.where(lam > 0, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0).sum(axis=-1)
            # p S(sigma/p) = -Σ λ log λ + p log p
            term = -neg_entropy + np.where(p > ZERO_PROBABILITY, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        total += np.where(p > ZERO_PROBABILITY, term, 0.0)
    return total


def discord(rho: DensityMatrix, measured_label: str, grid_n: int = 64,
            refine_iters: int = 60) -> DiscordResult:
    """Quantum discord ``D = I - J`` with the qubit ``measured_label`` measured.

    ``J`` is maximized over orthogonal qubit projectors: an exhaustive
    ``grid_n × grid_n`` scan of ``(θ, φ)`` followed by ``refine_iters``
    passes of a shrinking coordinate search around the best grid cell.
    """
    if len(rho.space.factors) != 2:
        raise ValueError("discord needs a bipartite state; trace out extra factors first")
    if rho.space.factor_dim(measured_label) != 2:
        raise ValueError(f"measured factor {measured_label!r} must be a qubit")
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    other = [lab for lab in rho.space.labels if lab != measured_label][0]
    rho_a = partial_trace(rho, [other]).matrix
    s_a = von_neumann_entropy(rho_a)
    info = mutual_information(rho, Bipartition(other, measured_label))
    blocks = _blocks(rho, measured_label)

    thetas = np.linspace(0.0, np.pi, grid_n)
    phis = np.linspace(0.0, 2.0 * np.pi, grid_n, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    cond = _conditional_entropy(blocks, rho_a, tt, pp)
    best = int(np.argmin(cond))  # first occurrence: lowest (θ, φ)
    i, j = divmod(best, grid_n)
    theta, phi, best_cond = thetas[i], phis[j], cond[i, j]
    grid_cond = best_cond

    h_theta = np.pi / (grid_n - 1)
    h_phi = 2.0 * np.pi / grid_n
    for _ in range(refine_iters):
        cand_t = np.array([theta - h_theta, theta + h_theta, theta, theta])
        cand_p = np.array([phi, phi, phi - h_phi, phi + h_phi])
        cand_t = np.clip(cand_t, 0.0, np.pi)
        values = _conditional_entropy(blocks, rho_a, cand_t, cand_p)
        k = int(np.argmin(values))
        if values[k] < best_cond:
            theta, phi, best_cond = cand_t[k], cand_p[k] % (2.0 * np.pi), values[k]
        else:
            h_theta *= 0.5
            h_phi *= 0.5

    classical = s_a - best_cond
    return DiscordResult(
        value=float(info - classical),
        argmin=QubitProjector(float(theta), float(phi)),
        classical=float(classical),
        mutual_information=float(info),
        grid_classical=float(s_a - grid_cond),
    )
