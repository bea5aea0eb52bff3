"""Hamiltonians and initial states for the vibronic dimer.

Energies are wavenumbers (cm^-1) and times femtoseconds.  The reduced
models live on ``dimer ⊗ vib`` (effective exciton-vibration model) or
``dimer ⊗ vib ⊗ bath`` (with one low-frequency bath mode).  The qubit basis
is site 1 = index 0 (``sigma_z = +1``), site 2 = index 1.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import DegenerateDimer, ReductionMismatch, ValidationError
from .hilbert import (SIGMA_X, SIGMA_Z, DensityMatrix, HilbertSpace, kron,
                      ladder_operators, lift, number_operator)
from .linalg import eigh

K_B = 0.6950348
"""Boltzmann constant in cm^-1 / K."""

TWO_PI_C = 1.8836516e-4
"""2 pi c in rad / (fs cm^-1): converts a wavenumber to an angular frequency."""

DIMER, VIB, BATH = "dimer", "vib", "bath"
BATH_INITS = ("vacuum", "thermal")


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters.  Defaults are the PE545 dimer values."""

    delta_e: float = 1042.0
    v: float = 92.0
    omega_vib: float = 1111.0
    g: float = 267.1
    temperature: float = 270.0
    n_trunc_vib: int = 5
    omega0: float = 11.11
    g0: float = 0.0
    n_trunc_bath: int = 5
    bath_init: str = "vacuum"

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "bath_init":
                if value not in BATH_INITS:
                    raise ValidationError(f.name, f"must be one of {BATH_INITS}, got {value!r}")
            elif f.name.startswith("n_trunc"):
                if isinstance(value, bool) or int(value) != value:
                    raise ValidationError(f.name, f"must be an integer, got {value!r}")
                if value < 1:
                    raise ValidationError(f.name, f"must be >= 1, got {value}")
                object.__setattr__(self, f.name, int(value))
            else:
                if not np.isfinite(value):
                    raise ValidationError(f.name, f"must be finite, got {value!r}")
                object.__setattr__(self, f.name, float(value))
        if self.omega_vib <= 0:
            raise ValidationError("omega_vib", "must be > 0")
        if self.temperature < 0:
            raise ValidationError("temperature", "must be >= 0")
        if self.g0 < 0:
            raise ValidationError("g0", "must be >= 0")
        if self.omega0 <= 0:
            raise ValidationError("omega0", "must be > 0")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ExcitonBasis:
    lambda_plus: float
    lambda_minus: float
    x_plus: np.ndarray
    x_minus: np.ndarray
    mixing_angle: float

    @property
    def gap(self) -> float:
        return self.lambda_plus - self.lambda_minus

    def projector_minus(self) -> np.ndarray:
        return np.outer(self.x_minus, self.x_minus.conj())

    def projector_plus(self) -> np.ndarray:
        return np.outer(self.x_plus, self.x_plus.conj())


def dimer_hamiltonian(p: ModelParams) -> np.ndarray:
    """Electronic part in the single-excitation sector, ``(Δε/2) σz + V σx``."""
    return 0.5 * p.delta_e * SIGMA_Z + p.v * SIGMA_X


def exciton_basis(p: ModelParams) -> ExcitonBasis:
    """Closed-form eigenpairs of :func:`dimer_hamiltonian`."""
    if p.delta_e == 0 and p.v == 0:
        raise DegenerateDimer("delta_e = v = 0 leaves the exciton basis undefined")
    half_gap = 0.5 * np.hypot(p.delta_e, 2.0 * p.v)
    theta = float(np.arctan2(2.0 * p.v, p.delta_e))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return ExcitonBasis(
        lambda_plus=half_gap,
        lambda_minus=-half_gap,
        x_plus=np.array([c, s], dtype=complex),
        x_minus=np.array([s, -c], dtype=complex),
        mixing_angle=theta,
    )


def effective_space(p: ModelParams, n_trunc: int | None = None) -> HilbertSpace:
    n = p.n_trunc_vib if n_trunc is None else n_trunc
    return HilbertSpace(((DIMER, 2), (VIB, n + 1)))


def total_space(p: ModelParams) -> HilbertSpace:
    return HilbertSpace(((DIMER, 2), (VIB, p.n_trunc_vib + 1), (BATH, p.n_trunc_bath + 1)))


def build_effective_hamiltonian(p: ModelParams, n_trunc: int | None = None) -> np.ndarray:
    """Exciton-vibration Hamiltonian on ``dimer ⊗ vib``.

    ``H = (Δε/2) σz + V σx - (g/√2) σz (b† + b) + ω_vib b†b``.
    """
    n = p.n_trunc_vib if n_trunc is None else n_trunc
    a, ad = ladder_operators(n)
    eye_v = np.eye(n + 1)
    return (kron(dimer_hamiltonian(p), eye_v)
            - p.g / np.sqrt(2.0) * kron(SIGMA_Z, a + ad)
            + p.omega_vib * kron(np.eye(2), number_operator(n)))


def build_total_hamiltonian(p: ModelParams) -> np.ndarray:
    """Effective model plus one bath mode coupled through ``σz ⊗ 1_vib``."""
    space = total_space(p)
    a0, a0d = ladder_operators(p.n_trunc_bath)
    h_eff = kron(build_effective_hamiltonian(p), np.eye(p.n_trunc_bath + 1))
    return (h_eff
            + p.omega0 * lift(number_operator(p.n_trunc_bath), space, BATH)
            + p.g0 * lift(SIGMA_Z, space, DIMER) @ lift(a0 + a0d, space, BATH))


# -- full two-chromophore, two-phonon model ---------------------------------

_SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |e><g|, ground = index 0
_OCC = np.diag([0.0, 1.0]).astype(complex)


def full_space(n_trunc: int, phonon_basis: str = "site") -> HilbertSpace:
    modes = ("phonon1", "phonon2") if phonon_basis == "site" else ("com", "rel")
    return HilbertSpace((("site1", 2), ("site2", 2), (modes[0], n_trunc + 1), (modes[1], n_trunc + 1)))


def build_full_hamiltonian(p: ModelParams, n_trunc: int, phonon_basis: str = "site") -> np.ndarray:
    """Two chromophores, each with its own vibrational mode.

    Site energies use the symmetric gauge ``ε1 = Δε/2 = -ε2``.

    ``phonon_basis="site"`` truncates the local modes ``b1, b2``.
    ``phonon_basis="collective"`` truncates the collective modes instead and
    sets ``b1 = (b_com - b_rel)/√2``, ``b2 = (b_com + b_rel)/√2``, so the
    rotation to collective coordinates is exact inside the truncated space.
    """
    if n_trunc < 1:
        raise ValueError("n_trunc must be >= 1")
    if phonon_basis not in ("site", "collective"):
        raise ValueError(f"unknown phonon_basis {phonon_basis!r}")
    space = full_space(n_trunc, phonon_basis)
    m1, m2 = space.labels[2:]
    sp1 = lift(_SIGMA_PLUS, space, "site1")
    sp2 = lift(_SIGMA_PLUS, space, "site2")
    n1 = lift(_OCC, space, "site1")
    n2 = lift(_OCC, space, "site2")
    a, _ = ladder_operators(n_trunc)
    c1, c2 = lift(a, space, m1), lift(a, space, m2)
    if phonon_basis == "site":
        b1, b2 = c1, c2
    else:
        # relative mode sign chosen so the reduced coupling reads -(g/√2) σz x
        b1 = (c1 - c2) / np.sqrt(2.0)
        b2 = (c1 + c2) / np.sqrt(2.0)
    eps1, eps2 = 0.5 * p.delta_e, -0.5 * p.delta_e
    h_el = eps1 * n1 + eps2 * n2 + p.v * (sp1 @ sp2.conj().T + sp2 @ sp1.conj().T)
    h_vib = p.omega_vib * (b1.conj().T @ b1 + b2.conj().T @ b2)
    h_int = p.g * (n1 @ (b1 + b1.conj().T) + n2 @ (b2 + b2.conj().T))
    return h_el + h_vib + h_int


def excitation_number(space: HilbertSpace) -> np.ndarray:
    """Electronic excitation count ``N = n1 + n2`` on a full-model space."""
    return lift(_OCC, space, "site1") + lift(_OCC, space, "site2")


def single_excitation_indices(n_trunc: int) -> np.ndarray:
    """Basis indices with exactly one excitation, ordered (site, com, rel).

    Site 1 excited comes first, so the block's electronic index matches the
    qubit convention of the reduced model.
    """
    d = (n_trunc + 1) ** 2
    # electronic index is site1 * 2 + site2, each owning a block of d phonon states
    site1_excited = 2 * d
    site2_excited = 1 * d
    return np.concatenate([site1_excited + np.arange(d), site2_excited + np.arange(d)])


def com_mode_hamiltonian(p: ModelParams, n_trunc: int) -> np.ndarray:
    """Center-of-mass mode in the single-excitation sector.

    It feels a constant force ``g/√2`` independent of the exciton state, so
    it decouples; without truncation its levels are ``ω n - g²/(2ω)``.
    """
    a, ad = ladder_operators(n_trunc)
    return p.omega_vib * number_operator(n_trunc) + p.g / np.sqrt(2.0) * (a + ad)


@dataclass(frozen=True)
class ReductionReport:
    deviation: float
    tolerance: float
    h_norm: float
    block_dim: int


def reduce_to_effective(p: ModelParams, n_trunc: int, rtol: float = 1e-8):
    """Check the single-excitation reduction of the full model.

    Builds the full Hamiltonian in collective phonon coordinates, extracts the
    one-excitation block and compares its sorted spectrum with that of
    ``H_eff ⊗ 1_com + 1 ⊗ h_com``.

    Returns
    -------
    h_eff : ndarray
        Effective Hamiltonian on ``dimer ⊗ vib`` with ``n_trunc``.
    report : ReductionReport

    Raises
    ------
    ReductionMismatch
        If the spectra differ by more than ``rtol * ||H||``.
    """
    h_full = build_full_hamiltonian(p, n_trunc, phonon_basis="collective")
    idx = single_excitation_indices(n_trunc)
    block = h_full[np.ix_(idx, idx)]
    h_eff = build_effective_hamiltonian(p, n_trunc)
    d = n_trunc + 1
    # ordering (qubit, com, rel)
    h_eff_com = h_eff.reshape(2, d, 2, d)
    target = (np.einsum("arbs,cC->acrbCs", h_eff_com, np.eye(d))
              + np.einsum("ab,cC,rs->acrbCs", np.eye(2), com_mode_hamiltonian(p, n_trunc), np.eye(d)))
    target = target.reshape(2 * d * d, 2 * d * d)
    e_block = eigh(block).eigenvalues
    e_target = eigh(target).eigenvalues
    deviation = float(np.max(np.abs(e_block - e_target)))
    h_norm = float(np.max(np.abs(np.linalg.eigvalsh(h_full))))
    tol = rtol * max(h_norm, 1.0)
    report = ReductionReport(deviation, tol, h_norm, block.shape[0])
    if deviation > tol:
        raise ReductionMismatch(deviation, tol)
    return h_eff, report


# -- states -------------------------------------------------------------------

def thermal_populations(omega: float, temperature: float, n_max: int) -> np.ndarray:
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    p = np.zeros(n_max + 1)
    if temperature == 0:
        p[0] = 1.0
        return p
    beta_omega = omega / (K_B * temperature)
    logw = -beta_omega * np.arange(n_max + 1)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def thermal_state(omega: float, temperature: float, n_max: int, label: str = VIB) -> DensityMatrix:
    """Gibbs state of a truncated oscillator (diagonal in the Fock basis)."""
    p = thermal_populations(omega, temperature, n_max)
    return DensityMatrix(HilbertSpace(((label, n_max + 1),)), np.diag(p).astype(complex), check=False)


def vacuum_state(n_max: int, label: str = BATH) -> DensityMatrix:
    p = np.zeros(n_max + 1)
    p[0] = 1.0
    return DensityMatrix(HilbertSpace(((label, n_max + 1),)), np.diag(p).astype(complex), check=False)


def initial_state(p: ModelParams, with_bath: bool = False) -> DensityMatrix:
    """``|X+><X+| ⊗ rho_th(vib)``, optionally ``⊗`` the bath-mode state."""
    xb = exciton_basis(p)
    dimer = xb.projector_plus()
    vib = thermal_state(p.omega_vib, p.temperature, p.n_trunc_vib).matrix
    if not with_bath:
        return DensityMatrix(effective_space(p), kron(dimer, vib), check=False)
    if p.bath_init == "thermal":
        bath = thermal_state(p.omega0, p.temperature, p.n_trunc_bath, BATH).matrix
    else:
        bath = vacuum_state(p.n_trunc_bath).matrix
    return DensityMatrix(total_space(p), kron(dimer, vib, bath), check=False)
