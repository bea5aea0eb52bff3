"""Closed-system propagation, observables and truncation audits."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .correlations import Bipartition, discord, eof_lower_bound, negativity
from .errors import NotConverged, StepTooLarge, VacuumExpectation
from .hilbert import DensityMatrix, lift, number_operator, partial_trace
from .linalg import check_hermitian, eigh
from .model import (BATH, DIMER, TWO_PI_C, VIB, ExcitonBasis, ModelParams,
                    build_effective_hamiltonian, build_total_hamiltonian,
                    exciton_basis, initial_state)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid in fs, endpoints included."""

    t_start: float = 0.0
    t_end: float = 1000.0
    n_points: int = 501

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    @property
    def step(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)


@dataclass
class TimeSeries:
    grid: TimeGrid
    records: dict = field(default_factory=dict)
    states: list | None = None

    def __getitem__(self, name: str) -> np.ndarray:
        return self.records[name]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def _check_pair(rho0: DensityMatrix, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.shape != rho0.matrix.shape:
        raise ValueError(f"Hamiltonian shape {h.shape} does not match state {rho0.matrix.shape}")
    check_hermitian(h)
    return h


def iter_propagate(rho0: DensityMatrix, h: np.ndarray, times: Sequence[float]) -> Iterator[DensityMatrix]:
    """Yield ``U(t) rho0 U(t)^dagger`` for each time, from one eigendecomposition."""
    h = _check_pair(rho0, h)
    dec = eigh(h)
    v = dec.eigenvectors
    rho_eig = v.conj().T @ rho0.matrix @ v
    for t in times:
        phase = np.exp(-1j * TWO_PI_C * dec.eigenvalues * t)
        m = v @ (rho_eig * np.outer(phase, phase.conj())) @ v.conj().T
        yield DensityMatrix(rho0.space, m, check=False)


def propagate(rho0: DensityMatrix, h: np.ndarray, grid: TimeGrid) -> list:
    """Exact evolution under a time-independent ``h`` (cm^-1) on ``grid`` (fs).

    ``rho0`` is the state at ``t = 0``.  Outputs are unitary conjugations of a
    valid state and are not re-validated.
    """
    return list(iter_propagate(rho0, h, grid.times))


def rk4_reference(rho0: DensityMatrix, h: np.ndarray, grid: TimeGrid,
                  dt_max: float = 0.1, drift_tol: float = 1e-6) -> list:
    """Classical RK4 integration of ``d rho/dt = -i 2πc [H, rho]``.

    Used as an oracle for :func:`propagate`.  The trace is never
    renormalized; drift beyond ``drift_tol`` raises :class:`StepTooLarge`.
    """
    h = _check_pair(rho0, h) * TWO_PI_C

    def rhs(r):
        hr = h @ r
        return -1j * (hr - hr.conj().T)  # [H, r] for Hermitian H, r

    r = np.array(rho0.matrix, dtype=complex)
    t_now = 0.0
    out = []
    for t in grid.times:
        span = t - t_now
        n_steps = int(np.ceil(abs(span) / dt_max - 1e-12)) if span else 0
        if n_steps:
            dt = span / n_steps
            for _ in range(n_steps):
                k1 = rhs(r)
                k2 = rhs(r + 0.5 * dt * k1)
                k3 = rhs(r + 0.5 * dt * k2)
                k4 = rhs(r + dt * k3)
                r = r + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_now = t
        drift = abs(np.trace(r).real - 1.0)
        if drift > drift_tol:
            raise StepTooLarge(f"trace drift {drift:.2e} at t = {t} fs (dt_max = {dt_max})")
        out.append(DensityMatrix(rho0.space, r.copy(), check=False))
    return out


def population_x_minus(rho: DensityMatrix, basis: ExcitonBasis, label: str = DIMER) -> float:
    """``Tr[(|X-><X-| ⊗ 1) rho]``, summed over all other factors."""
    reduced = partial_trace(rho, [label]).matrix
    return float(np.real(basis.x_minus.conj() @ reduced @ basis.x_minus))


def mandel_q(rho: DensityMatrix, mode_label: str) -> float:
    """``Q = (<n²> - <n>²) / <n> - 1`` of a bosonic factor."""
    reduced = partial_trace(rho, [mode_label]).matrix
    pops = np.real(np.diag(reduced))
    n = np.arange(pops.size)
    mean = float(pops @ n)
    if mean < 1e-12:
        raise VacuumExpectation(f"<n> = {mean:.3e}; Mandel Q is undefined")
    var = float(pops @ n**2) - mean**2
    return var / mean - 1.0


# -- scenario observables -------------------------------------------------

OBSERVABLES = ("p_x_minus", "negativity", "negativity_bath", "eof_lb",
               "discord", "mandel_q_vib", "purity", "energy")


@dataclass(frozen=True)
class ObservableContext:
    params: ModelParams
    basis: ExcitonBasis
    hamiltonian: np.ndarray
    with_bath: bool
    discord_grid_n: int = 64
    discord_refine_iters: int = 60


def _dimer_vib(rho: DensityMatrix, ctx: ObservableContext) -> DensityMatrix:
    return partial_trace(rho, [DIMER, VIB]) if ctx.with_bath else rho


def _evaluate(name: str, rho: DensityMatrix, ctx: ObservableContext) -> float:
    if name == "p_x_minus":
        return population_x_minus(rho, ctx.basis)
    if name == "negativity":
        return negativity(_dimer_vib(rho, ctx), DIMER)
    if name == "negativity_bath":
        if not ctx.with_bath:
            raise ValueError("negativity_bath needs the bath mode")
        return negativity(partial_trace(rho, [DIMER, BATH]), DIMER)
    if name == "eof_lb":
        return eof_lower_bound(_dimer_vib(rho, ctx), Bipartition(DIMER, VIB))
    if name == "discord":
        return discord(_dimer_vib(rho, ctx), DIMER, ctx.discord_grid_n,
                       ctx.discord_refine_iters).value
    if name == "discord_bath":
        return discord(partial_trace(rho, [DIMER, BATH]), DIMER, ctx.discord_grid_n,
                       ctx.discord_refine_iters).value
    if name == "mandel_q_vib":
        return mandel_q(rho, VIB)
    if name == "purity":
        return rho.purity()
    if name == "energy":
        return rho.expect(ctx.hamiltonian)
    raise ValueError(f"unknown observable {name!r}; choose from {OBSERVABLES}")


def scenario_hamiltonian(p: ModelParams, with_bath: bool) -> np.ndarray:
    return build_total_hamiltonian(p) if with_bath else build_effective_hamiltonian(p)


def evolve_observables(p: ModelParams, grid: TimeGrid, observables: Sequence[str],
                       with_bath: bool = False, discord_grid_n: int = 64,
                       discord_refine_iters: int = 60, keep_states: bool = False,
                       workers: int = 1) -> TimeSeries:
    """Run the initial state of ``p`` forward and record observables on ``grid``.

    Observables are evaluated per time point, concurrently when
    ``workers > 1``; results are always in grid order.
    """
    h = scenario_hamiltonian(p, with_bath)
    ctx = ObservableContext(p, exciton_basis(p), h, with_bath,
                            discord_grid_n, discord_refine_iters)
    rho0 = initial_state(p, with_bath)
    states = propagate(rho0, h, grid)

    def row(rho):
        return [_evaluate(name, rho, ctx) for name in observables]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, states))
    else:
        rows = [row(rho) for rho in states]
    values = np.array(rows, dtype=float).reshape(len(states), len(observables))
    records = {name: values[:, k] for k, name in enumerate(observables)}
    return TimeSeries(grid, records, states if keep_states else None)


@dataclass(frozen=True)
class ConvergenceReport:
    n_trunc_vib: int
    n_trunc_vib_ref: int
    n_trunc_bath: int | None
    n_trunc_bath_ref: int | None
    deviations: Mapping[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(d < self.tolerance for d in self.deviations.values())

    def worst(self):
        name = max(self.deviations, key=self.deviations.get)
        return name, self.deviations[name]


def convergence_check(p: ModelParams, grid: TimeGrid, observables: Sequence[str],
                      with_bath: bool = False, step: int = 2, tol: float = 1e-6,
                      raise_on_failure: bool = True, **kwargs) -> ConvergenceReport:
    """Rerun with every truncation raised by ``step`` and compare sup-norms.

    Raises :class:`NotConverged` (carrying the report) when any observable
    moves by ``tol`` or more, unless ``raise_on_failure`` is false.
    """
    p_ref = p.with_(n_trunc_vib=p.n_trunc_vib + step)
    if with_bath:
        p_ref = p_ref.with_(n_trunc_bath=p.n_trunc_bath + step)
    base = evolve_observables(p, grid, observables, with_bath, **kwargs)
    ref = evolve_observables(p_ref, grid, observables, with_bath, **kwargs)
    deviations = {name: float(np.max(np.abs(base[name] - ref[name]))) for name in observables}
    report = ConvergenceReport(
        p.n_trunc_vib, p_ref.n_trunc_vib,
        p.n_trunc_bath if with_bath else None,
        p_ref.n_trunc_bath if with_bath else None,
        deviations, tol,
    )
    if raise_on_failure and not report.passed:
        name, dev = report.worst()
        raise NotConverged(name, dev, tol, report)
    return report
