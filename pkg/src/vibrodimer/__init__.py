"""Exciton-vibration dynamics of a vibronic dimer and its quantum correlations."""

__version__ = "0.1.0"

from .correlations import (Bipartition, QubitProjector, discord, eof_lower_bound,
                           mutual_information, negativity)
from .dynamics import (TimeGrid, TimeSeries, convergence_check, evolve_observables,
                       mandel_q, population_x_minus, propagate, rk4_reference)
from .hilbert import (DensityMatrix, HilbertSpace, kron, ladder_operators, lift,
                      partial_trace, partial_transpose)
from .linalg import (SpectralDecomposition, eigh, evolution_operator, trace_norm,
                     von_neumann_entropy)
from .model import (K_B, TWO_PI_C, ExcitonBasis, ModelParams, build_effective_hamiltonian,
                    build_full_hamiltonian, build_total_hamiltonian, exciton_basis,
                    initial_state, reduce_to_effective, thermal_state)
