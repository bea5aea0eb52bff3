"""
Negativity, discord and an entanglement bound
=============================================

Quick tour of the bipartite quantifiers on textbook states.
"""
import numpy as np

from vibrodimer.correlations import discord, eof_lower_bound, mutual_information, negativity
from vibrodimer.hilbert import DensityMatrix, HilbertSpace, partial_trace, pure_state
from vibrodimer.linalg import von_neumann_entropy
from vibrodimer.sampling import random_pure_state

two_qubits = HilbertSpace.of(a=2, b=2)
bell = pure_state(two_qubits, np.array([1, 0, 0, 1]) / np.sqrt(2))

# maximally entangled: E_N = 1/2, D = 1, I = 2, EoF bound = 1
print("Bell E_N   :", negativity(bell, "a"))
print("Bell D     :", discord(bell, "a").value)
print("Bell I     :", mutual_information(bell))
print("Bell EoF_LB:", eof_lower_bound(bell))

# Werner states are separable below f = 1/3 but still carry discord
for f in (0.1, 0.3, 0.5, 0.9):
    rho = DensityMatrix(two_qubits, f * bell.matrix + (1 - f) * np.eye(4) / 4)
    print(f"Werner f={f:.1f}: E_N={negativity(rho, 'a'):.4f}  D={discord(rho, 'a').value:.4f}")

# for pure states discord equals the entanglement entropy
rng = np.random.default_rng(7)
space = HilbertSpace.of(q=2, vib=6)
for _ in range(3):
    psi = random_pure_state(space, rng)
    res = discord(psi, "q")
    print(f"D = {res.value:.6f}  S(rho_vib) = {von_neumann_entropy(partial_trace(psi, ['vib'])):.6f}"
          f"  best projector theta={res.argmin.theta:.3f} phi={res.argmin.phi:.3f}")
