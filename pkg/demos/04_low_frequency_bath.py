"""
Adding a slow bath mode
=======================

A second, low-frequency oscillator coupled to sigma_z washes out the
population oscillations when it is slow and leaves them intact when it is
fast.  Also compares dimer-bath with dimer-vibration entanglement.
"""
import numpy as np

from vibrodimer import ModelParams
from vibrodimer.dynamics import TimeGrid, evolve_observables

grid = TimeGrid(0.0, 1000.0, 251)
late = grid.times > 500.0
p = ModelParams(n_trunc_bath=30)

ref = evolve_observables(p, grid, ["p_x_minus"])["p_x_minus"]
print("late-window P_X- amplitude without bath:", np.ptp(ref[late]))

for omega0, n_bath in ((0.01 * p.omega_vib, 30), (0.1 * p.omega_vib, 12)):
    for g0 in (0.03 * p.g, 0.1 * p.g, 0.3 * p.g):
        q = p.with_(omega0=omega0, g0=g0, n_trunc_bath=n_bath)
        ts = evolve_observables(q, grid, ["p_x_minus", "negativity", "negativity_bath"],
                                with_bath=True)
        amp = np.ptp(ts["p_x_minus"][late])
        print(f"omega0={omega0:7.2f} g0={g0:6.2f}: amplitude {amp:.3f} "
              f"({100 * (1 - amp / np.ptp(ref[late])):5.1f}% lower), "
              f"max E_N vib {ts['negativity'].max():.3f}, bath {ts['negativity_bath'].max():.3f}")
