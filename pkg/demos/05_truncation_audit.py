"""
How many phonons are enough?
============================

Reruns the dynamics with the Fock cutoff raised by two and reports the
largest change of each observable.
"""
from vibrodimer import ModelParams
from vibrodimer.dynamics import TimeGrid, convergence_check

grid = TimeGrid(0.0, 1000.0, 201)
for n in (3, 5, 7, 9):
    report = convergence_check(ModelParams(n_trunc_vib=n), grid, ["p_x_minus", "negativity"],
                               raise_on_failure=False)
    devs = ", ".join(f"{k} {v:.1e}" for k, v in report.deviations.items())
    print(f"n={n} vs n={report.n_trunc_vib_ref}: {devs}  -> {'ok' if report.passed else 'not converged'}")
