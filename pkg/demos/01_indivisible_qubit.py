"""A qubit driven by sigma_x is an indivisible stochastic process.

Between 0 and pi/2 the configuration flips with certainty, yet no stochastic
matrix connects the halfway point to the end: conditioning at t' = pi/4 loses
information that the full transition matrix still carries.
"""

import numpy as np

from unilab import dynamics, linalg
from unilab.dynamics import HamiltonianSchedule, UnitaryEvolution

ev = UnitaryEvolution(HamiltonianSchedule.constant(linalg.SIGMA_X, np.pi))
t = np.pi / 2

rep = dynamics.transition_report(ev, t, np.pi / 4)
np.set_printoptions(precision=4, suppress=True)
print("Gamma(pi/2)            =\n", rep.gamma_t)
print("Gamma(pi/4)            =\n", rep.gamma_tprime)
print("nearest divisible      =\n", rep.gamma_nearest_divisible)
print("interference norm      =", rep.interference_norm)
print("divisible at t' = pi/4 ?", rep.divisible)

print("\nScan of intermediate times (division events are marked):")
for p in dynamics.division_event_scan(ev, t, np.linspace(0, t, 9)):
    mark = "  <- division event" if p.divisible else ""
    print(f"  t' = {p.t_prime:6.4f}   interference = {p.interference_norm:.4f}{mark}")
