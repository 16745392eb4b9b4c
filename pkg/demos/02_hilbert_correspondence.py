"""The same dynamics seen from the Hilbert-space side.

Start from a classical probability vector, evolve its diagonal density
matrix with U, and read off the diagonal: it matches the unistochastic
transition matrix applied to the vector. Off-diagonal terms (coherences)
appear along the way; they are bookkeeping for the indivisible law.
"""

import numpy as np

from unilab import dynamics, linalg, quantum
from unilab.dynamics import HamiltonianSchedule, UnitaryEvolution

rng = np.random.default_rng(2)
h = linalg.random_hermitian(4, rng)
ev = UnitaryEvolution(HamiltonianSchedule.constant(h, 3.0))
p0 = np.array([0.7, 0.1, 0.2, 0.0])

for t in (0.5, 1.5, 3.0):
    u = ev.evaluate(t)
    rho = quantum.evolve_density(quantum.density_from_distribution(p0), u)
    p_t = dynamics.propagate(dynamics.unistochastic_from_unitary(u), p0)
    diag = np.real(np.diagonal(rho))
    coherence = np.max(np.abs(rho - np.diag(np.diagonal(rho))))
    print(f"t = {t}: Gamma p = {np.round(p_t, 4)}, max |diag - Gamma p| = {np.max(np.abs(diag - p_t)):.1e},"
          f" largest coherence = {coherence:.3f}")

sx = quantum.Observable(linalg.kron(linalg.SIGMA_X, np.eye(2)))
sz = quantum.Observable(linalg.kron(linalg.SIGMA_Z, np.eye(2)))
print("\nsigma_z (x) I is a", sz.kind, "and sigma_x (x) I is an", sx.kind)

rho = quantum.density_from_distribution(p0)
print("von Neumann residual at t = 1, dt = 1e-3:", f"{quantum.von_neumann_residual(ev, rho, 1.0, 1e-3):.2e}")
print("                              dt = 5e-4:", f"{quantum.von_neumann_residual(ev, rho, 1.0, 5e-4):.2e}")
