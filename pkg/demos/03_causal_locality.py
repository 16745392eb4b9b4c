"""Causal influence between two qubits.

Local dynamics never let one subsystem's initial configuration move the
other's statistics. A controlled-NOT interaction does, and the influence
persists once the qubits have separated and evolve on their own.
"""

import numpy as np

from unilab import causality, dynamics, linalg
from unilab.causality import CompositeSystem
from unilab.dynamics import HamiltonianSchedule, UnitaryEvolution

rng = np.random.default_rng(3)
qr = CompositeSystem(("Q", "R"), (2, 2))

u = linalg.kron(linalg.random_unitary(2, rng), linalg.random_unitary(2, rng))
g = dynamics.unistochastic_from_unitary(u)
print("Independent evolution:")
print("  factorizes:", causality.factorization_check(qr, g, (["Q"], ["R"])))
for s, t in (("Q", "R"), ("R", "Q")):
    print(f"  influence {s} -> {t}: {causality.causal_influence(qr, g, s, t).influence:.2e}")

p1 = np.diag([0.0, 1.0])
h_int = (np.pi / 2) * linalg.kron(p1, np.eye(2) - linalg.SIGMA_X)
h_loc = linalg.kron(0.8 * linalg.SIGMA_X, np.eye(2)) + linalg.kron(np.eye(2), 0.3 * linalg.SIGMA_Z)
ev = UnitaryEvolution(HamiltonianSchedule(((1.0, h_int), (1.0, h_loc))))
print("\nInteraction on [0, 1], then separate evolution:")
for t in (0.25, 0.5, 1.0, 1.5, 2.0):
    g = dynamics.unistochastic_from_unitary(ev.evaluate(t))
    qr_inf = causality.causal_influence(qr, g, "Q", "R").influence
    rq_inf = causality.causal_influence(qr, g, "R", "Q").influence
    print(f"  t = {t:4}: Q -> R {qr_inf:.3f}   R -> Q {rq_inf:.3f}")
