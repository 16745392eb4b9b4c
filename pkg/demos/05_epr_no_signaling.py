"""No signalling, and why Reichenbach's common-cause principle fails.

Alice's outcome law does not depend on Bob's setting or on his pointer's
initial configuration. Yet conditioning on the complete initial
configuration of the two spins does not screen off the outcome correlation.
"""

import numpy as np

from unilab import bayesnet, bell

sc = bell.BellScenario.singlet(settings_b=(0.0, np.pi / 4, np.pi / 2), dims=(2, 2, 2, 3))
rep = bell.epr_no_signaling(sc)
print("variation of p(a_t | ...) over Bob's initial pointer value:", f"{rep.variation_b0:.1e}")
print("variation over Bob's setting:                          ", f"{rep.variation_b_setting:.1e}")
print("variation of Alice's reduced density matrix:           ", f"{rep.reduced_state_variation:.1e}")
print("Alice's outcome law per setting:", np.round(rep.p_a, 6).tolist())

joint = bell.outcome_common_cause_joint(bell.BellScenario.singlet(), 0.0, np.pi / 4)
r = bayesnet.reichenbach_test(joint, "A", "B", "C")
print("\nOutcomes correlated:", r.correlated, f"(max |P(a,b) - P(a)P(b)| = {r.correlation:.4f})")
print("Factorize given the initial spin configuration:", r.factorizes_given_c,
      f"(residual {r.max_residual:.4f})")
