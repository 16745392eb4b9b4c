"""Laws run one way, contingencies both ways.

A conditional table p(a | b, c) is fixed. Inverting it with Bayes' rule gives
p(b | a, c), and that inverse changes when only the distribution of the
parents changes.
"""

import numpy as np

from unilab import bayesnet
from unilab.bayesnet import ConditionalTable, JointDistribution

table = np.zeros((2, 2, 2))
table[1, :, :] = [0.1, 0.9]
table[0, :, :] = [0.8, 0.2]
law = ConditionalTable("A", ("B", "C"), table)

for label, parents in (("uniform parents", np.full((2, 2), 0.25)),
                       ("B usually 0", np.array([[0.4, 0.4], [0.1, 0.1]]))):
    parent_joint = JointDistribution(("B", "C"), parents)
    joint = bayesnet.build_joint(law, parent_joint)
    rev = bayesnet.reversed_conditional(joint, "B", ("A", "C"))
    print(f"{label:16s}: p(A=1) = {bayesnet.propagate_multilinear(law, parent_joint)[1]:.4f},"
          f" p(B=1 | A=1, C=0) = {rev.table[1, 0, 1]:.4f}")

print("\nThe forward table was the same both times:", law.table[:, 0, 1].tolist())
