"""
Completing a partial matrix over a DAG
======================================

A partial matrix specified on the skeleton of a DAG can be completed in
two spaces: the covariance matrices of the Gaussian DAG model, and their
inverses. This script walks through both procedures on the shipped
fixtures.
"""

from pathlib import Path

import numpy as np

from pdc import completion, symlin
from pdc.graph import read_graph
from pdc.partial import read_matrix

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
np.set_printoptions(precision=4, suppress=True)

###############################################################################
# Covariance completion
# ---------------------
# Five vertices and four immoralities, so several cells outside the pattern
# are forced by the model rather than free. Layers are processed from vertex 4 down to 1: at each one the family block
# must be positive definite, then the free cells of the column are set by
# regressing on the parents.

D = read_graph(FIXTURES / "five_vertex_regression.graph")
gamma = read_matrix(FIXTURES / "five_vertex_regression.mat")
print("pattern:", sorted(D.edges, reverse=True))
print(gamma.to_array())

res = completion.complete_in_pd(gamma, D)
print("status:", res.status)
print(res.sigma)

###############################################################################
# The completion satisfies the regression equations exactly and its inverse
# has a unit lower-triangular LDL' factor supported on the edges of ``D``.

print("max residual:", completion.markov_residual(res.sigma, D))
omega = symlin.inverse(res.sigma)
f = symlin.modified_cholesky(omega)
print("L of the inverse:\n", f.L)
print("inverse in P_D:", completion.verify_in_p(omega, D))

###############################################################################
# Inverse-covariance completion
# -----------------------------
# The column recursion for ``L diag(lam) L'`` always runs (as long as no pivot
# vanishes while parents remain), but the result is an inverse covariance
# only when every ``lam_j`` is positive. In this example several are not.

D6 = read_graph(FIXTURES / "inverse_factor_example.graph")
gamma6 = read_matrix(FIXTURES / "inverse_factor_example.mat")
res6 = completion.complete_in_p(gamma6, D6)
print("lambda:", res6.factor.D)
print("L:\n", res6.factor.L)
print("completed:\n", res6.completed)
print("in P_D:", res6.in_p_d, "- first non-positive pivot at vertex", res6.failing_vertex)
