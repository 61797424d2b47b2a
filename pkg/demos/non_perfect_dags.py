"""
When a completion does not exist
================================

A partial matrix can be positive definite on every clique of the skeleton
and still have no completion in the DAG model. This happens exactly when the
DAG has an immorality. We look at a concrete failure, at the generic
counterexample, and at the immorality-closure route that makes the problem
visible in advance.
"""

from pathlib import Path

import numpy as np

from pdc import analytics, completion, symlin
from pdc.graph import immoralities, immorality_closure, is_perfect, read_graph
from pdc.partial import PartialMatrix, is_partial_positive_definite, read_matrix

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
np.set_printoptions(precision=4, suppress=True)

###############################################################################
# A forced entry that breaks positive definiteness
# ------------------------------------------------
# Vertex 1 has parents 2, 3 and 4, but 2 and 4 are not adjacent. The
# regression equation at vertex 2 forces S42 = S43 S33^-1 S32 = 896/37, and
# the family block of vertex 1 then has a negative eigenvalue.

D = read_graph(FIXTURES / "family_failure.graph")
gamma = read_matrix(FIXTURES / "family_failure.mat")
print("immoralities:", immoralities(D))
print("partial positive definite:", is_partial_positive_definite(gamma, D))
res = completion.complete_in_pd(gamma, D)
print("status:", res.status, "at vertex", res.failing_vertex)
print("forced S42 =", res.sigma[3, 1], "vs 896/37 =", 896 / 37)
print("eigenvalues of the family block:", np.linalg.eigvalsh(res.sigma))

###############################################################################
# A counterexample for every non-perfect DAG
# ------------------------------------------
# Pick an immorality i -> v <- j, put epsilon on the two edges into v, zero
# on every other edge and ones on the diagonal. The model forces S_ij = 0,
# so the block on {v, i, j} has determinant 1 - 2 eps^2 < 0 once
# eps > sqrt(2)/2.

C4 = read_graph(FIXTURES / "directed_four_cycle.graph")
ce = analytics.counterexample_partial_matrix(C4, 0.8)
print(ce.to_array())
print("partial positive definite:", is_partial_positive_definite(ce, C4))
out = completion.complete_in_pd(ce, C4)
print("completed:", out.completed)
i, v, j = immoralities(C4)[0]
block = out.sigma[np.ix_([v - 1, i - 1, j - 1], [v - 1, i - 1, j - 1])]
print("determinant of the {v, i, j} block:", symlin.determinant(block))

###############################################################################
# Immorality closure
# ------------------
# Adding i -> j for every immorality, round after round, ends in a perfect
# DAG. Filling the added cells first turns the problem into one over a
# perfect DAG, where clique-wise positive definiteness is all that matters.

C5 = read_graph(FIXTURES / "five_cycle.graph")
for k, Dk in enumerate(immorality_closure(C5)):
    print(f"D{k}: perfect={is_perfect(Dk)} edges={sorted(Dk.edges, reverse=True)}")

vals = np.full((5, 5), np.nan)
np.fill_diagonal(vals, 1.0)
for (a, b), x in {(2, 1): 0.5, (5, 1): 0.4, (3, 2): 0.3, (4, 3): -0.2, (5, 4): 0.6}.items():
    vals[a - 1, b - 1] = vals[b - 1, a - 1] = x
closed = completion.complete_via_immorality_closure(PartialMatrix(vals), C5)
print("cells filled along the closure:", closed.filled)
print(closed.sigma)
