"""
Decomposable graphs via perfect DAGs
====================================

Every decomposable (chordal) graph has a perfect orientation. Completing
over it gives the positive definite completion whose inverse is zero off the
edges of the graph, for any input that is positive definite on each clique.
"""

import numpy as np

from pdc import completion
from pdc.graph import UGraph, is_decomposable, is_perfect, maximal_cliques, perfect_dag_version
from pdc.partial import PartialMatrix, is_partial_positive_definite

G = UGraph(6, [(1, 2), (1, 3), (2, 3), (3, 4), (2, 4), (4, 5), (5, 6), (4, 6)])
print("decomposable:", is_decomposable(G))
print("cliques:", maximal_cliques(G))
D = perfect_dag_version(G)
print("perfect orientation:", sorted(D.edges), "perfect:", is_perfect(D))

rng = np.random.default_rng(1)
A = rng.normal(size=(6, 6))
full = A @ A.T + np.eye(6)
mask = np.eye(6, dtype=bool)
for i, j in G.edges:
    mask[i - 1, j - 1] = mask[j - 1, i - 1] = True
gamma = PartialMatrix(np.where(mask, full, np.nan))
print("positive definite on every clique:", is_partial_positive_definite(gamma, G))

S = completion.complete_decomposable(gamma, G)
K = np.linalg.inv(S)
np.set_printoptions(precision=3, suppress=True)
print("inverse of the completion (zeros off the graph):")
print(K)
