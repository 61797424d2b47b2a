"""
The four-cycle: completable, but not over any DAG
=================================================

On the undirected four-cycle 1 - 2 - 4 - 3 - 1 with unit diagonal and edge
values a=(1,2), b=(2,4), c=(3,4), d=(1,3), a positive definite completion
exists iff f(a, b, c, d) > 0. Completion over a DAG version of the cycle
is governed instead by one of six inequalities f1..f6, depending on the
orientation. At (0.6, 0.9, 0.1, 0.9) the first holds and all six fail.
"""

import numpy as np

from pdc import analytics
from pdc.graph import enumerate_acyclic_orientations

a, b, c, d = 0.6, 0.9, 0.1, 0.9
report = analytics.c4_inequalities(a, b, c, d)
for k, v in report.as_dict().items():
    print(f"{k:>20}: {v}")

###############################################################################
# Every acyclic orientation of the cycle (there are 14, the absolute value
# of the chromatic polynomial at -1) fails to complete.

G = analytics.c4_graph()
gamma = analytics.c4_partial_matrix(a, b, c, d)
outcomes = analytics.orientation_outcomes(gamma, G)
print(len(outcomes), "orientations, completable:", [ok for _, ok in outcomes])

###############################################################################
# A brute-force search over the two free cells finds a positive definite
# completion, confirming f > 0.

x = np.arange(-0.995, 1.0, 0.005)
best = None
for u in x:
    for w in x[::4]:
        M = np.array([[1, a, d, u], [a, 1, w, b], [d, w, 1, c], [u, b, c, 1]])
        lo = np.linalg.eigvalsh(M)[0]
        if best is None or lo > best[0]:
            best = (lo, u, w)
print("largest smallest-eigenvalue %.4f at S14=%.3f, S23=%.3f" % best)

###############################################################################
# Which inequality belongs to which orientation? Sample random entries and
# match the completability of each orientation against the sign of each f_k.

rng = np.random.default_rng(0)
dags = enumerate_acyclic_orientations(G)
rows = []
for _ in range(300):
    vals = rng.uniform(-0.95, 0.95, size=4)
    r = analytics.c4_inequalities(*vals)
    fs = (r.f1, r.f2, r.f3, r.f4, r.f5, r.f6)
    oks = dict(analytics.orientation_outcomes(analytics.c4_partial_matrix(*vals), G))
    rows.append((fs, [oks[D] for D in dags]))
for k, D in enumerate(dags):
    hit = [m + 1 for m in range(6) if all((fs[m] > 0) == ok[k] for fs, ok in rows)]
    print(sorted(D.edges), "-> f%s" % hit[0] if len(hit) == 1 else hit)
