"""Closed-form inverse and determinant of a DAG completion, and related checks.

The inverse of the completion ``S`` over ``D`` is assembled family by
family,

    S^{-1} = sum_i ( [S[fa(i)]^{-1}]^V - [S[pa(i)]^{-1}]^V ),

and its determinant is ``prod_i 1 / S_{ii | pa(i)}``. Only the cells lying
inside the family blocks are ever computed; for a perfect DAG they are all
given, otherwise the few missing ones are filled through the immorality
closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import symlin
from .completion import _prepare, _regression, complete_in_pd, verify_in_pd
from .errors import (
    BadEpsilon,
    NotCompletable,
    NotInPdD,
    NotSeparating,
    OutOfRange,
    PerfectDag,
)
from .graph import (
    UGraph,
    enumerate_acyclic_orientations,
    immoralities,
    moral_graph,
    separates,
    topological_relabel,
    undirected_version,
)
from .partial import PartialMatrix, from_graph_pattern, zero_fill_in

__all__ = [
    "InverseReport",
    "C4Report",
    "family_blocks",
    "markov_inverse",
    "markov_determinant",
    "separation_split_inverse",
    "counterexample_partial_matrix",
    "c4_graph",
    "c4_partial_matrix",
    "c4_inequalities",
    "orientation_outcomes",
]


@dataclass(frozen=True)
class InverseReport:
    """Result of :func:`markov_inverse`.

    ``per_family_terms`` holds ``(i, fa(i), pa(i))`` for every vertex and
    ``materialized`` maps each computed off-pattern cell ``(i, j)``,
    ``i > j``, to its value.
    """

    omega: np.ndarray
    log_det_omega: float
    per_family_terms: tuple
    materialized: dict = field(default_factory=dict)

    @property
    def det_omega(self):
        return math.exp(self.log_det_omega)


def _needed_cells(gamma, D):
    """Off-pattern cells inside family blocks plus everything they depend on."""
    need = set()
    todo = []
    for v in D.vertices:
        fa = sorted(D.family(v))
        for a in fa:
            for b in fa:
                if a > b and not gamma.specified(a, b):
                    todo.append((a, b))
    while todo:
        i, j = todo.pop()
        if (i, j) in need:
            continue
        need.add((i, j))
        pa = sorted(D.parents(j))
        for k in pa + [i]:
            for m in pa:
                a, b = max(k, m), min(k, m)
                if a != b and not gamma.specified(a, b):
                    todo.append((a, b))
    return need


def family_blocks(gamma, D, tol=symlin.PD_TOL):
    """Materialize the cells needed by every family block.

    Returns ``(S, filled)``: a copy of ``gamma`` with ``nan`` at untouched
    unspecified cells, and the dict of filled cells. Cells are computed by
    the DAG regression equation in order of decreasing lower endpoint.
    Raises :class:`NotCompletable` when a parent block is not positive
    definite.
    """
    _prepare(gamma, D)
    S = gamma.to_array(np.nan)
    filled = {}
    for i, j in sorted(_needed_cells(gamma, D), key=lambda e: (-e[1], -e[0])):
        pa = [v - 1 for v in sorted(D.parents(j))]
        if pa:
            block = S[np.ix_(pa, pa)]
            if np.any(np.isnan(block)) or not symlin.is_positive_definite(block, tol):
                raise NotCompletable(j, f"parent block {sorted(D.parents(j))} is not positive definite")
            value = float(S[i - 1, pa] @ _regression(S, pa, j - 1))
        else:
            value = 0.0
        S[i - 1, j - 1] = S[j - 1, i - 1] = value
        filled[(i, j)] = value
    return S, filled


def _family_terms(gamma, D, tol):
    S, filled = family_blocks(gamma, D, tol)
    blocks = []
    for v in D.vertices:
        fa = sorted(D.family(v))
        pa = sorted(D.parents(v))
        Sfa = S[np.ix_([u - 1 for u in fa], [u - 1 for u in fa])]
        if not symlin.is_positive_definite(Sfa, tol):
            raise NotCompletable(v, f"family block {fa} is not positive definite")
        blocks.append((v, fa, pa, Sfa))
    return blocks, filled


def _conditional_variance(Sfa, fa, v):
    """``S_{vv | pa(v)}`` from the family block (``v`` is one of ``fa``)."""
    k = fa.index(v)
    rest = [t for t in range(len(fa)) if t != k]
    if not rest:
        return float(Sfa[k, k])
    B = Sfa[np.ix_(rest, rest)]
    c = Sfa[rest, k]
    return float(Sfa[k, k] - c @ np.linalg.solve(B, c))


def markov_inverse(gamma, D, tol=symlin.PD_TOL):
    """Inverse of the completion of ``gamma`` over ``D`` without completing it.

    Raises :class:`NotCompletable` if some family block fails to be positive
    definite, which happens exactly when no completion exists.
    """
    blocks, filled = _family_terms(gamma, D, tol)
    p = gamma.p
    omega = np.zeros((p, p))
    logdet = 0.0
    terms = []
    for v, fa, pa, Sfa in blocks:
        omega += zero_fill_in(symlin.inverse(Sfa), fa, p)
        if pa:
            k = [fa.index(u) for u in pa]
            omega -= zero_fill_in(symlin.inverse(Sfa[np.ix_(k, k)]), pa, p)
        logdet -= math.log(_conditional_variance(Sfa, fa, v))
        terms.append((v, tuple(fa), tuple(pa)))
    omega = (omega + omega.T) / 2
    omega.setflags(write=False)
    return InverseReport(omega, logdet, tuple(terms), filled)


def markov_determinant(gamma, D, method="schur", tol=symlin.PD_TOL):
    """``det(S^{-1})`` of the completion ``S`` of ``gamma`` over ``D``.

    ``method="schur"`` multiplies the reciprocal conditional variances
    ``1 / S_{ii | pa(i)}``; ``method="ratio"`` divides the product of parent
    block determinants by the product of family block determinants.
    """
    blocks, _ = _family_terms(gamma, D, tol)
    if method == "schur":
        out = 1.0
        for v, fa, _pa, Sfa in blocks:
            out /= _conditional_variance(Sfa, fa, v)
        return out
    if method == "ratio":
        num = den = 1.0
        for v, fa, pa, Sfa in blocks:
            den *= symlin.determinant(Sfa)
            if pa:
                k = [fa.index(u) for u in pa]
                num *= symlin.determinant(Sfa[np.ix_(k, k)])
        return num / den
    raise ValueError(f"unknown method {method!r}")


def separation_split_inverse(S, D, A, B, sep, tol=1e-10):
    """Inverse and ``det(S^{-1})`` from a separation in the moral graph.

    ``(A, B, sep)`` must partition the vertices with ``sep`` separating
    ``A`` from ``B`` in the moral graph of ``D``, and ``S`` must be a
    covariance matrix of the DAG model. Then

        S^{-1} = [S[A u sep]^{-1}]^V + [S[B u sep]^{-1}]^V - [S[sep]^{-1}]^V,
        det(S^{-1}) = det(S[sep]) / (det(S[A u sep]) det(S[B u sep])).
    """
    A, B, sep = set(A), set(B), set(sep)
    p = D.p
    if A | B | sep != set(range(1, p + 1)) or len(A) + len(B) + len(sep) != p:
        raise NotSeparating("A, B and S must partition the vertex set")
    if not separates(moral_graph(D), A, B, sep):
        raise NotSeparating(f"{sorted(sep)} does not separate {sorted(A)} from {sorted(B)}")
    if not verify_in_pd(S, D, tol):
        raise NotInPdD("matrix is not a covariance matrix of the DAG model")
    S = symlin.as_symmetric(S)
    out = np.zeros((p, p))
    det = 1.0
    for W, sign in ((A | sep, 1), (B | sep, 1), (sep, -1)):
        W = sorted(W)
        if not W:
            continue
        block = symlin.submatrix(S, W)
        out += sign * zero_fill_in(symlin.inverse(block), W, p)
        det *= symlin.determinant(block) ** (-sign)
    return (out + out.T) / 2, det


def counterexample_partial_matrix(D, epsilon):
    """A matrix in Q_D with no completion over the non-perfect DAG ``D``.

    Picks the immorality ``i1 -> v <- j1`` with the lowest collider ``v``
    (then smallest ``(i1, j1)``) and sets unit diagonal, ``epsilon`` at the
    cells ``(v, j1)`` and ``(i1, v)``, and zero on every other edge. The
    regression equations force ``S[i1, j1] = 0``, and the block on
    ``{v, i1, j1}`` is then indefinite for ``epsilon > sqrt(2) / 2``.
    """
    if not math.sqrt(2) / 2 < epsilon < 1:
        raise BadEpsilon(f"epsilon must lie in (sqrt(2)/2, 1), got {epsilon}")
    im = immoralities(D)
    if not im:
        raise PerfectDag()
    i1, v, j1 = im[0]
    values = {(k, k): 1.0 for k in D.vertices}
    for a, b in D.edges:
        values[(a, b)] = 0.0
    values[(i1, v)] = epsilon
    values[(j1, v)] = epsilon
    return from_graph_pattern(undirected_version(D), values)


def c4_graph():
    """The four-cycle 1 - 2 - 4 - 3 - 1."""
    return UGraph(4, [(1, 2), (1, 3), (2, 4), (3, 4)])


def c4_partial_matrix(a, b, c, d):
    """Unit-diagonal partial matrix on the four-cycle with cells a=(1,2), b=(2,4), c=(3,4), d=(1,3)."""
    nan = np.nan
    return PartialMatrix([
        [1, a, d, nan],
        [a, 1, nan, b],
        [d, nan, 1, c],
        [nan, b, c, 1],
    ])


@dataclass(frozen=True)
class C4Report:
    """Completability indicators for :func:`c4_partial_matrix`.

    ``f > 0`` iff some positive definite completion exists. ``f1..f6`` are
    the conditions for completion over the DAG versions of the cycle;
    ``f5_branches`` and ``f6_branches`` keep both terms of the minima.
    """

    f: float
    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float
    f5_branches: tuple
    f6_branches: tuple

    @property
    def grone_completable(self):
        return self.f > 0

    @property
    def dag_completable_any(self):
        return max(self.f1, self.f2, self.f3, self.f4, self.f5, self.f6) > 0

    def as_dict(self):
        return {
            "f": self.f, "f1": self.f1, "f2": self.f2, "f3": self.f3,
            "f4": self.f4, "f5": self.f5, "f6": self.f6,
            "f5_branches": list(self.f5_branches),
            "f6_branches": list(self.f6_branches),
            "grone_completable": self.grone_completable,
            "dag_completable_any": self.dag_completable_any,
        }


def c4_inequalities(a, b, c, d):
    if any(not abs(x) < 1 for x in (a, b, c, d)):
        raise OutOfRange("a, b, c, d must lie in (-1, 1)")
    f = (math.sqrt((1 - a * a) * (1 - b * b)) + math.sqrt((1 - c * c) * (1 - d * d))
         - abs(a * b - c * d))
    f1 = (1 - c * c) * (1 - d * d) - (a * b - c * d) ** 2
    f2 = (1 - a * a) * (1 - d * d) - (b * c - a * d) ** 2
    f3 = (1 - a * a) * (1 - b * b) - (c * d - a * b) ** 2
    f4 = (1 - b * b) * (1 - c * c) - (a * d - b * c) ** 2
    f5b = ((1 - b * b) * (1 - c * c) - (b * c) ** 2, (1 - a * a) * (1 - d * d) - (a * d) ** 2)
    f6b = ((1 - a * a) * (1 - b * b) - (a * b) ** 2, (1 - c * c) * (1 - d * d) - (c * d) ** 2)
    return C4Report(f, f1, f2, f3, f4, min(f5b), min(f6b), f5b, f6b)


def orientation_outcomes(gamma, G, tol=symlin.PD_TOL):
    """Try every acyclic orientation of ``G``: list of ``(dag, completed)``.

    Each orientation is renumbered into the ordered labelling before
    :func:`~pdc.completion.complete_in_pd` runs on the correspondingly
    permuted ``gamma``.
    """
    out = []
    for dag in enumerate_acyclic_orientations(G):
        ordered, perm = topological_relabel(G.p, dag.edges)
        res = complete_in_pd(gamma.permute(perm), ordered, tol)
        out.append((dag, res.completed))
    return out
