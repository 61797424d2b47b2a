"""Completion of DAG-partial matrices.

Two target spaces are handled for a DAG ``D`` in the ordered numbering
(every edge ``i -> j`` has ``i > j``):

* covariance matrices of the Gaussian DAG model, i.e. positive definite
  ``S`` with ``S[pr(j), j] = S[pr(j), pa(j)] S[pa(j)]^{-1} S[pa(j), j]``
  for every vertex ``j`` (:func:`complete_in_pd` and friends);
* their inverses, the matrices ``L diag(lam) L'`` with ``L`` unit lower
  triangular supported on the edges of ``D`` and ``lam > 0``
  (:func:`complete_in_p`).

All vertex labels are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import symlin
from .errors import NotCompletable, NotPartialPd, NotPerfect, ZeroPivot
from .graph import (
    immoralities,
    immorality_closure,
    perfect_dag_version,
    topological_relabel,
    undirected_version,
)
from .partial import check_pattern, failing_clique

__all__ = [
    "PCompletionResult",
    "PdCompletionResult",
    "ClosureCompletion",
    "LAMBDA_TOL",
    "complete_in_p",
    "complete_in_pd",
    "complete_in_pd_perfect",
    "complete_via_immorality_closure",
    "complete_decomposable",
    "markov_residual",
    "verify_in_pd",
    "verify_in_p",
]

LAMBDA_TOL = 1e-12

COMPLETED = "completed"
FAMILY_NOT_PD = "family_not_pd"


def _ix(labels):
    return [v - 1 for v in labels]


def _prepare(gamma, D):
    D.require_ordered()
    check_pattern(gamma, undirected_version(D))


@dataclass(frozen=True)
class PCompletionResult:
    """Outcome of :func:`complete_in_p`.

    ``factor`` and ``completed`` are None when the run stopped early in
    verdict-only mode. ``failing_vertex`` is the first ``j`` whose pivot is
    not strictly positive.
    """

    factor: symlin.LdlFactor | None
    completed: np.ndarray | None
    in_p_d: bool
    failing_vertex: int | None = None


@dataclass(frozen=True)
class PdCompletionResult:
    """Outcome of :func:`complete_in_pd`.

    ``sigma`` holds the completed matrix; on failure it is the partially
    filled matrix with ``nan`` in the cells never reached. ``failures``
    lists every vertex whose family block was rejected (more than one only
    in diagnose mode).
    """

    sigma: np.ndarray
    status: str
    failing_vertex: int | None = None
    failures: tuple = field(default=())

    @property
    def completed(self):
        return self.status == COMPLETED


@dataclass(frozen=True)
class ClosureCompletion:
    dag: object
    gamma: object
    sigma: np.ndarray
    filled: dict


def complete_in_p(gamma, D, verdict_only=False):
    """Complete ``gamma`` to ``L diag(lam) L'`` with ``L`` supported on ``D``.

    Columns are processed left to right: ``lam_j`` is the Schur pivot of
    column ``j`` and ``L[i, j]`` is solved for each parent ``i`` of ``j``;
    every other below-diagonal entry of ``L`` is zero. The completion lies
    in the inverse-covariance space iff all ``lam_j`` are strictly positive
    (threshold ``LAMBDA_TOL * max |gamma_jj|``).

    Raises :class:`ZeroPivot` if some ``lam_j`` vanishes while column ``j``
    still has parents to solve for. With ``verdict_only`` the run stops at
    the first non-positive ``lam_j`` and returns no factor.
    """
    _prepare(gamma, D)
    p = gamma.p
    G = gamma.to_array(0.0)
    scale = float(np.max(np.abs(np.diag(G)))) if p else 1.0
    threshold = LAMBDA_TOL * (scale if scale > 0 else 1.0)
    L = np.eye(p)
    lam = np.zeros(p)
    failing = None
    for j in range(p):
        lam[j] = G[j, j] - np.dot(lam[:j], L[j, :j] ** 2)
        if failing is None and not lam[j] > threshold:
            failing = j + 1
            if verdict_only:
                return PCompletionResult(None, None, False, failing)
        parents = _ix(sorted(D.parents(j + 1)))
        if not parents:
            continue
        if abs(lam[j]) <= threshold:
            raise ZeroPivot(j + 1, lam[j])
        for i in parents:
            L[i, j] = (G[i, j] - np.dot(lam[:j] * L[i, :j], L[j, :j])) / lam[j]
    factor = symlin.LdlFactor(L, lam)
    completed = factor.reconstruct()
    completed = (completed + completed.T) / 2
    completed.setflags(write=False)
    return PCompletionResult(factor, completed, failing is None, failing)


def _regression(S, pa, j, use_cholesky=True):
    """Coefficients ``S[pa]^{-1} S[pa, j]``; None when ``S[pa]`` is singular."""
    block = S[np.ix_(pa, pa)]
    rhs = S[pa, j]
    if use_cholesky:
        try:
            return scipy.linalg.cho_solve(scipy.linalg.cho_factor(block, lower=True), rhs)
        except (np.linalg.LinAlgError, ValueError):
            pass
    try:
        return symlin._solve(block, rhs)
    except Exception:
        return None


def _layers(gamma, D, check, diagnose=False, tol=symlin.PD_TOL):
    p = gamma.p
    S = gamma.to_array(np.nan)
    failures = []
    if check and p and not symlin.is_positive_definite(S[-1:, -1:], tol):
        failures.append(p)
        if not diagnose:
            return S, failures
    for j in range(p - 1, 0, -1):
        fa = _ix(sorted(D.family(j)))
        if check:
            block = S[np.ix_(fa, fa)]
            if np.any(np.isnan(block)) or not symlin.is_positive_definite(block, tol):
                failures.append(j)
                if not diagnose:
                    return S, failures
        pr = _ix(sorted(D.predecessors(j)))
        if not pr:
            continue
        pa = _ix(sorted(D.parents(j)))
        if not pa:
            S[pr, j - 1] = S[j - 1, pr] = 0.0
            continue
        coef = _regression(S, pa, j - 1)
        col = np.full(len(pr), np.nan) if coef is None else S[np.ix_(pr, pa)] @ coef
        S[pr, j - 1] = S[j - 1, pr] = col
    return S, failures


def complete_in_pd(gamma, D, tol=symlin.PD_TOL, diagnose=False):
    """Complete ``gamma`` in the covariance space of the DAG model over ``D``.

    Layers run from ``j = p - 1`` down to 1. At each layer the family block
    ``S[fa(j)]`` (fully determined at that point) must be positive definite;
    then the cells ``S[pr(j), j]`` are set by regressing on the parents of
    ``j`` (zero when ``j`` has no parents). The top vertex's 1x1 block is
    checked as well.

    A failed family check is a result, not an exception: the returned
    status is ``"family_not_pd"`` with the failing vertex. By default the
    run stops there; ``diagnose=True`` keeps going and records every
    failing layer.
    """
    _prepare(gamma, D)
    S, failures = _layers(gamma, D, check=True, diagnose=diagnose, tol=tol)
    S = (S + S.T) / 2
    S.setflags(write=False)
    if failures:
        return PdCompletionResult(S, FAMILY_NOT_PD, failures[0], tuple(failures))
    return PdCompletionResult(S, COMPLETED)


def complete_in_pd_perfect(gamma, D, tol=symlin.PD_TOL):
    """Completion over a perfect DAG.

    Every family is a complete set, so membership of ``gamma`` in Q_D is
    the only condition; once it holds the layer recursion runs without any
    positive-definiteness re-checks. Raises :class:`NotPerfect` or
    :class:`NotPartialPd`.
    """
    _prepare(gamma, D)
    im = immoralities(D)
    if im:
        raise NotPerfect(im)
    bad = failing_clique(gamma, D, tol)
    if bad is not None:
        raise NotPartialPd(bad)
    S, _ = _layers(gamma, D, check=False)
    S = (S + S.T) / 2
    S.setflags(write=False)
    return S


def complete_via_immorality_closure(gamma, D, tol=symlin.PD_TOL):
    """Complete through the perfect DAG at the end of the immorality closure.

    Cells of the edges added by the closure are filled from the highest
    lower endpoint down, each by regression on the parents (in ``D``) of
    that endpoint. The enlarged partial matrix is then completed over the
    final perfect DAG.

    Returns a :class:`ClosureCompletion` ``(dag, gamma, sigma, filled)``.
    Raises :class:`NotCompletable` when a parent block is not positive
    definite or the enlarged matrix leaves Q.
    """
    _prepare(gamma, D)
    final = immorality_closure(D)[-1]
    added = sorted(final.edges - D.edges, key=lambda e: (-e[1], -e[0]))
    S = gamma.to_array(np.nan)
    filled = {}
    for i, j in added:
        pa = _ix(sorted(D.parents(j)))
        if pa:
            block = S[np.ix_(pa, pa)]
            if not symlin.is_positive_definite(block, tol):
                raise NotCompletable(j, f"parent block {sorted(D.parents(j))} is not positive definite")
            coef = _regression(S, pa, j - 1)
            value = float(S[i - 1, pa] @ coef)
        else:
            value = 0.0
        S[i - 1, j - 1] = S[j - 1, i - 1] = value
        filled[(i, j)] = value
    gamma_n = gamma.with_cells(filled)
    bad = failing_clique(gamma_n, final, tol)
    if bad is not None:
        raise NotCompletable(min(bad), f"clique {list(bad)} of the closed DAG is not positive definite")
    sigma = complete_in_pd_perfect(gamma_n, final, tol)
    return ClosureCompletion(final, gamma_n, sigma, filled)


def complete_decomposable(gamma, G, tol=symlin.PD_TOL):
    """Positive definite completion over a decomposable undirected graph.

    The completion is built over a perfect DAG version of ``G`` and is the
    unique completion whose inverse vanishes off the edges of ``G``.
    Raises :class:`~pdc.errors.NotDecomposable` or :class:`NotPartialPd`.
    """
    check_pattern(gamma, G)
    dag, perm = topological_relabel(G.p, perfect_dag_version(G).edges)
    S = complete_in_pd_perfect(gamma.permute(perm), dag, tol)
    idx = [v - 1 for v in perm]
    out = S[np.ix_(idx, idx)]
    out.setflags(write=False)
    return out


def markov_residual(S, D):
    """Largest violation ``|S[pr(j), j] - S[pr(j), pa(j)] S[pa(j)]^{-1} S[pa(j), j]|``."""
    D.require_ordered()
    S = symlin.as_symmetric(S)
    worst = 0.0
    for j in D.vertices:
        pr = _ix(sorted(D.predecessors(j)))
        if not pr:
            continue
        pa = _ix(sorted(D.parents(j)))
        if pa:
            coef = _regression(S, pa, j - 1)
            if coef is None:
                return np.inf
            fitted = S[np.ix_(pr, pa)] @ coef
        else:
            fitted = 0.0
        worst = max(worst, float(np.max(np.abs(S[pr, j - 1] - fitted))))
    return worst


def verify_in_pd(S, D, tol=1e-10, pd_tol=symlin.PD_TOL):
    """True iff ``S`` is positive definite and satisfies the DAG regression equations.

    The residual of :func:`markov_residual` must be at most
    ``tol * ||S||_inf``.
    """
    S = symlin.as_symmetric(S)
    if not symlin.is_positive_definite(S, pd_tol):
        return False
    norm = float(np.max(np.sum(np.abs(S), axis=1))) if S.size else 1.0
    return markov_residual(S, D) <= tol * norm


def verify_in_p(omega, D, tol=1e-10):
    """True iff ``omega = L diag(lam) L'`` with ``lam > 0`` and ``L`` supported on ``D``.

    ``|L[i, j]| <= tol`` is required at every non-edge ``i > j``.
    """
    D.require_ordered()
    try:
        f = symlin.modified_cholesky(omega)
    except ZeroPivot:
        return False
    if not np.all(f.D > 0):
        return False
    p = f.p
    for i in range(2, p + 1):
        for j in range(1, i):
            if (i, j) not in D.edges and abs(f.L[i - 1, j - 1]) > tol:
                return False
    return True
