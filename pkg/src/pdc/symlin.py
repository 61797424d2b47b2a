"""Dense symmetric linear algebra.

Positive-definiteness tests, the modified Cholesky (LDL') factorization
without pivoting, Schur complements, inverses and determinants.

Every function taking index sets uses 1-based vertex labels; matrices are
plain ``numpy`` arrays indexed the usual 0-based way.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularBlock, SingularMatrix, ZeroPivot

__all__ = [
    "LdlFactor",
    "PIVOT_TOL",
    "PD_TOL",
    "as_symmetric",
    "is_positive_definite",
    "cholesky_pivots",
    "modified_cholesky",
    "schur_complement",
    "submatrix",
    "inverse",
    "determinant",
    "log_determinant",
]

PIVOT_TOL = 1e-12
PD_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _scale(M):
    if M.size == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(np.diag(M)))))


def as_symmetric(M, check=True, rtol=1e-12):
    """Return ``M`` as a float array, checking that it is square and symmetric."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if check and M.size:
        asym = np.max(np.abs(M - M.T))
        if asym > rtol * max(1.0, np.max(np.abs(M))):
            raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    return M


@dataclass(frozen=True)
class LdlFactor:
    """Unit lower triangular ``L`` and diagonal ``D`` with ``M = L diag(D) L'``."""

    L: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", _frozen(self.L))
        object.__setattr__(self, "D", _frozen(self.D))

    @property
    def p(self):
        return self.D.shape[0]

    def reconstruct(self):
        return (self.L * self.D) @ self.L.T


def cholesky_pivots(M):
    """Pivots ``d_1..d_p`` of the unpivoted LDL' elimination of ``M``.

    Elimination stops at the first non-positive pivot; the returned array
    is truncated there. Used by :func:`is_positive_definite`.
    """
    A = np.array(M, dtype=float)
    p = A.shape[0]
    pivots = []
    for k in range(p):
        d = A[k, k]
        pivots.append(d)
        if not d > 0:
            break
        col = A[k + 1:, k] / d
        A[k + 1:, k + 1:] -= np.outer(col, A[k, k + 1:])
    return np.array(pivots)


def is_positive_definite(M, tol=PD_TOL):
    """Test positive definiteness with a relative pivot threshold.

    True iff the Cholesky elimination of ``M`` runs to completion with every
    pivot larger than ``tol * max(1, max |M_ii|)``. Never raises on
    indefinite input.

    Examples
    --------
    >>> is_positive_definite(np.eye(3))
    True
    >>> is_positive_definite([[1, 0.9], [0.9, 0.8]])
    False
    """
    M = as_symmetric(M)
    if M.size == 0:
        return True
    threshold = tol * _scale(M)
    piv = cholesky_pivots(M)
    return len(piv) == M.shape[0] and bool(np.all(piv > threshold))


def modified_cholesky(M, tol=PIVOT_TOL):
    """Modified Cholesky factorization ``M = L diag(D) L'`` without pivoting.

    Elimination runs in the natural index order; the entries of ``D`` may
    have either sign. Raises :class:`ZeroPivot` (1-based index) when a pivot
    satisfies ``|d_j| <= tol * max(1, max |M_ii|)``, i.e. some leading
    principal submatrix is singular.
    """
    M = as_symmetric(M)
    p = M.shape[0]
    threshold = tol * _scale(M)
    L = np.eye(p)
    D = np.zeros(p)
    for j in range(p):
        # column j of L and pivot j from the already computed columns
        dj = M[j, j] - np.dot(L[j, :j] ** 2, D[:j])
        if abs(dj) <= threshold:
            raise ZeroPivot(j + 1, dj)
        D[j] = dj
        if j + 1 < p:
            L[j + 1:, j] = (M[j + 1:, j] - (L[j + 1:, :j] * D[:j]) @ L[j, :j]) / dj
    return LdlFactor(L, D)


def _idx(S, p):
    out = [int(i) - 1 for i in S]
    if any(not 0 <= i < p for i in out):
        raise IndexError(f"labels {list(S)} out of range 1..{p}")
    return out


def submatrix(M, rows, cols=None):
    """``M[rows, cols]`` with 1-based label lists; ``cols`` defaults to ``rows``."""
    M = np.asarray(M, dtype=float)
    cols = rows if cols is None else cols
    r, c = _idx(rows, M.shape[0]), _idx(cols, M.shape[1])
    return M[np.ix_(r, c)] if r and c else np.zeros((len(r), len(c)))


def schur_complement(M, I, J):
    """Schur complement ``M_J - M_JI (M_I)^{-1} M_IJ`` of ``M_I`` in ``M_{I u J}``.

    ``I`` and ``J`` are disjoint 1-based label sets. For ``I`` empty the
    result is ``M_J``. Raises :class:`SingularBlock` if ``M_I`` cannot be
    inverted.
    """
    I, J = list(I), list(J)
    if set(I) & set(J):
        raise ValueError("index sets must be disjoint")
    MJ = submatrix(M, J)
    if not I:
        return MJ
    MI = submatrix(M, I)
    MIJ = submatrix(M, I, J)
    return MJ - MIJ.T @ _solve(MI, MIJ, I)


def _solve(A, B, labels=()):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    except ValueError as exc:
        raise SingularBlock(labels) from exc
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOL * max(1.0, float(np.max(np.abs(A)))):
        raise SingularBlock(labels)
    return scipy.linalg.lu_solve((lu, piv), B)


def inverse(M):
    """Inverse of a nonsingular symmetric matrix via its LDL' factors.

    Falls back to an LU solve when the unpivoted elimination meets a zero
    leading minor. Raises :class:`SingularMatrix`.
    """
    M = as_symmetric(M)
    p = M.shape[0]
    try:
        f = modified_cholesky(M)
    except ZeroPivot:
        try:
            X = _solve(M, np.eye(p))
        except SingularBlock as exc:
            raise SingularMatrix("matrix is singular") from exc
        return (X + X.T) / 2
    Linv = scipy.linalg.solve_triangular(f.L, np.eye(p), lower=True, unit_diagonal=True)
    X = (Linv.T / f.D) @ Linv
    return (X + X.T) / 2


def _pivots_or_lu(M):
    """Pivots and permutation sign; None for a numerically singular matrix."""
    try:
        return modified_cholesky(M).D, 1.0
    except ZeroPivot:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(M)
        d = np.diag(lu)
        if np.min(np.abs(d)) <= PIVOT_TOL * _scale(M):
            return None
        return d, (-1.0) ** int(np.sum(piv != np.arange(len(piv))))


def log_determinant(M):
    """``(sign, log|det M|)`` from the LDL' pivots (LU fallback).

    A numerically singular matrix gives ``(0.0, -inf)``.
    """
    M = as_symmetric(M)
    if M.size == 0:
        return 1.0, 0.0
    res = _pivots_or_lu(M)
    if res is None:
        return 0.0, -np.inf
    d, sign = res
    return float(sign * np.prod(np.sign(d))), float(np.sum(np.log(np.abs(d))))


def determinant(M):
    """Determinant as the product of the LDL' pivots (0 when singular)."""
    M = as_symmetric(M)
    if M.size == 0:
        return 1.0
    res = _pivots_or_lu(M)
    if res is None:
        return 0.0
    d, sign = res
    return float(sign * np.prod(d))
