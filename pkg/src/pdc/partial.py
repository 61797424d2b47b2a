"""Partial symmetric matrices specified on a graph pattern.

A :class:`PartialMatrix` holds a symmetric array of values together with a
boolean mask of specified cells. The diagonal is always specified. Cell
access is 1-based.

Matrix file format: ``p`` lines of ``p`` whitespace separated tokens, each
a decimal number or ``*`` / ``?`` for an unspecified cell. Blank lines and
lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import numpy as np

from . import symlin
from .errors import (
    AsymmetricValue,
    ParseError,
    PatternMismatch,
    UnspecifiedCell,
    UnspecifiedDiagonal,
)
from .graph import Dag, maximal_cliques, undirected_version

__all__ = [
    "PartialMatrix",
    "from_dag_pattern",
    "from_graph_pattern",
    "restrict",
    "check_pattern",
    "failing_clique",
    "is_partial_positive_definite",
    "zero_fill_in",
    "parse",
    "serialize",
    "read_matrix",
    "UNSPECIFIED_TOKENS",
]

UNSPECIFIED_TOKENS = ("*", "?")


class PartialMatrix:
    """Symmetric partial matrix.

    Parameters
    ----------
    values : array_like, shape (p, p)
        Entries; ``nan`` marks an unspecified cell unless ``mask`` is given.
    mask : array_like of bool, optional
        True where a cell is specified.
    """

    def __init__(self, values, mask=None):
        vals = np.array(values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"expected a square array, got shape {vals.shape}")
        if mask is None:
            mask = ~np.isnan(vals)
        mask = np.array(mask, dtype=bool)
        if mask.shape != vals.shape:
            raise ValueError("mask and values differ in shape")
        p = vals.shape[0]
        for i in range(p):
            if not mask[i, i]:
                raise UnspecifiedDiagonal(i + 1)
        for i, j in zip(*np.nonzero(mask & ~mask.T)):
            raise AsymmetricValue(int(i) + 1, int(j) + 1, vals[i, j], None)
        vals = np.where(mask, vals, 0.0)
        if np.any(np.isnan(vals)):
            i, j = np.argwhere(np.isnan(vals))[0]
            raise ValueError(f"specified cell ({i + 1},{j + 1}) is nan")
        for i, j in zip(*np.nonzero(vals != vals.T)):
            raise AsymmetricValue(int(i) + 1, int(j) + 1, vals[i, j], vals[j, i])
        vals.setflags(write=False)
        mask.setflags(write=False)
        self._values = vals
        self._mask = mask

    @property
    def p(self):
        return self._values.shape[0]

    @property
    def mask(self):
        return self._mask

    @property
    def pattern(self):
        """Specified off-diagonal cells as pairs ``(i, j)`` with ``i > j``."""
        rows, cols = np.nonzero(np.tril(self._mask, -1))
        return frozenset((int(i) + 1, int(j) + 1) for i, j in zip(rows, cols))

    def specified(self, i, j):
        return bool(self._mask[i - 1, j - 1])

    def __getitem__(self, key):
        i, j = key
        return float(self._values[i - 1, j - 1]) if self._mask[i - 1, j - 1] else None

    def to_array(self, fill=np.nan):
        """Dense copy with ``fill`` at unspecified cells."""
        return np.where(self._mask, self._values, fill)

    def __eq__(self, other):
        return (
            isinstance(other, PartialMatrix)
            and self.p == other.p
            and np.array_equal(self._mask, other._mask)
            and np.array_equal(self._values, other._values)
        )

    def __repr__(self):
        return f"PartialMatrix(p={self.p}, specified={len(self.pattern)} off-diagonal pairs)"

    def restrict(self, C):
        return restrict(self, C)

    def with_cells(self, cells):
        """Copy with extra cells ``{(i, j): value}`` specified symmetrically."""
        vals = self.to_array(0.0)
        mask = self._mask.copy()
        for (i, j), v in cells.items():
            vals[i - 1, j - 1] = vals[j - 1, i - 1] = v
            mask[i - 1, j - 1] = mask[j - 1, i - 1] = True
        return PartialMatrix(vals, mask)

    def permute(self, perm):
        """Partial matrix with vertex ``v`` renamed to ``perm[v - 1]``."""
        idx = np.empty(self.p, dtype=int)
        for old, new in enumerate(perm):
            idx[new - 1] = old
        return PartialMatrix(self._values[np.ix_(idx, idx)], self._mask[np.ix_(idx, idx)])

    def fill_zero(self):
        return self.to_array(0.0)


def _pattern_of(graph):
    return frozenset((max(i, j), min(i, j)) for i, j in graph.edges)


def from_dag_pattern(D, values):
    """Build the ``D``-partial matrix with the given cell values.

    ``values`` is either a mapping ``{(i, j): x}`` (1-based; either or both
    orientations of a cell) or a dense ``p x p`` array with ``nan`` for the
    unspecified cells. The specified cells must be exactly the diagonal and
    the skeleton of ``D``.
    """
    return from_graph_pattern(D, values)


def from_graph_pattern(G, values):
    p = G.p
    if isinstance(values, dict):
        vals = np.zeros((p, p))
        mask = np.zeros((p, p), dtype=bool)
        for (i, j), x in values.items():
            if not (1 <= i <= p and 1 <= j <= p):
                raise PatternMismatch(extra=[(i, j)])
            x = float(x)
            if mask[j - 1, i - 1] and i != j and vals[j - 1, i - 1] != x:
                raise AsymmetricValue(i, j, x, vals[j - 1, i - 1])
            vals[i - 1, j - 1] = vals[j - 1, i - 1] = x
            mask[i - 1, j - 1] = mask[j - 1, i - 1] = True
        missing_diag = [(i, i) for i in range(1, p + 1) if not mask[i - 1, i - 1]]
        if missing_diag:
            raise PatternMismatch(missing=missing_diag)
        gamma = PartialMatrix(vals, mask)
    else:
        gamma = PartialMatrix(values)
        if gamma.p != p:
            raise ValueError(f"matrix is {gamma.p}x{gamma.p} but graph has {p} vertices")
    check_pattern(gamma, G)
    return gamma


def check_pattern(gamma, G):
    """Raise :class:`PatternMismatch` unless ``gamma`` is specified exactly on ``G``."""
    if gamma.p != G.p:
        raise PatternMismatch(missing=[("dimension", G.p)], extra=[("dimension", gamma.p)])
    want = _pattern_of(G)
    have = gamma.pattern
    if want != have:
        raise PatternMismatch(missing=want - have, extra=have - want)


def restrict(gamma, C):
    """Dense ``|C| x |C|`` block ``(gamma_ij)_{i, j in C}``, rows in the order given."""
    C = list(C)
    for a in C:
        for b in C:
            if not gamma.specified(a, b):
                raise UnspecifiedCell(a, b)
    return gamma.to_array(0.0)[np.ix_([c - 1 for c in C], [c - 1 for c in C])]


def _skeleton(G):
    return undirected_version(G) if isinstance(G, Dag) else G


def failing_clique(gamma, G, tol=symlin.PD_TOL):
    """First maximal clique whose restriction is not positive definite, else None."""
    U = _skeleton(G)
    check_pattern(gamma, U)
    for C in maximal_cliques(U):
        if not symlin.is_positive_definite(restrict(gamma, C), tol):
            return C
    return None


def is_partial_positive_definite(gamma, G, tol=symlin.PD_TOL):
    """Membership in Q_G: every maximal clique block of ``gamma`` is positive definite.

    ``G`` may be a :class:`Dag` (its skeleton is used) or a :class:`UGraph`.
    """
    return failing_clique(gamma, G, tol) is None


def zero_fill_in(M, W, p):
    """Embed the ``|W| x |W|`` matrix ``M`` into a ``p x p`` zero matrix at labels ``W``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    W = [int(w) for w in W]
    if M.shape != (len(W), len(W)):
        raise ValueError(f"block of shape {M.shape} does not match {len(W)} labels")
    if any(not 1 <= w <= p for w in W):
        raise IndexError(f"labels {W} out of range 1..{p}")
    out = np.zeros((p, p))
    idx = [w - 1 for w in W]
    out[np.ix_(idx, idx)] = M
    return out


# file format

def _fmt(x):
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def serialize(gamma):
    rows = []
    for i in range(1, gamma.p + 1):
        rows.append(" ".join(_fmt(gamma[i, j]) if gamma.specified(i, j) else "*"
                             for j in range(1, gamma.p + 1)))
    return "\n".join(rows) + "\n"


def parse(text):
    """Parse the matrix file format into a :class:`PartialMatrix`."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        row = []
        col = 0
        for tok in line.split():
            col = line.index(tok, col) + 1
            if tok in UNSPECIFIED_TOKENS:
                row.append(np.nan)
            else:
                try:
                    x = float(tok)
                except ValueError:
                    raise ParseError(f"bad token {tok!r}", lineno, col) from None
                if not np.isfinite(x):
                    raise ParseError(f"non-finite value {tok!r}", lineno, col)
                row.append(x)
            col += len(tok) - 1
        rows.append((lineno, row))
    if not rows:
        raise ParseError("empty matrix file")
    p = len(rows)
    for lineno, row in rows:
        if len(row) != p:
            raise ParseError(f"expected {p} tokens, got {len(row)}", lineno)
    return PartialMatrix(np.array([r for _, r in rows]))


def read_matrix(path):
    with open(path) as fh:
        return parse(fh.read())
