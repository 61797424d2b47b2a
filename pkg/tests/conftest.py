"""Shared fixtures and random instance generators for the test suite."""

from __future__ import annotations

import itertools
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from pdc.graph import (
    Dag,
    UGraph,
    is_perfect,
    perfect_dag_version,
    read_graph,
    topological_relabel,
    undirected_version,
)
from pdc.partial import PartialMatrix, read_matrix

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name):
    return FIXTURES / name


def load_graph(name):
    return read_graph(FIXTURES / f"{name}.graph")


def load_matrix(name):
    return read_matrix(FIXTURES / f"{name}.mat")


def random_ordered_dag(rng, p, density=0.5):
    edges = [(i, j) for i in range(2, p + 1) for j in range(1, i) if rng.random() < density]
    return Dag(p, edges)


def random_chordal_graph(rng, p, density=0.4):
    """Random graph made chordal by eliminating vertices in a random order."""
    adj = {v: set() for v in range(1, p + 1)}
    for i, j in itertools.combinations(range(1, p + 1), 2):
        if rng.random() < density:
            adj[i].add(j)
            adj[j].add(i)
    alive = set(adj)
    for v in rng.permutation(np.arange(1, p + 1)):
        v = int(v)
        nb = [u for u in adj[v] if u in alive]
        for a, b in itertools.combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        alive.discard(v)
    return UGraph(p, [(i, j) for i in adj for j in adj[i] if i < j])


def random_perfect_dag(rng, p, density=0.4):
    G = random_chordal_graph(rng, p, density)
    D, _ = topological_relabel(p, perfect_dag_version(G).edges)
    return D


def random_non_perfect_dag(rng, p, density=0.5):
    while True:
        D = random_ordered_dag(rng, p, density)
        if not is_perfect(D):
            return D


def random_p_member(rng, D, spread=1.0):
    """Random ``L diag(lam) L'`` with ``L`` supported on the edges of ``D``."""
    p = D.p
    L = np.eye(p)
    for i, j in D.edges:
        L[i - 1, j - 1] = rng.normal(scale=spread)
    lam = rng.uniform(0.5, 2.0, size=p)
    omega = L @ np.diag(lam) @ L.T
    return L, lam, (omega + omega.T) / 2


def random_pd_member(rng, D):
    """Random covariance matrix of the Gaussian DAG model over ``D``."""
    _, _, omega = random_p_member(rng, D, spread=0.7)
    S = np.linalg.inv(omega)
    return (S + S.T) / 2


def restrict_to_pattern(S, G):
    """Partial matrix keeping the diagonal and the skeleton cells of ``G``."""
    U = undirected_version(G) if isinstance(G, Dag) else G
    p = U.p
    mask = np.eye(p, dtype=bool)
    for i, j in U.edges:
        mask[i - 1, j - 1] = mask[j - 1, i - 1] = True
    return PartialMatrix(np.where(mask, S, np.nan))


def random_pd_matrix(rng, p):
    A = rng.normal(size=(p, p))
    return A.T @ A + p * 0.1 * np.eye(p)


def chromatic_at(p, edges, x):
    """Chromatic polynomial at ``x`` by deletion-contraction (oracle)."""

    @lru_cache(maxsize=None)
    def chi(n, es):
        if not es:
            return x ** n
        (a, b), rest = es[0], es[1:]
        # contract b into a
        merged = set()
        for u, v in rest:
            u, v = (a if u == b else u), (a if v == b else v)
            if u != v:
                merged.add((min(u, v), max(u, v)))
        return chi(n, rest) - chi(n - 1, tuple(sorted(merged)))

    return chi(p, tuple(sorted((min(e), max(e)) for e in edges)))


def small_graph_corpus():
    rng = np.random.default_rng(7)
    corpus = [
        UGraph(2, [(1, 2)]),
        UGraph(3, [(1, 2), (2, 3), (1, 3)]),
        UGraph(4, [(1, 2), (1, 3), (2, 4), (3, 4)]),
        UGraph(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]),
        UGraph(4, list(itertools.combinations(range(1, 5), 2))),
        UGraph(5, []),
        UGraph(6, [(1, 2), (2, 3), (3, 1), (4, 5)]),
    ]
    while len(corpus) < 40:
        p = int(rng.integers(2, 7))
        pairs = list(itertools.combinations(range(1, p + 1), 2))
        k = int(rng.integers(0, min(8, len(pairs)) + 1))
        chosen = [pairs[t] for t in rng.choice(len(pairs), size=k, replace=False)]
        corpus.append(UGraph(p, chosen))
    return corpus


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
