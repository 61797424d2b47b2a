"""Directed acyclic and undirected graphs on the vertex set ``1..p``.

A :class:`Dag` is any acyclic digraph; most of the completion machinery
additionally needs the *ordered* numbering in which every edge ``i -> j``
has ``i > j``. :func:`topological_relabel` produces it.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque

from .errors import (
    CycleDetected,
    GraphError,
    NotDecomposable,
    NotSeparating,
    OrderingError,
    ParseError,
)

__all__ = [
    "Dag",
    "UGraph",
    "undirected_version",
    "immoralities",
    "is_perfect",
    "moral_graph",
    "topological_relabel",
    "invert_permutation",
    "maximal_cliques",
    "maximum_cardinality_search",
    "is_decomposable",
    "perfect_dag_version",
    "immorality_closure",
    "enumerate_acyclic_orientations",
    "separates",
    "parse_graph",
    "format_graph",
    "read_graph",
]


def _check_vertex(p, v):
    if not isinstance(v, int) or isinstance(v, bool):
        try:
            iv = int(v)
        except (TypeError, ValueError):
            raise GraphError(f"vertex {v!r} is not an integer") from None
        if iv != v:
            raise GraphError(f"vertex {v!r} is not an integer")
        v = iv
    if not 1 <= v <= p:
        raise GraphError(f"vertex {v} out of range 1..{p}")
    return v


class Dag:
    """Directed acyclic graph with vertices ``1..p``.

    Parameters
    ----------
    p : int
        Number of vertices.
    edges : iterable of (int, int)
        Directed edges ``(i, j)`` meaning ``i -> j``. Self-loops, duplicate
        edges and directed cycles are rejected.
    """

    def __init__(self, p, edges=()):
        if p < 0:
            raise GraphError("vertex count must be non-negative")
        self.p = int(p)
        seen = set()
        for e in edges:
            i, j = (_check_vertex(self.p, v) for v in e)
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge {i} -> {j}")
            seen.add((i, j))
        self.edges = frozenset(seen)
        pa = {v: set() for v in range(1, self.p + 1)}
        ch = {v: set() for v in range(1, self.p + 1)}
        for i, j in self.edges:
            pa[j].add(i)
            ch[i].add(j)
        self._pa = {v: frozenset(s) for v, s in pa.items()}
        self._ch = {v: frozenset(s) for v, s in ch.items()}
        cycle = _find_cycle(self.p, self._ch)
        if cycle is not None:
            raise CycleDetected(cycle)

    def __repr__(self):
        return f"Dag({self.p}, {sorted(self.edges, reverse=True)})"

    def __eq__(self, other):
        return isinstance(other, Dag) and self.p == other.p and self.edges == other.edges

    def __hash__(self):
        return hash((Dag, self.p, self.edges))

    @property
    def vertices(self):
        return range(1, self.p + 1)

    @property
    def is_ordered(self):
        """True when every edge ``i -> j`` has ``i > j``."""
        return all(i > j for i, j in self.edges)

    def require_ordered(self):
        bad = sorted((i, j) for i, j in self.edges if i < j)
        if bad:
            raise OrderingError(bad)

    def parents(self, j):
        return self._pa[_check_vertex(self.p, j)]

    def children(self, j):
        return self._ch[_check_vertex(self.p, j)]

    def family(self, j):
        return self.parents(j) | {j}

    def neighbors(self, j):
        return self.parents(j) | self.children(j)

    def predecessors(self, j):
        """``{i > j : i not a parent of j}``; requires the ordered numbering."""
        self.require_ordered()
        j = _check_vertex(self.p, j)
        pa = self._pa[j]
        return frozenset(i for i in range(j + 1, self.p + 1) if i not in pa)

    def adjacent(self, i, j):
        return (i, j) in self.edges or (j, i) in self.edges

    def relabel(self, perm):
        """Dag with vertex ``v`` renamed to ``perm[v - 1]``."""
        return Dag(self.p, [(perm[i - 1], perm[j - 1]) for i, j in self.edges])


class UGraph:
    """Undirected simple graph with vertices ``1..p``.

    Edges are stored as sorted pairs ``(i, j)`` with ``i < j``; giving both
    ``(i, j)`` and ``(j, i)`` counts as a duplicate.
    """

    def __init__(self, p, edges=()):
        if p < 0:
            raise GraphError("vertex count must be non-negative")
        self.p = int(p)
        seen = set()
        for e in edges:
            i, j = (_check_vertex(self.p, v) for v in e)
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {{{i}, {j}}}")
            seen.add(key)
        self.edges = frozenset(seen)
        adj = {v: set() for v in range(1, self.p + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        self._adj = {v: frozenset(s) for v, s in adj.items()}

    def __repr__(self):
        return f"UGraph({self.p}, {sorted(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, UGraph) and self.p == other.p and self.edges == other.edges

    def __hash__(self):
        return hash((UGraph, self.p, self.edges))

    @property
    def vertices(self):
        return range(1, self.p + 1)

    def neighbors(self, v):
        return self._adj[_check_vertex(self.p, v)]

    def adjacent(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def is_complete(self, S):
        S = sorted(S)
        return all(self.adjacent(a, b) for a, b in itertools.combinations(S, 2))

    def add_edges(self, extra):
        extra = {(min(i, j), max(i, j)) for i, j in extra} - self.edges
        return UGraph(self.p, sorted(self.edges | extra))


def _find_cycle(p, children):
    """A directed cycle as a vertex list (first vertex repeated), or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(range(1, p + 1), WHITE)
    for root in range(1, p + 1):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(children[root])))]
        path = [root]
        color[root] = GREY
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == GREY:
                    return path[path.index(w):] + [w]
                if color[w] == WHITE:
                    color[w] = GREY
                    path.append(w)
                    stack.append((w, iter(sorted(children[w]))))
                    break
            else:
                color[v] = BLACK
                stack.pop()
                path.pop()
    return None


def undirected_version(D):
    """Skeleton of ``D``: every directed edge replaced by an undirected one."""
    return UGraph(D.p, D.edges)


def immoralities(D):
    """All induced ``i -> k <- j`` with ``i, j`` non-adjacent, as ``(i, k, j)``.

    Each triple appears once with ``i > j``; the list is sorted by the
    collider ``k`` and then by ``(i, j)``.
    """
    out = []
    for k in D.vertices:
        for j, i in itertools.combinations(sorted(D.parents(k)), 2):
            if not D.adjacent(i, j):
                out.append((i, k, j))
    out.sort(key=lambda t: (t[1], t[0], t[2]))
    return out


def is_perfect(D):
    """True iff ``D`` has no immoralities (every parent set is complete)."""
    return not immoralities(D)


def moral_graph(D):
    return undirected_version(D).add_edges((i, j) for i, _, j in immoralities(D))


def topological_relabel(p, edges):
    """Renumber an acyclic digraph so that every edge ``i -> j`` has ``i > j``.

    Returns ``(dag, perm)`` where vertex ``v`` of the input becomes
    ``perm[v - 1]``. Labels are handed out from 1 upwards to the smallest
    vertex whose children are all labelled, so an input that already
    satisfies the convention gets the identity permutation.

    Raises :class:`CycleDetected` with a witness cycle.
    """
    raw = Dag(p, edges)  # admission: range, loops, duplicates, cycles
    remaining = {v: set(raw.children(v)) for v in raw.vertices}
    ready = sorted(v for v, c in remaining.items() if not c)
    perm = [0] * raw.p
    label = 0
    while ready:
        v = heapq.heappop(ready)
        label += 1
        perm[v - 1] = label
        for u in raw.parents(v):
            remaining[u].discard(v)
            if not remaining[u]:
                heapq.heappush(ready, u)
    perm = tuple(perm)
    return raw.relabel(perm), perm


def invert_permutation(perm):
    inv = [0] * len(perm)
    for old, new in enumerate(perm, start=1):
        inv[new - 1] = old
    return tuple(inv)


def maximal_cliques(G):
    """Maximal cliques by Bron-Kerbosch with pivoting.

    Each clique is a sorted tuple; the list is sorted lexicographically.
    Isolated vertices give singleton cliques.
    """
    adj = {v: set(G.neighbors(v)) for v in G.vertices}
    out = []

    def expand(R, P, X):
        if not P and not X:
            out.append(tuple(sorted(R)))
            return
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in sorted(P - adj[pivot]):
            expand(R | {v}, P & adj[v], X & adj[v])
            P = P - {v}
            X = X | {v}

    if G.p:
        expand(set(), set(G.vertices), set())
    return sorted(out)


def maximum_cardinality_search(G):
    """Visit order of maximum cardinality search, ties to the lowest label."""
    weight = dict.fromkeys(G.vertices, 0)
    order = []
    unvisited = set(G.vertices)
    while unvisited:
        v = min(unvisited, key=lambda u: (-weight[u], u))
        order.append(v)
        unvisited.remove(v)
        for w in G.neighbors(v):
            if w in unvisited:
                weight[w] += 1
    return order


def _is_peo(G, peo):
    pos = {v: k for k, v in enumerate(peo)}
    for v in peo:
        later = [w for w in G.neighbors(v) if pos[w] > pos[v]]
        if not later:
            continue
        u = min(later, key=pos.__getitem__)
        if any(w != u and not G.adjacent(u, w) for w in later):
            return False
    return True


def is_decomposable(G, return_ordering=False):
    """Chordality test by maximum cardinality search.

    The reverse MCS visit order is checked for being a perfect elimination
    ordering. With ``return_ordering`` the result is ``(flag, ordering)``
    where ``ordering`` is that PEO when ``flag`` is true and None otherwise.
    """
    peo = maximum_cardinality_search(G)[::-1]
    ok = _is_peo(G, peo)
    if return_ordering:
        return ok, (peo if ok else None)
    return ok


def perfect_dag_version(G):
    """A perfect DAG whose skeleton is ``G``.

    Edges point from the later to the earlier endpoint in the perfect
    elimination ordering, so each vertex's parents are its later neighbours,
    which form a clique. Labels are those of ``G``; the result generally
    does not satisfy the ordered numbering (see :func:`topological_relabel`).
    """
    ok, peo = is_decomposable(G, return_ordering=True)
    if not ok:
        raise NotDecomposable("graph has a chordless cycle of length >= 4")
    pos = {v: k for k, v in enumerate(peo)}
    edges = [(i, j) if pos[i] > pos[j] else (j, i) for i, j in sorted(G.edges)]
    return Dag(G.p, edges)


def immorality_closure(D):
    """The sequence ``D0 = D, D1, ..., Dn`` ending in a perfect DAG.

    Each round adds ``i -> j`` for every immorality ``i -> k <- j``
    (``i > j``) of the previous DAG, all at once.
    """
    D.require_ordered()
    seq = [D]
    while True:
        im = immoralities(seq[-1])
        if not im:
            return seq
        new = {(i, j) for i, _, j in im}
        seq.append(Dag(D.p, sorted(seq[-1].edges | new)))


def enumerate_acyclic_orientations(G):
    """Every acyclic orientation of ``G`` as a :class:`Dag` in ``G``'s labels.

    Backtracking over the edges in sorted order; branches closing a
    directed cycle are pruned. Exponential in the number of edges.
    """
    edges = sorted(G.edges)
    out = []
    children = {v: set() for v in G.vertices}

    def reaches(a, b):
        seen, todo = {a}, [a]
        while todo:
            v = todo.pop()
            if v == b:
                return True
            for w in children[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return False

    def go(k, chosen):
        if k == len(edges):
            out.append(Dag(G.p, chosen))
            return
        i, j = edges[k]
        for a, b in ((j, i), (i, j)):
            if not reaches(b, a):
                children[a].add(b)
                chosen.append((a, b))
                go(k + 1, chosen)
                chosen.pop()
                children[a].discard(b)

    go(0, [])
    return out


def separates(G, A, B, S):
    """True iff every path in ``G`` from ``A`` to ``B`` meets ``S``."""
    A, B, S = set(A), set(B), set(S)
    if A & B or A & S or B & S:
        raise NotSeparating("A, B and S must be pairwise disjoint")
    seen = set(A)
    todo = deque(A)
    while todo:
        v = todo.popleft()
        if v in B:
            return False
        for w in G.neighbors(v):
            if w not in seen and w not in S:
                seen.add(w)
                todo.append(w)
    return True


# file format

def parse_graph(text):
    """Parse the graph file format.

    First non-comment line is ``dag <p>`` or ``ugraph <p>``; each further
    line holds one edge ``<i> <j>`` (``i -> j`` for a dag). Lines starting
    with ``#`` and blank lines are ignored.
    """
    header = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if header is None:
            if len(tok) != 2 or tok[0] not in ("dag", "ugraph"):
                raise ParseError("expected header 'dag <p>' or 'ugraph <p>'", lineno, 1)
            try:
                header = (tok[0], int(tok[1]))
            except ValueError:
                raise ParseError(f"bad vertex count {tok[1]!r}", lineno, len(tok[0]) + 2) from None
            continue
        if len(tok) != 2:
            raise ParseError(f"expected two vertex labels, got {len(tok)} tokens", lineno, 1)
        try:
            edges.append((int(tok[0]), int(tok[1])))
        except ValueError:
            raise ParseError(f"bad edge {s!r}", lineno, 1) from None
    if header is None:
        raise ParseError("empty graph file")
    kind, p = header
    try:
        return Dag(p, edges) if kind == "dag" else UGraph(p, edges)
    except CycleDetected:
        raise
    except GraphError as exc:
        raise ParseError(str(exc)) from exc


def format_graph(G):
    if isinstance(G, Dag):
        lines = [f"dag {G.p}"] + [f"{i} {j}" for i, j in sorted(G.edges, key=lambda e: (-e[0], -e[1]))]
    else:
        lines = [f"ugraph {G.p}"] + [f"{i} {j}" for i, j in sorted(G.edges)]
    return "\n".join(lines) + "\n"


def read_graph(path):
    with open(path) as fh:
        return parse_graph(fh.read())
