"""Exception types shared across the package.

Vertex and cell indices carried by the exceptions are 1-based.
"""


class PdcError(Exception):
    """Base class for all errors raised by :mod:`pdc`."""


# linear algebra

class ZeroPivot(PdcError):
    def __init__(self, j, pivot=0.0):
        self.j = j
        self.pivot = pivot
        super().__init__(f"zero pivot at index {j} (value {pivot:.3e})")


class SingularBlock(PdcError):
    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"block {list(self.indices)} is numerically singular")


class SingularMatrix(PdcError):
    pass


# graphs

class GraphError(PdcError):
    pass


class CycleDetected(GraphError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("directed cycle " + " -> ".join(map(str, self.cycle)))


class OrderingError(GraphError):
    """Raised when a DAG violates the ``i -> j  implies  i > j`` numbering."""

    def __init__(self, edges):
        self.edges = tuple(edges)
        super().__init__(
            f"edges {list(self.edges)} violate the i -> j => i > j numbering; "
            "use topological_relabel first"
        )


class NotDecomposable(GraphError):
    pass


class NotPerfect(GraphError):
    def __init__(self, immoralities):
        self.immoralities = tuple(immoralities)
        super().__init__(f"DAG is not perfect, immoralities: {list(self.immoralities)}")


class PerfectDag(GraphError):
    def __init__(self):
        super().__init__("graph is perfect; always completable")


class NotSeparating(GraphError):
    pass


# partial matrices

class PatternMismatch(PdcError):
    def __init__(self, missing=(), extra=()):
        self.missing = tuple(sorted(missing))
        self.extra = tuple(sorted(extra))
        parts = []
        if self.missing:
            parts.append(f"missing {list(self.missing)}")
        if self.extra:
            parts.append(f"extra {list(self.extra)}")
        super().__init__("pattern mismatch: " + "; ".join(parts))


class AsymmetricValue(PdcError):
    def __init__(self, i, j, a, b):
        self.i, self.j = i, j
        super().__init__(f"cell ({i},{j}) = {a!r} but ({j},{i}) = {b!r}")


class UnspecifiedCell(PdcError):
    def __init__(self, i, j):
        self.i, self.j = i, j
        super().__init__(f"cell ({i},{j}) is unspecified")


class UnspecifiedDiagonal(PdcError):
    def __init__(self, i):
        self.i = i
        super().__init__(f"diagonal cell ({i},{i}) must be specified")


class ParseError(PdcError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            where += ": "
        super().__init__(where + message)


# completion

class NotPartialPd(PdcError):
    def __init__(self, clique):
        self.clique = tuple(clique)
        super().__init__(f"restriction to clique {list(self.clique)} is not positive definite")


class NotCompletable(PdcError):
    def __init__(self, j, reason=""):
        self.j = j
        super().__init__(f"no completion exists (vertex {j})" + (f": {reason}" if reason else ""))


class NotInPdD(PdcError):
    pass


class BadEpsilon(PdcError):
    pass


class OutOfRange(PdcError):
    pass
