"""Weighted digraphs and their (generalized) Laplacians.

Convention used throughout the package: the adjacency entry ``A[i, j]`` is
the weight agent ``i`` places on what it hears from agent ``j``.  A nonzero
``A[i, j]`` therefore means there is an edge from ``j`` into ``i``.  Weights
may be negative; the diagonal is identically zero.

The generalized Laplacian is ``L = diag(row sums of A) - A``, so ``L @ 1 = 0``
whatever the signs of the weights.  A graph is balanced when every node's
in-weight equals its out-weight, i.e. row sums of ``A`` equal column sums.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    NegativeWeights,
    NonFinite,
    RowSumViolation,
)
from .linalg import DEFAULT_TOL, as_matrix, sym_eigenvalues


@dataclass(frozen=True, eq=False)
class Digraph:
    """Immutable weighted digraph on ``n`` nodes.

    ``adjacency[i, j]`` weights the edge from ``j`` into ``i``.  The array is
    copied and frozen at construction; the diagonal must be zero.
    """

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.adjacency, name="adjacency")
        if a.shape != (self.n, self.n):
            raise DimensionMismatch(
                f"adjacency shape {a.shape} does not match n={self.n}"
            )
        if np.any(np.diag(a) != 0.0):
            raise ConfigError("adjacency diagonal must be zero (no self-loops)")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @property
    def edge_count(self) -> int:
        """Number of directed edges (nonzero off-diagonal weights)."""
        return int(np.count_nonzero(self.adjacency))

    def in_degrees(self) -> np.ndarray:
        """Row sums of the adjacency: total weight entering each node."""
        return self.adjacency.sum(axis=1)

    def out_degrees(self) -> np.ndarray:
        """Column sums of the adjacency: total weight leaving each node."""
        return self.adjacency.sum(axis=0)


@dataclass(frozen=True, eq=False)
class Laplacian:
    """Generalized Laplacian ``diag(in-degrees) - adjacency`` of a digraph."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix, name="laplacian")
        if m.shape != (self.n, self.n):
            raise DimensionMismatch(
                f"laplacian shape {m.shape} does not match n={self.n}"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def laplacian(g: Digraph) -> Laplacian:
    """Generalized Laplacian of ``g``; rows sum to zero to machine precision."""
    a = g.adjacency
    return Laplacian(g.n, np.diag(a.sum(axis=1)) - a)


def symmetrized_laplacian(l: Laplacian) -> np.ndarray:
    """Symmetric part ``(L + L.T) / 2`` of a Laplacian."""
    m = l.matrix
    return 0.5 * (m + m.T)


def is_balanced(g: Digraph, tol: float = DEFAULT_TOL) -> bool:
    """True when each node's in-weight equals its out-weight within ``tol``.

    The comparison is absolute for weights of order one and scales with the
    largest degree magnitude for larger graphs.
    """
    din = g.in_degrees()
    dout = g.out_degrees()
    scale = max(1.0, float(np.max(np.abs(din))), float(np.max(np.abs(dout))))
    return bool(np.max(np.abs(din - dout)) <= tol * scale)


def union(graphs) -> Digraph:
    """Digraph whose adjacency is the entrywise sum over ``graphs``.

    Laplacians add under this operation.  All graphs must share ``n``.
    """
    graphs = list(graphs)
    if not graphs:
        raise DimensionMismatch("union of zero graphs is undefined")
    n = graphs[0].n
    total = np.zeros((n, n))
    for g in graphs:
        if g.n != n:
            raise DimensionMismatch("union requires graphs on the same node set")
        total += g.adjacency
    return Digraph(n, total)


def _reachable(support: np.ndarray, root: int) -> np.ndarray:
    # Forward reachability on the boolean support; support[i, j] means j -> i,
    # so the successors of node j are the rows with a True in column j.
    n = support.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    stack = [root]
    while stack:
        j = stack.pop()
        for i in np.nonzero(support[:, j])[0]:
            if not seen[i]:
                seen[i] = True
                stack.append(int(i))
    return seen


def is_strongly_connected(g: Digraph) -> bool:
    """True when every node reaches every other along directed edges."""
    if g.n == 1:
        return True
    support = g.adjacency != 0.0
    if not _reachable(support, 0).all():
        return False
    return bool(_reachable(support.T, 0).all())


def has_spanning_tree(l: Laplacian, tol: float = DEFAULT_TOL) -> bool:
    """True when some root has directed paths to all nodes.

    Operates on the Laplacian of a nonnegatively weighted digraph: an edge
    from ``j`` into ``i`` is present when ``-L[i, j] > tol``.  A weight below
    ``-tol`` (i.e. an off-diagonal Laplacian entry above ``tol``) raises
    NegativeWeights; the signed case is not decided here.
    """
    m = l.matrix
    n = l.n
    off = m - np.diag(np.diag(m))
    if float(np.max(off)) > tol:
        raise NegativeWeights(
            "spanning-tree test requires nonnegative edge weights"
        )
    support = (-off) > tol
    np.fill_diagonal(support, False)
    return any(_reachable(support, r).all() for r in range(n))


def algebraic_connectivity(m, tol: float = DEFAULT_TOL) -> float:
    """Second-smallest eigenvalue of a symmetric zero-row-sum matrix.

    Raises RowSumViolation when row sums exceed ``tol`` relative to the
    matrix scale; raises NotSymmetric (via the eigensolver) for asymmetric
    input.  For a single node the convention is 0.
    """
    a = as_matrix(m)
    n = a.shape[0]
    rs = a.sum(axis=1)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and float(np.max(np.abs(rs))) > tol * scale:
        raise RowSumViolation("matrix rows must sum to zero for connectivity")
    if n < 2:
        return 0.0
    eigs = sym_eigenvalues(a, tol=tol)
    return float(eigs[1])


# -- convenience constructors ----------------------------------------------

def complete_graph(n: int, weight: float = 1.0) -> Digraph:
    """All-to-all digraph with a common weight and zero diagonal."""
    a = np.full((n, n), float(weight))
    np.fill_diagonal(a, 0.0)
    return Digraph(n, a)


def ring_graph(n: int, weight: float = 1.0, directed: bool = False) -> Digraph:
    """Ring on ``n`` nodes.

    Directed: each node listens to its predecessor only.  Undirected: each
    node listens to both neighbours, which makes the graph symmetric and so
    trivially balanced.
    """
    if n < 2:
        raise ConfigError("ring needs at least 2 nodes")
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i - 1) % n] = weight
        if not directed:
            a[i, (i + 1) % n] = weight
    return Digraph(n, a)


# -- JSON interchange -------------------------------------------------------

def digraph_to_dict(g: Digraph) -> dict:
    """Plain-dict form: ``{"n": ..., "adjacency": [[...], ...]}``."""
    return {"n": g.n, "adjacency": g.adjacency.tolist()}


def digraph_from_dict(d: dict) -> Digraph:
    """Inverse of :func:`digraph_to_dict` with validation."""
    try:
        n = int(d["n"])
        adjacency = d["adjacency"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed digraph object: {exc}") from exc
    try:
        return Digraph(n, np.asarray(adjacency, dtype=float))
    except (ValueError, NonFinite, DimensionMismatch) as exc:
        raise ConfigError(f"bad digraph adjacency: {exc}") from exc


def digraph_to_json(g: Digraph) -> str:
    return json.dumps(digraph_to_dict(g))


def digraph_from_json(s: str) -> Digraph:
    try:
        d = json.loads(s)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid digraph JSON: {exc}") from exc
    return digraph_from_dict(d)
