"""Degree-ordered simple graphs.

Public vertex indices are 1-based, matching the labeling ``1..n`` with
``d_1 >= d_2 >= ... >= d_n``.  Internally everything is 0-based numpy.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ._io import atomic_open
from .errors import (
    DuplicateEdge,
    EmptyGraph,
    GraphError,
    IndexOutOfRange,
    InvalidThreshold,
    SelfLoop,
    TooLarge,
)

DENSE_CAP = 5000


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph with a CSR adjacency.

    ``src``/``dst`` list each edge once with ``src < dst`` (0-based), sorted
    lexicographically.  ``labels[i]`` is the original label of vertex ``i+1``.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    labels: np.ndarray
    degree_ordered: bool = True
    meta: dict = field(default_factory=dict)

    # -- construction -------------------------------------------------

    @classmethod
    def _build(cls, n, src, dst, labels=None, reorder=True, meta=None):
        """Assemble from validated 0-based edge arrays.

        With ``reorder`` vertices are relabeled by (degree desc, label asc).
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if labels is None:
            labels = np.arange(1, n + 1, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if reorder:
            deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
            order = np.lexsort((labels, -deg))
            rank = np.empty(n, dtype=np.int64)
            rank[order] = np.arange(n)
            src, dst = rank[src], rank[dst]
            labels = labels[order]
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        idx = np.lexsort((hi, lo))
        return cls(int(n), lo[idx], hi[idx], labels, degree_ordered=reorder or n == 0,
                   meta=dict(meta or {}))

    # -- basic quantities -------------------------------------------

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    @cached_property
    def degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n) + np.bincount(self.dst, minlength=self.n)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric CSR ``(indptr, indices)`` with sorted neighbour lists."""
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        order = np.lexsort((cols, rows))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(cols[order])

    @cached_property
    def upper_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR of forward neighbours only (``v > u``)."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.src, minlength=self.n), out=indptr[1:])
        return indptr, np.ascontiguousarray(self.dst)

    def neighbors(self, v: int) -> np.ndarray:
        """1-based neighbours of 1-based vertex ``v``."""
        self._check_vertex(v)
        indptr, indices = self.csr
        return indices[indptr[v - 1]:indptr[v]] + 1

    def adjacency(self) -> sp.csr_matrix:
        indptr, indices = self.csr
        data = np.ones(indices.size, dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def dense_adjacency(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.n > cap:
            raise TooLarge(f"{self.n} vertices exceeds dense cap {cap}")
        a = np.zeros((self.n, self.n))
        a[self.src, self.dst] = 1.0
        a[self.dst, self.src] = 1.0
        return a

    def edges(self) -> list[tuple[int, int]]:
        """Edges as 1-based pairs ``(u, v)`` with ``u < v``."""
        return list(zip((self.src + 1).tolist(), (self.dst + 1).tolist()))

    @cached_property
    def graph_id(self) -> str:
        h = hashlib.blake2b(digest_size=8)
        h.update(np.int64(self.n).tobytes())
        h.update(self.src.tobytes())
        h.update(self.dst.tobytes())
        return h.hexdigest()

    def _check_vertex(self, v):
        if not 1 <= v <= self.n:
            raise IndexOutOfRange(f"vertex {v} outside 1..{self.n}")

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


def from_edge_list(pairs, n: int | None = None) -> Graph:
    """Build a degree-ordered graph from 1-based ``(u, v)`` pairs.

    ``n`` defaults to the largest label; pass it to keep isolated vertices.
    """
    arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if arr.shape[0] == 0:
        raise EmptyGraph("graph has no edges")
    if arr.min() < 1:
        raise GraphError("vertex labels must be positive integers")
    u, v = arr[:, 0], arr[:, 1]
    loops = np.flatnonzero(u == v)
    if loops.size:
        raise SelfLoop(f"self-loop at vertex {int(u[loops[0]])}")
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    key = np.stack([lo, hi], axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    if (counts > 1).any():
        a, b = uniq[np.argmax(counts > 1)]
        raise DuplicateEdge(f"edge ({int(a)}, {int(b)}) listed more than once")
    top = int(hi.max())
    if n is None:
        n = top
    elif n < top:
        raise GraphError(f"n={n} is smaller than the largest label {top}")
    return Graph._build(n, lo - 1, hi - 1)


def codegree(g: Graph, s: int, t: int) -> int:
    """Number of common neighbours of 1-based vertices ``s`` and ``t``."""
    g._check_vertex(s)
    g._check_vertex(t)
    if s == t:
        return int(g.degree[s - 1])
    return int(np.intersect1d(g.neighbors(s), g.neighbors(t), assume_unique=True).size)


def codegree_matrix(g: Graph, K: int) -> np.ndarray:
    """``K x K`` matrix of co-degrees among the top-``K`` vertices."""
    if not 0 <= K <= g.n:
        raise IndexOutOfRange(f"K={K} outside 0..{g.n}")
    rows = g.adjacency()[:K]
    return (rows @ rows.T).toarray()


def truncated_graph(g: Graph, K: int) -> Graph:
    """Induced subgraph on vertices ``K+1..n``, relabeled ``1..n-K`` in place.

    Surviving vertices keep their relative order; no re-sorting by the new
    degrees is done.
    """
    if not 0 <= K < g.n:
        raise IndexOutOfRange(f"K={K} must satisfy 0 <= K < n={g.n}")
    if K == 0:
        return g
    keep = g.src >= K
    return Graph._build(g.n - K, g.src[keep] - K, g.dst[keep] - K,
                        labels=g.labels[K:], reorder=False)


@dataclass(frozen=True)
class VertexPartition:
    """High/medium/low degree ranges; each is 1-based inclusive ``(lo, hi)``,
    empty when ``lo > hi``."""

    K1: float
    K2: float
    V1: tuple[int, int]
    V2: tuple[int, int]
    V3: tuple[int, int]

    @staticmethod
    def size(r):
        return max(0, r[1] - r[0] + 1)


def partition(g: Graph, K1: float, K2: float) -> VertexPartition:
    if K1 < 1 or K2 < 1:
        raise InvalidThreshold("K1 and K2 must both be >= 1")
    c1 = min(math.floor(K1), g.n)
    c2 = min(max(math.floor(K2 * math.sqrt(g.edge_count)), c1), g.n)
    return VertexPartition(K1, K2, (1, c1), (c1 + 1, c2), (c2 + 1, g.n))


# -- edge-list text format ------------------------------------------------

def read_edge_list(path) -> Graph:
    """Parse ``u v`` lines; ``#`` starts a comment.  A ``# n <N>`` header
    (as written by :func:`write_edge_list`) fixes the vertex count."""
    pairs = []
    n = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line, _, comment = raw.partition("#")
            tokens = comment.split()
            if len(tokens) == 2 and tokens[0] == "n" and not line.strip():
                n = int(tokens[1])
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected 'u v', got {raw.rstrip()!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphError(f"{path}:{lineno}: non-integer vertex label") from None
    return from_edge_list(pairs, n=n)


def write_edge_list(g: Graph, path) -> None:
    """Write ``g`` in its degree-ordered labels, atomically."""
    with atomic_open(path) as fh:
        fh.write(f"# n {g.n}\n")
        fh.write(f"# edges {g.edge_count}\n")
        lines = np.char.add(np.char.add((g.src + 1).astype(str), " "), (g.dst + 1).astype(str))
        if lines.size:
            fh.write("\n".join(lines.tolist()))
            fh.write("\n")
