"""Motif counts that enter the fourth moment, with exhaustive oracles."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import InvalidParameter, TooLargeForOracle
from .graph import Graph

ORACLE_MAX_VERTICES = 10
ORACLE_MAX_EDGES = 4
GAMMA_MAX_VERTICES = 12


@dataclass(frozen=True)
class MotifCounts:
    edges: int
    cherries: int
    four_cycles: int
    triangles: int
    disjoint_edge_pairs: int
    closed_walks_4: int

    def to_json(self) -> dict:
        return asdict(self)


def count_motifs(g: Graph) -> MotifCounts:
    """Closed-form counts from degrees and co-degrees, ``O(sum_v d_v^2)``."""
    d = g.degree.astype(np.int64)
    e = g.edge_count
    indptr, indices = g.csr
    pair_c2, pair_sq, tri3 = kernels.codegree_sums(indptr, indices, g.n)
    cherries = int((d * (d - 1) // 2).sum())
    return MotifCounts(
        edges=e,
        cherries=cherries,
        # each 4-cycle is seen once per diagonal pair
        four_cycles=pair_c2 // 2,
        triangles=tri3 // 3,
        disjoint_edge_pairs=e * (e - 1) // 2 - cherries,
        closed_walks_4=int((d * d).sum()) + 2 * pair_sq,
    )


# -- small multigraphs ----------------------------------------------------

@dataclass(frozen=True)
class SmallMultigraph:
    """Loop-free multigraph on vertices ``0..n_vertices-1``."""

    n_vertices: int
    edges: tuple

    def __post_init__(self):
        norm = []
        for u, v in self.edges:
            if u == v:
                raise InvalidParameter("multigraphs here carry no self-loops")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise InvalidParameter(f"edge ({u}, {v}) outside 0..{self.n_vertices - 1}")
            norm.append((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def is_simple(self) -> bool:
        return len(set(self.edges)) == len(self.edges)

    def simplify(self) -> "SmallMultigraph":
        return SmallMultigraph(self.n_vertices, tuple(sorted(set(self.edges))))


def _canonical(edges) -> tuple:
    """Isomorphism certificate of a multigraph given by its edge list.

    Isolated vertices are ignored.  Relabelings are restricted to those that
    list vertices by descending degree, which keeps the search tiny for the
    graphs used here and still gives a complete invariant.
    """
    deg: dict[int, int] = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    classes: dict[int, list[int]] = {}
    for v, dv in deg.items():
        classes.setdefault(dv, []).append(v)
    groups = [classes[k] for k in sorted(classes, reverse=True)]
    best = None
    for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
        label = {}
        for v in itertools.chain.from_iterable(perms):
            label[v] = len(label)
        form = tuple(sorted((min(label[u], label[v]), max(label[u], label[v])) for u, v in edges))
        if best is None or form < best:
            best = form
    return best or ()


MOTIFS = {
    "K2": SmallMultigraph(2, ((0, 1),)),
    "K12": SmallMultigraph(3, ((0, 1), (0, 2))),
    "K3": SmallMultigraph(3, ((0, 1), (1, 2), (0, 2))),
    "C4": SmallMultigraph(4, ((0, 1), (1, 2), (2, 3), (0, 3))),
    "2K2": SmallMultigraph(4, ((0, 1), (2, 3))),
    # the multigraphs whose copies carry the fourth moment
    "H0": SmallMultigraph(2, ((0, 1),) * 4),
    "H1": SmallMultigraph(4, ((0, 1), (0, 1), (2, 3), (2, 3))),
    "H2": SmallMultigraph(3, ((0, 1), (0, 1), (0, 2), (0, 2))),
    "H3": SmallMultigraph(3, ((0, 1), (0, 1), (1, 2), (0, 2))),
    "H4": SmallMultigraph(4, ((0, 1), (1, 2), (2, 3), (0, 3))),
}


def motif(name: str) -> SmallMultigraph:
    try:
        return MOTIFS[name]
    except KeyError:
        raise InvalidParameter(f"unknown motif {name!r}; known: {sorted(MOTIFS)}") from None


def brute_force_count(h: SmallMultigraph | str, g: Graph, ordered: bool = False) -> int:
    """Exhaustive copy count of ``h`` in ``g``.

    ``ordered=False`` gives ``N(h, g)``: edge subsets of size ``|E(h)|`` whose
    induced edge-subgraph is isomorphic to the simple graph ``h``.
    ``ordered=True`` gives ``M(h, g)``: ordered edge tuples (repeats allowed)
    forming a multigraph isomorphic to ``h``.
    """
    if isinstance(h, str):
        h = motif(h)
    if g.n > ORACLE_MAX_VERTICES:
        raise TooLargeForOracle(f"oracle handles at most {ORACLE_MAX_VERTICES} vertices")
    k = len(h.edges)
    if not 1 <= k <= ORACLE_MAX_EDGES:
        raise TooLargeForOracle(f"oracle handles 1..{ORACLE_MAX_EDGES} motif edges")
    if not ordered and not h.is_simple:
        raise InvalidParameter("unordered counts need a simple motif; use ordered=True")
    m = g.edge_count
    if m == 0 or (not ordered and m < k):
        return 0
    if ordered:
        tuples = np.array(list(itertools.product(range(m), repeat=k)), dtype=np.int64)
    else:
        tuples = np.array(list(itertools.combinations(range(m), k)), dtype=np.int64)
    inc = np.zeros((m, g.n), dtype=np.int8)
    inc[np.arange(m), g.src] = 1
    inc[np.arange(m), g.dst] = 1
    mult = inc[tuples].sum(axis=1)
    # cheap necessary condition: same degree sequence
    hdeg = np.zeros(max(g.n, h.n_vertices), dtype=np.int64)
    for u, v in h.edges:
        hdeg[u] += 1
        hdeg[v] += 1
    target = np.sort(hdeg)[::-1][:g.n]
    if np.count_nonzero(hdeg) > g.n:
        return 0
    rows = np.sort(mult, axis=1)[:, ::-1]
    candidates = np.flatnonzero((rows == target).all(axis=1))
    ref = _canonical(h.edges)
    src, dst = g.src, g.dst
    count = 0
    for idx in candidates:
        emap = tuples[idx]
        if _canonical(list(zip(src[emap].tolist(), dst[emap].tolist()))) == ref:
            count += 1
    return count


def fractional_stable_number(h: SmallMultigraph | str) -> Fraction:
    """Largest ``sum phi`` over ``phi in {0, 1/2, 1}^V`` with ``phi(u)+phi(v) <= 1``
    on every edge, by exhaustive search."""
    if isinstance(h, str):
        h = motif(h)
    n = h.n_vertices
    if n > GAMMA_MAX_VERTICES:
        raise TooLargeForOracle(f"exhaustive search capped at {GAMMA_MAX_VERTICES} vertices")
    if n == 0:
        return Fraction(0)
    # work in doubled units: phi in {0, 1, 2}, constraint phi_u + phi_v <= 2
    grid = np.indices((3,) * n, dtype=np.int8).reshape(n, -1)
    ok = np.ones(grid.shape[1], dtype=bool)
    for u, v in set(h.edges):
        ok &= (grid[u] + grid[v]) <= 2
    best = int(grid[:, ok].sum(axis=0, dtype=np.int64).max())
    return Fraction(best, 2)


_FORMULA_FIELDS = {
    _canonical(MOTIFS["K2"].edges): "edges",
    _canonical(MOTIFS["K12"].edges): "cherries",
    _canonical(MOTIFS["K3"].edges): "triangles",
    _canonical(MOTIFS["C4"].edges): "four_cycles",
    _canonical(MOTIFS["2K2"].edges): "disjoint_edge_pairs",
}


def copy_count(h: SmallMultigraph | str, g: Graph) -> int:
    """``N(h, g)``: closed form for the named motifs, oracle otherwise."""
    if isinstance(h, str):
        h = motif(h)
    name = _FORMULA_FIELDS.get(_canonical(h.edges)) if h.is_simple else None
    if name is not None:
        return getattr(count_motifs(g), name)
    return brute_force_count(h, g)


def alon_bound_ratio(h: SmallMultigraph | str, g: Graph) -> float:
    """``N(h, g) / |E(g)|^gamma(h)``."""
    if isinstance(h, str):
        h = motif(h)
    gamma = fractional_stable_number(h)
    return copy_count(h, g) / math.pow(g.edge_count, float(gamma))
