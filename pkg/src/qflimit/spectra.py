"""Adjacency spectra and their edge-count scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from ._io import atomic_open
from .errors import ConvergenceFailure, TooLarge
from .graph import DENSE_CAP, Graph, truncated_graph

LANCZOS_TOL = 1e-8
LANCZOS_MAXITER = 20000
# dense eigensolve is used when the graph is small or most of the spectrum is wanted
DENSE_AUTO = 1500


def order_eigenvalues(values) -> np.ndarray:
    """Sort by descending ``|lambda|``, ties by descending signed value."""
    values = np.asarray(values, dtype=np.float64)
    return values[np.lexsort((-values, -np.abs(values)))]


def adjacency_spectrum(g: Graph, cap: int = DENSE_CAP) -> np.ndarray:
    """All ``n`` eigenvalues of ``A(g)``, ordered by :func:`order_eigenvalues`."""
    if g.n > cap:
        raise TooLarge(f"dense eigensolve refused for n={g.n} > cap={cap}")
    if g.n == 0:
        return np.empty(0)
    if g.edge_count == 0:
        return np.zeros(g.n)
    try:
        vals = scipy.linalg.eigvalsh(g.dense_adjacency(cap), check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return order_eigenvalues(vals)


def top_eigenvalues(g: Graph, k: int, cap: int = DENSE_CAP) -> np.ndarray:
    """The ``k`` eigenvalues of largest magnitude.

    Uses implicitly restarted Lanczos (ARPACK) with a fixed-seed start vector
    for large graphs, the dense solver otherwise.
    """
    k = min(k, g.n)
    if k <= 0:
        return np.empty(0)
    if g.edge_count == 0:
        return np.zeros(k)
    if g.n <= DENSE_AUTO or k >= g.n - 1:
        return adjacency_spectrum(g, cap=cap)[:k]
    v0 = np.random.default_rng(0).standard_normal(g.n)
    # request a few extra so ties at the boundary are resolved consistently
    want = min(k + 2, g.n - 1)
    try:
        vals = spla.eigsh(g.adjacency(), k=want, which="LM", v0=v0,
                          tol=LANCZOS_TOL, maxiter=LANCZOS_MAXITER,
                          return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(f"Lanczos did not converge: {exc}") from exc
    return order_eigenvalues(vals)[:k]


@dataclass(frozen=True)
class ScaledSpectrum:
    values: np.ndarray
    raw: np.ndarray
    source_edge_count: int
    K: int

    def to_csv(self, path) -> None:
        with atomic_open(path) as fh:
            fh.write("index,lambda,scaled\n")
            for i, (lam, val) in enumerate(zip(self.raw.tolist(), self.values.tolist()), 1):
                fh.write(f"{i},{lam!r},{val!r}\n")


def scaled_truncated_spectrum(g: Graph, K: int, top_s: int | None = None) -> ScaledSpectrum:
    """Top eigenvalues of ``G_{n,K}`` divided by ``sqrt(|E(G_n)|)``.

    The denominator always uses the full graph's edge count.
    """
    h = truncated_graph(g, K)
    if top_s is None:
        raw = adjacency_spectrum(h)
    else:
        raw = top_eigenvalues(h, top_s)
    return ScaledSpectrum(raw / math.sqrt(g.edge_count), raw, g.edge_count, K)


def spectral_criterion(g: Graph) -> float:
    """``max_u |lambda_u| / sqrt(|E|)``."""
    lam = top_eigenvalues(g, 1)
    return float(abs(lam[0]) / math.sqrt(g.edge_count))
