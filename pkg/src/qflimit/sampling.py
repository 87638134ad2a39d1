"""Monte Carlo evaluation of the edge quadratic form.

Replication ``i`` always draws from ``rng.stream(seed, "simulate", i)``, so
a run is a pure function of its arguments whatever the worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels, rng
from ._io import atomic_open, read_json, write_json
from .distributions import SourceDistribution, truncate, truncation_params
from .errors import EmptyGraph, EmptySample, InvalidParameter, LengthMismatch
from .graph import Graph

# doubles per work chunk; keeps a chunk's draw matrix around 8 MB
CHUNK_DOUBLES = 1 << 20


def resolve_threads(threads: int | None = None) -> int:
    """Worker count from the argument, else ``QFLIMIT_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("QFLIMIT_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise InvalidParameter("threads must be >= 1")
    return int(threads)


def draw(f: SourceDistribution, count: int, seed: int) -> np.ndarray:
    if count < 1:
        raise InvalidParameter("count must be >= 1")
    return f.sample(rng.stream(seed, "draw"), count)


def statistic(g: Graph, x) -> float:
    """``sum_{uv in E} x_u x_v / sqrt(|E|)``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise LengthMismatch(f"x has shape {x.shape}, graph has {g.n} vertices")
    if g.edge_count == 0:
        raise EmptyGraph("statistic undefined on a graph with no edges")
    return float(np.dot(x[g.src], x[g.dst]) / math.sqrt(g.edge_count))


@dataclass
class EmpiricalSample:
    values: np.ndarray
    reps: int
    seed: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.sort(np.asarray(self.values, dtype=np.float64))
        if self.values.size != self.reps:
            raise InvalidParameter("reps must equal the number of values")

    def __len__(self):
        return self.reps

    def mean(self) -> float:
        return float(self.values.mean())

    def var(self) -> float:
        return float(self.values.var(ddof=1)) if self.reps > 1 else 0.0

    def moment(self, k: int) -> tuple[float, float]:
        """Empirical ``E[S^k]`` and its standard error."""
        p = self.values**k
        se = float(p.std(ddof=1) / math.sqrt(self.reps)) if self.reps > 1 else math.nan
        return float(p.mean()), se

    def sidecar(self) -> dict:
        return {"reps": self.reps, "seed": self.seed, "provenance": self.provenance}

    def to_csv(self, path) -> None:
        """Values one per line, plus ``<path>.json`` with provenance."""
        path = Path(path)
        with atomic_open(path) as fh:
            np.savetxt(fh, self.values, fmt="%.17g")
        write_json(path.with_name(path.name + ".json"), self.sidecar())

    @classmethod
    def load(cls, path) -> "EmpiricalSample":
        path = Path(path)
        values = np.atleast_1d(np.loadtxt(path, dtype=np.float64, comments="#", ndmin=1))
        if values.size == 0:
            raise EmptySample(f"{path} holds no values")
        side = path.with_name(path.name + ".json")
        meta = read_json(side) if side.exists() else {}
        return cls(values, int(values.size), int(meta.get("seed", 0)), meta.get("provenance", {}))


def _chunks(reps: int, width: int):
    per = max(1, CHUNK_DOUBLES // max(width, 1))
    return [(lo, min(lo + per, reps)) for lo in range(0, reps, per)]


def run_chunked(reps: int, width: int, fill, threads: int | None = None) -> np.ndarray:
    """Evaluate ``fill(lo, hi) -> values[lo:hi]`` over all chunks.

    Chunk boundaries depend only on ``reps`` and ``width``; results are placed
    by index, so the thread count cannot change the output.
    """
    out = np.empty(reps)
    parts = _chunks(reps, width)
    workers = min(resolve_threads(threads), len(parts))

    def job(bounds):
        lo, hi = bounds
        out[lo:hi] = fill(lo, hi)

    if workers == 1:
        for b in parts:
            job(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, parts))
    return out


def monte_carlo(g: Graph, f: SourceDistribution, reps: int, seed: int,
                M: float | None = None, threads: int | None = None) -> EmpiricalSample:
    """``reps`` independent draws of the statistic with i.i.d. ``f`` inputs.

    With ``M`` each input vector is truncated and restandardized first.
    """
    if reps < 1:
        raise InvalidParameter("reps must be >= 1")
    if g.edge_count == 0:
        raise EmptyGraph("statistic undefined on a graph with no edges")
    tp = truncation_params(f, M) if M is not None else None
    indptr, indices = g.upper_csr
    scale = 1.0 / math.sqrt(g.edge_count)

    def fill(lo, hi):
        X = np.empty((hi - lo, g.n))
        for r in range(lo, hi):
            X[r - lo] = f.sample(rng.stream(seed, "simulate", r), g.n)
        if tp is not None:
            X = truncate(X, tp)
        return kernels.edge_quadratic(X, indptr, indices) * scale

    values = run_chunked(reps, g.n, fill, threads)
    prov = {
        "kind": "simulate",
        "graph_id": g.graph_id,
        "n": g.n,
        "edges": g.edge_count,
        "distribution": f.name,
        "M": M,
    }
    if "ensemble" in g.meta:
        prov["ensemble"] = g.meta["ensemble"]
    return EmpiricalSample(values, reps, int(seed), prov)
