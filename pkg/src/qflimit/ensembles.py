"""Seeded generators for the worked-example graph families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import InvalidParameter, RandomGraphEmpty
from .graph import Graph

KINDS = {
    "complete": ("n",),
    "er": ("n", "p"),
    "sbm": ("n", "p", "q"),
    "bipartite": ("a", "n"),
    "stars": ("m",),
    "coexist": ("n",),
}

ALIASES = {
    "complete": "complete",
    "erdosrenyi": "er",
    "er": "er",
    "sbm": "sbm",
    "completebipartite": "bipartite",
    "bipartite": "bipartite",
    "starunion": "stars",
    "stars": "stars",
    "coexistence": "coexist",
    "coexist": "coexist",
}

RANDOM_KINDS = {"er", "sbm", "coexist"}


@dataclass(frozen=True)
class EnsembleSpec:
    """One graph family plus its parameters and a 64-bit seed.

    Optional ``regime`` parameter selects which worked-example limit applies:
    ``"dense"``/``"sparse"`` for ``er``, ``"fixed"``/``"growing"`` for
    ``bipartite``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = ALIASES.get(self.kind.replace("_", "").replace("-", "").lower())
        if kind is None:
            raise InvalidParameter(f"unknown ensemble kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        missing = [k for k in KINDS[kind] if k not in self.params]
        if missing:
            raise InvalidParameter(f"{kind} needs parameters {missing}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParameter("seed must be an unsigned 64-bit integer")
        p = self.params
        for name in ("n", "a", "m"):
            if name in p and int(p[name]) != p[name]:
                raise InvalidParameter(f"{name} must be an integer")
        if kind in ("complete", "er", "sbm") and p["n"] < 2:
            raise InvalidParameter("n must be >= 2")
        if kind == "coexist" and p["n"] < 2:
            raise InvalidParameter("n must be >= 2")
        for name in ("p", "q"):
            if name in p and not 0 < p[name] <= 1:
                raise InvalidParameter(f"{name} must lie in (0, 1]")
        if kind == "bipartite" and (p["a"] < 1 or p["n"] < 1):
            raise InvalidParameter("bipartite needs a >= 1 and n >= 1")
        if kind == "stars" and p["m"] < 1:
            raise InvalidParameter("m must be >= 1")

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": int(self.seed)}

    @classmethod
    def from_json(cls, obj: dict) -> "EnsembleSpec":
        return cls(obj["kind"], dict(obj.get("params", {})), int(obj.get("seed", 0)))


# -- edge samplers ----------------------------------------------------------

def _bernoulli_positions(total: int, p: float, gen: np.random.Generator) -> np.ndarray:
    """Sorted indices in ``[0, total)`` kept independently with probability p,
    by geometric skipping."""
    if total <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    chunks = []
    pos = -1
    batch = max(16, int(total * p * 1.1 + 10 * math.sqrt(total * p + 1)))
    while True:
        gaps = gen.geometric(p, size=batch)
        steps = pos + np.cumsum(gaps)
        inside = steps[steps < total]
        chunks.append(inside)
        if inside.size < steps.size:
            break
        pos = int(steps[-1])
    return np.concatenate(chunks).astype(np.int64)


def _pairs_from_index(n: int, k: np.ndarray):
    """Map linear indices over ``{(i, j): 0 <= i < j < n}`` (row-major) to pairs."""
    rows = np.arange(n, dtype=np.int64)
    offsets = rows * (2 * n - rows - 1) // 2
    i = np.searchsorted(offsets, k, side="right") - 1
    j = k - offsets[i] + i + 1
    return i, j


def er_edges(n: int, p: float, gen: np.random.Generator, offset: int = 0):
    k = _bernoulli_positions(n * (n - 1) // 2, p, gen)
    i, j = _pairs_from_index(n, k)
    return i + offset, j + offset


def bipartite_random_edges(a: int, b: int, p: float, gen, off_a: int, off_b: int):
    k = _bernoulli_positions(a * b, p, gen)
    return k // b + off_a, k % b + off_b


# -- generators --------------------------------------------------------------

def _complete(n):
    i, j = np.triu_indices(n, k=1)
    return n, i, j


def _complete_bipartite(a, n):
    i = np.repeat(np.arange(a), n)
    j = np.tile(np.arange(a, a + n), a)
    return a + n, i, j


def _stars(m):
    # stars K_{1,2^s}, s = 1..m; centre first, then its leaves
    src, dst = [], []
    start = 0
    for s in range(1, m + 1):
        leaves = 2**s
        src.append(np.full(leaves, start))
        dst.append(np.arange(start + 1, start + 1 + leaves))
        start += leaves + 1
    return start, np.concatenate(src), np.concatenate(dst)


def _er(n, p, seed):
    i, j = er_edges(n, p, rng.stream(seed, "er"))
    return n, i, j


def _sbm(n, p, q, seed):
    h = n // 2
    a1, b1 = er_edges(h, p, rng.stream(seed, "sbm", 0))
    a2, b2 = er_edges(n - h, p, rng.stream(seed, "sbm", 1), offset=h)
    a3, b3 = bipartite_random_edges(h, n - h, q, rng.stream(seed, "sbm", 2), 0, h)
    return n, np.concatenate([a1, a2, a3]), np.concatenate([b1, b2, b3])


def _coexist(n, seed):
    total = n * n + 1
    hub_i = np.zeros(n * n, dtype=np.int64)
    hub_j = np.arange(1, total, dtype=np.int64)
    a1, b1 = er_edges(n, 0.5, rng.stream(seed, "coexist", 0), offset=1)
    a2, b2 = er_edges(n * n - n, 1.0 / (n * n), rng.stream(seed, "coexist", 1), offset=n + 1)
    return total, np.concatenate([hub_i, a1, a2]), np.concatenate([hub_j, b1, b2])


def raw_edges(spec: EnsembleSpec):
    """``(n, src, dst)`` as drawn, before degree relabeling (0-based)."""
    p = spec.params
    k = spec.kind
    if k == "complete":
        return _complete(int(p["n"]))
    if k == "er":
        return _er(int(p["n"]), float(p["p"]), spec.seed)
    if k == "sbm":
        return _sbm(int(p["n"]), float(p["p"]), float(p["q"]), spec.seed)
    if k == "bipartite":
        return _complete_bipartite(int(p["a"]), int(p["n"]))
    if k == "stars":
        return _stars(int(p["m"]))
    return _coexist(int(p["n"]), spec.seed)


def generate(spec: EnsembleSpec) -> Graph:
    """Draw (or build) the graph described by ``spec``, in degree order."""
    n, i, j = raw_edges(spec)
    if len(i) == 0:
        raise RandomGraphEmpty(f"{spec.kind} draw with seed {spec.seed} has no edges")
    return Graph._build(n, i, j, meta={"ensemble": spec.to_json()})


def expected_limit(spec: EnsembleSpec):
    """Closed-form limit law of the family; see :func:`qflimit.limits.closed_form`."""
    from .limits import closed_form

    return closed_form(spec)
