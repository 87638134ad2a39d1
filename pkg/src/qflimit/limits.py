"""Limit-law parameters and samplers for ``Q = Q1 + Q2 + Q3``.

* ``Q1 = sqrt(X' sigma X) * Z``: a normal variance mixture driven by ``K``
  fresh source variables ``X``;
* ``Q2 ~ N(0, rho_sq_residual)``;
* ``Q3 = 1/2 * sum_s rho_s (chi2_1 - 1)``.

All three are independent.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import rng
from ._io import read_json, write_json
from .distributions import SourceDistribution, truncate, truncation_params
from .ensembles import EnsembleSpec
from .errors import InvalidParameter, InvalidSpec, NoClosedForm, ResidualClampWarning
from .graph import Graph, codegree_matrix
from .sampling import EmpiricalSample, run_chunked
from .spectra import scaled_truncated_spectrum

PSD_TOL = 1e-10


@dataclass
class LimitSpec:
    sigma: np.ndarray
    rho: np.ndarray
    rho_sq_residual: float
    K: int
    s_max: int
    provenance: dict = field(default_factory=dict)
    clamped: bool = False

    def __post_init__(self):
        self.sigma = np.atleast_2d(np.asarray(self.sigma, dtype=np.float64))
        if self.sigma.size == 0:
            self.sigma = np.zeros((0, 0))
        self.rho = np.atleast_1d(np.asarray(self.rho, dtype=np.float64))
        if self.sigma.shape[0] != self.sigma.shape[1]:
            raise InvalidSpec(f"sigma must be square, got {self.sigma.shape}")
        if not np.all(np.isfinite(self.sigma)) or not np.all(np.isfinite(self.rho)):
            raise InvalidSpec("sigma and rho must be finite")
        if self.rho_sq_residual < 0:
            raise InvalidSpec("rho_sq_residual must be nonnegative")

    @property
    def variance(self) -> float:
        """``Var Q = tr(sigma) + rho^2 + sum rho_s^2 / 2``."""
        return float(np.trace(self.sigma) + self.rho_sq_residual + 0.5 * (self.rho**2).sum())

    def check_psd(self) -> float:
        if not np.allclose(self.sigma, self.sigma.T, atol=PSD_TOL, rtol=0):
            raise InvalidSpec("sigma is not symmetric")
        if self.sigma.shape[0] == 0:
            return 0.0
        lo = float(np.linalg.eigvalsh(self.sigma).min())
        if lo < -PSD_TOL:
            raise InvalidSpec(f"sigma is not positive semidefinite (min eigenvalue {lo:.3g})")
        return lo

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "rho": self.rho.tolist(),
            "rho_sq_residual": float(self.rho_sq_residual),
            "K": int(self.K),
            "s_max": int(self.s_max),
            "clamped": bool(self.clamped),
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LimitSpec":
        try:
            sigma = np.asarray(obj["sigma"], dtype=np.float64).reshape(len(obj["sigma"]), -1) \
                if obj["sigma"] else np.zeros((0, 0))
            return cls(sigma, np.asarray(obj["rho"], dtype=np.float64),
                       float(obj["rho_sq_residual"]), int(obj.get("K", sigma.shape[0])),
                       int(obj.get("s_max", len(obj["rho"]))), dict(obj.get("provenance", {})),
                       bool(obj.get("clamped", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed limit spec: {exc}") from exc

    def save(self, path) -> None:
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path) -> "LimitSpec":
        return cls.from_json(read_json(path))


def default_K(n: int) -> int:
    return max(1, min(20, n // 10))


def estimate_limit_spec(g: Graph, K: int | None = None, s_max: int | None = None) -> LimitSpec:
    """Plug-in estimates of ``(sigma, rho, rho^2)`` from a single graph.

    ``sigma`` is the top-``K`` co-degree block over ``|E|``; ``rho`` the top
    ``s_max`` eigenvalues of the graph with the ``K`` highest-degree vertices
    removed, over ``sqrt(|E|)``.  The residual is clamped into ``[0, 1]``
    with a :class:`ResidualClampWarning`.
    """
    if K is None:
        K = default_K(g.n)
    if not 1 <= K < g.n:
        raise InvalidParameter(f"K={K} must satisfy 1 <= K < n={g.n}")
    if s_max is None:
        s_max = min(20, g.n - K)
    if not 0 <= s_max <= g.n - K:
        raise InvalidParameter(f"s_max={s_max} must lie in 0..{g.n - K}")
    e = g.edge_count
    sigma = codegree_matrix(g, K) / e
    rho = scaled_truncated_spectrum(g, K, top_s=s_max).values if s_max else np.empty(0)
    raw = 1.0 - float(np.trace(sigma)) - 0.5 * float((rho**2).sum())
    resid = min(max(raw, 0.0), 1.0)
    # rounding noise alone does not count as clamping
    clamped = abs(resid - raw) > 1e-12
    if clamped:
        warnings.warn(f"residual variance {raw:.6g} clamped to {resid:g}",
                      ResidualClampWarning, stacklevel=2)
    prov = {"graph_id": g.graph_id, "n": g.n, "edges": e, "raw_residual": raw}
    if "ensemble" in g.meta:
        prov["ensemble"] = g.meta["ensemble"]
    return LimitSpec(sigma, rho, resid, int(K), int(s_max), prov, clamped)


def sample_limit(spec: LimitSpec, f: SourceDistribution, reps: int, seed: int,
                 M: float | None = None, threads: int | None = None) -> EmpiricalSample:
    """``reps`` draws of ``Q1 + Q2 + Q3``; replication ``i`` uses stream
    ``(seed, "limit", i)``."""
    if reps < 1:
        raise InvalidParameter("reps must be >= 1")
    spec.check_psd()
    sigma, rho = spec.sigma, spec.rho
    K, s = sigma.shape[0], rho.size
    tp = truncation_params(f, M) if M is not None else None
    g_sd = math.sqrt(spec.rho_sq_residual)
    half_rho = 0.5 * rho

    def fill(lo, hi):
        m = hi - lo
        X = np.empty((m, K))
        Z = np.empty((m, 2 + s))
        for r in range(lo, hi):
            gen = rng.stream(seed, "limit", r)
            X[r - lo] = f.sample(gen, K)
            Z[r - lo] = gen.standard_normal(2 + s)
        if tp is not None:
            X = truncate(X, tp)
        V = np.maximum(np.einsum("rs,st,rt->r", X, sigma, X), 0.0) if K else np.zeros(m)
        q = np.sqrt(V) * Z[:, 0] + g_sd * Z[:, 1]
        if s:
            q += (Z[:, 2:] ** 2 - 1.0) @ half_rho
        return q

    values = run_chunked(reps, K + s + 2, fill, threads)
    prov = {"kind": "limit-sample", "distribution": f.name, "M": M, "K": K, "s_max": s}
    return EmpiricalSample(values, reps, int(seed), prov)


@dataclass(frozen=True)
class ClosedFormLimit:
    """``N(0, gaussian_variance) + sum_j w_j (chi2_1 - 1) + sqrt(X' S X) Z``.

    ``mixture_variance`` is the matrix ``S`` of the optional normal variance
    mixture, whose law depends on the source distribution.
    """

    gaussian_variance: float
    chi_weights: tuple = ()
    mixture_variance: np.ndarray | None = None
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "chi_weights", tuple(float(w) for w in self.chi_weights))
        if self.gaussian_variance < 0:
            raise InvalidSpec("gaussian_variance must be nonnegative")
        if self.mixture_variance is not None:
            object.__setattr__(self, "mixture_variance",
                               np.atleast_2d(np.asarray(self.mixture_variance, dtype=np.float64)))
        if (self.gaussian_variance == 0 and not any(self.chi_weights)
                and self.mixture_variance is None):
            raise InvalidSpec("limit law has no nonzero component")

    @property
    def is_universal(self) -> bool:
        return self.mixture_variance is None

    @property
    def variance(self) -> float:
        mix = float(np.trace(self.mixture_variance)) if self.mixture_variance is not None else 0.0
        return self.gaussian_variance + 2.0 * sum(w * w for w in self.chi_weights) + mix

    def to_limit_spec(self) -> LimitSpec:
        sigma = self.mixture_variance if self.mixture_variance is not None else np.zeros((0, 0))
        rho = 2.0 * np.asarray(self.chi_weights, dtype=np.float64)
        return LimitSpec(sigma, rho, self.gaussian_variance, sigma.shape[0], rho.size,
                         {"closed_form": self.description})

    def sample(self, reps: int, seed: int, f: SourceDistribution | None = None,
               threads: int | None = None) -> EmpiricalSample:
        if f is None:
            if not self.is_universal:
                raise InvalidParameter("this limit depends on the source law; pass f")
            f = SourceDistribution("normal")
        out = sample_limit(self.to_limit_spec(), f, reps, seed, threads=threads)
        out.provenance["closed_form"] = self.description
        return out

    def to_json(self) -> dict:
        return {
            "gaussian_variance": self.gaussian_variance,
            "chi_weights": list(self.chi_weights),
            "mixture_variance": None if self.mixture_variance is None
            else self.mixture_variance.tolist(),
            "description": self.description,
        }


STAR_TERMS = 40


def closed_form(spec: EnsembleSpec) -> ClosedFormLimit:
    """Limit law of a worked-example family.

    ``er`` takes ``regime`` ``"dense"`` (default, fixed ``p``) or
    ``"sparse"``; ``bipartite`` takes ``"fixed"`` (default, fixed ``a``) or
    ``"growing"``.
    """
    p = spec.params
    regime = p.get("regime")
    k = spec.kind
    if k == "complete":
        return ClosedFormLimit(0.0, (1 / math.sqrt(2.0),), description="(chi2_1 - 1)/sqrt(2)")
    if k == "er":
        regime = regime or "dense"
        if regime == "dense":
            q = float(p["p"])
            return ClosedFormLimit(1.0 - q, (math.sqrt(q / 2.0),) if q else (),
                                   description=f"N(0, {1 - q:g}) + sqrt({q:g}/2)(chi2_1 - 1)")
        if regime == "sparse":
            return ClosedFormLimit(1.0, description="N(0, 1)")
    elif k == "sbm":
        a, b = float(p["p"]), float(p["q"])
        s = a + b
        return ClosedFormLimit(1.0 - (a * a + b * b) / s,
                               (math.sqrt(s) / 2.0, (a - b) / (2.0 * math.sqrt(s))),
                               description="two-block SBM")
    elif k == "bipartite":
        regime = regime or "fixed"
        if regime == "fixed":
            a = int(p["a"])
            return ClosedFormLimit(0.0, (), np.full((a, a), 1.0 / a),
                                   description=f"N(0, (X_1+...+X_{a})^2/{a})")
        if regime == "growing":
            return ClosedFormLimit(0.0, (0.5, -0.5), description="(Y_1 - Y_2)/2")
    elif k == "stars":
        return ClosedFormLimit(0.0, (), np.diag(2.0 ** -np.arange(1, STAR_TERMS + 1)),
                               description="N(0, sum_s 2^-s X_s^2)")
    elif k == "coexist":
        return ClosedFormLimit(5.0 / 14.0, (1.0 / (2.0 * math.sqrt(7.0)),), np.array([[4.0 / 7.0]]),
                               description="sqrt(4/7)|X_1|Z + N(0, 5/14) + (chi2_1 - 1)/(2 sqrt 7)")
    raise NoClosedForm(f"no closed-form limit for {k} with regime {regime!r}")


def gaussian_f_chi_representation(spec: LimitSpec) -> ClosedFormLimit:
    """Rewrite ``Q`` for standard normal ``F`` as a pure chi-square mixture.

    Each eigenvalue ``lam`` of ``sigma`` contributes the pair of weights
    ``+-sqrt(lam)/2``; ``Q2`` and ``Q3`` carry over unchanged.
    """
    spec.check_psd()
    weights = []
    if spec.sigma.shape[0]:
        for lam in np.linalg.eigvalsh(spec.sigma)[::-1]:
            if lam > PSD_TOL:
                r = math.sqrt(lam) / 2.0
                weights += [r, -r]
    weights += [0.5 * r for r in spec.rho if r != 0.0]
    return ClosedFormLimit(float(spec.rho_sq_residual), tuple(weights),
                           description="Gaussian-F chi-square representation")
