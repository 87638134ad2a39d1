"""Distribution distances, fourth moments and the normality classifier."""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, signal, stats

from .distributions import SourceDistribution, chi2_cdf, working_moments
from .errors import EmptySample, InfiniteFourthMoment, InvalidParameter, TooLargeForOracle
from .graph import Graph
from .motifs import count_motifs
from .sampling import EmpiricalSample
from .spectra import spectral_criterion

ORACLE_MAX_VERTICES = 8
GRID_STEP = 1e-3
GRID_HALF_WIDTH = 12.0

CONSISTENT = "consistent_with_normal"
INCONSISTENT = "inconsistent"


# -- distances ------------------------------------------------------------

def _values(x) -> np.ndarray:
    v = x.values if isinstance(x, EmpiricalSample) else np.asarray(x, dtype=np.float64)
    if v.size == 0:
        raise EmptySample("sample is empty")
    return v


def ks_distance(a, b) -> float:
    """Kolmogorov-Smirnov distance.

    ``b`` may be a second sample, a CDF callable, a law name accepted by
    :func:`analytic_cdf`, or a universal :class:`~qflimit.limits.ClosedFormLimit`.
    """
    va = _values(a)
    if isinstance(b, (EmpiricalSample, np.ndarray, list, tuple)):
        return float(stats.ks_2samp(va, _values(b)).statistic)
    cdf = b if callable(b) else analytic_cdf(b)
    return float(stats.kstest(va, cdf).statistic)


def wasserstein1(a, b) -> float:
    """Mean absolute difference of sorted samples (general ``W_1`` for unequal sizes)."""
    va, vb = np.sort(_values(a)), np.sort(_values(b))
    if va.size == vb.size:
        return float(np.abs(va - vb).mean())
    return float(stats.wasserstein_distance(va, vb))


# -- analytic CDFs ----------------------------------------------------------

def centered_chi2_cdf(x, w: float):
    """CDF of ``w * (chi2_1 - 1)``."""
    x = np.asarray(x, dtype=np.float64)
    if w > 0:
        return chi2_cdf(x / w + 1.0)
    if w < 0:
        return 1.0 - chi2_cdf(x / w + 1.0)
    return (x >= 0).astype(np.float64)


@lru_cache(maxsize=64)
def _grid_cdf(gaussian_variance: float, weights: tuple):
    """Tabulate the CDF of ``N(0, v) + sum w_j (chi2_1 - 1)`` on a grid.

    The first component keeps its exact CDF; the others are discretized to
    cell masses and convolved in.
    """
    h = GRID_STEP
    k = int(round(GRID_HALF_WIDTH / h))
    x = np.arange(-k, k + 1) * h
    edges = np.append(x - h / 2, x[-1] + h / 2)
    parts = [w for w in weights if w != 0.0]
    exact = None
    if parts:
        first = parts.pop(0)
        exact = centered_chi2_cdf(x, first)
    elif gaussian_variance > 0:
        exact = stats.norm.cdf(x, scale=math.sqrt(gaussian_variance))
        gaussian_variance = 0.0
    masses = []
    if gaussian_variance > 0:
        masses.append(np.diff(stats.norm.cdf(edges, scale=math.sqrt(gaussian_variance))))
    for w in parts:
        masses.append(np.diff(centered_chi2_cdf(edges, w)))
    pmf = np.zeros(x.size)
    pmf[k] = 1.0
    for m in masses:
        pmf = signal.fftconvolve(pmf, m)[k:k + x.size]
    pmf = np.clip(pmf, 0.0, None)
    # F(x) = sum_j pmf_j F_exact(x - y_j); pad so shifts past the grid stay at 0/1
    padded = np.concatenate([np.zeros(k), exact, np.ones(k)])
    cdf = signal.fftconvolve(padded, pmf, mode="valid")[:x.size] if pmf.sum() else exact
    return x, np.clip(cdf, 0.0, 1.0)


def chi_mixture_cdf(gaussian_variance: float, weights=()):
    """CDF callable for ``N(0, v) + sum_j w_j (chi2_1 - 1)``."""
    weights = tuple(float(w) for w in weights if w != 0.0)
    v = float(gaussian_variance)
    if not weights:
        if v <= 0:
            raise InvalidParameter("degenerate law has no continuous CDF")
        return lambda t: stats.norm.cdf(t, scale=math.sqrt(v))
    if v == 0 and len(weights) == 1:
        w = weights[0]
        return lambda t: centered_chi2_cdf(t, w)
    x, cdf = _grid_cdf(v, weights)

    def F(t):
        return np.interp(np.asarray(t, dtype=np.float64), x, cdf, left=0.0, right=1.0)

    return F


def chi_mixture_cdf_imhof(t: float, gaussian_variance: float, weights=()) -> float:
    """Gil-Pelaez inversion of the characteristic function, by quadrature."""
    w = np.asarray([u for u in weights if u != 0.0], dtype=np.float64)
    v = float(gaussian_variance)

    def integrand(u):
        # log of the characteristic function at u
        z = 1.0 - 2j * w * u
        logphi = -0.5 * v * u * u + np.sum(-0.5 * np.log(z) - 1j * w * u)
        return (np.exp(logphi - 1j * u * t)).imag / u

    with warnings.catch_warnings():
        # the tail oscillates slowly when few weights are present
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, np.inf, limit=1000, epsabs=1e-10)
    return float(0.5 - val / math.pi)


def analytic_cdf(law):
    """Resolve a law to a CDF.

    Names: ``normal``, ``chi`` (the complete-graph law ``(chi2_1-1)/sqrt 2``),
    ``halfdiff`` (``(Y_1-Y_2)/2``).  A universal closed-form limit is also
    accepted.
    """
    if isinstance(law, str):
        key = law.strip().lower()
        if key in ("normal", "gaussian", "n01"):
            return stats.norm.cdf
        if key in ("chi", "complete", "chi2"):
            return chi_mixture_cdf(0.0, (1 / math.sqrt(2.0),))
        if key in ("halfdiff", "bipartite-growing"):
            return chi_mixture_cdf(0.0, (0.5, -0.5))
        raise InvalidParameter(f"unknown analytic law {law!r}")
    if hasattr(law, "chi_weights"):
        if not law.is_universal:
            raise InvalidParameter("mixture limit has no analytic CDF; compare by sampling")
        return chi_mixture_cdf(law.gaussian_variance, law.chi_weights)
    raise InvalidParameter(f"cannot build a CDF from {type(law).__name__}")


# -- fourth moments --------------------------------------------------------

def fourth_moment_from_counts(edges, disjoint, cherries, triangles, four_cycles, m3, m4) -> float:
    """``E[S^4]`` from motif counts and the moments of the inputs.

    Every ordered 4-tuple of edges with nonzero mean is one of: a single edge
    four times, two disjoint edges twice each, a cherry's two edges twice
    each, a triangle with one doubled edge, or a 4-cycle.
    """
    e = float(edges)
    total = (e * m4 * m4 + 6.0 * disjoint + 6.0 * cherries * m4
             + 36.0 * triangles * m3 * m3 + 24.0 * four_cycles)
    return total / (e * e)


def exact_fourth_moment(g: Graph, f: SourceDistribution, M: float | None = None) -> float:
    m3, m4 = working_moments(f, M)
    if not math.isfinite(m4):
        raise InfiniteFourthMoment(f"{f.name} has E X^4 = inf; pass a truncation level M")
    c = count_motifs(g)
    return fourth_moment_from_counts(c.edges, c.disjoint_edge_pairs, c.cherries,
                                     c.triangles, c.four_cycles, m3, m4)


def oracle_fourth_moment(g: Graph, f, M: float | None = None) -> float:
    """Brute force over all ordered 4-tuples of edges.

    ``f`` is a :class:`SourceDistribution` or a pair ``(m3, m4)``.  Each
    tuple contributes the product over vertices of ``E X^multiplicity``;
    tuples are tallied by their ``(#m3, #m4)`` pattern, so the arithmetic is
    exact integer counting followed by one weighted sum.
    """
    if isinstance(f, SourceDistribution):
        m3, m4 = working_moments(f, M)
    else:
        m3, m4 = map(float, f)
    if not math.isfinite(m4):
        raise InfiniteFourthMoment("E X^4 = inf; pass a truncation level M")
    if g.n > ORACLE_MAX_VERTICES:
        raise TooLargeForOracle(f"oracle handles at most {ORACLE_MAX_VERTICES} vertices")
    m = g.edge_count
    inc = np.zeros((m, g.n), dtype=np.int8)
    inc[np.arange(m), g.src] = 1
    inc[np.arange(m), g.dst] = 1
    idx = np.indices((m,) * 4).reshape(4, -1)
    mult = inc[idx[0]] + inc[idx[1]] + inc[idx[2]] + inc[idx[3]]
    alive = ~(mult == 1).any(axis=1)
    mult = mult[alive]
    n3 = (mult == 3).sum(axis=1)
    n4 = (mult == 4).sum(axis=1)
    tally: dict[tuple[int, int], int] = {}
    for key, cnt in zip(*np.unique(np.stack([n3, n4], axis=1), axis=0, return_counts=True)):
        tally[(int(key[0]), int(key[1]))] = int(cnt)
    total = 0.0
    for (a, b), cnt in tally.items():
        if a and m3 == 0.0:
            continue
        total += cnt * m3**a * m4**b
    return total / (m * m)


@dataclass
class MomentReport:
    n: int
    edges: int
    distribution: str
    exact_fourth: float | None
    truncated: bool = False
    M: float | None = None
    m3: float | None = None
    m4: float | None = None
    mc_fourth: float | None = None
    mc_fourth_se: float | None = None
    motifs: dict = field(default_factory=dict)

    @property
    def fourth_moment_gap(self) -> float | None:
        return None if self.exact_fourth is None else self.exact_fourth - 3.0

    def to_json(self) -> dict:
        out = asdict(self)
        out["fourth_moment_gap"] = self.fourth_moment_gap
        return out


def moment_report(g: Graph, f: SourceDistribution, M: float | None = None,
                  sample: EmpiricalSample | None = None) -> MomentReport:
    """Exact ``E S^4`` (``None`` when infinite) plus an optional Monte Carlo estimate."""
    m3, m4 = working_moments(f, M)
    exact = exact_fourth_moment(g, f, M) if math.isfinite(m4) else None
    rep = MomentReport(g.n, g.edge_count, f.name, exact, M is not None, M, m3,
                       m4 if math.isfinite(m4) else None,
                       motifs=count_motifs(g).to_json())
    if sample is not None:
        rep.mc_fourth, rep.mc_fourth_se = sample.moment(4)
    return rep


def truncated_fourth_moment_curve(g: Graph, f: SourceDistribution, M_grid) -> list[MomentReport]:
    grid = np.asarray(M_grid, dtype=np.float64)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidParameter("M_grid must be nonempty and strictly ascending")
    return [moment_report(g, f, float(M)) for M in grid]


# -- normality ---------------------------------------------------------------

@dataclass
class NormalityVerdict:
    branch: str
    criterion_value: float
    fourth_moment_gap: float | None
    verdict: str
    threshold: float

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_json(self) -> dict:
        return asdict(self)


def c4_criterion(g: Graph) -> float:
    """``N(C4, G) / |E|^2``."""
    return count_motifs(g).four_cycles / float(g.edge_count) ** 2


def classify_normality(g: Graph, f: SourceDistribution, threshold: float = 0.05,
                       M: float | None = None) -> NormalityVerdict:
    """Finite-graph proxy for asymptotic normality.

    Rademacher inputs are judged by the 4-cycle density, every other law by
    the largest adjacency eigenvalue over ``sqrt(|E|)``.  The verdict is
    ``criterion_value < threshold``.
    """
    if not threshold > 0:
        raise InvalidParameter("threshold must be positive")
    if f.is_rademacher:
        branch, value = "RademacherC4", c4_criterion(g)
    else:
        branch, value = "GeneralSpectral", spectral_criterion(g)
    m4 = working_moments(f, M)[1]
    gap = exact_fourth_moment(g, f, M) - 3.0 if math.isfinite(m4) else None
    verdict = CONSISTENT if value < threshold else INCONSISTENT
    return NormalityVerdict(branch, float(value), gap, verdict, float(threshold))


def universality_gap(g: Graph) -> float:
    """``max_u d_u / |E|``."""
    return float(g.degree.max() / g.edge_count)
