"""Standardized source laws and the truncation transform.

Each law has mean 0 and variance 1.  Truncated moments are closed form;
``truncated_raw_moments_quad`` integrates the density instead and serves as
an independent check.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DegenerateTruncation, InvalidParameter

KINDS = ("rademacher", "normal", "uniform", "exp", "pareto")

_ALIASES = {
    "rademacher": "rademacher",
    "normal": "normal",
    "gaussian": "normal",
    "standardnormal": "normal",
    "uniform": "uniform",
    "uniformstd": "uniform",
    "exp": "exp",
    "exponential": "exp",
    "expcenteredstd": "exp",
    "pareto": "pareto",
    "symmetricparetostd": "pareto",
}

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SourceDistribution:
    """Mean-0, variance-1 law ``F``.

    ``pareto`` is the symmetric power law with density proportional to
    ``|x|^(-alpha-1)`` on ``|x| >= x0``; ``x0`` is fixed by unit variance.
    With ``3 < alpha < 4`` it has a finite third absolute moment and an
    infinite fourth moment.
    """

    kind: str
    alpha: float = 3.5

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.replace("_", "").replace("-", "").lower())
        if kind is None:
            raise InvalidParameter(f"unknown distribution {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "pareto" and not 3.0 < self.alpha < 4.0:
            raise InvalidParameter("pareto alpha must lie in (3, 4)")

    # -- metadata -----------------------------------------------------

    @property
    def name(self) -> str:
        return f"pareto({self.alpha:g})" if self.kind == "pareto" else self.kind

    @property
    def is_rademacher(self) -> bool:
        return self.kind == "rademacher"

    @property
    def x0(self) -> float:
        return math.sqrt((self.alpha - 2.0) / self.alpha)

    @property
    def m3(self) -> float:
        return 2.0 if self.kind == "exp" else 0.0

    @property
    def m4(self) -> float:
        return {
            "rademacher": 1.0,
            "normal": 3.0,
            "uniform": 9.0 / 5.0,
            "exp": 9.0,
            "pareto": math.inf,
        }[self.kind]

    @property
    def var_x2(self) -> float:
        return self.m4 - 1.0

    @property
    def abs_m3(self) -> float:
        if self.kind == "pareto":
            return self.alpha * self.x0**3 / (self.alpha - 3.0)
        if self.kind == "rademacher":
            return 1.0
        if self.kind == "normal":
            return 2.0 * math.sqrt(2.0 / math.pi)
        if self.kind == "uniform":
            return 9.0 / (4.0 * SQRT3)
        # E|T - 1|^3 for T ~ Exp(1)
        return 12.0 / math.e - 2.0

    def moments(self) -> dict:
        return {"m3": self.m3, "m4": self.m4, "var_x2": self.var_x2}

    # -- sampling -----------------------------------------------------

    def sample(self, gen: np.random.Generator, size) -> np.ndarray:
        k = self.kind
        if k == "normal":
            return gen.standard_normal(size)
        if k == "rademacher":
            return 2.0 * gen.integers(0, 2, size=size).astype(np.float64) - 1.0
        if k == "uniform":
            return gen.uniform(-SQRT3, SQRT3, size=size)
        if k == "exp":
            return gen.standard_exponential(size) - 1.0
        u = 1.0 - gen.random(size)
        sign = np.where(gen.random(size) < 0.5, -1.0, 1.0)
        return sign * self.x0 * u ** (-1.0 / self.alpha)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        k = self.kind
        if k == "normal":
            return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
        if k == "uniform":
            return np.where(np.abs(x) <= SQRT3, 1.0 / (2 * SQRT3), 0.0)
        if k == "exp":
            return np.where(x >= -1.0, np.exp(-(x + 1.0)), 0.0)
        if k == "pareto":
            ax = np.abs(x)
            with np.errstate(divide="ignore"):
                dens = 0.5 * self.alpha * self.x0**self.alpha * ax ** (-self.alpha - 1.0)
            return np.where(ax >= self.x0, dens, 0.0)
        raise InvalidParameter("rademacher has no density")

    # -- truncation ---------------------------------------------------

    def truncated_raw_moments(self, M: float) -> np.ndarray:
        """``[P(|X|<=M), E[X^j 1{|X|<=M}] for j=1..4]``."""
        k = self.kind
        out = np.zeros(5)
        if k == "rademacher":
            if M >= 1.0:
                out[:] = [1.0, 0.0, 1.0, 0.0, 1.0]
        elif k == "normal":
            phi = math.exp(-0.5 * M * M) / math.sqrt(2 * math.pi)
            p0 = math.erf(M / math.sqrt(2.0))
            p2 = p0 - 2.0 * M * phi
            out[:] = [p0, 0.0, p2, 0.0, 3.0 * p2 - 2.0 * M**3 * phi]
        elif k == "uniform":
            c = min(M, SQRT3)
            out[:] = [c / SQRT3, 0.0, c**3 / (3 * SQRT3), 0.0, c**5 / (5 * SQRT3)]
        elif k == "exp":
            lo = max(-1.0, -M)
            for j in range(5):
                out[j] = _exp_poly_integral(j, lo, M)
        else:
            x0, a = self.x0, self.alpha
            if M >= x0:
                out[0] = 1.0 - (x0 / M) ** a
                for j in (2, 4):
                    out[j] = a * x0**a * (M ** (j - a) - x0 ** (j - a)) / (j - a)
        return out

    def truncated_raw_moments_quad(self, M: float) -> np.ndarray:
        """Same as :meth:`truncated_raw_moments`, by adaptive quadrature."""
        if self.kind == "rademacher":
            return self.truncated_raw_moments(M)
        lo, hi = -M, M
        if self.kind == "uniform":
            lo, hi = max(lo, -SQRT3), min(hi, SQRT3)
        if self.kind == "exp":
            lo = max(lo, -1.0)
        out = np.zeros(5)
        if self.kind == "pareto":
            if M < self.x0:
                return out
            # two tails only
            for j in range(5):
                tail, _ = integrate.quad(lambda x: x**j * self.pdf(x), self.x0, M,
                                         epsabs=1e-12, epsrel=1e-12, limit=200)
                out[j] = tail * (1.0 + (-1.0) ** j)
            return out
        for j in range(5):
            out[j], _ = integrate.quad(lambda x: x**j * self.pdf(x), lo, hi,
                                       epsabs=1e-12, epsrel=1e-12, limit=200)
        return out


def _exp_poly_integral(j: int, a: float, b: float) -> float:
    """``e^{-1} * int_a^b y^j e^{-y} dy`` in closed form."""

    def prim(y):
        return sum(math.factorial(j) / math.factorial(i) * y**i for i in range(j + 1)) * math.exp(-y)

    return math.exp(-1.0) * (prim(a) - prim(b))


def parse_distribution(text: str) -> SourceDistribution:
    """``normal``, ``rademacher``, ``uniform``, ``exp``, ``pareto`` or
    ``pareto:3.2`` / ``pareto(3.2)``."""
    m = re.fullmatch(r"\s*([A-Za-z_\-]+)\s*(?:[:(]\s*([0-9.eE+\-]+)\s*\)?)?\s*", text)
    if not m:
        raise InvalidParameter(f"cannot parse distribution {text!r}")
    name, arg = m.groups()
    if arg is not None:
        return SourceDistribution(name, float(arg))
    return SourceDistribution(name)


@dataclass(frozen=True)
class TruncationParams:
    M: float
    a_M: float
    b_M: float
    raw: tuple

    @property
    def m3(self) -> float:
        """Third moment of the truncated, recentred, rescaled variable."""
        _, mu1, mu2, mu3, _ = self.raw
        a = self.a_M
        return (mu3 - 3 * a * mu2 + 3 * a * a * mu1 - a**3) / self.b_M**1.5

    @property
    def m4(self) -> float:
        _, mu1, mu2, mu3, mu4 = self.raw
        a = self.a_M
        return (mu4 - 4 * a * mu3 + 6 * a * a * mu2 - 4 * a**3 * mu1 + a**4) / self.b_M**2


def truncation_params(f: SourceDistribution, M: float) -> TruncationParams:
    if not M > 0:
        raise InvalidParameter("truncation level M must be positive")
    raw = f.truncated_raw_moments(M)
    a = float(raw[1])
    b = float(raw[2] - a * a)
    if not (math.isfinite(b) and b > 1e-300):
        raise DegenerateTruncation(f"b_M = {b!r} is not positive at M={M}")
    return TruncationParams(float(M), a, b, tuple(float(v) for v in raw))


def truncate(x, params: TruncationParams) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    kept = np.where(np.abs(x) <= params.M, x, 0.0)
    return (kept - params.a_M) / math.sqrt(params.b_M)


def working_moments(f: SourceDistribution, M: float | None = None) -> tuple[float, float]:
    """``(E W^3, E W^4)`` of the variables entering the statistic: ``X`` itself,
    or its truncated version when ``M`` is given."""
    if M is None:
        return f.m3, f.m4
    tp = truncation_params(f, M)
    return tp.m3, tp.m4


def chi2_cdf(x, df=1):
    return special.gammainc(df / 2.0, np.maximum(np.asarray(x, dtype=np.float64), 0) / 2.0)
