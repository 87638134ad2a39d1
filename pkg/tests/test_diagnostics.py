import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from qflimit.diagnostics import (
    CONSISTENT,
    INCONSISTENT,
    analytic_cdf,
    centered_chi2_cdf,
    chi_mixture_cdf,
    chi_mixture_cdf_imhof,
    classify_normality,
    exact_fourth_moment,
    ks_distance,
    moment_report,
    oracle_fourth_moment,
    truncated_fourth_moment_curve,
    universality_gap,
    wasserstein1,
)
from qflimit.distributions import SourceDistribution
from qflimit.ensembles import EnsembleSpec, generate
from qflimit.errors import EmptySample, InfiniteFourthMoment, InvalidParameter, TooLargeForOracle
from qflimit.graph import from_edge_list
from qflimit.limits import ClosedFormLimit
from qflimit.sampling import monte_carlo

RAD = SourceDistribution("rademacher")
NORMAL = SourceDistribution("normal")
SEVEN = from_edge_list([(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (4, 5), (5, 6)])


# exact rationals from hand enumeration of the ordered edge 4-tuples
@pytest.mark.parametrize("kind, value", [
    ("rademacher", Fraction(157, 49)), ("normal", Fraction(345, 49)),
    ("uniform", Fraction(5637, 1225)), ("exp", Fraction(219, 7)),
])
def test_seven_edge_graph(kind, value):
    f = SourceDistribution(kind)
    assert exact_fourth_moment(SEVEN, f) == pytest.approx(float(value), rel=1e-13)
    assert oracle_fourth_moment(SEVEN, f) == pytest.approx(float(value), rel=1e-13)


def test_small_examples():
    c4 = from_edge_list([(1, 2), (2, 3), (3, 4), (4, 1)])
    assert exact_fourth_moment(c4, RAD) == pytest.approx(4.0)
    assert exact_fourth_moment(from_edge_list([(1, 2), (2, 3)]), NORMAL) == pytest.approx(9.0)
    k2 = from_edge_list([(1, 2)])
    assert exact_fourth_moment(k2, NORMAL) == pytest.approx(9.0)
    assert exact_fourth_moment(k2, RAD) == pytest.approx(1.0)


def test_complete_graph_tends_to_chi_moment():
    # (chi2_1 - 1)/sqrt 2 has fourth moment 15
    vals = [exact_fourth_moment(generate(EnsembleSpec("complete", {"n": n})), NORMAL)
            for n in (20, 200, 2000)]
    gaps = [abs(v - 15) for v in vals]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.1


def test_rademacher_ignores_how_edge_pairs_meet():
    p4 = from_edge_list([(1, 2), (2, 3), (3, 4)])
    star = from_edge_list([(1, 2), (1, 3), (1, 4)])
    matching = from_edge_list([(1, 2), (3, 4), (5, 6)])
    vals = {exact_fourth_moment(g, RAD) for g in (p4, star, matching)}
    assert len({round(v, 12) for v in vals}) == 1
    assert vals.pop() == pytest.approx(7 / 3)


def test_oracle_moment_pair_and_cap():
    assert oracle_fourth_moment(SEVEN, (0.0, 1.0)) == pytest.approx(157 / 49)
    big = from_edge_list([(i, i + 1) for i in range(1, 10)])
    with pytest.raises(TooLargeForOracle):
        oracle_fourth_moment(big, NORMAL)


def test_truncated_oracle_agrees():
    f = SourceDistribution("pareto", 3.5)
    assert oracle_fourth_moment(SEVEN, f, 4.0) == pytest.approx(exact_fourth_moment(SEVEN, f, 4.0))


def test_infinite_fourth_moment():
    f = SourceDistribution("pareto", 3.5)
    with pytest.raises(InfiniteFourthMoment):
        exact_fourth_moment(SEVEN, f)
    rep = moment_report(SEVEN, f)
    assert rep.exact_fourth is None and rep.fourth_moment_gap is None and rep.m4 is None


def test_truncated_curve_rises_toward_infinity():
    g = generate(EnsembleSpec("er", {"n": 60, "p": 0.2}, seed=1))
    curve = truncated_fourth_moment_curve(g, SourceDistribution("pareto", 3.5), [2, 5, 20, 100])
    vals = [r.exact_fourth for r in curve]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(r.truncated for r in curve)
    with pytest.raises(InvalidParameter):
        truncated_fourth_moment_curve(g, NORMAL, [3, 2])


def test_curve_converges_for_finite_law():
    g = generate(EnsembleSpec("er", {"n": 60, "p": 0.2}, seed=2))
    curve = truncated_fourth_moment_curve(g, SourceDistribution("exp"), [3, 10, 40])
    assert curve[-1].exact_fourth == pytest.approx(exact_fourth_moment(g, SourceDistribution("exp")),
                                                   rel=1e-9)


def test_moment_report_with_sample():
    g = generate(EnsembleSpec("er", {"n": 40, "p": 0.3}, seed=3))
    s = monte_carlo(g, NORMAL, 40_000, seed=4)
    rep = moment_report(g, NORMAL, sample=s)
    assert abs(rep.mc_fourth - rep.exact_fourth) < 5 * rep.mc_fourth_se
    assert rep.to_json()["fourth_moment_gap"] == pytest.approx(rep.exact_fourth - 3)


def test_fourth_moment_at_least_one():
    for seed in range(5):
        g = generate(EnsembleSpec("er", {"n": 7, "p": 0.5}, seed=seed))
        if g.edge_count:
            assert exact_fourth_moment(g, RAD) >= 1 - 1e-12


def test_classify_examples():
    ring = from_edge_list([(i, i % 400 + 1) for i in range(1, 401)])
    v = classify_normality(ring, RAD)
    assert v.branch == "RademacherC4" and v.verdict == CONSISTENT and v.criterion_value == 0
    kn = generate(EnsembleSpec("complete", {"n": 100}))
    v = classify_normality(kn, NORMAL)
    assert v.branch == "GeneralSpectral" and v.verdict == INCONSISTENT
    assert v.criterion_value == pytest.approx(99 / math.sqrt(4950))
    assert v.fourth_moment_gap == pytest.approx(exact_fourth_moment(kn, NORMAL) - 3)
    v = classify_normality(kn, RAD)
    assert v.criterion_value == pytest.approx(3 * math.comb(100, 4) / 4950**2)
    with pytest.raises(InvalidParameter):
        classify_normality(kn, RAD, threshold=0)


def test_classify_heavy_tail_has_no_gap():
    ring = from_edge_list([(i, i % 50 + 1) for i in range(1, 51)])
    assert classify_normality(ring, SourceDistribution("pareto", 3.5)).fourth_moment_gap is None
    assert classify_normality(ring, SourceDistribution("pareto", 3.5), M=5).fourth_moment_gap < 1


def test_universality_gap():
    star = from_edge_list([(1, v) for v in range(2, 12)])
    assert universality_gap(star) == 1.0
    ring = from_edge_list([(i, i % 40 + 1) for i in range(1, 41)])
    assert universality_gap(ring) == pytest.approx(2 / 40)


def test_ks_basics():
    x = np.linspace(-1, 1, 101)
    assert ks_distance(x, x) == 0
    assert ks_distance(x, x + 10) == 1
    gen = np.random.default_rng(1)
    assert ks_distance(gen.standard_normal(20_000), gen.standard_normal(20_000)) <= 0.02
    assert ks_distance(gen.standard_normal(20_000), "normal") <= 0.012
    with pytest.raises(EmptySample):
        ks_distance([], "normal")
    with pytest.raises(InvalidParameter):
        ks_distance(x, "cauchy")


def test_ks_against_closed_form_law():
    law = ClosedFormLimit(0.5, (0.5,))
    s = law.sample(40_000, seed=2)
    assert ks_distance(s, law) < 0.01
    with pytest.raises(InvalidParameter):
        ks_distance(s, ClosedFormLimit(0.0, (), mixture_variance=[[1.0]]))


def test_wasserstein():
    assert wasserstein1([0, 1, 2], [1, 2, 3]) == pytest.approx(1.0)
    assert wasserstein1([0.0, 1.0], [0.0, 0.5, 1.0]) == pytest.approx(
        stats.wasserstein_distance([0, 1], [0, 0.5, 1]))


def test_centered_chi2_cdf():
    w = 1 / math.sqrt(2)
    t = np.array([-0.7, -0.5, 0.0, 1.0, 3.0])
    want = stats.chi2.cdf(t / w + 1, 1)
    np.testing.assert_allclose(centered_chi2_cdf(t, w), want, atol=1e-14)
    neg = centered_chi2_cdf(t, -w)
    np.testing.assert_allclose(neg, 1 - stats.chi2.cdf(-t / w + 1, 1), atol=1e-14)


@pytest.mark.parametrize("v, weights", [
    (0.0, (0.5, -0.5)), (0.5, (0.5,)), (0.3, (0.4, -0.2, 0.1)), (0.0, (0.6, 0.3)),
])
def test_grid_cdf_matches_inversion(v, weights):
    F = chi_mixture_cdf(v, weights)
    for t in (-1.2, -0.4, 0.1, 0.8, 2.0):
        assert F(t) == pytest.approx(chi_mixture_cdf_imhof(t, v, weights), abs=5e-4)


def test_halfdiff_cdf_is_symmetric():
    # (Y1 - Y2)/2 for independent chi2_1 variables is symmetric about 0
    F = analytic_cdf("halfdiff")
    assert F(0.0) == pytest.approx(0.5, abs=1e-3)
    assert F(1.0) + F(-1.0) == pytest.approx(1.0, abs=1e-3)


def test_analytic_names():
    assert analytic_cdf("normal")(1.0) == stats.norm.cdf(1.0)
    assert analytic_cdf("chi")(-1 / math.sqrt(2)) == 0
    with pytest.raises(InvalidParameter):
        chi_mixture_cdf(0.0, ())
