import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from punctstat.errors import DegenerateSupportError, DomainError, SampleTooSmallError
from punctstat.series import empirical_distribution
from punctstat.weibull import (P_GRID, BETA_GRID, WeibullParams, cmf, dweibull_eval, fit_discrete_weibull,
                               hazard, log_likelihood, log_sf, pmf, sample, weibull_plot, weibull_transform)

params_st = st.builds(WeibullParams, st.floats(0.001, 0.999), st.floats(0.1, 4.0))


def test_k1_is_p():
    for beta in (0.3, 1.0, 2.7):
        out = dweibull_eval(1, WeibullParams(0.3, beta))
        assert out == {"pmf": 0.3, "cmf": 0.3, "hazard": 0.3}


def test_geometric_case():
    out = dweibull_eval(2, WeibullParams(0.5, 1.0))
    assert out["pmf"] == pytest.approx(0.25, abs=1e-15)
    assert out["cmf"] == pytest.approx(0.75, abs=1e-15)
    assert out["hazard"] == pytest.approx(0.5, abs=1e-15)


def test_telescoping_at_4():
    par = WeibullParams(0.2, 1.5)
    assert abs(pmf(4, par) - (cmf(4, par) - cmf(3, par))) < 1e-15


def test_domain_errors():
    with pytest.raises(DomainError):
        dweibull_eval(0, WeibullParams(0.5, 1.0))
    with pytest.raises(DomainError):
        dweibull_eval(2.5, WeibullParams(0.5, 1.0))
    for p, b in ((0.0, 1.0), (1.0, 1.0), (0.5, 0.0), (0.5, -1.0), (0.5, float("inf"))):
        with pytest.raises(DomainError):
            WeibullParams(p, b)


@settings(max_examples=60, deadline=None)
@given(params_st)
def test_partial_sums_to_10k(par):
    k = np.arange(1, 10_001)
    assert abs(pmf(k, par).sum() - cmf(10_000, par)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(params_st)
def test_tail_never_exceeds_one(par):
    k = np.arange(1, 2000)
    c = cmf(k, par)
    assert np.all((c >= 0) & (c <= 1)) and np.all(np.diff(c) >= 0)
    assert np.all(pmf(k, par) >= 0)


def test_sampler_matches_pmf():
    par = WeibullParams(0.3, 1.4)
    x = sample(par, 200_000, np.random.default_rng(0))
    emp = np.bincount(x, minlength=12)[1:12] / len(x)
    assert np.max(np.abs(emp - pmf(np.arange(1, 12), par))) < 0.005


def test_fit_recovers_and_beats_grid():
    par = WeibullParams(0.2, 1.5)
    x = sample(par, 100_000, np.random.default_rng(11))
    fit = fit_discrete_weibull(x)
    assert abs(fit.params.p - 0.2) < 0.01 and abs(fit.params.beta - 1.5) < 0.03
    table = empirical_distribution(x)
    grid_best = max(log_likelihood(WeibullParams(p, b), table.support, table.counts)
                    for p in P_GRID[10:30] for b in BETA_GRID[20:40])
    assert fit.log_likelihood >= grid_best
    assert fit.n == 100_000 and 0 <= fit.ks_distance < 0.01


def test_geometric_fit_beta_one():
    x = np.random.default_rng(5).geometric(0.5, 100_000)
    fit = fit_discrete_weibull(x)
    assert abs(fit.params.beta - 1.0) < 0.03 and abs(fit.params.p - 0.5) < 0.01


def test_error_shrinks_with_sample_size():
    par = WeibullParams(0.15, 1.3)
    errs = []
    for n in (1_000, 10_000, 100_000):
        fits = [fit_discrete_weibull(sample(par, n, np.random.default_rng(seed))).params
                for seed in range(8)]
        errs.append(np.mean([abs(f.p - par.p) + abs(f.beta - par.beta) for f in fits]))
    assert errs[0] > errs[1] > errs[2]


def test_small_sample():
    with pytest.raises(SampleTooSmallError):
        fit_discrete_weibull(np.arange(1, 20))


def test_exact_plot_is_straight():
    par = WeibullParams(0.3, 1.6)
    k = np.arange(1, 51)
    # 1 - F(50) is about exp(-186): beyond float64 when formed as 1 - cmf, exact via log_sf
    x, y = weibull_transform(k, log_sf_values=log_sf(k, par))
    slope, icept = np.polyfit(x, y, 1)
    assert abs(slope - 1.6) < 1e-9
    assert np.max(np.abs(y - (slope * x + icept))) < 1e-9
    # where 1 - F is well conditioned the plain CMF route agrees
    c = cmf(k, par)
    ok = 1 - c > 1e-4
    xc, yc = weibull_transform(k[ok], cmf_values=c[ok])
    assert np.max(np.abs(yc - y[ok])) < 1e-9


def test_rescaled_plot_unit_square():
    x = sample(WeibullParams(0.25, 1.2), 5000, np.random.default_rng(2))
    ps = weibull_plot(empirical_distribution(x), fit_discrete_weibull(x).params, rescaled=True)
    assert ps.x.min() == 0 and ps.x.max() == 1 and ps.y.min() == 0 and ps.y.max() == 1
    assert ps.transform["method"].startswith("min-max")


def test_geometric_plot_slope():
    x = np.random.default_rng(9).geometric(0.4, 100_000)
    ps = weibull_plot(empirical_distribution(x))
    assert abs(np.polyfit(ps.x, ps.y, 1)[0] - 1.0) < 0.05


def test_degenerate_plot():
    with pytest.raises(DegenerateSupportError):
        weibull_plot(empirical_distribution(np.array([3, 3, 3])))
