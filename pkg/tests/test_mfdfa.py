import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from punctstat.errors import (RangeTooSmallError, ScaleOutOfRangeError, SeriesTooShortError,
                              TooFewPointsError, ZeroVarianceError)
from punctstat.mfdfa import (FluctuationMatrix, HurstFunction, compute_profile, default_qs, default_scales,
                             estimate_hq, fluctuation_matrix, profile_values, run_mfdfa,
                             select_scaling_range, singularity_spectrum, width_label)
from punctstat.synth import cascade_hurst, fgn

SCALES = np.unique(np.rint(np.geomspace(16, 2000, 24)).astype(int))


def exact_matrix(slopes_by_scale, qs=(-2.0, 0.0, 2.0)):
    qs = np.asarray(qs)
    logf = np.cumsum(np.concatenate([[0.0], slopes_by_scale * np.diff(np.log(SCALES))]))
    return FluctuationMatrix(SCALES, qs, np.tile(np.exp(logf), (len(qs), 1)), 2, 8000)


def test_profile_examples():
    assert profile_values([5, 5, 5, 5]).tolist() == [0, 0, 0, 0]
    assert profile_values([1, 2, 3]).tolist() == [-1, -1, 0]
    alt = compute_profile(np.tile([1, 3], 500))
    assert np.max(np.abs(alt.values)) <= 1 and alt.mean == 2
    with pytest.raises(SeriesTooShortError):
        compute_profile(np.ones(63))


def test_default_grids():
    qs = default_qs()
    assert len(qs) == 33 and qs[0] == -4 and qs[-1] == 4 and 0.0 in qs
    sc = default_scales(10_000)
    assert sc[0] == 16 and sc[-1] == 2500 and np.all(np.diff(sc) > 0)


def test_linear_trend_has_zero_variance():
    with pytest.raises(ZeroVarianceError) as info:
        fluctuation_matrix(3.0 * np.arange(4096) + 7, order=1)
    assert info.value.scale == 16


def test_scale_bounds():
    y = compute_profile(np.random.default_rng(0).normal(size=1000))
    with pytest.raises(ScaleOutOfRangeError):
        fluctuation_matrix(y, scales=[16, 300])
    with pytest.raises(ScaleOutOfRangeError):
        fluctuation_matrix(y, scales=[3, 100], order=2)
    with pytest.raises(ScaleOutOfRangeError):
        fluctuation_matrix(y, scales=[16, 100], order=5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]))
def test_generalised_mean_ordering(seed, order):
    x = np.random.default_rng(seed).geometric(0.2, 600)
    m = fluctuation_matrix(compute_profile(x), scales=[16, 32, 64, 128], qs=default_qs(), order=order)
    assert np.all(np.diff(m.values, axis=0) >= -1e-12 * m.values[1:])


def test_auto_range_on_exact_power_law():
    m = exact_matrix(np.full(len(SCALES) - 1, 0.75))
    assert select_scaling_range(m, "auto") == [(int(SCALES[0]), int(SCALES[-1]))]


def test_two_ranges_recover_splice():
    k = 11
    slopes = np.where(np.arange(len(SCALES) - 1) < k, 0.62, 0.83)
    (lo1, hi1), (lo2, hi2) = select_scaling_range(exact_matrix(slopes), "two")
    assert abs(list(SCALES).index(hi1) - k) <= 1
    assert lo1 == SCALES[0] and hi2 == SCALES[-1] and lo2 > hi1
    hq = estimate_hq(exact_matrix(slopes), (lo2, hi2))
    assert abs(hq.hurst - 0.83) < 1e-9


def test_manual_range_bounds():
    m = exact_matrix(np.full(len(SCALES) - 1, 0.5))
    with pytest.raises(RangeTooSmallError):
        select_scaling_range(m, (4, 10_000))
    assert select_scaling_range(m, (16, 500)) == [(16, 500)]
    with pytest.raises(RangeTooSmallError):
        estimate_hq(m, (16, 30))


def test_exact_hq_is_flat():
    hq = estimate_hq(exact_matrix(np.full(len(SCALES) - 1, 0.7), qs=default_qs()))
    assert np.max(np.abs(hq.h - 0.7)) < 1e-12


def test_constant_h_collapses_spectrum():
    qs = default_qs()
    sp = singularity_spectrum(HurstFunction(qs, np.full(len(qs), 0.6), np.zeros(len(qs)), (16, 100)))
    assert np.allclose(sp.alpha, 0.6, atol=1e-15) and np.allclose(sp.f, 1.0, atol=1e-15)
    assert sp.delta_alpha == pytest.approx(0.0, abs=1e-15) and not sp.nonphysical_mask.any()
    assert sp.label == "monofractal"


def test_decreasing_h_gives_concave_spectrum():
    qs = default_qs()
    sp = singularity_spectrum(HurstFunction(qs, cascade_hurst(qs, 0.7), np.zeros(len(qs)), (16, 100)))
    assert not sp.nonphysical_mask.any()
    a, f = sp.alpha[::-1], sp.f[::-1]
    slope = np.diff(f) / np.diff(a)
    assert np.all(np.diff(slope) <= 1e-9)
    assert sp.f[qs == 0][0] == 1.0


def test_too_few_q():
    with pytest.raises(TooFewPointsError):
        singularity_spectrum(HurstFunction(np.arange(4.0), np.ones(4), np.zeros(4), (1, 2)))


def test_labels():
    assert [width_label(w) for w in (0.05, 0.1, 0.15, 0.2, 0.5)] == [
        "monofractal", "monofractal", "indecisive", "multifractal", "multifractal"]


def test_white_noise_and_shuffle_quick():
    rng = np.random.default_rng(4)
    x = fgn(0.8, 2 ** 14, rng)
    res = run_mfdfa(x, scale_mode=(16, 4096))
    assert abs(res.ranges[0].hq.hurst - 0.8) < 0.08
    shuffled = run_mfdfa(rng.permutation(x), scale_mode=(16, 4096))
    assert abs(shuffled.ranges[0].hq.hurst - 0.5) < 0.08
    assert res.warnings == []


def test_run_mfdfa_warns_on_short_series():
    res = run_mfdfa(np.random.default_rng(1).geometric(0.3, 1000))
    assert len(res.warnings) == 1 and "5000" in res.warnings[0]
    d = res.to_dict()
    assert len(d["Fq"]) == len(d["qs"]) and len(d["Fq"][0]) == len(d["scales"])
