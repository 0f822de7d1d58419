import math

import numpy as np
import pytest

from oracles import poisson_cdf_below
from qlspin.readout import (
    FluorescenceParams,
    Outcome,
    classify,
    count_likelihoods,
    discrimination_error,
    sample_photon_count,
    seeded_stream,
)

FP = FluorescenceParams(10, 1, 3)
EPS_DARK_AS_BRIGHT = 0.08030139707139416
EPS_BRIGHT_AS_DARK = 0.0027693957155115762


def test_discrimination_reference_values():
    bd, db = discrimination_error(FP)
    assert db == pytest.approx(EPS_DARK_AS_BRIGHT, rel=1e-14)
    assert bd == pytest.approx(EPS_BRIGHT_AS_DARK, rel=1e-14)
    # closed forms: 1 - e^-1 (1 + 1 + 1/2), e^-10 (1 + 10 + 50)
    assert db == pytest.approx(1 - math.exp(-1) * 2.5, abs=1e-15)
    assert bd == pytest.approx(math.exp(-10) * 61, rel=1e-13)


@pytest.mark.parametrize("lb,ld,thr", [(10, 1, 3), (20, 0.5, 5), (4, 2, 1), (7.5, 0.2, 2)])
def test_discrimination_vs_summation(lb, ld, thr):
    bd, db = discrimination_error(FluorescenceParams(lb, ld, thr))
    assert bd == pytest.approx(poisson_cdf_below(lb, thr), abs=1e-14)
    assert db == pytest.approx(1 - poisson_cdf_below(ld, thr), abs=1e-14)


def test_dark_zero_background():
    fp = FluorescenceParams(10, 0.0, 1)
    assert discrimination_error(fp)[1] == 0.0
    rng = seeded_stream(1)
    assert all(sample_photon_count(False, fp, rng) == 0 for _ in range(1000))


def test_params_validation():
    with pytest.raises(ValueError):
        FluorescenceParams(1, 2, 3)
    with pytest.raises(ValueError):
        FluorescenceParams(10, 1, 0)
    with pytest.raises(ValueError):
        FluorescenceParams(10, 1, 2.5)


def test_classify_boundaries():
    assert classify(0, FluorescenceParams(10, 1, 1)) is Outcome.DARK
    assert classify(3, FP) is Outcome.BRIGHT
    assert classify(2, FP) is Outcome.DARK
    outcomes = [classify(k, FP) is Outcome.BRIGHT for k in range(50)]
    assert outcomes == sorted(outcomes)  # monotone


def test_sample_mean():
    rng = seeded_stream(123, 0)
    draws = [sample_photon_count(True, FP, rng) for _ in range(100_000)]
    assert abs(np.mean(draws) - 10) < 0.1


def test_stream_determinism():
    a = seeded_stream(7, 3).poisson(10, size=100)
    b = seeded_stream(7, 3).poisson(10, size=100)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, seeded_stream(7, 4).poisson(10, size=100))
    assert not np.array_equal(a, seeded_stream(8, 3).poisson(10, size=100))


def test_stream_independence():
    x = seeded_stream(42, 0).random(100_000)
    for sid in (1, 2, 1000, 2**63):
        y = seeded_stream(42, sid).random(100_000)
        assert abs(np.corrcoef(x, y)[0, 1]) < 0.01


@pytest.mark.parametrize("bright", [True, False])
def test_empirical_error_rate(bright):
    n = 1_000_000
    counts = seeded_stream(2024, int(bright)).poisson(FP.lambda_bright if bright else FP.lambda_dark, size=n)
    wrong = np.count_nonzero((counts >= FP.threshold) != bright)
    bd, db = discrimination_error(FP)
    p = bd if bright else db
    assert abs(wrong / n - p) < 5 * math.sqrt(p * (1 - p) / n)


def test_count_likelihoods():
    pb, pd = count_likelihoods(2, FP)
    assert pb == pytest.approx(math.exp(-10) * 50, rel=1e-13)
    assert pd == pytest.approx(math.exp(-1) * 0.5, rel=1e-13)
