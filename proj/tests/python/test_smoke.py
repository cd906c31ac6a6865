import math

import pytest

import hashpop as hp


def test_gamma_kernel_peak():
    spec = hp.popularity("gamma", a=2.0, b=4.0, c=0.3)
    assert hp.evaluate_popularity(spec, 8.0) == pytest.approx(0.3)
    t_max, w_max, t_inf = hp.popularity_landmarks(spec)
    assert t_max == pytest.approx(8.0)
    assert w_max == pytest.approx(0.3)
    assert t_inf == pytest.approx(8.0 + 4.0 * math.sqrt(2.0))


def test_degree_moments():
    dist = hp.degree("discrete", support=[1, 2, 3], probs=[0.5, 0.3, 0.2])
    mean, mean_sq = hp.degree_moments(dist)
    assert mean == pytest.approx(1.7)
    assert mean_sq == pytest.approx(3.5)


def test_special_functions():
    assert hp.lower_incomplete_gamma(1.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert hp.log_gamma(5.0) == pytest.approx(math.log(24.0))
    assert hp.stirling_gamma(10.0) == pytest.approx(362880.0, rel=0.01)


def test_moments_identity():
    params = hp.NetworkParams(1000, 5.0, 50.0)
    spec = hp.popularity("const", c=0.01)
    assert hp.mean_reads(params, spec, 10.0) == pytest.approx(500.0)
    assert hp.variance_reads(params, spec, 10.0) == pytest.approx(5000.0)
    band = hp.confidence_band(params, spec, [10.0], 0.95)
    half = 1.959964 * math.sqrt(5000.0)
    assert band["band_high"][0] == pytest.approx(500.0 + half, rel=1e-5)


def test_simulation_reproducible():
    params = hp.NetworkParams(50, 1.7, 3.5)
    spec = hp.popularity("gamma", a=2.0, b=1.0, c=0.1)
    dist = hp.degree("discrete", support=[1, 2, 3], probs=[0.5, 0.3, 0.2])
    t1, j1 = hp.simulate_events(params, spec, dist, 10.0, 42)
    t2, j2 = hp.simulate_events(params, spec, dist, 10.0, 42)
    assert t1 == t2
    assert j1 == j2
    assert all(b > a for a, b in zip(t1, t1[1:]))
    assert all(j in (1, 2, 3) for j in j1)


def test_master_equation_poisson():
    params = hp.NetworkParams(20, 1.0, 1.0)
    spec = hp.popularity("const", c=0.05)
    dist = hp.degree("degenerate", k=1)
    grid = hp.evolve_master_equation(params, spec, dist, 60, [5.0])
    lam = 20 * 0.05 * 5.0
    pmf = grid["pmf"][0]
    expected = math.exp(-lam)
    for x in range(8):
        assert pmf[x] == pytest.approx(expected, abs=1e-8)
        expected *= lam / (x + 1)


def test_fit_recovery():
    spec = hp.popularity("gamma", a=2.0, b=1.5, c=0.3)
    times = [12.0 * i / 100 for i in range(1, 101)]
    series = hp.TimeSeries(times, [hp.evaluate_popularity(spec, t) for t in times])
    fit = hp.lm_fit_gamma(series)
    assert fit["converged"]
    assert fit["a"] == pytest.approx(2.0, rel=1e-5)
    assert fit["b"] == pytest.approx(1.5, rel=1e-5)
    assert fit["c"] == pytest.approx(0.3, rel=1e-5)


def test_moving_average_truncation():
    s = hp.TimeSeries([0.0, 1.0, 2.0, 3.0, 4.0], [0.0, 1.0, 2.0, 3.0, 4.0])
    out = hp.moving_average(s, 3)
    assert out.values == pytest.approx([0.5, 1.0, 2.0, 3.0, 3.5])
