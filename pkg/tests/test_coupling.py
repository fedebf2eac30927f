import math

import numpy as np
import pytest

from semistable.coupling import (coupled_pair, coupling_gap_curve,
                                 maximal_fluctuation)
from semistable.empirics import ks_two_sample
from semistable.sampling import RngStream, poisson_sum_batch
from semistable.tailmodel import make_pareto, make_petersburg


def test_forced_count_gives_zero_gap():
    m = make_pareto(0.5)
    cp = coupled_pair(m, 500, RngStream(9), force_count=500)
    assert cp.gap == 0.0
    assert cp.s_hat == cp.s_bar


def test_pathwise_identity():
    # the two sums share the first min(n, N) terms: gap is the segment sum
    m = make_pareto(0.5)
    cp = coupled_pair(m, 200, RngStream(17))
    assert cp.gap == pytest.approx(abs(cp.s_hat - cp.s_bar), rel=1e-9)
    assert cp.count >= 0


def test_contract_checks():
    with pytest.raises(ValueError):
        coupled_pair(make_pareto(1.5, x0=1.0), 100, RngStream(1))  # alpha >= 1
    with pytest.raises(ValueError):
        coupled_pair(make_petersburg(), 100, RngStream(1))  # T(x0) = 0.5 != 1


def test_count_moments():
    m = make_pareto(0.5)
    n = 10 ** 4
    counts = np.array([coupled_pair(m, n, RngStream(23, i)).count
                       for i in range(3000)])
    dev = counts.std(ddof=1)
    assert abs(dev - math.sqrt(n)) <= 0.05 * math.sqrt(n)
    assert abs(counts.mean() - n) <= 5.0


def test_median_gap_small_at_large_n():
    m = make_pareto(0.5)
    gaps = np.array([coupled_pair(m, 10 ** 4, RngStream(29, i)).gap
                     for i in range(1000)])
    # gap order n^(-1/(2 alpha)) = n^-1; generous factor 10
    assert np.median(gaps) <= 10.0 * 1e-4


def test_gap_curve_decreasing():
    m = make_pareto(0.5)
    rep = coupling_gap_curve(m, [100, 1000, 10000], 1000, RngStream(44))
    assert rep.statistic["monotone_fraction"] == 1.0
    meds = [r["median_gap"] for r in rep.statistic["rows"]]
    assert meds[0] > meds[1] > meds[2]
    assert rep.passed
    for row in rep.statistic["rows"]:
        assert row["ks"] <= 0.02
        assert row["median_max_fluctuation"] >= 0.0
    assert rep.to_dict()["pass"] is rep.passed


def test_gap_curve_single_rep_has_no_stderr():
    m = make_pareto(0.5)
    rep = coupling_gap_curve(m, [50, 100], 1, RngStream(3), with_ks=False)
    assert rep.stderr is None


def test_gap_curve_threads_invariant():
    m = make_pareto(0.5)
    a = coupling_gap_curve(m, [100, 400], 300, RngStream(8), threads=1)
    b = coupling_gap_curve(m, [100, 400], 300, RngStream(8), threads=4)
    assert a.statistic == b.statistic


def test_randomized_sum_matches_poisson_construction():
    # two code paths, one law: s_bar at cutoff n^(-1/alpha) vs the point-sum
    # with the rescaled intensity n T(n^(1/alpha) x) (= T itself, pure tails)
    m = make_pareto(0.5)
    n = 1000
    reps = 100000
    s_bar = np.empty(reps)
    for i in range(reps):
        cp = coupled_pair(m, n, RngStream(52, i))
        s_bar[i] = cp.s_bar
    sums = poisson_sum_batch(m, float(n) ** -2.0, reps, seed=53)
    assert ks_two_sample(s_bar, sums) <= 0.01


def test_maximal_fluctuation_scale():
    m = make_pareto(0.5)
    vals_small = [maximal_fluctuation(m, 100, RngStream(61, i)) for i in range(200)]
    vals_big = [maximal_fluctuation(m, 10 ** 4, RngStream(62, i)) for i in range(200)]
    assert np.median(vals_big) < np.median(vals_small)
    assert min(vals_big) >= 0.0
