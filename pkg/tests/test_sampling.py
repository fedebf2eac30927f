import math

import numpy as np
import pytest

from semistable.charfn import levy_cdf
from semistable.empirics import Ecdf, ks_distance, ks_two_sample
from semistable.sampling import (PoissonPointSet, ResourceLimitError,
                                 RngStream, lepage_auto_terms, lepage_batch,
                                 petersburg_from_uniform, points_from_arrivals,
                                 poisson_sum_batch, poisson_sum_centering,
                                 sample_lepage, sample_petersburg,
                                 sample_poisson_points,
                                 sample_semistable_poisson_sum,
                                 sample_tail_model, write_batch)
from semistable.tailmodel import make_pareto, make_petersburg, tail_eval


# -- petersburg draws -----------------------------------------------------------

def test_uniform_to_winnings_mapping():
    u = np.array([0.3, 0.6, 1.0, 0.5, 0.25, 2.0 ** -20])
    v = petersburg_from_uniform(u)
    # k = floor(log2(1/u)) + 1; boundaries go to the larger value
    assert list(v) == [4.0, 2.0, 2.0, 4.0, 8.0, 2.0 ** 21]


def test_petersburg_mass_frequencies():
    batch = sample_petersburg(10 ** 6, RngStream(101))
    freq2 = np.mean(batch.values == 2.0)
    assert abs(freq2 - 0.5) <= 0.002  # 3 binomial stderr at 1e6 is 0.0015
    freq4 = np.mean(batch.values == 4.0)
    assert abs(freq4 - 0.25) <= 0.002
    assert np.all(np.log2(batch.values) % 1.0 == 0.0)


def test_reproducibility_and_stream_independence():
    a = sample_petersburg(512, RngStream(9, 3))
    b = sample_petersburg(512, RngStream(9, 3))
    c = sample_petersburg(512, RngStream(9, 4))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    meta = a.metadata()
    assert meta == {"model": "petersburg", "seed": 9, "stream_id": 3,
                    "transform": "raw", "n": 512}


def test_batch_validation():
    with pytest.raises(ValueError):
        sample_petersburg(0, RngStream(1))


# -- quantile-transform sampling -------------------------------------------------

def test_tail_model_sampler_empirical_tail():
    m = make_pareto(0.5)
    batch = sample_tail_model(m, 10 ** 6, RngStream(21))
    emp = np.mean(batch.values > 4.0)
    assert abs(emp - 0.5) <= 0.0015  # binomial 3 sigma
    assert batch.values.min() >= 1.0


def test_tail_model_sampler_symmetrize():
    m = make_pareto(0.5)
    batch = sample_tail_model(m, 10 ** 6, RngStream(22), symmetrize=True)
    assert abs(np.mean(np.sign(batch.values))) <= 0.003
    # magnitudes keep the one-sided law
    emp = np.mean(np.abs(batch.values) > 4.0)
    assert abs(emp - 0.5) <= 0.0016


def test_petersburg_via_tail_model_matches_direct():
    # unit-mass petersburg tail (x0 = 1) renormalizes to the full winnings law
    m = make_petersburg(x0=1.0)
    a = sample_tail_model(m, 200000, RngStream(5, 0))
    b = sample_petersburg(200000, RngStream(5, 1))
    assert ks_two_sample(a.values, b.values) <= 0.005


# -- poisson point sets ------------------------------------------------------------

def test_points_from_arrivals_power_law():
    m = make_pareto(0.5)
    arr = np.array([0.25, 1.0, 4.0, 9.0])
    pts = points_from_arrivals(m, arr)
    assert np.allclose(pts, arr ** -2.0, rtol=1e-13)  # y_p = Gamma_p^(-1/alpha)


def test_poisson_point_set_structure():
    m = make_pareto(0.5)
    ps = sample_poisson_points(m, 1e-4, RngStream(31))
    assert isinstance(ps, PoissonPointSet)
    assert np.all(np.diff(ps.points) <= 0.0)
    assert np.all(ps.points > 1e-4)
    assert np.all(np.diff(ps.arrival_times) > 0.0)
    assert ps.arrival_times.size == ps.points.size


def test_poisson_count_moments():
    # T(t) = 100: point count is Poisson(100)
    m = make_pareto(0.5)
    t = 1e-4
    counts = np.array([sample_poisson_points(m, t, RngStream(77, i)).points.size
                       for i in range(10 ** 4)])
    assert abs(counts.mean() - 100.0) <= 0.3
    assert abs(counts.var(ddof=1) - 100.0) <= 5.0


def test_poisson_void_probability():
    # P(largest point <= x) = exp(-T(x)); at T(x) = 1 this is 1/e
    m = make_pareto(0.5)
    t = 1e-4
    hits = 0
    reps = 10 ** 4
    for i in range(reps):
        ps = sample_poisson_points(m, t, RngStream(78, i))
        hits += 0 if (ps.points.size and ps.points[0] > 1.0) else 1
    assert abs(hits / reps - math.exp(-1.0)) <= 0.005


def test_point_budget_guard():
    m = make_pareto(0.5)
    with pytest.raises(ResourceLimitError):
        sample_poisson_points(m, 1e-20, RngStream(1))


# -- semistable poisson sums --------------------------------------------------------

def test_poisson_sum_centerings():
    # alpha = 1 truncated mean: petersburg intensity at cutoff 2^-k centers by k
    pete = make_petersburg(x0=1.0)
    assert poisson_sum_centering(pete, 2.0 ** -10) == pytest.approx(10.0, abs=1e-7)
    # alpha < 1: none
    assert poisson_sum_centering(make_pareto(0.5), 1e-6) == 0.0
    # alpha > 1: full mean above cutoff, alpha/(alpha-1) t^(1-alpha) for pure tails
    m = make_pareto(1.5, x0=1.0)
    assert poisson_sum_centering(m, 0.01) == pytest.approx(30.0, rel=1e-8)


def test_poisson_sum_empty_process():
    # cutoff far out: expected count ~ 3e-5, the fixed seed draws no point
    m = make_pareto(0.5)
    s = sample_semistable_poisson_sum(m, 1e9, RngStream(3))
    assert s == 0.0


def test_poisson_sum_levy_law():
    m = make_pareto(0.5)
    sums = poisson_sum_batch(m, 1e-6, 20000, seed=11)
    assert ks_distance(Ecdf.from_sample(sums), levy_cdf) <= 0.015
    # expected truncation bias of the cutoff is (alpha/(1-alpha)) t^(1-alpha) = 1e-3
    assert sums.min() > 0.0


def test_poisson_sum_symmetric_mode():
    m = make_pareto(1.5, x0=1.0)
    sums = np.array([sample_semistable_poisson_sum(m, 0.05, RngStream(13, i),
                                                   symmetric=True)
                     for i in range(4000)])
    se = sums.std(ddof=1) / math.sqrt(sums.size)
    assert abs(sums.mean()) <= 3.0 * se


def test_poisson_sum_centered_mean_zero():
    m = make_pareto(1.5, x0=1.0)
    sums = poisson_sum_batch(m, 0.05, 20000, seed=14)
    se = sums.std(ddof=1) / math.sqrt(sums.size)
    # infinite-variance summands: the t statistic is heavier than normal,
    # so allow 4 estimated stderrs around the exact centering
    assert abs(sums.mean()) <= 4.0 * se


def test_poisson_sum_batch_deterministic_and_threaded():
    m = make_pareto(0.5)
    a = poisson_sum_batch(m, 1e-4, 3000, seed=15)
    b = poisson_sum_batch(m, 1e-4, 3000, seed=15, threads=4)
    assert np.array_equal(a, b)


def test_dyadic_scaling_of_centered_sums():
    # one law across dyadic cutoff levels: centered sums at T(t) = 2^k merge
    pete = make_petersburg(x0=1.0)
    a = poisson_sum_batch(pete, 2.0 ** -8, 100000, seed=21)
    b = poisson_sum_batch(pete, 2.0 ** -12, 100000, seed=22)
    assert ks_two_sample(a, b) <= 0.01


# -- LePage series ---------------------------------------------------------------------

def test_lepage_auto_terms():
    assert lepage_auto_terms(0.5, False) == 10 ** 6  # mean proxy sum p^-2 < 1e-6
    assert lepage_auto_terms(0.5, True) == 70        # variance proxy sum p^-4
    with pytest.raises(ValueError):
        lepage_auto_terms(1.2, False)


def test_lepage_mode_contract():
    with pytest.raises(ValueError):
        sample_lepage(1.2, RngStream(1))  # positive mode needs alpha < 1
    with pytest.raises(ValueError):
        sample_lepage(2.5, RngStream(1), symmetric=True)
    assert sample_lepage(1.2, RngStream(1), symmetric=True, n_terms=500) != 0.0


def test_lepage_levy_law():
    vals = lepage_batch(0.5, 20000, seed=12, n_terms=10000)
    assert ks_distance(Ecdf.from_sample(vals), levy_cdf) <= 0.015


def test_lepage_symmetric_median_zero():
    vals = lepage_batch(0.75, 20000, seed=16, symmetric=True)
    med = np.median(vals)
    # median stderr ~ 1.2533 sd/sqrt(n) with sd estimated robustly
    q25, q75 = np.quantile(vals, [0.25, 0.75])
    se = 1.2533 * (q75 - q25) / 1.349 / math.sqrt(vals.size)
    assert abs(med) <= 3.0 * se


def test_lepage_term_ratio():
    # median of (Z_1/Z_4)^2 sits within factor 1.5 of 4^(-1/alpha) = 1/16
    rng = np.random.default_rng(5)
    z = np.cumsum(rng.standard_exponential((10 ** 5, 4)), axis=1)
    med = np.median((z[:, 0] / z[:, 3]) ** 2)
    assert med <= 1.0 / 16.0 * 1.5
    assert med >= 1.0 / 16.0 / 1.5


def test_lepage_truncation_refinement_stability():
    # doubling the term count moves the 0.9-quantile by far less than 1e-3
    from semistable.sampling import _lepage_terms
    for alpha, symmetric in ((0.4, False), (0.6, True)):
        p = lepage_auto_terms(alpha, symmetric)
        q_short = []
        q_long = []
        for i in range(2000):
            gen = RngStream(33, i).generator()
            terms = _lepage_terms(alpha, gen, 2 * p, symmetric)
            partial = np.cumsum(terms)
            q_short.append(partial[p - 1])
            q_long.append(partial[-1])
        shift = abs(np.quantile(q_short, 0.9) - np.quantile(q_long, 0.9))
        assert shift < 1e-3, (alpha, symmetric, shift)


def test_lepage_batch_reproducible():
    a = lepage_batch(0.5, 500, seed=2, n_terms=2000)
    b = lepage_batch(0.5, 500, seed=2, n_terms=2000, threads=3)
    assert np.array_equal(a, b)


# -- export -----------------------------------------------------------------------------

def test_write_batch(tmp_path):
    batch = sample_petersburg(16, RngStream(4))
    path = tmp_path / "batch.csv"
    write_batch(batch, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "index,value"
    assert len(lines) == 17
    import json
    meta = json.loads((tmp_path / "batch.csv.meta.json").read_text())
    assert meta["seed"] == 4 and meta["n"] == 16
