"""Empirical distribution machinery and the Monte Carlo limit-theorem experiments.

Each experiment simulates with one Philox stream per replicate (stream id =
base + replicate index), so results are bitwise independent of the thread
count, and compares against the inverted limit CDF or a closed-form oracle.
Reports carry the statistic, a Monte Carlo standard error where one makes
sense, the seed and the pass/fail verdict at the stated tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._util import map_replicate_blocks
from .charfn import (TabulatedCdf, cdf_from_cf, erlang_cdf, g_gamma_law,
                     tabulate_cdf)
from .sampling import RngStream, _open01, petersburg_from_uniform

__all__ = [
    "Ecdf",
    "ExperimentReport",
    "ks_distance",
    "ks_two_sample",
    "levy_distance",
    "gamma_n",
    "feller_experiment",
    "martin_lof_experiment",
    "merging_experiment",
    "merging_sweep",
    "order_statistics_experiment",
    "negligibility_experiment",
    "lepage_limit_experiment",
]

_STRIDE = 10 ** 7  # stream-id block separating experiment phases


@dataclass(frozen=True)
class Ecdf:
    """Sorted sample with step-function evaluation F_hat(x) = #{v <= x}/n."""

    values: np.ndarray

    @classmethod
    def from_sample(cls, sample) -> "Ecdf":
        return cls(values=np.sort(np.asarray(sample, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.values)

    def __call__(self, x):
        out = np.searchsorted(self.values, np.asarray(x, dtype=float),
                              side="right") / self.n
        return float(out) if np.shape(x) == () else out


def ks_distance(e: Ecdf, cdf) -> float:
    """sup_x |F_hat(x) - F(x)|, exact over the jump points of the ECDF.

    The approach from the left evaluates F at the previous float, which
    keeps the statistic exact for step-function F as well (a sample against
    its own ECDF gives 0)."""
    fv = np.asarray(cdf(e.values), dtype=float)
    fv_left = np.asarray(cdf(np.nextafter(e.values, -np.inf)), dtype=float)
    i = np.arange(1, e.n + 1)
    upper = np.abs(i / e.n - fv)
    lower = np.abs((i - 1) / e.n - fv_left)
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a, b) -> float:
    """Exact two-sample sup distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / a.size
    fb = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def levy_distance(e: Ecdf, cdf, grid_step: float = 1e-4) -> float:
    """inf{eps : F(x-eps) - eps <= F_hat(x) <= F(x+eps) + eps for all x}.

    Bisection on eps, checked at the ECDF jump points (sufficient for a
    continuous F); approximation error at most grid_step.  Bounded above by
    the KS distance, which seeds the bracket.
    """
    if grid_step <= 0.0:
        raise ValueError("grid_step must be positive")
    v = e.values
    i = np.arange(1, e.n + 1)

    def feasible(eps):
        above = np.asarray(cdf(v - eps), dtype=float) - eps <= (i - 1) / e.n + 1e-15
        below = np.asarray(cdf(v + eps), dtype=float) + eps >= i / e.n - 1e-15
        return bool(np.all(above) and np.all(below))

    hi = ks_distance(e, cdf) + grid_step
    lo = 0.0
    if feasible(lo):
        return 0.0
    while hi - lo > grid_step:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def gamma_n(n: int) -> float:
    """Dyadic position n / 2**floor(log2 n) in [1, 2), computed exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m, _ = math.frexp(n)
    return 2.0 * m


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of one experiment: statistic(s), stderr, seed, tolerance, verdict."""

    experiment: str
    params: dict
    statistic: object
    stderr: float | None
    seed: int
    tolerance: object
    passed: bool

    def __post_init__(self):
        if self.stderr is not None and not self.stderr >= 0.0:
            raise ValueError("stderr must be >= 0")

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "statistic": self.statistic,
            "stderr": self.stderr,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)


# -- shared simulation blocks --------------------------------------------------


def _petersburg_sum_block(n, seed, base):
    def block(start, stop):
        out = np.empty(stop - start)
        for i in range(start, stop):
            gen = RngStream(seed, base + i).generator()
            out[i - start] = petersburg_from_uniform(_open01(gen, n)).sum()
        return out
    return block


_TABLE_CACHE: dict = {}


def _limit_table(gamma: float, x_lo: float, x_hi: float) -> TabulatedCdf:
    """Tabulated CDF of the merging-family law at gamma, cached on a coarse
    span key."""
    key = (round(float(gamma), 12), 8.0 * math.floor(x_lo / 8.0),
           8.0 * math.ceil(x_hi / 8.0))
    if key not in _TABLE_CACHE:
        law = g_gamma_law(key[0])
        _TABLE_CACHE[key] = tabulate_cdf(law, key[1], key[2], tol=1e-7)
    return _TABLE_CACHE[key]


def _ks_versus_limit(vals: np.ndarray, gamma: float) -> float:
    """KS of the sample against the family law, on a clamped adaptive table.

    The table spans [min - 1, min(quantile(1 - 5e-4), 1024)]; values beyond
    are clamped, which perturbs the statistic by at most ~1.5e-3 (the law's
    right tail is ~1.4/x), well below the 0.02+ tolerances in play."""
    x_lo = float(np.min(vals)) - 1.0
    x_hi = min(max(64.0, float(np.quantile(vals, 1.0 - 5e-4))), 1024.0)
    table = _limit_table(gamma, x_lo, x_hi)
    return ks_distance(Ecdf.from_sample(vals), table)


# -- experiments ----------------------------------------------------------------


def feller_experiment(n: int, reps: int, rng: RngStream, threads: int = 1,
                      tol_base: float = 0.02) -> ExperimentReport:
    """Weak-law drift check: S_n/(n log2 n) is near 1, at the rate the limit
    family predicts.

    Reports the empirical exceedance P(|S_n/(n log2 n) - 1| > eps) for
    eps in {0.5, 0.25} and compares the 0.5 figure with the limit-law value
    P(|W| > 0.5 log2 n), W following the family law at gamma_n; the
    tolerance is tol_base + 3 * binomial stderr.
    """
    if n < 2 or reps < 100:
        raise ValueError("need n >= 2 and reps >= 100")
    sums = np.concatenate(map_replicate_blocks(
        _petersburg_sum_block(n, rng.seed, rng.stream_id), reps, threads))
    log2n = math.log2(n)
    w = sums / (n * log2n) - 1.0
    exc_half = float(np.mean(np.abs(w) > 0.5))
    exc_quarter = float(np.mean(np.abs(w) > 0.25))
    gamma = gamma_n(n)
    law = g_gamma_law(gamma)
    thr = 0.5 * log2n
    predicted = float(1.0 - cdf_from_cf(law, thr) + cdf_from_cf(law, -thr))
    stat = abs(exc_half - predicted)
    stderr = math.sqrt(max(exc_half * (1.0 - exc_half), 1e-12) / reps)
    tolerance = tol_base + 3.0 * stderr
    return ExperimentReport(
        experiment="feller",
        params={"n": n, "reps": reps},
        statistic={"abs_error": stat, "exceedance_0.5": exc_half,
                   "exceedance_0.25": exc_quarter, "predicted_0.5": predicted,
                   "gamma": gamma},
        stderr=stderr,
        seed=rng.seed,
        tolerance=tolerance,
        passed=bool(stat <= tolerance),
    )


def martin_lof_experiment(k: int, reps: int, rng: RngStream, threads: int = 1,
                          tolerance: float = 0.02) -> ExperimentReport:
    """KS distance of S_{2^k}/2^k - k against the inverted limit CDF."""
    if not (4 <= k <= 20):
        raise ValueError("k must lie in [4, 20]")
    if reps < 10 ** 4:
        raise ValueError("reps must be >= 1e4")
    n = 1 << k
    sums = np.concatenate(map_replicate_blocks(
        _petersburg_sum_block(n, rng.seed, rng.stream_id), reps, threads))
    vals = sums / n - k
    stat = _ks_versus_limit(vals, 1.0)
    return ExperimentReport(
        experiment="martin_lof",
        params={"k": k, "reps": reps},
        statistic=stat,
        stderr=0.5 / math.sqrt(reps),
        seed=rng.seed,
        tolerance=tolerance,
        passed=bool(stat <= tolerance),
    )


def merging_experiment(n: int, reps: int, rng: RngStream, threads: int = 1,
                       tolerance: float = 0.03) -> ExperimentReport:
    """Sup distance of S_n/n - log2 n to the family law at gamma_n."""
    if n < 16:
        raise ValueError("n must be >= 16")
    if reps < 10 ** 4:
        raise ValueError("reps must be >= 1e4")
    gamma = gamma_n(n)
    sums = np.concatenate(map_replicate_blocks(
        _petersburg_sum_block(n, rng.seed, rng.stream_id), reps, threads))
    vals = sums / n - math.log2(n)
    stat = _ks_versus_limit(vals, gamma)
    return ExperimentReport(
        experiment="merging",
        params={"n": n, "reps": reps, "gamma": gamma},
        statistic=stat,
        stderr=0.5 / math.sqrt(reps),
        seed=rng.seed,
        tolerance=tolerance,
        passed=bool(stat <= tolerance),
    )


def merging_sweep(k: int, points_per_octave: int, reps: int, rng: RngStream,
                  threads: int = 1, tol_max: float = 0.04,
                  tol_two_sample: float = 0.015) -> ExperimentReport:
    """Walk n across one dyadic octave and follow the moving limit law.

    Runs the merging comparison at n = round(2^k (1 + i/points)) for
    i = 0..points; the family position returns to gamma = 1 at both ends,
    so the law tags coincide and the end batches must agree (two-sample KS).
    """
    if k < 8:
        raise ValueError("k must be >= 8")
    if points_per_octave < 1:
        raise ValueError("points_per_octave must be >= 1")
    ns = [round((1 << k) * (1.0 + i / points_per_octave))
          for i in range(points_per_octave + 1)]
    distances = []
    gammas = []
    first_vals = last_vals = None
    for idx, n in enumerate(ns):
        base = rng.stream_id + idx * _STRIDE
        sums = np.concatenate(map_replicate_blocks(
            _petersburg_sum_block(n, rng.seed, base), reps, threads))
        vals = sums / n - math.log2(n)
        gamma = gamma_n(n)
        gammas.append(gamma)
        distances.append(_ks_versus_limit(vals, gamma))
        if idx == 0:
            first_vals = vals
        if idx == len(ns) - 1:
            last_vals = vals
    ks2 = ks_two_sample(first_vals, last_vals)
    max_distance = float(np.max(distances))
    closure = gammas[0] == gammas[-1] == 1.0
    passed = max_distance <= tol_max and ks2 <= tol_two_sample and closure
    return ExperimentReport(
        experiment="merging_sweep",
        params={"k": k, "points_per_octave": points_per_octave, "reps": reps,
                "n_values": ns},
        statistic={"max_distance": max_distance, "distances": distances,
                   "endpoint_two_sample_ks": ks2,
                   "endpoint_gammas": [gammas[0], gammas[-1]]},
        stderr=0.5 / math.sqrt(reps),
        seed=rng.seed,
        tolerance={"max_distance": tol_max, "endpoint_two_sample_ks": tol_two_sample},
        passed=bool(passed),
    )


def order_statistics_experiment(p: int, n: int, reps: int, rng: RngStream,
                                threads: int = 1,
                                ks_tolerance: float | None = 0.012
                                ) -> ExperimentReport:
    """p-th smallest of n uniforms: exact moments and the Gamma(p, 1) limit of n*y_p.

    Checks the closed forms E y_p = p/(n+1) and
    Var y_p = p(n-p+1)/((n+1)^2 (n+2)) within 3 Monte Carlo standard errors,
    and the KS distance of n*y_p to the Erlang(p) CDF.  The Erlang limit
    needs n >> p; pass ks_tolerance=None to report the KS without letting it
    decide the verdict (exact-moment checks at small n).
    """
    if not (1 <= p <= n):
        raise ValueError("need 1 <= p <= n")
    if reps < 100:
        raise ValueError("reps must be >= 100")

    def block(start, stop):
        out = np.empty(stop - start)
        for i in range(start, stop):
            gen = RngStream(rng.seed, rng.stream_id + i).generator()
            u = gen.random(n)
            if p == 1:
                out[i - start] = u.min()
            elif p == n:
                out[i - start] = u.max()
            else:
                out[i - start] = np.partition(u, p - 1)[p - 1]
        return out

    ys = np.concatenate(map_replicate_blocks(block, reps, threads))
    mean_exact = p / (n + 1.0)
    var_exact = p * (n - p + 1.0) / ((n + 1.0) ** 2 * (n + 2.0))
    mean_err = float(abs(ys.mean() - mean_exact))
    se_mean = float(ys.std(ddof=1) / math.sqrt(reps))
    centered = ys - ys.mean()
    m2 = float(np.mean(centered ** 2))
    m4 = float(np.mean(centered ** 4))
    var_err = float(abs(ys.var(ddof=1) - var_exact))
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / reps)
    ks = ks_distance(Ecdf.from_sample(n * ys), lambda x: erlang_cdf(p, x))
    passed = mean_err <= 3.0 * se_mean and var_err <= 3.0 * se_var
    if ks_tolerance is not None:
        passed = passed and ks <= ks_tolerance
    return ExperimentReport(
        experiment="order_statistics",
        params={"p": p, "n": n, "reps": reps},
        statistic={"mean": float(ys.mean()), "mean_exact": mean_exact,
                   "mean_err": mean_err, "var": float(ys.var(ddof=1)),
                   "var_exact": var_exact, "var_err": var_err, "ks": ks},
        stderr=se_mean,
        seed=rng.seed,
        tolerance={"mean_err": 3.0 * se_mean, "var_err": 3.0 * se_var,
                   "ks": ks_tolerance},
        passed=bool(passed),
    )


def negligibility_experiment(alpha_list, n: int, reps: int, rng: RngStream,
                             threads: int = 1, bounds: dict | None = None
                             ) -> ExperimentReport:
    """Median of max|x| / sum|x| across tail exponents.

    For alpha < 2 the largest term keeps the order of magnitude of the whole
    sum; past the finite-variance threshold it becomes negligible.  The
    ratio is invariant under the symmetrizing signs, so only magnitudes are
    drawn.  Default bounds: median >= 0.2 for alpha < 1 and <= 0.05 for
    alpha > 2.
    """
    if n < 10 ** 3:
        raise ValueError("n must be >= 1e3")
    alpha_list = [float(a) for a in alpha_list]
    if bounds is None:
        bounds = {}
        for a in alpha_list:
            if a < 1.0:
                bounds[a] = (0.2, 1.0)
            elif a > 2.0:
                bounds[a] = (0.0, 0.05)
            else:
                bounds[a] = (0.0, 1.0)
    medians = {}
    for idx, alpha in enumerate(alpha_list):
        base = rng.stream_id + idx * _STRIDE

        def block(start, stop, alpha=alpha, base=base):
            out = np.empty(stop - start)
            for i in range(start, stop):
                gen = RngStream(rng.seed, base + i).generator()
                mags = _open01(gen, n) ** (-1.0 / alpha)
                out[i - start] = mags.max() / mags.sum()
            return out

        ratios = np.concatenate(map_replicate_blocks(block, reps, threads))
        medians[alpha] = float(np.median(ratios))
    passed = all(bounds[a][0] <= medians[a] <= bounds[a][1] for a in alpha_list)
    return ExperimentReport(
        experiment="negligibility",
        params={"alpha_list": alpha_list, "n": n, "reps": reps},
        statistic={"medians": {str(a): medians[a] for a in alpha_list}},
        stderr=None,
        seed=rng.seed,
        tolerance={str(a): list(bounds[a]) for a in alpha_list},
        passed=bool(passed),
    )


def lepage_limit_experiment(alpha: float, k: int, reps: int, rng: RngStream,
                            threads: int = 1, symmetric: bool = False,
                            n_terms: int | None = None,
                            tolerance: float = 0.015,
                            rank_checks: int = 3) -> ExperimentReport:
    """Normalized i.i.d. block sums against the LePage series, as two samples.

    Batch (a): n = 2^k pure power-tail draws per replicate, summed and scaled
    by n**(-1/alpha) (signs randomized in symmetric mode).  Batch (b): the
    truncated LePage series.  The statistic is the two-sample KS distance;
    the per-rank extremes n**(-1/alpha) * rho_p are compared with the series
    terms Z_p**(-1/alpha) for p = 1..rank_checks.
    """
    from .sampling import _lepage_prep

    if not (4 <= k <= 24):
        raise ValueError("k must lie in [4, 24]")
    n = 1 << k
    p_terms = _lepage_prep(alpha, n_terms, symmetric)
    r = int(rank_checks)

    def block_a(start, stop):
        out = np.empty((stop - start, 1 + r))
        scale = float(n) ** (-1.0 / alpha)
        for i in range(start, stop):
            gen = RngStream(rng.seed, rng.stream_id + i).generator()
            mags = _open01(gen, n) ** (-1.0 / alpha)
            if symmetric:
                signed = mags * (2.0 * gen.integers(0, 2, n) - 1.0)
                out[i - start, 0] = scale * signed.sum()
            else:
                out[i - start, 0] = scale * mags.sum()
            if r:
                top = np.sort(np.partition(mags, n - r)[n - r:])[::-1]
                out[i - start, 1:] = scale * top
        return out

    def block_b(start, stop):
        out = np.empty((stop - start, 1 + r))
        base = rng.stream_id + _STRIDE
        for i in range(start, stop):
            gen = RngStream(rng.seed, base + i).generator()
            z = np.cumsum(gen.standard_exponential(p_terms))
            mags = z ** (-1.0 / alpha)
            if symmetric:
                out[i - start, 0] = (mags * (2.0 * gen.integers(0, 2, p_terms) - 1.0)).sum()
            else:
                out[i - start, 0] = mags.sum()
            if r:
                out[i - start, 1:] = mags[:r]
        return out

    a = np.concatenate(map_replicate_blocks(block_a, reps, threads))
    b = np.concatenate(map_replicate_blocks(block_b, reps, threads))
    ks2 = ks_two_sample(a[:, 0], b[:, 0])
    rank_ks = [float(ks_two_sample(a[:, 1 + j], b[:, 1 + j])) for j in range(r)]
    passed = ks2 <= tolerance
    return ExperimentReport(
        experiment="lepage_limit",
        params={"alpha": alpha, "k": k, "reps": reps, "symmetric": symmetric,
                "n_terms": p_terms},
        statistic={"two_sample_ks": float(ks2), "rank_ks": rank_ks},
        stderr=math.sqrt(2.0 / reps) * 0.5,
        seed=rng.seed,
        tolerance=tolerance,
        passed=bool(passed),
    )
