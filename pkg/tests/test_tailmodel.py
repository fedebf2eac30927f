import math

import numpy as np
import pytest

from semistable.tailmodel import (TailModel, gaussian_criterion_ratio,
                                  intensity_quantile, intensity_tail,
                                  make_pareto, make_petersburg,
                                  model_from_json, model_to_json, tail_eval,
                                  tail_first_moment, tail_quantile)


def wavy_grid_model(alpha=1.0, amp=0.05, m=96):
    # small log-periodic ripple; amplitude kept below the monotonicity budget
    u = np.arange(m) / m
    vals = 1.0 + amp * np.sin(2.0 * math.pi * u)
    return TailModel(alpha=alpha, q=2, c=1.0, x0=1.0, psi_kind="grid",
                     psi_values=tuple(vals))


# -- construction and validation --------------------------------------------

def test_petersburg_tail_values():
    m = make_petersburg()
    # geometric sums over the dyadic masses
    assert tail_eval(m, 2.0) == 0.5
    assert tail_eval(m, 4.0) == 0.25
    assert tail_eval(m, 3.0) == 0.5
    assert tail_eval(m, 8.0) == 0.125


def test_petersburg_masses_exact():
    m = make_petersburg()
    for k in range(2, 31):
        x = 2.0 ** k
        jump = tail_eval(m, np.nextafter(x, 0.0)) - tail_eval(m, x)
        assert jump == 2.0 ** (-k)


def test_pure_stable_tail():
    m = make_pareto(0.5)
    assert tail_eval(m, 1.0) == 1.0
    assert tail_eval(m, 4.0) == 0.5


def test_domain_errors():
    m = make_petersburg()
    with pytest.raises(ValueError):
        tail_eval(m, 1.0)  # below x0
    with pytest.raises(ValueError):
        tail_quantile(m, 0.0)
    with pytest.raises(ValueError):
        tail_quantile(m, 0.6)  # above T(x0) = 0.5
    with pytest.raises(ValueError):
        TailModel(alpha=0.0, q=2, c=1.0, x0=1.0)
    with pytest.raises(ValueError):
        TailModel(alpha=1.0, q=1, c=1.0, x0=1.0)
    with pytest.raises(ValueError):
        TailModel(alpha=1.0, q=2, c=-1.0, x0=1.0)


def test_monotonicity_rejection():
    # ripple too strong: c x^-alpha psi(log_q x) increases somewhere
    u = np.arange(64) / 64.0
    vals = 1.0 + 0.9 * np.sin(2.0 * math.pi * u)
    with pytest.raises(ValueError):
        TailModel(alpha=1.0, q=2, c=1.0, x0=1.0, psi_kind="grid",
                  psi_values=tuple(vals))


def test_grid_needs_64_samples():
    with pytest.raises(ValueError):
        TailModel(alpha=1.0, q=2, c=1.0, x0=1.0, psi_kind="grid",
                  psi_values=tuple(np.ones(32)))


def test_petersburg_psi_requires_alpha_one():
    with pytest.raises(ValueError):
        TailModel(alpha=0.5, q=2, c=1.0, x0=1.0, psi_kind="petersburg")


# -- quantiles ----------------------------------------------------------------

def test_petersburg_quantiles():
    m = make_petersburg()
    assert tail_quantile(m, 0.3) == 4.0
    # boundary: T(2) = 0.5 already meets the threshold
    assert tail_quantile(m, 0.5) == 2.0
    assert tail_quantile(m, 0.25) == 4.0


def test_pure_stable_quantile():
    m = make_pareto(0.5)
    assert tail_quantile(m, 0.25) == pytest.approx(16.0, rel=1e-14)


@pytest.mark.parametrize("model", [make_petersburg(), make_pareto(0.5),
                                   wavy_grid_model()])
def test_quantile_tail_galois(model):
    rng = np.random.default_rng(7)
    cap = tail_eval(model, model.x0)
    us = rng.uniform(0.0, 1.0, 1000) * cap
    us = us[us > 0]
    for u in us:
        x = tail_quantile(model, u)
        assert tail_eval(model, x) <= u * (1.0 + 1e-9)
        if x > model.x0:
            below = x * (1.0 - 1e-9)
            assert tail_eval(model, max(below, model.x0)) > u * (1.0 - 1e-9)


@pytest.mark.parametrize("model", [make_petersburg(x0=1.0), make_pareto(0.5),
                                   wavy_grid_model()])
def test_semistable_self_similarity(model):
    # n T(n^{1/alpha} x) = T(x) along n = q^k
    xs = np.geomspace(model.x0, model.x0 * 50.0, 25)
    for k in (1, 2, 3):
        n = model.q ** k
        scaled = n * intensity_tail(model, n ** (1.0 / model.alpha) * xs)
        base = intensity_tail(model, xs)
        assert np.allclose(scaled, base, rtol=1e-12)


def test_intensity_extension_below_x0():
    m = make_pareto(0.5)
    assert intensity_tail(m, 1e-4) == pytest.approx(100.0, rel=1e-12)
    assert intensity_quantile(m, 100.0) == pytest.approx(1e-4, rel=1e-9)
    pete = make_petersburg()
    assert intensity_tail(pete, 0.6) == 2.0
    assert intensity_quantile(pete, 3.0) == 0.5


def test_grid_quantile_matches_bisection_inverse():
    m = wavy_grid_model()
    for u in (0.7, 0.31, 0.05, 0.011):
        x = tail_quantile(m, u)
        assert tail_eval(m, x) == pytest.approx(u, rel=1e-9)


# -- criterion ratio and moments ---------------------------------------------

def test_gaussian_criterion_pure_tails():
    # analytic value (2 - alpha)/alpha for psi == 1 on (0, inf)
    m = make_pareto(0.5, x0=0.0)
    assert gaussian_criterion_ratio(m, 1e6) == pytest.approx(3.0, abs=1e-3)
    m = make_pareto(1.9, x0=0.0)
    assert gaussian_criterion_ratio(m, 1e6) == pytest.approx(0.1 / 1.9, abs=1e-3)


def test_gaussian_criterion_stabilizes():
    # with support cut at x0 = 1 the ratio converges to the limit from above
    m = make_pareto(0.5)
    vals = [gaussian_criterion_ratio(m, x) for x in (1e3, 1e4, 1e5, 1e6)]
    errs = [abs(v - 3.0) for v in vals]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-3


def test_gaussian_criterion_domain():
    m = make_pareto(0.5)
    with pytest.raises(ValueError):
        gaussian_criterion_ratio(m, 0.5)


def test_tail_first_moment_closed_forms():
    # pareto alpha=1.5: integral_t^inf x dmu = alpha/(alpha-1) t^{1-alpha}
    m = make_pareto(1.5, x0=1.0)
    for t in (0.5, 1.0, 3.0):
        exact = 1.5 / 0.5 * t ** (-0.5)
        assert tail_first_moment(m, t) == pytest.approx(exact, rel=1e-8)
    # petersburg truncated mean: integral_(2^-k,1] x dmu = k
    pete = make_petersburg(x0=1.0)
    for k in (3, 10):
        assert tail_first_moment(pete, 2.0 ** -k, 1.0) == pytest.approx(k, abs=1e-7)


# -- serialization -------------------------------------------------------------

@pytest.mark.parametrize("model", [make_petersburg(), make_pareto(0.75, c=2.0),
                                   wavy_grid_model()])
def test_json_round_trip(model):
    doc = model_to_json(model)
    back = model_from_json(doc)
    assert back == model
    xs = np.geomspace(model.x0 + 0.5, model.x0 * 30.0, 17)
    assert np.allclose(tail_eval(back, xs), tail_eval(model, xs), rtol=0)


def test_json_schema_fields():
    import json
    doc = json.loads(model_to_json(make_petersburg()))
    assert set(doc) == {"alpha", "q", "c", "x0", "psi"}
    assert doc["psi"]["kind"] == "petersburg"
    assert doc["psi"]["values"] == []
