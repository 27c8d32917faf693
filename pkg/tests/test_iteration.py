import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from resolventkit import convex_sets as cs
from resolventkit import prox as px
from resolventkit.averaging import WeightedFamily, average_maps
from resolventkit.iteration import (
    Thresholds,
    Verdict,
    check_resolvent_regularity,
    diagnose,
    iterate,
)
from resolventkit.maps import FirmlyNonexpansiveMap, translation
from resolventkit.operators import operator_from_resolvent


def kool():
    return average_maps(WeightedFamily.uniform(cs.horizontal_line(), cs.Epigraph(cs.EXP)))


def _epi_exp_reference(p):
    # independent projection: bounded scalar minimization of the squared distance
    x0, t0 = p
    if t0 >= np.exp(x0):
        return p
    r = minimize_scalar(lambda u: (u - x0) ** 2 + (np.exp(u) - t0) ** 2, bounds=(x0 - 5, x0 + 1), method="bounded", options={"xatol": 1e-13})
    return np.array([r.x, np.exp(r.x)])


def test_kool_orbit_matches_independent_reference():
    T = kool()
    x = y = np.array([0.0, 2.0])
    for _ in range(300):
        x = T(x)
        y = 0.5 * np.array([y[0], 0.0]) + 0.5 * _epi_exp_reference(y)
    assert np.allclose(x, y, atol=1e-7)


def test_interval_average_converges():
    T = average_maps(WeightedFamily.uniform(cs.interval(0, 1), cs.interval(2, 3)))
    tr = iterate(T, [10.0])
    dg = diagnose(tr, T)
    assert dg.verdict is Verdict.CONVERGED
    assert dg.point[0] == pytest.approx(1.5, abs=1e-12)
    assert tr.residuals_monotone()


def test_translation_not_regular():
    T = translation([-1.0])
    tr = iterate(T, [0.0], max_iter=500)
    assert diagnose(tr, T).verdict is Verdict.NOT_REGULAR
    assert np.allclose(tr.residuals, 1.0)


def test_kool_short_budget_is_divergent():
    T = kool()
    tr = iterate(T, [0.0, 2.0], max_iter=20_000)
    dg = diagnose(tr, T, Thresholds(norm_escape=3.0))
    assert dg.verdict is Verdict.DIVERGENT
    assert tr.residuals_monotone()


def test_budget_verdict_when_undecided():
    # slow sublinear convergence toward a fixed point far away
    T = kool()
    tr = iterate(T, [0.0, 2.0], max_iter=200)
    assert diagnose(tr, T).verdict is Verdict.BUDGET


def test_store_limit_thins_iterates():
    T = translation([-1.0])
    tr = iterate(T, [0.0], max_iter=1000, store_limit=100)
    assert len(tr.iterates) <= 101
    assert tr.iterate_steps[-1] == tr.steps_taken
    assert np.array_equal(tr.last, [-1000.0])


def test_fixed_point_claim_is_rechecked():
    # residual tiny because the map barely moves, but it is not a fixed point of T
    T = FirmlyNonexpansiveMap(lambda x: x - 1e-12, 1, "creep")
    tr = iterate(T, [0.0], max_iter=50)
    dg = diagnose(tr, T)
    assert dg.verdict is not Verdict.CONVERGED or dg.fixed_point_residual <= 1e-10


def test_trace_csv(tmp_path):
    T = average_maps(WeightedFamily.uniform(cs.interval(0, 1), cs.interval(2, 3)))
    tr = iterate(T, [10.0])
    p = tmp_path / "t.csv"
    tr.to_csv(p, coordinates=True)
    rows = p.read_text().splitlines()
    assert rows[0] == "step,residual,norm,x0"
    assert len(rows) == tr.steps_taken + 2


def test_regularity_signals_agree():
    X = np.linspace(-5, 5, 201)[:, None]
    good = check_resolvent_regularity(operator_from_resolvent(px.AbsSum(1).oracle()), X)
    assert good.zero_in_range_closure and good.asymptotically_regular and good.consistent
    bad = check_resolvent_regularity(operator_from_resolvent(px.Linear([1.0]).oracle()), X)
    assert not bad.zero_in_range_closure and bad.asymptotically_regular is False and bad.consistent


def test_iteration_needs_budget():
    with pytest.raises(Exception):
        iterate(translation([1.0]), [0.0], max_iter=0)
