"""Acceptance criteria 1-11, each at its stated tolerance.

Every criterion runs its preset scenario and re-asserts the recorded evidence
against the tolerances pinned here, so a preset cannot pass by using a looser
bound. One PASS/FAIL line per criterion is printed in the terminal summary
(and by ``python3 tests/test_acceptance.py``).
"""
import time

import numpy as np
import pytest

from resolventkit.averaging import matrix_resolvent_average
from resolventkit.scenarios import KOOL_X1_THRESHOLD, run_scenario

RESULTS = {}


def record(n, title, ok, detail):
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}  {title}: {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def checks(report):
    return {c["name"]: c["evidence"] for c in report["checks"]}


def test_01_resolvent_identity():
    ev = checks(run_scenario("resolvent-identity"))
    ops = ev["identity_exact"]["operators"]
    inexact = {k: v["nonzero_probes"] for k, v in ops.items() if v["max_norm"] != 0.0}
    worst_ulps = max(v["max_norm"] for v in ops.values())
    cone = max(ev["normal_cone_intervals"]["max_abs_error"].values())
    ok = not inexact and cone <= 1e-12
    record(1, "J + (x - J) - x == 0 exactly; normal cones to 1e-12", ok,
           f"{len(ops)} operators, {len(inexact)} with nonzero residual "
           f"(worst {worst_ulps:.2e}: {inexact}); normal-cone error {cone:.1e}")


def test_02_firm_nonexpansiveness():
    ev = checks(run_scenario("firm-nonexpansiveness"))
    worst = {g: e["worst"] for g, e in ev.items()}
    n_pairs = min(m["n_pairs"] for e in ev.values() for m in e["maps"].values())
    n_maps = sum(len(e["maps"]) for e in ev.values())
    ok = max(worst.values()) <= 1e-9 and n_pairs >= 10_000
    record(2, "firm nonexpansiveness, worst violation <= 1e-9", ok, f"{n_maps} maps x {n_pairs} pairs, worst {worst}")


def test_03_fitzpatrick_energy():
    ev = checks(run_scenario("fitzpatrick-energy"))
    err = ev["with_maximizer"]["max_abs_error"]
    r = ev["random_samples_only"]
    ok = ev["with_maximizer"]["instances"] >= 50 and err <= 1e-9 and r["samples"] == 1000 and 0.95 * r["exact"] <= r["estimate"] <= r["exact"]
    record(3, "Fitzpatrick of Id = |x+x*|^2/4", ok, f"max error {err:.1e} on 50 pairs; 1e3 samples: {r['estimate']:.4f} vs {r['exact']}")


def test_04_rectangularity():
    ev = checks(run_scenario("rotator-rectangularity"))
    g = (ev["gamma_identity"]["gamma"], ev["gamma_rotation"]["gamma"], ev["gamma_diag_1_2"]["gamma"])
    ok = abs(g[0] - 1) <= 1e-9 and g[1] <= 1e-6 and abs(g[2] - 0.5) <= 1e-3
    record(4, "gamma(I)=1, gamma(rot)<=1e-6, gamma(diag(1,2))=0.5", ok, f"gamma = {g}")


def test_05_range_near_equality():
    e1 = checks(run_scenario("averaged-projections-1d"))["range_vs_minkowski_1d"]
    e2 = checks(run_scenario("range-near-equality-2d"))["range_near_equal_2d"]
    ok1 = e1["h"] == 1e-3 and e1["hausdorff"] <= 2 * 1e-3 * (1 + 1e-12)
    ok2 = (e2["h"] == 0.02 and e2["window"] == 5.0 and e2["tol_cells"] == 2
           and max(e2["closure_hausdorff"], e2["ri_hausdorff"]) <= 2 * 0.02 * (1 + 1e-12))
    record(5, "ran of averages vs Minkowski combinations", ok1 and ok2,
           f"1-D Hausdorff {e1['hausdorff']:.1e} (tol 2e-3); 2-D closure/ri {e2['closure_hausdorff']:.3f}/{e2['ri_hausdorff']:.3f} (tol 0.04)")


def test_06_kool_divergence():
    rep = run_scenario("kool-divergence")
    ev = checks(rep)
    x1 = ev["first_coordinate"]["x1"]
    ok = (ev["first_coordinate"]["steps"] == 100_000
          and ev["residuals_nonincreasing"]["max_residual_increase"] <= 0.0
          and ev["final_residual"]["final_residual"] <= 1e-2
          and x1 < KOOL_X1_THRESHOLD
          and ev["verdict"]["verdict"] == "AsymptoticallyRegularDivergent")
    record(6, "Kool orbit: regular, no fixed point, escapes", ok,
           f"x1 = {x1:.5f} (< {KOOL_X1_THRESHOLD}), residual {ev['final_residual']['final_residual']:.2e}, "
           f"max increase {ev['residuals_nonincreasing']['max_residual_increase']:.1e}, {ev['verdict']['verdict']}")


def test_07_average_regularity():
    ev = checks(run_scenario("average-regularity"))
    rows = ev["never_not_regular"]["instances"]
    il = ev["interval_limit"]
    ok = (len(rows) == 20
          and all(r["verdict"] == "ConvergedToFixedPoint" and r["fixed_point_residual"] <= 1e-8 for r in rows)
          and abs(il["limit"] - 1.5) <= 1e-8)
    worst = max(r["fixed_point_residual"] for r in rows)
    record(7, "averaged projections on disjoint boxes converge", ok, f"20/20 converged, worst |x - Tx| {worst:.1e}; interval limit {il['limit']!r}")


def test_08_resolvent_average():
    R = matrix_resolvent_average([np.zeros((2, 2)), np.eye(2)], [0.5, 0.5])
    direct = float(np.abs(R - np.eye(2) / 3).max())
    ev = checks(run_scenario("resolvent-average-matrices"))
    self_err = max(ev["self_average"]["max_abs_error"].values())
    dom = ev["domain_near_equal"]
    ok = (direct <= 1e-12 and ev["zero_and_identity"]["max_abs_error"] <= 1e-12 and self_err <= 1e-12
          and dom["hausdorff"] <= 2 * dom["h"] * (1 + 1e-12))
    record(8, "resolvent averages", ok, f"RA(0,I) error {direct:.1e}; self-average {self_err:.1e}; domain Hausdorff {dom['hausdorff']:.1e}")


def test_09_nonregular_resolvent():
    ev = checks(run_scenario("nonregular-resolvent"))
    dev = ev["residual_constant"]["max_abs_deviation_from_1"]
    ok = ev["prox_is_translation"]["max_abs_error"] <= 1e-12 and ev["verdict"]["verdict"] == "NotAsymptoticallyRegular" and dev <= 1e-12
    record(9, "prox of f(u)=u is not asymptotically regular", ok, f"{ev['verdict']['verdict']}, residual deviation {dev:.1e}")


def test_10_composition_counterexample():
    ev = checks(run_scenario("composition-counterexample"))["not_nearly_convex"]
    ok = ev["nearly_convex"] is False and ev["witness"] is not None
    record(10, "ran(P_ball o P_line) not nearly convex", ok, f"witness {ev['witness']}")


def test_11_set_calculus():
    t = time.perf_counter()
    rep = run_scenario("set-calculus")
    dt = time.perf_counter() - t
    ev = checks(rep)
    ok = rep["passed"] and dt <= 60 and all(e["shapes"] >= 10 and e["tol_cells"] <= 3 for e in ev.values())
    summary = ", ".join(f"{k} worst {e['worst_cells']:.2f} cells" for k, e in ev.items())
    record(11, "set-calculus property suite", ok, f"{summary}; {dt:.1f} s")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
