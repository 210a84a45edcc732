"""Acceptance suite: one criterion per test, one PASS/FAIL line each.

Criterion 7 is the long one (200 exact solves at n = 100); run with
`pytest tests/test_acceptance.py -v -s` to watch the progress lines.
"""

import itertools
import math
import os
from fractions import Fraction

import pytest

from forestkit.bounds import (
    check_convexity_integral_bound,
    check_f_upper_bound,
    check_stirling_sandwich,
    check_sum_f_bound,
    recursion_residual_exact,
)
from forestkit.forests import g_limit, g_value, phi
from forestkit.graph import GnpParams, from_edges, sample_gnp
from forestkit.harness import ExperimentConfig, records_body, run_experiment, summarize_cell, sweep_epsilon
from forestkit.moments import MomentQuery, ratio_and_bound
from forestkit.solver import brute_force_max, solve_max
from tests.test_forests import TOTAL_FORESTS, forests_by_components_bruteforce
from tests.test_solver import FIXTURES


_CAPMAN = None


@pytest.fixture(autouse=True)
def _capture_passthrough(request):
    # stash the capture manager so _say can bypass fd-level capture: the
    # verdict lines must land in the terminal (and any tee'd log) without -s
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def _say(msg: str) -> None:
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(msg, flush=True)
    else:
        print(msg, flush=True)


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    tail = f" ({detail})" if detail else ""
    _say(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{tail}")
    assert ok, f"{name} failed{tail}"


def test_criterion_1_forest_counts_vs_bruteforce():
    ok = True
    for k in range(1, 7):
        oracle = forests_by_components_bruteforce(k)
        for ell in range(1, k + 1):
            ok &= phi(k, ell) == oracle[ell]
        ok &= sum(oracle.values()) == TOTAL_FORESTS[k]
    ok &= TOTAL_FORESTS[3] == 7 and TOTAL_FORESTS[4] == 38
    _verdict("1 forest-count correctness (k <= 6, exhaustive oracle)", ok)


def test_criterion_2_recursion_identity_exact():
    bad = []
    for p in (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)):
        for k in range(2, 31):
            for ell in range(2, k + 1):
                if recursion_residual_exact(k, ell, p) != 0:
                    bad.append((k, ell, p))
    _verdict(
        "2 recursion identity, exact rationals (k <= 30, p in {0.3, 0.5, 0.7})",
        not bad,
        f"{len(bad)} nonzero residuals" if bad else "all residuals exactly 0",
    )


def test_criterion_3_limit_convergence():
    worst = 0.0
    ok = True
    for ell in range(1, 7):
        lim = g_limit(ell, 0.5)
        err = abs(g_value(2000, ell, 0.5, ell_hint=6).to_float() - lim) / lim
        worst = max(worst, err)
        ok &= err <= 0.05
    _verdict("3 limit convergence at k = 2000 (ell <= 6, p = 0.5)", ok, f"worst rel err {worst:.4f}")


def test_criterion_4_moment_ratio():
    ok = True
    details = []
    for p in (0.3, 0.5, 0.7):
        limit = math.exp((1 - p) / (2 * p))
        for K in range(10, 401, 10):
            q = MomentQuery(n=10**9, p=p, K=K)
            ratio, bound = ratio_and_bound(q)
            from forestkit.moments import expected_forest_count

            direct = expected_forest_count(q).ratio_direct
            ok &= abs(direct - ratio) <= 1e-10 * abs(ratio)  # 10 significant digits
            ok &= 0 < ratio < 100  # bounded over the sweep
        final, _ = ratio_and_bound(MomentQuery(n=10**9, p=p, K=400))
        ok &= abs(final - limit) <= 0.05 * limit
        details.append(f"p={p}: ratio(400)={final:.5f} vs limit {limit:.5f}")
    _verdict("4 expectation ratio: two code paths, boundedness, limit", ok, "; ".join(details))


def test_criterion_5_proof_inequalities():
    stirling = check_stirling_sandwich(300)
    fb_200 = check_f_upper_bound(200)
    fb_100 = check_f_upper_bound(100)
    conv = check_convexity_integral_bound(200)
    sf_200 = check_sum_f_bound(200)
    sf_100 = check_sum_f_bound(100)
    drift_c = abs(fb_200.c_empirical - fb_100.c_empirical) / fb_100.c_empirical
    drift_C = abs(sf_200.C_empirical - sf_100.C_empirical) / sf_100.C_empirical
    single_equality = [(e[0], e[1]) for e in fb_200.equalities] == [(3, 2)]
    ok = (
        stirling.ok
        and fb_200.ok
        and conv.ok
        and sf_200.ok
        and drift_c < 0.01
        and drift_C < 0.01
        and single_equality
        and math.isfinite(fb_200.c_empirical)
        and math.isfinite(sf_200.C_empirical)
    )
    _verdict(
        "5 proof-inequality suite (Stirling, f bound, convexity, sum bound)",
        ok,
        f"c={fb_200.c_empirical:.5f} (drift {drift_c:.2e}), "
        f"C={sf_200.C_empirical:.5f} (drift {drift_C:.2e}), "
        f"printed-form boundary failures recorded: {len(conv.printed_form_violations)}",
    )


def test_criterion_6_solver_oracle_equivalence():
    mismatches = []
    count = 0
    seed = itertools.count(20000)
    for rep in range(34):
        for p in (0.2, 0.5, 0.8):
            n = 8 + (rep % 11)  # n in [8, 18]
            g = sample_gnp(GnpParams(n, p, next(seed)))
            for mode in ("forest", "tree"):
                count += 1
                if solve_max(mode, g).size != brute_force_max(mode, g).size:
                    mismatches.append((mode, n, p))
    for factory, forest_opt, tree_opt in FIXTURES:
        g = factory()
        count += 2
        if solve_max("forest", g).size != forest_opt:
            mismatches.append(("forest", "fixture", g.n))
        if solve_max("tree", g).size != tree_opt:
            mismatches.append(("tree", "fixture", g.n))
    ok = not mismatches and count >= 200
    _verdict("6 solver oracle equivalence", ok, f"{count} instances, {len(mismatches)} mismatches")


# shared by criteria 7 and 8 so the expensive run happens once
_CONFIG = ExperimentConfig(
    n_list=(100,),
    p_list=("0.5",),
    eps=0.0,
    trials=200,
    base_seed=20260826,
    node_budget=2 * 10**9,
    output="",  # set per test run
)


@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "records.csv"
    cfg = ExperimentConfig(**{**_CONFIG.__dict__, "output": str(out)})

    def progress(n, p_str, t, total):
        if (t + 1) % 10 == 0:
            _say(f"  trial {t + 1}/{total} (n={n}, p={p_str})")

    summaries, records = run_experiment(cfg, verify=True, progress=progress)
    return cfg, summaries, records


def test_criterion_7_concentration_experiment(experiment):
    cfg, summaries, records = experiment
    ok = len(records) == 200
    ok &= all(r.solver_status == "ok" for r in records)
    ok &= all(r.F_n >= r.T_n for r in records)
    summary = summarize_cell(records)
    sweep = sweep_epsilon(records, [-1.0, -0.5, 0.0, 0.5, 1.0])
    best = max(sweep, key=lambda row: row["in_window_fraction"])
    _say(f"\n  F_n histogram: {dict(sorted(summary.f_distribution.items()))}")
    _say(f"  top-2 mass: {summary.top2_mass:.3f}  mean gap: {summary.mean_gap:.3f}  "
         f"gap<=1 fraction: {summary.gap_le_1_fraction:.3f}")
    _say(f"  eps sweep best alignment: eps={best['eps']} window "
         f"[{best['k_low']}, {best['k_high']}] fraction {best['in_window_fraction']:.3f}")
    for flag in summary.flags:
        _say(f"  FLAG (exploratory target, not a failure): {flag}")
    _verdict(
        "7 concentration experiment (n=100, p=0.5, 200 exact trials)",
        ok,
        f"top2={summary.top2_mass:.3f}, flags={len(summary.flags)}",
    )


def test_criterion_8_byte_identical_rerun(experiment, tmp_path):
    cfg, _summaries, records = experiment
    # recompute the first and last trials of the big run from their seeds
    # (a full 200-trial rerun would double the suite's runtime for no extra
    # information: each trial is a pure function of its seed)
    from forestkit.harness import run_trial, trial_seed

    spot_ok = True
    for t in (0, 99, 199):
        seed = trial_seed(cfg.base_seed, 100, "0.5", t)
        spot_ok &= run_trial(100, "0.5", cfg.eps, seed, cfg.node_budget) == records[t]

    # full byte-level rerun on a config that finishes in seconds
    small = ExperimentConfig(
        n_list=(40, 55), p_list=("0.3", "0.5"), eps=0.0, trials=10,
        base_seed=cfg.base_seed, node_budget=cfg.node_budget,
        output=str(tmp_path / "a.csv"),
    )
    run_experiment(small)
    body1 = records_body(small.output)
    rerun = ExperimentConfig(**{**small.__dict__, "output": str(tmp_path / "b.csv")})
    run_experiment(rerun)
    ok = spot_ok and body1 == records_body(rerun.output)
    _verdict("8 byte-identical rerun of experiment configs", ok)
