"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line, listed again under "acceptance criteria"
at the end of the pytest run.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from gainlearn.asymptotics import B_factor, D_limit, K_and_V2, V0_matrix, d_func, kappa_theta_var, sigma_adot_sq
from gainlearn.cli import main
from gainlearn.estimators import alpha_hat, flatness_diagnostic
from gainlearn.harness import ExperimentConfig, collect_estimates, emit_csv, read_csv, run_experiment
from gainlearn.lemmas import A2_ITEMS, A5_ITEMS, check_a5, d2n_mc, double_sum, double_sum_bruteforce, lemma_a2_mc
from gainlearn.model import ModelParams, NoiseSource, filter_candidate, filter_dagger, filter_derivatives, simulate_path
from gainlearn.weights import g_derivative_polygamma, g_derivative_sum, g_derivatives, g_weights, phi

pytestmark = pytest.mark.slow

DEFAULT = ModelParams(theta0=2.0, beta0=0.25, delta0=1.0)


def valid_points(k, rng):
    out = []
    while len(out) < k:
        t0 = rng.uniform(1.01, 10.0)
        b0 = rng.uniform(-3.0, 0.999)
        if t0 * (1.0 - b0) > 0.51 and b0 != 0.0:
            out.append((t0, b0))
    return out


def test_criterion_01_weight_representation(report_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 10**4
    worst = 0.0
    for _ in range(100):
        theta = rng.uniform(1.05, 6.0)
        a_start = rng.uniform(-5.0, 5.0)
        alpha = rng.uniform(-3.0, 3.0)
        y = np.random.default_rng(rng.integers(2**63)).normal(alpha, 1.0, n)
        rec = filter_candidate(theta, a_start, y)[-1]
        rep = alpha + (a_start - alpha) * phi(0, n, theta) + g_weights(n, theta) @ (y - alpha)
        worst = max(worst, abs(rec - rep) / abs(rec))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 5
    report_line(1, ok, f"max rel err {worst:.2e} (<= 1e-8), {dt:.1f}s (< 5s)")
    assert ok


def test_criterion_02_derivatives(report_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    y = DEFAULT.alpha0 + rng.normal(size=2000)
    h = 1e-5
    fd_err = 0.0
    for theta in rng.uniform(1.05, 6.0, 20):
        d = filter_derivatives(theta, DEFAULT.alpha0, y, 2)
        fd1 = (filter_dagger(theta + h, DEFAULT.alpha0, y) - filter_dagger(theta - h, DEFAULT.alpha0, y)) / (2 * h)
        fd2 = (filter_derivatives(theta + h, DEFAULT.alpha0, y, 1)[0]
               - filter_derivatives(theta - h, DEFAULT.alpha0, y, 1)[0]) / (2 * h)
        fd_err = max(fd_err, np.max(np.abs(d[0] - fd1)), np.max(np.abs(d[1] - fd2)))
    rel = 0.0
    for _ in range(20):
        n = int(rng.integers(10, 2000))
        t = int(rng.integers(1, n))
        theta = rng.uniform(1.05, 6.0)
        if np.min(np.abs(theta - np.arange(t + 1, n + 1))) < 1e-3:
            theta += 0.5
        ref = g_derivative_sum(t, n, theta, 1)
        rel = max(rel, abs(g_derivative_polygamma(t, n, theta, 1) / ref - 1.0))
    dt = time.perf_counter() - t0
    ok = fd_err <= 1e-6 and rel <= 1e-10 and dt < 10
    report_line(2, ok, f"FD max abs err {fd_err:.2e} (<= 1e-6), digamma vs sum rel {rel:.2e} (<= 1e-10), "
                       f"{dt:.1f}s (< 10s)")
    assert ok


def test_criterion_03_weighted_sums(report_line):
    t0 = time.perf_counter()
    results = [check_a5(item) for item in A5_ITEMS]
    failed = [r.lemma_id for r in results if not r.passed]
    n, th0, b0 = 2000, 2.0, 0.25
    g_th = g_weights(n, 1.6)
    g_true = g_weights(n, th0, b0)
    gdot = g_derivatives(n, th0, 1)[1]
    ds_err = 0.0
    for x, y in ((g_th, g_th), (g_th, g_true), (gdot, g_true), (gdot, gdot)):
        fast, brute = double_sum(x, y, th0, b0), double_sum_bruteforce(x, y, th0, b0)
        ds_err = max(ds_err, abs(fast - brute) / max(abs(brute), 1e-300))
    dt = time.perf_counter() - t0
    ok = not failed and ds_err <= 1e-10 and dt < 60
    report_line(3, ok, f"{len(results) - len(failed)}/9 items pass{' ' + str(failed) if failed else ''}, "
                       f"double sum rel err {ds_err:.1e} (<= 1e-10), {dt:.1f}s (< 60s)")
    assert ok


def test_criterion_04_sample_moments(report_line):
    t0 = time.perf_counter()
    parts, ok = [], True
    for item in A2_ITEMS:
        res = lemma_a2_mc(item, 1.6, DEFAULT, 10**4, 500, master_seed=4)
        z = (res.mc_mean - res.limit) / res.mc_se
        ok &= abs(z) <= 3.0
        parts.append(f"{item}: mc {res.mc_mean:.4f} vs {res.limit:.4f} ({z:+.1f} se)")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    report_line(4, ok, "; ".join(parts) + f"; {dt:.1f}s (< 120s)")
    assert ok


def test_criterion_05_algebra(report_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    pts = valid_points(10**4, rng)
    sig_err = max(abs(sigma_adot_sq(a, b) / d_func(a, a, b) - 1.0) for a, b in pts)
    inv_scaled = inv_abs = 0.0
    for a, b in pts:
        for se in (1.0, 0.7):
            K, V2, _ = K_and_V2(a, b, se)
            resid = np.abs(V2 @ K - se**2 * np.eye(2))
            inv_scaled = max(inv_scaled, np.max(resid / (np.abs(V2) @ np.abs(K))))
            if abs(b) >= 0.05:
                inv_abs = max(inv_abs, resid.max())
    signs = True
    for a, b in pts[:2000]:
        V0 = V0_matrix(a, b, 1.3)
        signs &= B_factor(a, b) >= 0.0
        signs &= abs(np.linalg.det(V0)) <= 1e-12 * max(1.0, np.abs(V0).max() ** 2)
    grid = np.linspace(1.05, 8.0, 40)
    signs &= all(D_limit(th, a, b) >= 0.0 for a, b in pts[:200] for th in grid)
    dt = time.perf_counter() - t0
    ok = sig_err <= 1e-12 and inv_scaled <= 1e-12 and inv_abs <= 1e-12 and signs and dt < 5
    report_line(5, ok, f"sigma_adot^2 vs d rel {sig_err:.1e}, V2K-I scaled {inv_scaled:.1e} "
                       f"(abs {inv_abs:.1e} for |beta0|>=0.05), signs/det ok={bool(signs)}, {dt:.1f}s (< 5s)")
    assert ok


def test_criterion_06_consistency(report_line):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(params=DEFAULT, n_values=(10**3, 10**4, 10**5), reps=500, master_seed=6,
                           estimators=("nls_theta",))
    raw = collect_estimates(cfg)
    med = [float(np.median(np.abs(raw[(n, "nls_theta")].estimates[:, 0] - 2.0))) for n in cfg.n_values]
    dt = time.perf_counter() - t0
    ok = med[0] > med[1] > med[2] and dt < 180
    report_line(6, ok, "median |theta_hat - theta0| " + " > ".join(f"{m:.4f}" for m in med) + f", {dt:.1f}s (< 180s)")
    assert ok


def test_criterion_07_normality_scaling(report_line):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(params=DEFAULT, n_values=(10**3, 10**5), reps=1000, master_seed=7,
                           estimators=("nls_theta",))
    rep = run_experiment(cfg)
    lo, hi = rep.cell(10**3, "nls_theta", "theta"), rep.cell(10**5, "nls_theta", "theta")
    dt = time.perf_counter() - t0
    ok = abs(hi.ratio - 1) <= 0.4 and abs(hi.ratio - 1) <= abs(lo.ratio - 1) and dt < 300
    report_line(7, ok, f"scaled sd ratio {hi.ratio:.3f} at 1e5 (within 0.6..1.4), {lo.ratio:.3f} at 1e3, "
                       f"{dt:.1f}s (< 300s)")
    assert ok


def test_criterion_08_generated_regressor(report_line):
    t0 = time.perf_counter()
    cases = [("a", ModelParams(2.0, 0.0, 1.0)), ("b", ModelParams(2.0, 0.5, 1.0)), ("c", ModelParams(3.0, 0.25, 1.0))]
    ok, parts = True, []
    for tag, p in cases:
        cfg = ExperimentConfig(params=p, n_values=(10**4,), reps=2000, master_seed=8,
                               estimators=("two_step", "infeasible_ols"))
        rep = run_experiment(cfg)
        r = rep.cell(10**4, "two_step", "beta").sd / rep.cell(10**4, "infeasible_ols", "beta").sd
        if tag == "a":
            ok &= 0.9 <= r <= 1.1
            parts.append(f"(a) {r:.3f} in [0.9, 1.1]")
        elif tag == "b":
            ok &= 0.85 <= r <= 1.15
            parts.append(f"(b) {r:.3f} in [0.85, 1.15]")
        else:
            target = math.sqrt(1 + B_factor(3.0, 0.25))
            ok &= r > 1 and abs(r / target - 1) <= 0.35
            parts.append(f"(c) {r:.3f} > 1, target {target:.3f} +-35%")
    dt = time.perf_counter() - t0
    ok &= dt < 600
    report_line(8, ok, "; ".join(parts) + f"; {dt:.1f}s (< 600s)")
    assert ok


def test_criterion_09_joint_estimator(report_line):
    t0 = time.perf_counter()
    p = ModelParams(2.0, 0.5, 1.0)
    cfg = ExperimentConfig(params=p, n_values=(10**4,), reps=500, master_seed=9, estimators=("joint_kappa",))
    sd_ratio = run_experiment(cfg).cell(10**4, "joint_kappa", "theta").scaled_sd / math.sqrt(kappa_theta_var(2.0, 0.5))
    sd_ok = abs(sd_ratio - 1) <= 0.4

    d1_ok, d1_parts = True, []
    for beta, theta in [(0.4, 3.0), (0.25, 1.6), (0.1, 2.5), (0.5, 2.0), (0.25, 4.0)]:
        res = d2n_mc(beta, theta, DEFAULT, 10**4, 500, master_seed=9)
        z = (res.mc_mean - res.limit) / res.mc_se
        d1_ok &= abs(z) <= 3.0
        d1_parts.append(f"({beta},{theta}) {res.mc_mean:.4f} vs {res.limit:.4f} ({z:+.1f} se)")

    p0 = ModelParams(2.0, 0.0, 1.0)
    hits = [flatness_diagnostic(s.y, alpha_hat(s.y), p0.bounds).flat
            for s in (simulate_path(p0, 10**4, NoiseSource(99, r)) for r in range(100))]
    flat_rate = float(np.mean(hits))
    flat_ok = flat_rate >= 0.9

    dt = time.perf_counter() - t0
    ok = sd_ok and d1_ok and flat_ok and dt < 300
    report_line(9, ok, f"kappa sd ratio {sd_ratio:.3f} (within 0.6..1.4) ok={sd_ok}; D1 ok={bool(d1_ok)}: "
                       + "; ".join(d1_parts) + f"; flatness triggered {flat_rate:.2f} ok={flat_ok}; {dt:.1f}s (< 300s)")
    assert ok


def test_criterion_10_plumbing(report_line, tmp_path, capsys):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(params=DEFAULT, n_values=(500, 2000), reps=12, master_seed=10, theta_grid_size=32)
    one = run_experiment(cfg)
    three = run_experiment(replace(cfg, threads=3))
    same = one.to_text() == three.to_text()

    out = tmp_path / "r.csv"
    emit_csv(one, out)
    round_trip = read_csv(out).to_text() == one.to_text() == out.read_text()

    conf = tmp_path / "c.cfg"
    conf.write_text("params.theta0 = 2\nparams.beta0 = 0.25\nparams.delta0 = 1\nn_values = 200\nreps = 2\n")
    flat = tmp_path / "flat.csv"
    flat.write_text("y,z\n" + "1.0,1.0\n" * 50)
    codes = {
        0: main(["mc", "--config", str(conf), "--out", str(tmp_path / "m.csv")]),
        1: main(["mc"]),
        2: main(["fit", str(flat)]),
        3: main(["fit", str(tmp_path / "absent.csv")]),
    }
    capsys.readouterr()
    codes_ok = all(k == v for k, v in codes.items())
    dt = time.perf_counter() - t0
    ok = round_trip and same and codes_ok and dt < 60
    report_line(10, ok, f"csv round trip={round_trip}, thread invariance={same}, exit codes {list(codes.values())} "
                        f"(expect [0, 1, 2, 3]), {dt:.1f}s (< 60s)")
    assert ok
