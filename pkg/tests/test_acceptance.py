"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with the measured quantities and its elapsed time.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import time

import numpy as np
import pytest

import dptv
from dptv import (
    DoublePhase,
    FidelityParams,
    Huber,
    NoiseSpec,
    SolverConfig,
    TV,
    WeightSpec,
    add_gaussian_noise,
    compute_metrics,
    d_tv_image,
    default_config,
    divergence,
    gradient,
    gradient_norm_sq_bound,
    inner,
    make_synthetic,
    norm2,
    primal_energy,
    prox_fstar_double_phase,
    prox_fstar_huber,
    prox_fstar_tv,
    run_model,
    solve,
)
from dptv.cli import main as cli_main

from oracles import (
    dual_fista,
    power_iteration_norm_sq,
    prox_objective_min,
    ref_energy,
)


def report(number, name, ok, detail, elapsed, budget):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} ({name}): {status} [{detail}] ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert ok, f"criterion {number} ({name}): {detail}"
    assert elapsed < budget, f"criterion {number} exceeded its runtime budget"


def test_criterion_1_operator_correctness():
    t0 = time.time()
    rng = np.random.default_rng(100)
    worst = 0.0
    for shape in ((64, 1), (16, 16), (64, 64)):
        for _ in range(100):
            u = rng.standard_normal(shape)
            p = rng.standard_normal((2,) + shape)
            err = abs(inner(gradient(u), p) + inner(u, divergence(p)))
            bound = 1e-10 * (norm2(u) * norm2(p) + 1.0)
            worst = max(worst, err / bound)
        est = power_iteration_norm_sq(shape)
        assert est <= gradient_norm_sq_bound(1.0) + 1e-9
    elapsed = time.time() - t0
    report(1, "operator correctness", worst <= 1.0,
           f"worst adjointness error at {worst:.2e} of tolerance; "
           f"norm-sq estimates within 8", elapsed, 5.0)


def test_criterion_2_resolvent_oracle_equivalence():
    t0 = time.time()
    rng = np.random.default_rng(200)
    worst = 0.0

    def case_vec():
        v = rng.standard_normal(2) * rng.uniform(0.1, 4.0)
        p = np.zeros((2, 1, 1))
        p[:, 0, 0] = v
        return p

    for _ in range(200):
        sigma = rng.uniform(0.02, 3.0)
        p = case_vec()
        got = prox_fstar_tv(p, sigma)[:, 0, 0]
        want = prox_objective_min(p[:, 0, 0], sigma, "tv")
        worst = max(worst, float(np.abs(got - want).max()))
    for _ in range(200):
        sigma = rng.uniform(0.02, 3.0)
        alpha = rng.uniform(0.002, 1.5)
        p = case_vec()
        got = prox_fstar_huber(p, sigma, alpha)[:, 0, 0]
        want = prox_objective_min(p[:, 0, 0], sigma, "huber", alpha=alpha)
        worst = max(worst, float(np.abs(got - want).max()))
    for _ in range(200):
        sigma = rng.uniform(0.02, 3.0)
        w_val = 0.0 if rng.uniform() < 0.25 else rng.uniform(0.005, 5.0)
        p = case_vec()
        got = prox_fstar_double_phase(p, sigma, np.full((1, 1), w_val))[:, 0, 0]
        want = prox_objective_min(p[:, 0, 0], sigma, "dp", w=w_val)
        worst = max(worst, float(np.abs(got - want).max()))

    bit_exact = True
    for _ in range(20):
        p = rng.standard_normal((2, 8, 8)) * 3
        sigma = rng.uniform(0.05, 2.0)
        a = prox_fstar_double_phase(p, sigma, np.zeros((8, 8)))
        b = prox_fstar_tv(p, sigma)
        bit_exact = bit_exact and np.array_equal(a, b)

    elapsed = time.time() - t0
    report(2, "resolvent oracle equivalence",
           worst <= 1e-7 and bit_exact,
           f"max prox deviation {worst:.2e}; zero-weight branch bit-exact: {bit_exact}",
           elapsed, 30.0)


def _criterion3_instances():
    rng = np.random.default_rng(300)
    lambdas = [0.1, 0.24, 0.5, 0.1, 0.24, 0.5, 0.1, 0.24, 0.1, 0.24]
    out = []
    for i in range(10):
        size = int(rng.integers(16, 65))
        g = rng.uniform(0.0, 1.0, size=(size, 1))
        w = np.where(rng.uniform(size=(size, 1)) < 0.4, 0.0,
                     rng.uniform(0.05, 2.0, size=(size, 1)))
        out.append((g, lambdas[i], w))
    return out


def test_criterion_3_solver_optimality():
    t0 = time.time()
    alpha = 0.01
    worst_energy = 0.0
    worst_agree = 0.0
    for idx, (g, lam, w) in enumerate(_criterion3_instances()):
        fid = FidelityParams(lam, g)
        models = (("tv", TV()), ("huber", Huber(alpha)), ("dp", DoublePhase(w)))
        for kind, reg in models:
            u_star, _ = dual_fista(g, lam, kind, alpha=alpha, w=w)
            e_star = ref_energy(u_star, g, lam, kind, alpha=alpha, w=w)
            cfg = SolverConfig(accelerated=True, gamma=1.0 / lam,
                               stop_tol=1e-9, max_iters=400_000)
            res = solve(fid, reg, cfg)
            e_cp = primal_energy(res.u, fid, reg)
            worst_energy = max(worst_energy, abs(e_cp - e_star) / abs(e_star))
        # variant agreement, cycling the model across instances
        kind, reg = models[idx % 3]
        acc = solve(fid, reg, SolverConfig(accelerated=True, gamma=1.0 / lam,
                                           stop_tol=5e-12, max_iters=2_000_000))
        std = solve(fid, reg, SolverConfig(accelerated=False, stop_tol=5e-12,
                                           max_iters=2_000_000))
        worst_agree = max(worst_agree, norm2(acc.u - std.u))
    elapsed = time.time() - t0
    report(3, "solver optimality", worst_energy <= 1e-5 and worst_agree <= 1e-5,
           f"worst relative energy gap {worst_energy:.2e}; "
           f"worst variant disagreement {worst_agree:.2e}", elapsed, 120.0)


def _criterion4_counts():
    orig = make_synthetic("double_gradient", 512)
    g = add_gaussian_noise(orig, NoiseSpec(0.1, 3))
    lam = 0.12
    spec = WeightSpec(family="w1", a=200.0, b=2000.0, radius=0.0)
    counts = {}
    for model in ("rof", "huber", "dp-adaptive"):
        for accelerated in (True, False):
            cfg = default_config(lam, epsilon=1e-4, max_iters=60_000,
                                 accelerated=accelerated)
            res = run_model(model, g, lam, cfg,
                            alpha=0.01 if model == "huber" else None,
                            weight_spec=spec if model.startswith("dp") else None)
            counts[(model, accelerated)] = res.report
    return counts


@pytest.fixture(scope="module")
def criterion4_counts():
    return _criterion4_counts()


def test_criterion_4_acceleration_benefit(criterion4_counts):
    t0 = time.time()
    counts = criterion4_counts
    faster = all(
        counts[(m, True)].iterations < counts[(m, False)].iterations
        for m in ("rof", "huber", "dp-adaptive")
    )
    rof = counts[("rof", True)].iterations
    dp2 = counts[("dp-adaptive", True)].iterations
    same_order = 0.2 * rof <= dp2 <= 5.0 * rof
    converged = all(rep.converged for rep in counts.values())
    elapsed = time.time() - t0
    detail = "; ".join(
        f"{m}: acc {counts[(m, True)].iterations} vs std {counts[(m, False)].iterations}"
        for m in ("rof", "huber", "dp-adaptive")
    )
    report("4a", "acceleration benefit",
           faster and same_order and converged, detail, elapsed, 300.0)


def test_criterion_4_huber_slower_than_rof(criterion4_counts):
    # the count ordering reported for the reference experiments; under the
    # relative-primal-change stopping rule the Huber dual resolvent
    # stabilizes the iteration sooner instead, so this ordering is not
    # reproduced (see the acceptance notes in the README)
    t0 = time.time()
    counts = criterion4_counts
    huber = counts[("huber", True)].iterations
    rof = counts[("rof", True)].iterations
    elapsed = time.time() - t0
    report("4b", "huber slower than classical model", huber > rof,
           f"huber {huber} vs rof {rof}", elapsed, 300.0)


def test_criterion_5_staircasing_reduction_1d():
    t0 = time.time()
    orig = make_synthetic("saw", 1024)
    lam = 0.24
    spec = WeightSpec(family="w1", a=500.0, b=5000.0, radius=0.0)
    seed = 42

    def run_all(sigma):
        g = add_gaussian_noise(orig, NoiseSpec(sigma, seed))
        out = {}
        for model in ("rof", "dp-adaptive", "dp-noisy"):
            cfg = default_config(lam, epsilon=1e-6, max_iters=200_000)
            res = run_model(model, g, lam, cfg,
                            weight_spec=spec if model.startswith("dp") else None)
            assert res.report.all_converged
            out[model] = d_tv_image(res.u, orig)
        return out

    ordered = True
    details = []
    for sigma in (0.05, 0.1):
        vals = run_all(sigma)
        ordered = ordered and (
            vals["dp-adaptive"] < vals["dp-noisy"] < vals["rof"]
        )
        details.append(
            f"sigma {sigma}: dpA {vals['dp-adaptive']:.3f} < dpN "
            f"{vals['dp-noisy']:.3f} < rof {vals['rof']:.3f}"
        )
    similar = True
    for sigma in (0.001, 0.01):
        vals = run_all(sigma)
        spread = max(vals.values()) - min(vals.values())
        similar = similar and spread <= 0.05
        details.append(f"sigma {sigma}: spread {spread:.3f}")
    elapsed = time.time() - t0
    report(5, "staircasing reduction in 1D", ordered and similar,
           "; ".join(details), elapsed, 120.0)


def test_criterion_6_2d_metric_ordering():
    t0 = time.time()
    orig = make_synthetic("double_gradient", 256)
    g = add_gaussian_noise(orig, NoiseSpec(0.1, 3))
    spec = WeightSpec(family="w1", a=200.0, b=2000.0, radius=0.0)
    lambdas = [0.06, 0.09, 0.12, 0.18, 0.24, 0.30, 0.36, 0.42]

    def sweep(model):
        best = None
        for lam in lambdas:
            cfg = default_config(lam, epsilon=1e-4, max_iters=20_000)
            res = run_model(model, g, lam, cfg,
                            weight_spec=spec if model.startswith("dp") else None)
            met = compute_metrics(res.u, orig, noisy=g)
            if best is None or met.ssim > best[0]:
                best = (met.ssim, lam, met.psnr)
        return best

    rof_ssim, rof_lam, rof_psnr = sweep("rof")
    dp_ssim, dp_lam, dp_psnr = sweep("dp-adaptive")
    gap = dp_ssim - rof_ssim
    ok = gap >= 0.01 and dp_psnr > rof_psnr
    elapsed = time.time() - t0
    report(6, "2D metric ordering",
           ok,
           f"ssim dp {dp_ssim:.4f}@lam={dp_lam} vs rof {rof_ssim:.4f}@lam={rof_lam} "
           f"(gap {gap:.4f}); psnr dp {dp_psnr:.2f} vs rof {rof_psnr:.2f}",
           elapsed, 900.0)


def test_criterion_7_weight_family_properties():
    t0 = time.time()
    rng = np.random.default_rng(700)
    ok = True
    for _ in range(1000):
        family = ("w1", "w2", "w3")[rng.integers(3)]
        if family in ("w1", "w2"):
            spec = WeightSpec(family=family, a=float(rng.uniform(0.5, 1000)),
                              b=float(rng.uniform(0.5, 10000)))
            cutoff = spec.a / spec.b
        else:
            spec = WeightSpec(family="w3", height=float(rng.uniform(0.1, 100)),
                              cutoff=float(rng.uniform(0.01, 2.0)))
            cutoff = spec.cutoff
        xs = np.sort(rng.uniform(0.0, 2.0 * cutoff, size=50))
        vals = dptv.eval_weight_function(spec, xs)
        ok = ok and np.all(np.diff(vals) <= 1e-12)          # nonincreasing
        ok = ok and spec.w0 > 0.0                            # positive at zero
        # zero crossing at the cutoff, exact to machine precision: the value
        # at the crossing is at most one rounding of a - b*(a/b), and any
        # point strictly beyond it is exactly zero
        if family != "w3":
            at_cut = float(dptv.eval_weight_function(spec, cutoff))
            ok = ok and at_cut <= 4.0 * np.finfo(float).eps * spec.a
        ok = ok and dptv.eval_weight_function(spec, np.nextafter(cutoff, np.inf) * (1 + 1e-12)) == 0.0
        ok = ok and dptv.eval_weight_function(spec, 10 * cutoff + 1) == 0.0

        alpha = float(rng.uniform(0.1, 5.0))
        beta = float(rng.uniform(0.1, 5.0))
        scaled = dptv.rescale_weight_spec(spec, alpha, beta)
        grid = np.linspace(0.0, 3.0 * cutoff / beta, 1000)
        if family == "w3":
            # at the indicator's jump, beta*x and cutoff/beta can round to
            # opposite sides of the discontinuity; drop grid points within
            # a few ulps of it (pointwise equality is ill-posed there)
            keep = np.abs(beta * grid - cutoff) > 8 * np.finfo(float).eps * cutoff
            grid = grid[keep]
        lhs = dptv.eval_weight_function(scaled, grid)
        rhs = alpha * dptv.eval_weight_function(spec, beta * grid)
        ok = ok and np.allclose(lhs, rhs, atol=1e-12 * max(1.0, alpha * spec.w0))
        if not ok:
            break
    elapsed = time.time() - t0
    report(7, "weight-family properties", bool(ok),
           "1000 random parameterizations checked", elapsed, 5.0)


def test_criterion_8_sweep_determinism(tmp_path):
    t0 = time.time()
    src = tmp_path / "dg.pgm"
    dptv.save_image(make_synthetic("double_gradient", 32), src)
    args = ["sweep", "--model", "rof,huber,dp-adaptive", "--alpha", "0.01",
            "--lambdas", "0.12,0.24", "--sigmas", "0.02,0.05", "--seed", "9",
            "--input", str(src), "--weight-family", "w1", "--a", "200",
            "--b", "2000", "--radius", "1"]
    csv1, csv2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    rc1 = cli_main(args + ["--csv", str(csv1)])
    rc2 = cli_main(args + ["--csv", str(csv2)])
    identical = csv1.read_bytes() == csv2.read_bytes()
    elapsed = time.time() - t0
    report(8, "sweep determinism", rc1 == 0 and rc2 == 0 and identical,
           f"exit codes {rc1}/{rc2}; byte-identical: {identical}", elapsed, 120.0)
