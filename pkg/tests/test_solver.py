import io

import numpy as np
import pytest

from dptv import (
    DoublePhase,
    FidelityParams,
    Huber,
    SolverConfig,
    TV,
    accelerated_step_schedule,
    primal_energy,
    solve,
    solve_accelerated,
    solve_standard,
    stopping_residual,
)

from oracles import dual_fista, ref_energy


def std_cfg(**kw):
    kw.setdefault("accelerated", False)
    return SolverConfig(**kw)


def acc_cfg(lam, **kw):
    kw.setdefault("accelerated", True)
    kw.setdefault("gamma", 1.0 / lam)
    return SolverConfig(**kw)


def test_config_validation():
    SolverConfig(tau0=0.25, sigma0=0.25, accelerated=False).validate_steps(1.0)
    with pytest.raises(ValueError):
        SolverConfig(tau0=0.5, sigma0=0.25, accelerated=False).validate_steps(1.0)
    # the exact product 1 passes only for the accelerated variant
    SolverConfig(tau0=0.5, sigma0=0.25, accelerated=True, gamma=1.0).validate_steps(1.0)
    with pytest.raises(ValueError):
        SolverConfig(tau0=0.6, sigma0=0.25, accelerated=True, gamma=1.0).validate_steps(1.0)
    with pytest.raises(ValueError):
        SolverConfig(accelerated=True, gamma=0.0)
    with pytest.raises(ValueError):
        SolverConfig(theta=1.5)
    with pytest.raises(ValueError):
        SolverConfig(stop_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


def test_variant_dispatch_guards():
    g = np.zeros((4, 1))
    fid = FidelityParams(0.24, g)
    with pytest.raises(ValueError):
        solve_standard(fid, TV(), acc_cfg(0.24))
    with pytest.raises(ValueError):
        solve_accelerated(fid, TV(), std_cfg())


def test_step_schedule_product_invariant():
    sched = accelerated_step_schedule(0.25, 0.25, 4.0)
    taus, sigmas, thetas = [], [], []
    for _ in range(200):
        t, s, th = next(sched)
        taus.append(t)
        sigmas.append(s)
        thetas.append(th)
    prods = np.array(taus) * np.array(sigmas)
    np.testing.assert_allclose(prods, 0.0625, rtol=1e-13)
    # theta follows tau and tau decreases monotonically
    np.testing.assert_allclose(thetas, 1.0 / np.sqrt(1.0 + 8.0 * np.array(taus)))
    assert np.all(np.diff(taus) < 0)


def test_stopping_residual_values():
    u = np.ones((10, 10))
    assert stopping_residual(u, u) == 0.0
    assert stopping_residual(u, u * 1.0001) == pytest.approx(1e-4)
    with pytest.raises(ValueError):
        stopping_residual(u, np.ones((3, 3)))


def test_primal_energy_examples():
    g = np.full((4, 4), 0.5)
    fid = FidelityParams(0.7, g)
    assert primal_energy(g, fid, TV()) == 0.0

    u = np.array([[0.0], [1.0]])
    fid = FidelityParams(0.5, u)
    assert primal_energy(u, fid, TV()) == pytest.approx(1.0)
    assert primal_energy(u, fid, Huber(2.0)) == pytest.approx(0.25)
    w = np.full((2, 1), 3.0)
    assert primal_energy(u, fid, DoublePhase(w)) == pytest.approx(1.0 + 3.0)

    # fidelity term alone
    g2 = np.zeros((2, 1))
    fid2 = FidelityParams(0.25, g2)
    assert primal_energy(np.full((2, 1), 0.5), fid2, TV()) == pytest.approx(1.0)


def test_constant_datum_converges_immediately():
    g = np.full((9, 9), 0.7)
    res = solve(FidelityParams(0.24, g), TV(), acc_cfg(0.24, stop_tol=1e-8))
    assert res.converged
    assert res.iterations == 1
    np.testing.assert_array_equal(res.u, g)


def test_default_steps_accepted_at_unit_spacing():
    # tau0 = sigma0 = 1/4 gives product 0.5 < 1 against the norm bound
    g = np.zeros((4, 4))
    res = solve(FidelityParams(1.0, g), TV(), std_cfg(max_iters=5))
    assert res.iterations >= 1


def test_small_tv_instance_matches_dual_oracle():
    rng = np.random.default_rng(2)
    g = rng.uniform(size=(16, 1))
    lam = 0.24
    u_star, _ = dual_fista(g, lam, "tv")
    e_star = ref_energy(u_star, g, lam, "tv")
    res = solve(FidelityParams(lam, g), TV(), acc_cfg(lam, stop_tol=1e-9, max_iters=200000))
    e_cp = primal_energy(res.u, FidelityParams(lam, g), TV())
    assert res.converged
    assert e_cp <= e_star * (1 + 1e-6) + 1e-12
    assert abs(e_cp - e_star) / e_star < 1e-6


def test_energy_not_above_initialization():
    rng = np.random.default_rng(8)
    g = rng.uniform(size=(12, 12))
    fid = FidelityParams(0.3, g)
    for reg in (TV(), Huber(0.01), DoublePhase(np.full((12, 12), 0.5))):
        res = solve(fid, reg, acc_cfg(0.3, stop_tol=1e-7, max_iters=50000))
        assert primal_energy(res.u, fid, reg) <= primal_energy(g, fid, reg)


def test_solver_determinism():
    rng = np.random.default_rng(3)
    g = rng.uniform(size=(12, 12))
    cfg = acc_cfg(0.24, stop_tol=1e-6)
    a = solve(FidelityParams(0.24, g), TV(), cfg)
    b = solve(FidelityParams(0.24, g), TV(), cfg)
    np.testing.assert_array_equal(a.u, b.u)
    np.testing.assert_array_equal(a.p, b.p)
    assert a.iterations == b.iterations
    np.testing.assert_array_equal(a.residual_history, b.residual_history)


def test_dual_feasibility_at_convergence():
    rng = np.random.default_rng(9)
    g = rng.uniform(size=(10, 10))
    res = solve(FidelityParams(0.2, g), TV(), acc_cfg(0.2, stop_tol=1e-8, max_iters=100000))
    mag = np.sqrt(res.p[0] ** 2 + res.p[1] ** 2)
    assert np.all(mag <= 1.0 + 1e-9)

    w = np.where(rng.uniform(size=(10, 10)) < 0.5, 0.0, 0.4)
    res = solve(FidelityParams(0.2, g), DoublePhase(w), acc_cfg(0.2, stop_tol=1e-8, max_iters=100000))
    mag = np.sqrt(res.p[0] ** 2 + res.p[1] ** 2)
    assert np.all(mag[w == 0] <= 1.0 + 1e-9)


def test_unique_minimizer_independent_of_initialization():
    rng = np.random.default_rng(10)
    g = rng.uniform(size=(20, 1))
    fid = FidelityParams(0.24, g)
    cfg = std_cfg(stop_tol=1e-9, max_iters=200000)
    from_datum = solve(fid, TV(), cfg)
    from_zero = solve(fid, TV(), cfg, u0=np.zeros_like(g))
    assert np.linalg.norm(from_datum.u - from_zero.u) <= 1e-4


def test_nonconvergence_reported_not_raised():
    rng = np.random.default_rng(12)
    g = rng.uniform(size=(16, 16))
    res = solve(FidelityParams(0.24, g), TV(), acc_cfg(0.24, stop_tol=1e-12, max_iters=5))
    assert not res.converged
    assert res.iterations == 5
    assert res.residual_history.shape == (5,)


def test_diagnostics_stream():
    rng = np.random.default_rng(13)
    g = rng.uniform(size=(8, 8))
    buf = io.StringIO()
    res = solve(FidelityParams(0.24, g), TV(), acc_cfg(0.24, stop_tol=1e-5), diagnostics=buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "iter,residual,energy"
    assert len(lines) == res.iterations + 1
    first = lines[1].split(",")
    assert int(first[0]) == 1
    assert float(first[1]) == res.residual_history[0]
    energies = [float(ln.split(",")[2]) for ln in lines[1:]]
    assert energies[-1] <= energies[0]


def test_accelerated_and_standard_share_limit():
    rng = np.random.default_rng(14)
    g = rng.uniform(size=(16, 1))
    lam = 0.1
    fid = FidelityParams(lam, g)
    acc = solve(fid, TV(), acc_cfg(lam, stop_tol=1e-11, max_iters=1000000))
    std = solve(fid, TV(), std_cfg(stop_tol=1e-11, max_iters=1000000))
    assert float(np.sqrt(((acc.u - std.u) ** 2).sum())) <= 1e-5
