import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from tests.conftest import ClippedIdentity
from warpdrift import (
    DriftCurve,
    Ensemble,
    EvalGrid,
    InvalidBandwidthError,
    InvalidInputError,
    Path,
    UnsupportedWarpError,
    WarpedSample,
    beta_hat,
    bias_target,
    drift_estimate,
    drift_estimate_known_warp,
    empirical_cdf,
    phi_representation,
    simulate_ensemble,
    model_langevin,
    stochastic_sum,
    write_drift_curve,
)


def loop_beta(ens, warp, K, h, z, t0=0.0):
    """Brute-force double loop, the reference semantics."""
    j0 = int(np.ceil(t0 / ens.dt - 1e-9))
    total, scale = 0.0, 0.0
    for i in range(ens.N):
        for j in range(j0, ens.n):
            x = ens.values[i, j]
            term = K.eval((z - warp.eval(x)) / h) / h * (ens.values[i, j + 1] - x)
            total += term
            scale += abs(term)
    norm = 1.0 / (ens.N * (ens.T - t0))
    return norm * total, norm * scale


def test_hand_example(rho):
    ens = Ensemble(np.array([[0.0, 1.0, 2.0]]), T=2.0, x0=0.0)
    got = beta_hat(ens, ClippedIdentity(), rho, 1.0, 0.5)
    assert got == pytest.approx(rho.eval(0.5), rel=1e-15)
    assert got == pytest.approx(loop_beta(ens, ClippedIdentity(), rho, 1.0, 0.5)[0], rel=1e-15)


def test_zero_increments_give_zero(constant_ensemble, rho):
    F = empirical_cdf(constant_ensemble)
    z = np.linspace(0, 1, 11)
    for h in (0.01, 0.3, 2.0):
        assert np.all(beta_hat(constant_ensemble, F, rho, h, z) == 0.0)
    curve = drift_estimate(constant_ensemble, rho, 0.1, np.linspace(0, 1, 7))
    assert np.all(curve.values == 0.0)


def test_far_from_data_is_exactly_zero(model1_ensemble, ou_warp, rho):
    # warped samples live in [0, 1]; the kernel window at z = 1.5 misses them
    assert beta_hat(model1_ensemble, ou_warp, rho, 0.1, 1.5) == 0.0
    assert beta_hat(model1_ensemble, ou_warp, rho, 0.1, -0.2) == 0.0


@pytest.mark.parametrize("h", [0.0, -1.0])
def test_invalid_bandwidth(model1_ensemble, ou_warp, rho, h):
    with pytest.raises(InvalidBandwidthError):
        beta_hat(model1_ensemble, ou_warp, rho, h, 0.5)


def test_windowed_matches_loop_and_naive(rho):
    ens = simulate_ensemble(model_langevin(), 2.0, 5.0, 50, 20, master_seed=4)
    F = empirical_cdf(ens)
    z = np.linspace(0.0, 1.0, 13)
    ws = WarpedSample(ens, F)
    for h in (0.02, 0.1):
        fast = ws.beta(z, rho, h)
        naive = ws.beta(z, rho, h, method="naive")
        restricted = beta_hat(ens, F, rho, h, z)
        for k, zk in enumerate(z):
            ref, scale = loop_beta(ens, F, rho, h, zk)
            tol = 1e-12 * max(scale, abs(ref))
            assert abs(fast[k] - ref) <= tol
            assert abs(naive[k] - ref) <= tol
            assert abs(restricted[k] - ref) <= tol


def test_linearity_over_concatenation(rho, ou_warp):
    e1 = simulate_ensemble(model_langevin(), 2.0, 5.0, 50, 30, master_seed=1)
    e2 = simulate_ensemble(model_langevin(), 2.0, 5.0, 50, 70, master_seed=2)
    z = np.linspace(0.05, 0.95, 19)
    h = 0.05
    whole = beta_hat(e1.concat(e2), ou_warp, rho, h, z)
    parts = (30 * beta_hat(e1, ou_warp, rho, h, z) + 70 * beta_hat(e2, ou_warp, rho, h, z)) / 100
    ws = WarpedSample(e1.concat(e2), ou_warp)
    scale = ws.norm * (ws.weights(z, rho, h) @ np.abs(ws.incr))
    assert np.all(np.abs(whole - parts) <= 1e-12 * np.maximum(scale, 1e-300))


def test_compact_support_locality(rho, ou_warp):
    ens = simulate_ensemble(model_langevin(), 2.0, 5.0, 50, 40, master_seed=5)
    z, h = 0.5, 0.05
    u = ou_warp.eval(ens.values[:, :-1])
    outside = np.abs(u - z) > h * rho.support_radius
    vals = ens.values
    # redraw every increment whose left point is outside the kernel window
    ws_a = WarpedSample(ens, ou_warp)
    ws_b = WarpedSample(ens, ou_warp)
    ws_b.incr = ws_b.incr.copy()
    far = np.abs(ws_b.u - z) > h * rho.support_radius
    ws_b.incr[far] = np.random.default_rng(1).normal(0, 1.0, far.sum())
    assert ws_a.beta([z], rho, h)[0] == ws_b.beta([z], rho, h)[0]

    # whole paths that never enter the window may be replaced freely
    never = ~np.any(~outside, axis=1)
    if never.any():
        swapped = vals.copy()
        swapped[never] = vals[never][::-1]
        assert beta_hat(ens, ou_warp, rho, h, z) == beta_hat(
            Ensemble(swapped, ens.T, ens.x0), ou_warp, rho, h, z)


def test_duplicated_ensemble_gives_same_curve(model1_ensemble, rho):
    grid = EvalGrid().build(empirical_cdf(model1_ensemble))
    a = drift_estimate(model1_ensemble, rho, 0.04, grid)
    b = drift_estimate(model1_ensemble.concat(model1_ensemble), rho, 0.04, grid)
    assert np.array_equal(empirical_cdf(model1_ensemble).eval(grid),
                          empirical_cdf(model1_ensemble.concat(model1_ensemble)).eval(grid))
    assert np.allclose(a.values, b.values, rtol=1e-12, atol=1e-14)


def test_model1_fit_regression(model1_ensemble, rho):
    grid = EvalGrid().build(empirical_cdf(model1_ensemble))
    curve = drift_estimate(model1_ensemble, rho, 0.04, grid)
    mse = curve.mse(lambda x: -x)
    assert mse < 5e-3
    assert mse == pytest.approx(0.00027849241774736885, rel=1e-9)


def test_known_warp_curve(big_model1_ensemble, ou_warp, rho):
    grid = np.linspace(-1, 1, 201)
    known = drift_estimate_known_warp(big_model1_ensemble, ou_warp, rho, 0.02, grid)
    # the occupation measure is negligible below about -0.2, so convergence to
    # -x is checked on the central occupation range intersected with [-1, 1]
    central = (grid >= ou_warp.inverse(0.1)) & (grid <= ou_warp.inverse(0.9))
    assert central.sum() > 80
    assert np.max(np.abs(known.values[central] + grid[central])) <= 0.05

    empirical = drift_estimate(big_model1_ensemble, rho, 0.02, grid)
    assert np.max(np.abs(known.values - empirical.values)) <= 0.1


def test_drift_curve_contract(tmp_path, model1_ensemble, rho):
    with pytest.raises(InvalidInputError):
        DriftCurve(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(InvalidInputError):
        DriftCurve(np.array([0.0, 1.0]), np.array([1.0, np.nan]))
    grid = np.linspace(0, 1, 5)
    c = drift_estimate(model1_ensemble, rho, 0.04, grid)
    p = write_drift_curve(c, tmp_path / "c.csv")
    lines = p.read_text().splitlines()
    assert lines[0] == "x,b_hat" and len(lines) == 6
    assert np.array_equal(np.loadtxt(p, delimiter=",", skiprows=1)[:, 1], c.values)
    meta = json.loads(p.with_suffix(".json").read_text())
    for key in ("h", "N", "n", "T", "t0", "kernel", "warp", "seed"):
        assert key in meta


# smoothed target

def _scalar_bias_oracle(b, warp, K, h, x):
    """int_0^1 K_h(y - F(x)) b(F^{-1}(y)) dy in y-space, one point at a time."""
    Fx = warp.eval(x)
    lo, hi = max(Fx - h, 1e-15), min(Fx + h, 1 - 1e-15)
    val, _ = integrate.quad(lambda y: K.eval((y - Fx) / h) / h * b(warp.inverse(y)), lo, hi,
                            epsabs=1e-11, epsrel=1e-11, limit=200)
    return val


def test_bias_target_constant(ou_warp, rho):
    grid = np.linspace(0.1, 1.2, 9)
    c = bias_target(lambda x: 3.5 + 0 * x, ou_warp, rho, 0.05, grid)
    assert np.allclose(c.values, 3.5, atol=1e-8)


@pytest.mark.parametrize("x", [-0.1, 0.0, 0.3, 0.8, 1.5])
def test_bias_target_against_y_space_oracle(ou_warp, rho, x):
    b = lambda z: -z  # noqa: E731
    got = bias_target(b, ou_warp, rho, 0.04, np.array([x])).values[0]
    assert got == pytest.approx(_scalar_bias_oracle(b, ou_warp, rho, 0.04, x), abs=1e-8)


def test_bias_target_boundary_is_truncated(ou_warp, rho):
    # F(-0.1) is below h, so part of the kernel mass falls outside (0, 1)
    x, h = -0.1, 0.1
    assert ou_warp.eval(x) < h
    one = bias_target(lambda z: 1.0 + 0 * z, ou_warp, rho, h, np.array([x])).values[0]
    Fx = ou_warp.eval(x)
    mass, _ = integrate.quad(lambda y: rho.eval((y - Fx) / h) / h, 0, Fx + h, epsabs=1e-12)
    assert one == pytest.approx(mass, abs=1e-8)
    assert one < 1.0


def test_bias_target_rejects_empirical_warp(model1_ensemble, rho):
    with pytest.raises(UnsupportedWarpError):
        bias_target(lambda x: -x, empirical_cdf(model1_ensemble), rho, 0.05, np.array([0.5]))


def test_bias_order_on_admissible_interval(ou_warp, rho):
    # [0, 0.8] keeps F(A) above h * r for every h below, so no boundary truncation
    grid = np.linspace(0.0, 0.8, 161)
    hs = np.array([0.04, 0.02, 0.01, 0.005])
    errs = [np.sqrt(bias_target(lambda x: -x, ou_warp, rho, h, grid)
                    .f_weighted_error(lambda x: -x, ou_warp.density)) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.4)


# Ito representation

def test_phi_constant_path(ou_warp, rho):
    p = Path(np.linspace(0, 5, 51), np.full(51, 1.8))
    x = 0.3
    assert abs(ou_warp.eval(1.8) - ou_warp.eval(x)) > 0.1
    assert phi_representation(p, x, 0.1, rho, ou_warp, lambda z: 0.1) == 0.0
    assert stochastic_sum(p, ou_warp, rho, 0.1, x) == 0.0


def test_phi_without_noise_matches_riemann_sum(ou_warp, rho):
    x, h, T = 0.5, 0.1, 5.0
    gaps = []
    for n in (500, 1000, 2000, 4000):
        t = np.linspace(0, T, n + 1)
        p = Path(t, 2.0 * np.exp(-t))
        phi = phi_representation(p, x, h, rho, ou_warp, lambda z: 0.0 * z)
        gaps.append(abs(stochastic_sum(p, ou_warp, rho, h, x) - T * phi))
    assert gaps[-1] < 2e-3
    rates = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
    assert np.all(np.abs(rates - 1.0) < 0.2)


def test_phi_rejects_empirical_warp(model1_ensemble, rho):
    p = model1_ensemble.paths[0]
    with pytest.raises(UnsupportedWarpError):
        phi_representation(p, 0.5, 0.1, rho, empirical_cdf(model1_ensemble), lambda z: 0.1)


def test_ito_discrepancy_rms_rate(ou_warp, rho):
    """RMS over many paths of |sum - T Phi| decays like sqrt(dt)."""
    from warpdrift.sde import euler_maruyama, normal_increments, split_seed

    m, T, x, h, paths = model_langevin(), 5.0, 0.5, 0.1, 24
    levels = (500, 2000, 8000)
    z = np.vstack([normal_increments(split_seed(77, i), 8000) for i in range(paths)])
    dW = np.sqrt(T / 8000) * z
    rms = []
    for n in levels:
        vals = euler_maruyama(m, 2.0, T, dW.reshape(paths, n, -1).sum(axis=2))
        t = np.linspace(0, T, n + 1)
        d = [stochastic_sum(Path(t, v), ou_warp, rho, h, x)
             - T * phi_representation(Path(t, v), x, h, rho, ou_warp, m.diffusion) for v in vals]
        rms.append(np.sqrt(np.mean(np.square(d))))
    slope = np.polyfit(np.log(T / np.array(levels)), np.log(rms), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.3)
    assert rms[0] > rms[1] > rms[2]


@settings(max_examples=25, deadline=None)
@given(st.floats(0.02, 0.5), st.floats(0.0, 1.0))
def test_windowed_naive_property(h, z):
    from warpdrift import bump_kernel

    ens = Ensemble(np.random.default_rng(3).normal(size=(4, 21)).cumsum(axis=1), T=2.0, x0=0.0)
    ws = WarpedSample(ens, empirical_cdf(ens))
    a = ws.beta([z], bump_kernel(), h)[0]
    b = ws.beta([z], bump_kernel(), h, method="naive")[0]
    scale = ws.norm * (ws.dense_weights([z], bump_kernel(), h) @ np.abs(ws.incr))[0]
    assert abs(a - b) <= 1e-12 * max(scale, 1e-300)
