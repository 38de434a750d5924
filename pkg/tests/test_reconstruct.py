import numpy as np
import pytest

from vanspec.reconstruct import (
    generate_spectrum,
    lmmse,
    mse_monte_carlo,
    observe,
    synthesize_field,
)
from vanspec.sampling import uniform_distribution
from vanspec.spectral import build_vandermonde, gram_eigenvalues


def test_generate_spectrum_power_and_determinism():
    powers = []
    for s in range(200):
        spec = generate_spectrum(2, 1, 1.0, seed=s)
        powers.append(np.mean(np.abs(spec.a) ** 2))
    assert np.mean(powers) == pytest.approx(1.0, abs=0.05)
    a1 = generate_spectrum(4, 1, 2.0, seed=7).a
    a2 = generate_spectrum(4, 1, 2.0, seed=7).a
    assert np.array_equal(a1, a2)


def test_generate_spectrum_rejects_zero_power():
    with pytest.raises(ValueError):
        generate_spectrum(2, 1, 0.0, seed=0)


def test_generate_spectrum_covariance_is_identity():
    draws = np.stack([generate_spectrum(2, 1, 1.0, seed=s).a for s in range(4000)])
    cov = draws.conj().T @ draws / draws.shape[0]
    assert np.abs(np.diag(cov) - 1.0).max() < 0.06
    off = cov - np.diag(np.diag(cov))
    assert np.abs(off).max() < 0.05


def test_synthesize_constant_mode():
    spec = generate_spectrum(3, 1, 1.0, seed=0)
    a = np.zeros(3, dtype=complex)
    a[0] = 1.0
    spec = spec.__class__(a=a, sigma_a2=1.0, n=3, d=1)
    assert synthesize_field(spec, np.array([0.3])) == pytest.approx(3 ** -0.5)


def test_synthesize_single_harmonic():
    spec = generate_spectrum(2, 1, 1.0, seed=0)
    spec = spec.__class__(a=np.array([0.0, 1.0], dtype=complex), sigma_a2=1.0, n=2, d=1)
    val = synthesize_field(spec, np.array([0.25]))
    assert val == pytest.approx(1j / np.sqrt(2))


def test_synthesis_matches_observation_map():
    # sampling the synthesized field at the matrix points equals beta^-1/2 V^H a
    dist = uniform_distribution(2)
    V = build_vandermonde(dist, 4, 9, seed=3)
    spec = generate_spectrum(4, 2, 1.0, seed=4)
    obs = observe(V, spec, 0.0, seed=5)
    direct = synthesize_field(spec, V.points)
    assert np.allclose(direct, obs.s, atol=1e-12)


def test_observe_noiseless_and_noise_power():
    dist = uniform_distribution(1)
    V = build_vandermonde(dist, 8, 16, seed=1)
    spec = generate_spectrum(8, 1, 1.0, seed=2)
    obs0 = observe(V, spec, 0.0, seed=3)
    assert np.array_equal(obs0.p, obs0.s)
    assert obs0.gamma == np.inf
    zero = spec.__class__(a=np.zeros(8, dtype=complex), sigma_a2=1.0, n=8, d=1)
    pooled = np.concatenate(
        [observe(V, zero, 0.5, seed=s).p for s in range(200)]
    )
    assert np.mean(np.abs(pooled) ** 2) == pytest.approx(0.5, rel=0.05)


def test_observe_worked_example():
    # one sensor at x=0, two unit coefficients, no noise: p = 2/sqrt(2)
    from helpers import point_distribution

    V = build_vandermonde(point_distribution([[0.0]]), 2, 1, seed=0)
    spec = generate_spectrum(2, 1, 1.0, seed=0)
    spec = spec.__class__(a=np.array([1.0, 1.0], dtype=complex), sigma_a2=1.0, n=2, d=1)
    obs = observe(V, spec, 0.0, seed=0)
    assert obs.p == pytest.approx([np.sqrt(2)])


def test_lmmse_limits():
    dist = uniform_distribution(1)
    V = build_vandermonde(dist, 4, 16, seed=11)
    spec = generate_spectrum(4, 1, 1.0, seed=12)
    low = lmmse(V, observe(V, spec, 1e6, seed=13))   # gamma -> 0
    assert np.abs(low.a_hat).max() < 1e-2
    assert low.trace_mse == pytest.approx(1.0, abs=1e-3)
    hi = lmmse(V, observe(V, spec, 1e-9, seed=14))   # gamma -> inf
    assert hi.normalized_error < 1e-4


def test_lmmse_trace_equals_empirical_eta():
    dist = uniform_distribution(1)
    for seed, n, m in ((0, 4, 8), (1, 16, 8), (2, 11, 11)):
        V = build_vandermonde(dist, n, m, seed=seed)
        spec = generate_spectrum(n, 1, 1.0, seed=seed + 50)
        gamma = 3.7
        obs = observe(V, spec, 1.0 / gamma, seed=seed + 99)
        res = lmmse(V, obs)
        lam = gram_eigenvalues(V)
        eta = float(np.mean(1.0 / (gamma / V.beta * lam + 1.0)))
        assert abs(res.trace_mse - eta) < 1e-10


def test_lmmse_primal_dual_agreement():
    # same observation solved in both forms must agree
    dist = uniform_distribution(1)
    spec = generate_spectrum(6, 1, 1.0, seed=21)
    gamma = 2.0
    V_wide = build_vandermonde(dist, 6, 13, seed=22)   # m > n^d: primal
    obs = observe(V_wide, spec, 1.0 / gamma, seed=23)
    primal = lmmse(V_wide, obs)

    # force the dual path on the same system by monkey-island: rebuild with
    # m < n^d instead and compare both routes on that system
    V_tall = build_vandermonde(dist, 6, 4, seed=24)
    obs_t = observe(V_tall, spec, 1.0 / gamma, seed=25)
    dual = lmmse(V_tall, obs_t)
    E = V_tall.entries
    nd, beta = 6, V_tall.beta
    B = (gamma / beta) * (E @ E.conj().T) + np.eye(nd)
    rhs = (gamma / np.sqrt(beta)) * (E @ obs_t.p)
    a_hat_primal = np.linalg.solve(B, rhs)
    assert np.allclose(dual.a_hat, a_hat_primal, atol=1e-9)
    assert np.isfinite(primal.trace_mse)


def test_mse_monte_carlo_estimators_agree():
    est = mse_monte_carlo(uniform_distribution(1), 16, 1, 20, gamma=5.0, trials=60, seed=31)
    spread = 3 * (est.stderr_trace_mse + est.stderr_normalized_error)
    assert abs(est.mean_trace_mse - est.mean_normalized_error) <= max(spread, 0.02)


def test_mse_monte_carlo_decreasing_in_gamma():
    vals = [
        mse_monte_carlo(uniform_distribution(1), 16, 1, 20, gamma=g, trials=20, seed=5).mean_trace_mse
        for g in (0.5, 2.0, 8.0, 32.0)
    ]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_mse_monte_carlo_thread_invariance():
    a = mse_monte_carlo(uniform_distribution(1), 8, 1, 10, gamma=2.0, trials=6, seed=3, threads=1)
    b = mse_monte_carlo(uniform_distribution(1), 8, 1, 10, gamma=2.0, trials=6, seed=3, threads=3)
    assert a.mean_trace_mse == b.mean_trace_mse
    assert a.mean_normalized_error == b.mean_normalized_error


def test_mse_monte_carlo_rejects_bad_gamma():
    with pytest.raises(ValueError):
        mse_monte_carlo(uniform_distribution(1), 8, 1, 10, gamma=0.0, trials=2, seed=0)
