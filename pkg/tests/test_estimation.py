import numpy as np
import pytest

from risbeam.channel import sample_channel
from risbeam.config import default_config
from risbeam.estimation import (
    EstimationError,
    PilotBatch,
    interference_covariance,
    mmse_estimate,
    mmse_filter,
    orthogonal_pilots,
    rician_covariance,
    simulate_pilot_batch,
)


def test_pilot_set_is_orthogonal_unit_modulus():
    S = orthogonal_pilots(4)
    np.testing.assert_allclose(np.abs(S), 1.0, atol=1e-12)
    gram = S @ S.conj().T
    np.testing.assert_allclose(gram, 4 * np.eye(4), atol=1e-10)


def test_scalar_noiseless_filter_passes_observation_through():
    batch = PilotBatch(
        s=np.array([1.0 + 0j]),
        y=np.array([0.3 - 0.2j]),
        R_h=np.array([[1.0 + 0j]]),
        R_w=np.array([[1e-12 + 0j]]),
    )
    est = mmse_estimate(batch, np.array([1.0 + 0j]))
    np.testing.assert_allclose(est, batch.y, rtol=1e-9)


def test_infinite_noise_kills_estimate():
    batch = PilotBatch(
        s=np.array([1.0 + 0j]),
        y=np.array([0.3 - 0.2j]),
        R_h=np.array([[1.0 + 0j]]),
        R_w=np.array([[1e12 + 0j]]),
    )
    est = mmse_estimate(batch, np.array([1.0 + 0j]))
    assert np.abs(est[0]) < 1e-10


def test_filter_matches_dense_solve():
    # independent dense route: build the bracketed matrix and invert it
    rng = np.random.default_rng(0)
    n, L = 2, 4
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    s = np.exp(2j * np.pi * rng.random(L))
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    R_h = A @ A.conj().T + np.eye(n)
    B = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    R_w = B @ B.conj().T + 0.1 * np.eye(L)

    Xi = mmse_filter(R_h, f, s, R_w)

    C = np.outer(s, f.conj())
    bracket = C @ R_h @ C.conj().T + R_w
    Xi_dense = R_h @ C.conj().T @ np.linalg.inv(bracket)
    np.testing.assert_allclose(Xi, Xi_dense, atol=1e-10)

    y = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    batch = PilotBatch(s=s, y=y, R_h=R_h, R_w=R_w)
    np.testing.assert_allclose(mmse_estimate(batch, f), Xi_dense @ y,
                               atol=1e-10)


def test_singular_normal_matrix_reported():
    # zero noise, rank-collapsed bracket
    with pytest.raises(EstimationError, match="singular"):
        mmse_filter(
            np.zeros((2, 2), dtype=complex),
            np.ones(2, dtype=complex),
            np.ones(3, dtype=complex),
            np.zeros((3, 3), dtype=complex),
        )


def test_analytic_covariance_matches_model():
    cfg = default_config(seed=4, users=2)
    R = rician_covariance(cfg, 0)
    np.testing.assert_allclose(R, R.conj().T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(R) > 0)
    # Monte-Carlo second moment over the sampling routine
    rng = np.random.default_rng(11)
    acc = np.zeros((cfg.n, cfg.n), dtype=complex)
    draws = 4000
    for _ in range(draws):
        h = sample_channel(cfg, rng).gains[0]
        acc += np.outer(h, h.conj())
    np.testing.assert_allclose(acc / draws, R, atol=0.05 * np.abs(R).max())


def test_interference_covariance_structure():
    cfg = default_config(seed=5, users=3)
    pilots = orthogonal_pilots(3)
    rng = np.random.default_rng(1)
    F = rng.standard_normal((cfg.n, 3)) + 1j * rng.standard_normal((cfg.n, 3))
    R_h = rician_covariance(cfg, 0)
    R_w = interference_covariance(pilots, F, R_h, cfg.noise_w[0], 0)
    np.testing.assert_allclose(R_w, R_w.conj().T, atol=1e-12)
    # own pilot contributes nothing; removing user 1's beam removes its term
    F_zero = F.copy()
    F_zero[:, 1] = 0
    R_w_zero = interference_covariance(pilots, F_zero, R_h, cfg.noise_w[0], 0)
    term = np.real(F[:, 1].conj() @ R_h @ F[:, 1]) * np.outer(
        pilots[1], pilots[1].conj())
    np.testing.assert_allclose(R_w - R_w_zero, term, atol=1e-12)


def test_estimation_orthogonality():
    # E[(h - h_hat) y^H] = 0 for the exact raw-moment LMMSE filter; sample
    # cross-moments over >= 1e3 draws stay within 3 standard errors of zero
    cfg = default_config(seed=6, users=2)
    rng = np.random.default_rng(123)
    F = np.sqrt(cfg.p_max / 2) * np.exp(
        2j * np.pi * rng.random((cfg.n, 2)))
    draws = 2000
    cross = []
    for _ in range(draws):
        batch, h = simulate_pilot_batch(cfg, F, 0, rng)
        err = h - mmse_estimate(batch, F[:, 0])
        cross.append(np.outer(err, batch.y.conj()))
    cross = np.asarray(cross)
    mean = cross.mean(axis=0)
    stderr = cross.std(axis=0) / np.sqrt(draws)
    z = np.abs(mean) / np.maximum(stderr, 1e-300)
    assert np.max(z) < 3.0, f"max |z| = {z.max():.2f}"
