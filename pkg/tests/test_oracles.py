import numpy as np
import pytest

from risbeam.channel import sample_channel, sinr_all
from risbeam.config import default_config
from risbeam.oracles import (
    OracleResult,
    random_search,
    single_user_optimum,
    small_instance_certificate,
)


class TestSingleUserOptimum:
    def test_scalar(self):
        res = single_user_optimum(np.array([1.0 + 0j]), 1.0, 1.0)
        assert res.value == pytest.approx(1.0)

    def test_two_elements_coherent_gain(self):
        res = single_user_optimum(np.array([1.0 + 0j, 1.0 + 0j]), 1.0, 1.0)
        assert res.value == pytest.approx(4.0)

    def test_phase_invariance(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        base = single_user_optimum(h, 0.7, 0.3).value
        rotated = single_user_optimum(np.exp(1j * 0.9) * h, 0.7, 0.3).value
        assert rotated == pytest.approx(base, rel=1e-12)

    def test_beamformer_achieves_value(self):
        rng = np.random.default_rng(1)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        res = single_user_optimum(h, 0.5, 0.2)
        achieved = np.abs(np.conj(h) @ res.F_best[:, 0]) ** 2 / 0.2
        assert achieved == pytest.approx(res.value, rel=1e-12)


class TestRandomSearch:
    def test_zero_budget_returns_start(self):
        cfg = default_config(seed=2, users=2, n_x=2, n_z=2)
        ch = sample_channel(cfg, np.random.default_rng(2))
        res = random_search(cfg, ch, 0, seed=5)
        assert res.evaluations == 1
        assert res.value == pytest.approx(
            float(np.min(sinr_all(res.F_best, ch.gains, cfg.noise_w))))

    def test_monotone_in_budget(self):
        cfg = default_config(seed=3, users=2, n_x=2, n_z=2)
        ch = sample_channel(cfg, np.random.default_rng(3))
        values = [random_search(cfg, ch, b, seed=5).value
                  for b in (0, 64, 512)]
        assert values[0] <= values[1] <= values[2]

    def test_negative_budget_rejected(self):
        cfg = default_config(seed=3, users=1, n_x=1, n_z=1)
        ch = sample_channel(cfg, np.random.default_rng(3))
        with pytest.raises(ValueError):
            random_search(cfg, ch, -1)

    def test_single_user_approaches_optimum(self):
        cfg = default_config(seed=4, users=1, n_x=2, n_z=1)
        ch = sample_channel(cfg, np.random.default_rng(4))
        opt = single_user_optimum(ch.gains[0], cfg.p_max, cfg.noise_w[0])
        res = random_search(cfg, ch, 100_000, seed=6)
        assert res.value <= opt.value * (1 + 1e-12)
        assert res.value >= 0.9 * opt.value


class TestCertificate:
    def test_single_user_optimum_certified(self):
        cfg = default_config(seed=5, users=1, n_x=2, n_z=1)
        ch = sample_channel(cfg, np.random.default_rng(5))
        res = single_user_optimum(ch.gains[0], cfg.p_max, cfg.noise_w[0])
        assert small_instance_certificate(cfg, ch, res.F_best, grid_density=16)

    def test_zero_candidate_fails(self):
        cfg = default_config(seed=6, users=2, n_x=2, n_z=1)
        ch = sample_channel(cfg, np.random.default_rng(6))
        F0 = np.zeros((2, 2), dtype=complex)
        assert not small_instance_certificate(cfg, ch, F0, grid_density=8)

    def test_large_instance_rejected(self):
        cfg = default_config(seed=7, users=2, n_x=3, n_z=1)
        ch = sample_channel(cfg, np.random.default_rng(7))
        with pytest.raises(ValueError):
            small_instance_certificate(cfg, ch, np.zeros((3, 2)), 8)

    def test_oracle_result_shape(self):
        res = OracleResult(F_best=np.ones((2, 1), dtype=complex), value=1.0,
                           evaluations=10)
        assert res.evaluations == 10
