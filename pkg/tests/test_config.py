import numpy as np
import pytest

from risbeam.config import (
    SystemConfig,
    db_to_linear,
    dbm_to_watts,
    default_config,
    linear_to_db,
    place_users,
)


def test_db_conversions():
    assert db_to_linear(-20.0) == pytest.approx(1e-2)
    assert db_to_linear(3.0) == pytest.approx(1.9952623, rel=1e-6)
    assert dbm_to_watts(-50.0) == pytest.approx(1e-8)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)
    assert linear_to_db(100.0) == pytest.approx(20.0)


@pytest.mark.parametrize("field,value", [
    ("p_max", 0.0),
    ("p_max", -1.0),
    ("ref_gain", 0.0),
    ("rician_k", -0.1),
    ("users", 0),
    ("n_x", 0),
    ("spacing", 0.0),
])
def test_invalid_fields_rejected(field, value):
    with pytest.raises(ValueError, match=field.split("_")[0]):
        default_config(seed=0, **{field: value})


def test_zero_noise_rejected():
    with pytest.raises(ValueError, match="noise"):
        default_config(seed=0, noise_w=0.0)


def test_noise_broadcasts_per_user():
    cfg = default_config(seed=0, users=3, noise_w=1e-8)
    assert cfg.noise_w.shape == (3,)
    assert np.all(cfg.noise_w == 1e-8)


def test_geometry_shapes_checked():
    with pytest.raises(ValueError, match="distances"):
        SystemConfig(users=2, distances=np.array([10.0]))


def test_place_users_geometry():
    rng = np.random.default_rng(0)
    d, theta, phi = place_users(200, rng, radius=50.0, height=15.0)
    # distance between the surface and any disk point
    assert np.all(d >= 15.0)
    assert np.all(d <= np.sqrt(50.0**2 + 15.0**2) + 1e-9)
    # boresight convention: sin(theta)cos(phi), sin(theta)sin(phi) recover the
    # in-plane direction cosines gx/d and gy/d
    gx = d * np.sin(theta) * np.cos(phi)
    gy = d * np.sin(theta) * np.sin(phi)
    assert np.all(gx**2 + gy**2 <= 50.0**2 + 1e-6)
    np.testing.assert_allclose(d * np.cos(theta), 15.0, rtol=1e-12)


def test_place_users_prefix_stable():
    d1, t1, p1 = place_users(3, np.random.default_rng(42))
    d2, t2, p2 = place_users(8, np.random.default_rng(42))
    np.testing.assert_array_equal(d1, d2[:3])
    np.testing.assert_array_equal(t1, t2[:3])
    np.testing.assert_array_equal(p1, p2[:3])


def test_default_config_matches_baseline():
    cfg = default_config(seed=1)
    assert cfg.n == 16
    assert cfg.users == 5
    assert cfg.p_max == pytest.approx(1e-3)
    assert cfg.noise_w[0] == pytest.approx(1e-8)
    assert cfg.ref_gain == pytest.approx(1e-2)
    assert cfg.pl_exp == 3.0
    assert cfg.rician_k == pytest.approx(db_to_linear(3.0))
    assert cfg.spacing == pytest.approx(cfg.wavelength / 2)
