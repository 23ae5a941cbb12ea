"""System-level configuration: array geometry, link budget, user placement."""

from dataclasses import dataclass, field

import numpy as np


def db_to_linear(x_db):
    """Convert a dB ratio to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watts(x_dbm):
    """Convert dBm to watts (0 dBm = 1 mW)."""
    return 10.0 ** (np.asarray(x_dbm, dtype=float) / 10.0) * 1e-3


@dataclass(frozen=True)
class SystemConfig:
    """Physical-layer parameters of the transmissive-surface downlink.

    The surface is a uniform planar array of ``n_x * n_z`` 1-bit transmissive
    elements; ``users`` single-antenna receivers are served by spatial
    multiplexing. Per-user geometry is carried as (distance, vertical AoD,
    horizontal AoD) with the vertical angle measured from the array normal
    (boresight) and the horizontal angle in the array plane from the x-axis
    toward z.

    Units: meters, watts, radians; ``ref_gain`` and ``rician_k`` are linear
    ratios (``ref_gain`` is the path gain at the 1 m reference distance).
    """

    n_x: int = 4
    n_z: int = 4
    users: int = 5
    spacing: float = 0.05          # element pitch d (m)
    wavelength: float = 0.1        # carrier wavelength (m); d = wavelength/2
    p_max: float = 1e-3            # per-element available power P_t (W)
    noise_w: np.ndarray = field(default=None)  # per-user sigma_k^2 (W)
    ref_gain: float = 1e-2         # beta at d0 = 1 m (linear, -20 dB)
    pl_exp: float = 3.0            # path-loss exponent
    rician_k: float = 1.9952623149688795  # 3 dB
    distances: np.ndarray = field(default=None)   # (K,) m
    theta_aod: np.ndarray = field(default=None)   # (K,) rad, from boresight
    phi_aod: np.ndarray = field(default=None)     # (K,) rad, in-plane azimuth

    def __post_init__(self):
        if self.n_x < 1 or self.n_z < 1:
            raise ValueError("n_x and n_z must be >= 1")
        if self.users < 1:
            raise ValueError("users must be >= 1")
        if not self.p_max > 0:
            raise ValueError("p_max must be > 0")
        if not self.ref_gain > 0:
            raise ValueError("ref_gain must be > 0")
        if self.rician_k < 0:
            raise ValueError("rician_k must be >= 0")
        if not self.spacing > 0:
            raise ValueError("spacing must be > 0")
        k = self.users
        noise = self.noise_w if self.noise_w is not None else 1e-8
        noise = np.broadcast_to(np.asarray(noise, dtype=float), (k,)).copy()
        if not np.all(noise > 0):
            raise ValueError("noise_w must be > 0")
        object.__setattr__(self, "noise_w", noise)
        for name, default in (
            ("distances", np.full(k, 30.0)),
            ("theta_aod", np.zeros(k)),
            ("phi_aod", np.zeros(k)),
        ):
            val = getattr(self, name)
            arr = default if val is None else np.asarray(val, dtype=float)
            if arr.shape != (k,):
                raise ValueError(f"{name} must have shape ({k},)")
            object.__setattr__(self, name, arr)
        if not np.all(self.distances > 0):
            raise ValueError("distances must be > 0")

    @property
    def n(self) -> int:
        """Total element count N = n_x * n_z."""
        return self.n_x * self.n_z


def place_users(k_users, rng, radius=50.0, height=15.0):
    """Drop users uniformly in a ground disk below the surface.

    The surface sits at (0, 0, ``height``) facing straight down; users are
    uniform over a disk of ``radius`` centered at the origin. Returns
    (distances, theta_aod, phi_aod) in the boresight convention documented on
    :class:`SystemConfig`: with the local frame (x, z) spanning the array and
    y pointing down, the unit vector toward a user at ground position
    (gx, gy, 0) is (gx, height, gy)/d, so theta = arccos(height/d) and
    phi = atan2(gy, gx).

    Drawing ``k_users`` from a fresh generator yields a prefix-stable
    sequence: the first k positions are identical for any larger k, which
    keeps user-count sweeps paired across values.
    """
    # one (radius, angle) draw pair per user keeps the stream prefix-stable;
    # sqrt for uniform area density
    u = rng.random((k_users, 2))
    radii = radius * np.sqrt(u[:, 0])
    angles = 2.0 * np.pi * u[:, 1]
    gx = radii * np.cos(angles)
    gy = radii * np.sin(angles)
    d = np.sqrt(gx**2 + gy**2 + height**2)
    theta = np.arccos(np.clip(height / d, -1.0, 1.0))
    phi = np.arctan2(gy, gx)
    return d, theta, phi


def default_config(seed=0, **overrides):
    """Baseline scenario: 4x4 surface, 5 users in a 50 m disk, half-wave
    spacing, P_t = 1 mW, sigma^2 = -50 dBm, alpha = 3, beta = -20 dB,
    Rician factor 3 dB. ``overrides`` replace individual fields; user
    geometry is resampled from ``seed`` unless given explicitly."""
    k = overrides.pop("users", 5)
    rng = np.random.default_rng(seed)
    d, theta, phi = place_users(k, rng)
    params = dict(
        n_x=4,
        n_z=4,
        users=k,
        spacing=0.05,
        wavelength=0.1,
        p_max=1e-3,
        noise_w=dbm_to_watts(-50.0),
        ref_gain=db_to_linear(-20.0),
        pl_exp=3.0,
        rician_k=float(db_to_linear(3.0)),
        distances=d,
        theta_aod=theta,
        phi_aod=phi,
    )
    params.update(overrides)
    return SystemConfig(**params)
