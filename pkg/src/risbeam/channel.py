"""Channel synthesis and the physical-layer primitives the solver consumes:
planar-array steering vectors, Rician sampling, column/row index masks of the
vectorized beamformer, SINR and per-element transmit power."""

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


def steering_vector(theta, phi, cfg: SystemConfig) -> np.ndarray:
    """Unit-modulus plane-wave response of the n_x-by-n_z array.

    Kronecker form a_x kron a_z with x-axis phase increments
    -2*pi/lambda * d * sin(theta)cos(phi) and z-axis increments
    -2*pi/lambda * d * sin(theta)sin(phi); element (m, p) sits at flat index
    m * n_z + p.
    """
    w = 2.0 * np.pi * cfg.spacing / cfg.wavelength
    ux = np.sin(theta) * np.cos(phi)
    uz = np.sin(theta) * np.sin(phi)
    a_x = np.exp(-1j * w * ux * np.arange(cfg.n_x))
    a_z = np.exp(-1j * w * uz * np.arange(cfg.n_z))
    return np.kron(a_x, a_z)


@dataclass(frozen=True)
class ChannelSet:
    """Per-user downlink channels; row k of ``gains`` is h_k (length N)."""

    gains: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=complex)
        if g.ndim != 2:
            raise ValueError("gains must be a (K, N) array")
        if not np.all(np.isfinite(g)):
            raise ValueError("gains must be finite")
        object.__setattr__(self, "gains", g)

    @property
    def k_users(self) -> int:
        return self.gains.shape[0]

    @property
    def n_elements(self) -> int:
        return self.gains.shape[1]

    def h(self, k) -> np.ndarray:
        return self.gains[k]

    def stacked(self, k) -> np.ndarray:
        """K-fold stack of h_k (length N*K), the expanded vector paired with
        the vectorized beamforming matrix."""
        return np.tile(self.gains[k], self.k_users)


def sample_channel(cfg: SystemConfig, rng) -> ChannelSet:
    """Draw one Rician realization per user.

    h_k = sqrt(beta * (d_k/d0)^-alpha) * (sqrt(kappa/(kappa+1)) * a(theta,phi)
    + sqrt(1/(kappa+1)) * z), z with i.i.d. unit-variance CSCG entries. The
    Gaussian draws do not depend on kappa, so sweeps over the Rician factor
    stay paired when the generator is reseeded identically.
    """
    n = cfg.n
    k = cfg.users
    kap = cfg.rician_k
    gains = np.empty((k, n), dtype=complex)
    for i in range(k):
        los = steering_vector(cfg.theta_aod[i], cfg.phi_aod[i], cfg)
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
        small = np.sqrt(kap / (kap + 1.0)) * los + np.sqrt(1.0 / (kap + 1.0)) * z
        path = cfg.ref_gain * cfg.distances[i] ** (-cfg.pl_exp)
        gains[i] = np.sqrt(path) * small
    return ChannelSet(gains)


def index_vector_a(k, n, k_users) -> np.ndarray:
    """0/1 mask (length N*K) selecting user k's column of vec(F).

    ``k`` is 0-based; ones occupy positions k*N .. (k+1)*N - 1.
    """
    if not 0 <= k < k_users:
        raise IndexError(f"user index {k} out of range [0, {k_users})")
    a = np.zeros(n * k_users)
    a[k * n : (k + 1) * n] = 1.0
    return a


def index_vector_b(n_idx, n, k_users) -> np.ndarray:
    """0/1 mask (length N*K) selecting element n's row of vec(F).

    ``n_idx`` is 0-based; ones occupy positions n_idx, n_idx+N, ...
    """
    if not 0 <= n_idx < n:
        raise IndexError(f"element index {n_idx} out of range [0, {n})")
    b = np.zeros(n * k_users)
    b[n_idx::n] = 1.0
    return b


def sinr(F, ch, k, noise_w) -> float:
    """Received SINR of user k: |h_k^H f_k|^2 over interference plus noise.

    Identical to the masked vectorized form
    |h~_k^H (vec(F) o a_k)|^2 / (sum_{i != k} |h~_k^H (vec(F) o a_i)|^2 + s2).
    """
    s2 = float(noise_w)
    if not s2 > 0:
        raise ValueError("noise power must be > 0")
    h = ch.gains[k] if isinstance(ch, ChannelSet) else np.asarray(ch)[k]
    proj = np.abs(h.conj() @ F) ** 2
    signal = proj[k]
    interference = proj.sum() - signal
    return float(signal / (interference + s2))


def sinr_all(F, gains, noise_w) -> np.ndarray:
    """Vector of all K user SINRs (``gains``: (K, N), ``noise_w``: (K,))."""
    proj = np.abs(gains.conj() @ F) ** 2    # (K, K): proj[k, i] = |h_k^H f_i|^2
    signal = np.diag(proj)
    interference = proj.sum(axis=1) - signal
    return signal / (interference + np.asarray(noise_w, dtype=float))


def per_element_power(F, n_idx) -> float:
    """Transmit power of element ``n_idx`` (0-based): sum_k |F[n, k]|^2."""
    F = np.asarray(F)
    if not 0 <= n_idx < F.shape[0]:
        raise IndexError(f"element index {n_idx} out of range [0, {F.shape[0]})")
    return float(np.sum(np.abs(F[n_idx, :]) ** 2))
