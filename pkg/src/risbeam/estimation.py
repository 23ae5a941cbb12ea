"""Pilot-based MMSE channel estimation at the user side.

The transmitter sends an L-symbol pilot s_k through beam f_k, so user k
receives y_k = s_k f_k^H h_k + w_k with w_k the interference-plus-noise term,
modeled CN(0, R_w). The linear MMSE filter built from the raw second moments
R_h = E[h h^H] and R_w recovers h_k; with those moments exact the estimate
satisfies the orthogonality property E[(h - h_hat) y^H] = 0.
"""

from dataclasses import dataclass

import numpy as np

from .channel import steering_vector
from .config import SystemConfig


class EstimationError(RuntimeError):
    """Raised when the MMSE normal matrix is singular (only possible for
    zero noise with collapsed ranks)."""


@dataclass(frozen=True)
class PilotBatch:
    """One user's pilot observation: pilot ``s`` (L,), received ``y`` (L,),
    channel covariance ``R_h`` (N, N) and interference-plus-noise covariance
    ``R_w`` (L, L)."""

    s: np.ndarray
    y: np.ndarray
    R_h: np.ndarray
    R_w: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        if s.ndim != 1 or s.shape != y.shape or s.size < 1:
            raise ValueError("s and y must be equal-length vectors, L >= 1")
        R_h = np.asarray(self.R_h, dtype=complex)
        R_w = np.asarray(self.R_w, dtype=complex)
        for name, m, dim in (("R_h", R_h, None), ("R_w", R_w, s.size)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square")
            if dim is not None and m.shape[0] != dim:
                raise ValueError(f"{name} must be {dim}x{dim}")
            if not np.allclose(m, m.conj().T):
                raise ValueError(f"{name} must be Hermitian")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "R_h", R_h)
        object.__setattr__(self, "R_w", R_w)


def orthogonal_pilots(k_users, length=None) -> np.ndarray:
    """Unit-modulus orthogonal pilot set (DFT rows), one per user; default
    length L = K."""
    L = k_users if length is None else length
    if L < k_users:
        raise ValueError("pilot length must be >= number of users")
    grid = np.arange(L)
    return np.exp(-2j * np.pi * np.outer(np.arange(k_users), grid) / L)


def rician_covariance(cfg: SystemConfig, k) -> np.ndarray:
    """Analytic R_h = E[h_k h_k^H] of the Rician model:
    beta (d_k/d0)^-alpha * (kappa/(kappa+1) a a^H + 1/(kappa+1) I)."""
    a = steering_vector(cfg.theta_aod[k], cfg.phi_aod[k], cfg)
    kap = cfg.rician_k
    path = cfg.ref_gain * cfg.distances[k] ** (-cfg.pl_exp)
    return path * (
        kap / (kap + 1.0) * np.outer(a, a.conj())
        + 1.0 / (kap + 1.0) * np.eye(cfg.n)
    )


def interference_covariance(pilots, F, R_h, noise_w, k) -> np.ndarray:
    """R_w of user k: sum_{i != k} (f_i^H R_h f_i) s_i s_i^H + sigma_k^2 I_L."""
    L = pilots.shape[1]
    R_w = float(noise_w) * np.eye(L, dtype=complex)
    for i in range(pilots.shape[0]):
        if i == k:
            continue
        f_i = F[:, i]
        power = np.real(f_i.conj() @ R_h @ f_i)
        R_w += power * np.outer(pilots[i], pilots[i].conj())
    return R_w


def mmse_filter(R_h, f_k, s_k, R_w) -> np.ndarray:
    """The N-by-L MMSE filter
    Xi = R_h (f s^H) [ (s f^H) R_h (f s^H) + R_w ]^{-1}."""
    C = np.outer(s_k, f_k.conj())            # (L, N): y = C h + w
    cross = R_h @ C.conj().T                  # (N, L) = R_h f s^H
    normal = C @ cross + R_w                  # (L, L)
    try:
        # solve Xi @ normal = cross  (right division via the transpose)
        return np.linalg.solve(normal.T, cross.T).T
    except np.linalg.LinAlgError as exc:
        raise EstimationError(
            "MMSE normal matrix is singular (zero noise with collapsed rank)"
        ) from exc


def mmse_estimate(batch: PilotBatch, f_k) -> np.ndarray:
    """Estimate h_k from one pilot batch: h_hat = Xi y."""
    Xi = mmse_filter(batch.R_h, np.asarray(f_k, dtype=complex), batch.s, batch.R_w)
    return Xi @ batch.y


def simulate_pilot_batch(cfg: SystemConfig, F, k, rng, h_k=None, pilots=None):
    """Draw one pilot observation for user k.

    Returns (batch, h_k). The channel is Rician unless ``h_k`` is supplied;
    the interference-plus-noise term is drawn CN(0, R_w) via a Cholesky
    factor, matching the covariance the filter assumes.
    """
    from .channel import sample_channel

    if pilots is None:
        pilots = orthogonal_pilots(cfg.users)
    if h_k is None:
        h_k = sample_channel(cfg, rng).gains[k]
    R_h = rician_covariance(cfg, k)
    R_w = interference_covariance(pilots, F, R_h, cfg.noise_w[k], k)
    L = pilots.shape[1]
    chol = np.linalg.cholesky(R_w)
    unit = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2.0)
    w = chol @ unit
    y = pilots[k] * (F[:, k].conj() @ h_k) + w
    return PilotBatch(s=pilots[k], y=y, R_h=R_h, R_w=R_w), h_k
