"""Independent references used to validate the solver: the closed-form
single-user optimum, a random-search baseline, a central finite-difference
gradient checker for real functions of complex matrices, and an exhaustive
grid certificate for tiny instances."""

from dataclasses import dataclass

import numpy as np

from .channel import sinr_all
from .config import SystemConfig


@dataclass(frozen=True)
class OracleResult:
    F_best: np.ndarray
    value: float          # achieved min-SINR
    evaluations: int


def single_user_optimum(h, p_max, noise_w) -> OracleResult:
    """Exact K=1 optimum: each element at full power, phase-aligned with the
    channel, giving min-SINR P_t (sum_n |h_n|)^2 / sigma^2."""
    h = np.asarray(h, dtype=complex)
    f = np.sqrt(p_max) * np.exp(1j * np.angle(h))
    value = p_max * float(np.sum(np.abs(h))) ** 2 / float(noise_w)
    return OracleResult(F_best=f[:, None], value=value, evaluations=1)


def _random_feasible(n, k, p_max, rng):
    """Rows at full power: per row, a uniform power split across users
    (flat Dirichlet) with independent uniform phases."""
    splits = rng.dirichlet(np.ones(k), size=n)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, k))
    return np.sqrt(p_max * splits) * np.exp(1j * phases)


def random_search(cfg: SystemConfig, ch, budget, seed=0,
                  chunk=4096) -> OracleResult:
    """Best min-SINR over ``budget`` random feasible draws plus the seeded
    starting point (the same full-power draw the solver starts from). Draws
    are evaluated in vectorized chunks; the stream is deterministic in
    (seed, chunk)."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    from .admm.solver import _draw_full_power

    n, k = cfg.n, cfg.users
    noise = np.asarray(cfg.noise_w, dtype=float)
    rng = np.random.default_rng(seed)
    best_F = _draw_full_power(n, k, cfg.p_max, rng)
    best = float(np.min(sinr_all(best_F, ch.gains, cfg.noise_w)))
    remaining = budget
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        splits = rng.dirichlet(np.ones(k), size=(m, n))
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(m, n, k))
        cands = np.sqrt(cfg.p_max * splits) * np.exp(1j * phases)
        proj = np.abs(np.einsum("kn,cni->cki", np.conj(ch.gains), cands)) ** 2
        signal = np.einsum("ckk->ck", proj)
        interf = proj.sum(axis=2) - signal
        min_sinr = (signal / (interf + noise[None, :])).min(axis=1)
        idx = int(np.argmax(min_sinr))
        if min_sinr[idx] > best:
            best = float(min_sinr[idx])
            best_F = cands[idx]
    return OracleResult(F_best=best_F, value=best, evaluations=budget + 1)


def finite_difference_gradient(f, X, step=None) -> np.ndarray:
    """Central differences of a real-valued f at the complex matrix X,
    reported in the solver's convention grad = d f / d X with X* held fixed,
    i.e. 0.5 * (df/dRe - j df/dIm) entrywise. Exact for Hermitian quadratics
    up to the O(step^2) truncation (which vanishes for quadratics)."""
    X = np.asarray(X, dtype=complex)
    h = step if step is not None else 1e-5 * (1.0 + float(np.linalg.norm(X)))
    grad = np.zeros(X.shape, dtype=complex)
    it = np.nditer(np.zeros(X.shape), flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        d_re = _central(f, X, idx, h, 1.0)
        d_im = _central(f, X, idx, h, 1.0j)
        grad[idx] = 0.5 * (d_re - 1.0j * d_im)
    return grad


def _central(f, X, idx, h, direction):
    Xp = X.copy()
    Xm = X.copy()
    Xp[idx] += h * direction
    Xm[idx] -= h * direction
    fp, fm = f(Xp), f(Xm)
    if not (np.isfinite(fp) and np.isfinite(fm)):
        raise FloatingPointError("non-finite function value in finite differences")
    return (fp - fm) / (2.0 * h)


def small_instance_certificate(cfg: SystemConfig, ch, F_candidate,
                               grid_density=32, slack=0.02) -> bool:
    """Exhaustive check on instances with N*K <= 4: true iff no point of a
    dense feasible grid beats the candidate's min-SINR by more than
    ``slack``.

    The grid puts every row at full power and scans per-row power splits and
    per-entry phases; per-column global phases are fixed to zero on the first
    row (SINR is invariant under them), which keeps the grid tractable.
    """
    n, k = cfg.n, cfg.users
    if n * k > 4:
        raise ValueError("certificate limited to N*K <= 4 instances")
    base = float(np.min(sinr_all(F_candidate, ch.gains, cfg.noise_w)))
    best = _grid_best(cfg, ch, grid_density)
    return best <= base * (1.0 + slack)


def _row_shares(k, density) -> np.ndarray:
    """Grid of per-row power splits across the K columns (points of the
    probability simplex)."""
    if k == 1:
        return np.ones((1, 1))
    t = np.linspace(0.0, 1.0, density)
    grids = np.meshgrid(*([t] * (k - 1)), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    tail = 1.0 - pts.sum(axis=1)
    keep = tail >= -1e-12
    return np.column_stack([pts[keep], np.clip(tail[keep], 0.0, None)])


def _best_min_sinr(candidates, gains, noise) -> float:
    proj = np.abs(np.einsum("kn,cni->cki", np.conj(gains), candidates)) ** 2
    signal = np.einsum("ckk->ck", proj)
    interf = proj.sum(axis=2) - signal
    return float((signal / (interf + noise[None, :])).min(axis=1).max())


def _grid_best(cfg, ch, density) -> float:
    n, k = cfg.n, cfg.users
    amp = np.sqrt(cfg.p_max * _row_shares(k, density))       # (S, K)
    if n == 1:
        return _best_min_sinr(amp.astype(complex)[:, None, :],
                              ch.gains, np.asarray(cfg.noise_w, dtype=float))

    # rows after the first scan per-column phases as well
    phases = np.linspace(0.0, 2.0 * np.pi, density, endpoint=False)
    combos = np.stack(
        np.meshgrid(*([phases] * k), indexing="ij"), axis=-1
    ).reshape(-1, k)
    row_opts = (amp[:, None, :] * np.exp(1j * combos)[None, :, :]).reshape(-1, k)
    m = row_opts.shape[0]

    noise = np.asarray(cfg.noise_w, dtype=float)
    idx = np.indices([m] * (n - 1)).reshape(n - 1, -1).T     # tail-row choices
    best = -np.inf
    chunk_size = 262144
    for start in range(0, idx.shape[0], chunk_size):
        chunk = idx[start : start + chunk_size]
        tail = row_opts[chunk]                               # (C, n-1, K)
        cands = np.empty((chunk.shape[0], n, k), dtype=complex)
        cands[:, 1:, :] = tail
        for first in amp:
            cands[:, 0, :] = first
            best = max(best, _best_min_sinr(cands, ch.gains, noise))
    return best
