"""Outer loop of the consensus solver.

solve() runs the alternating closed-form block updates (shared target,
per-element power copies, per-user SINR copies, per-user targets, consensus
average, error recursion) until the fractional change of the shared target
falls below the threshold. Each constraint block carries a Lagrange
multiplier; the default mode drives every multiplier to its inner fixed point
per outer iteration, the "single" mode takes one projected subgradient step
per multiplier as printed in the source updates.

Internally the problem is rescaled to unit per-element power and unit channel
norms (every SINR-dimensioned quantity, gamma, eta and the reported metric,
is invariant under that rescaling) and the result is mapped back to physical
units and projected feasible.
"""

import time

import numpy as np

from ..channel import ChannelSet, sinr_all
from ..config import SystemConfig
from . import updates
from .backend import resolve_backend
from .state import AdmmState, SolveTrace, SolverOptions

TINY = 1e-12


class SolverError(RuntimeError):
    """Raised when an update produces a non-finite value; the message names
    the offending block."""


def init_state(cfg: SystemConfig, ch: ChannelSet, opts=None, seed=0) -> AdmmState:
    """Deterministic starting point: F random with every row at power
    exactly P_t, all copies equal to F, targets at the starting min-SINR,
    error terms and multipliers zero."""
    del opts  # initialization does not depend on solver options
    n, k = cfg.n, cfg.users
    F0 = _draw_full_power(n, k, cfg.p_max, np.random.default_rng(seed))
    gamma0 = float(np.min(sinr_all(F0, ch.gains, cfg.noise_w)))
    return AdmmState(
        F=F0,
        gamma=gamma0,
        Gamma=np.repeat(F0[None, :, :], n, axis=0),
        Psi=np.repeat(F0[None, :, :], k, axis=0),
        eta=np.full(k, gamma0),
        Xi=np.zeros((n, n, k), dtype=complex),
        Lam=np.zeros((k, n, k), dtype=complex),
        xi=np.zeros(k),
        lam=np.zeros(n),
        mu=np.zeros(k),
        theta=np.zeros(k),
        anchor=np.repeat(F0[None, :, :], k, axis=0),
        r=0,
    )


def _draw_full_power(n, k, p_max, rng):
    z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    row_norm = np.sqrt(np.sum(np.abs(z) ** 2, axis=1))
    return z * (np.sqrt(p_max) / row_norm)[:, None]


def solve(cfg: SystemConfig, ch: ChannelSet, opts: SolverOptions = None, seed=0):
    """Run the solver; returns (F, trace) with F feasible (projected).

    Degenerate input: a user with a zero channel caps the attainable
    min-SINR at zero, so the starting point is returned immediately.
    """
    opts = opts or SolverOptions()
    n, k = cfg.n, cfg.users
    if ch.gains.shape != (k, n):
        raise ValueError("channel set does not match the configuration")

    gains_norm = np.sqrt(np.sum(np.abs(ch.gains) ** 2, axis=1))
    rng = np.random.default_rng(seed)
    if np.any(gains_norm == 0.0):
        F0 = _draw_full_power(n, k, cfg.p_max, rng)
        trace = SolveTrace(converged=True)
        trace.gamma.append(0.0)
        trace.min_sinr.append(0.0)
        trace.res_gamma_rel.append(0.0)
        trace.res_psi_rel.append(0.0)
        trace.res_eta_rel.append(0.0)
        trace.wall_s.append(0.0)
        return F0, trace

    # normalized problem: unit channel rows, unit per-element power
    H = np.ascontiguousarray(ch.gains / gains_norm[:, None])
    sig2n = cfg.noise_w / (gains_norm**2 * cfg.p_max)
    if opts.backend == "reference":
        Fn, trace = _solve_reference(H, sig2n, n, k, opts, rng)
    else:
        Fn, trace = _solve_structured(H, sig2n, n, k, opts, rng)
    F = updates.project_feasible(np.sqrt(cfg.p_max) * Fn, cfg.p_max)
    return F, trace


def _check_finite(names_and_values, iteration):
    for name, value in names_and_values:
        if not np.all(np.isfinite(value)):
            raise SolverError(
                f"non-finite value from the {name} at iteration {iteration}"
            )


def _stop(gamma_prev, gamma_new, epsilon):
    return abs(gamma_new - gamma_prev) / max(abs(gamma_prev), TINY) < epsilon


def _record(trace, opts, Fn, gam, min_sinr, res_g, res_p, res_eta, elapsed):
    f_norm = max(float(np.linalg.norm(Fn)), TINY)
    trace.gamma.append(gam)
    trace.res_gamma_rel.append(res_g / f_norm)
    trace.res_psi_rel.append(res_p / f_norm)
    trace.res_eta_rel.append(res_eta / max(abs(gam), TINY))
    if min_sinr is not None:
        trace.min_sinr.append(min_sinr)
    trace.wall_s.append(elapsed)


def _projected_min_sinr(Fn, H, sig2n, project=True):
    proj = updates.project_feasible(Fn, 1.0) if project else Fn
    return float(np.min(sinr_all(proj, H, sig2n)))


def _solve_structured(H, sig2n, n, k, opts, rng):
    if opts.inner_steps != 1:
        raise ValueError(
            "inner_steps > 1 is only available on the reference backend"
        )
    backend_name, kernel = resolve_backend(opts.backend)
    use_ext = backend_name == "c"

    F = _draw_full_power(n, k, 1.0, rng)
    gamma = float(np.min(sinr_all(F, H, sig2n)))
    st = {
        "F": F,
        "D": np.zeros((n, k), dtype=complex),
        "GR": F.copy(),
        "XiR": np.zeros((n, k), dtype=complex),
        "Cmat": np.zeros((k, k), dtype=complex),
        "PsiBase": F.copy(),
        "Tmat": np.zeros((k, k), dtype=complex),
        "ua": np.einsum("kn,nk->k", np.conj(H), F),
        "eta": np.full(k, gamma),
        "xi": np.zeros(k),
        "lam": np.zeros(n),
        "mu": np.zeros(k),
        "th": np.zeros(k),
    }
    hn2 = np.ones(k)  # channels are normalized to unit norm
    out = np.zeros(5)
    scratch_nk = np.empty((n, k), dtype=complex)
    scratch_n = np.empty(n)
    scratch_kk = np.empty((k, k), dtype=complex)
    scratch_k = np.empty(k)
    mu_cap = opts.mu_rate * (n + k)
    exact = opts.multiplier_solve == "exact"
    state_args = (st["F"], st["D"], st["GR"], st["XiR"], st["Cmat"],
                  st["PsiBase"], st["Tmat"], st["ua"], st["eta"], st["xi"],
                  st["lam"], st["mu"], st["th"], H, hn2, sig2n)
    user_scale = _user_step_scale(opts, n, sig2n)

    trace = SolveTrace()
    gamma_prev = gamma
    best_value = -np.inf
    best_F = None
    track_best = opts.return_best and exact
    for r in range(1, opts.max_iters + 1):
        t0 = time.perf_counter()
        if track_best:
            entry_F = st["F"].copy()
        if exact:
            trust = 1.0 + opts.trust_gain / r
            if use_ext:
                kernel.iterate_exact(*state_args, 1.0, opts.rho, mu_cap,
                                     trust, out, scratch_nk, scratch_n,
                                     scratch_kk, scratch_k)
            else:
                kernel.iterate_exact(*state_args, 1.0, opts.rho, mu_cap,
                                     trust, out)
        else:
            decay = r**-opts.step_decay
            alpha = opts.alpha0 * decay
            beta = opts.beta0 * decay / user_scale
            tau = opts.tau0 * decay / user_scale
            if use_ext:
                kernel.iterate_single(*state_args, 1.0, opts.rho, alpha,
                                      beta, tau, opts.sign, out,
                                      scratch_nk, scratch_n)
            else:
                kernel.iterate_single(*state_args, 1.0, opts.rho, alpha,
                                      beta, tau, opts.sign, out)
        elapsed = time.perf_counter() - t0
        gamma = out[0]
        if track_best and out[4] > best_value:
            best_value = out[4]
            best_F = entry_F
        if not np.isfinite(gamma):
            raise SolverError(
                f"non-finite value from the shared-target update at iteration {r}"
            )
        # the array-level checks are hoisted out of the hot path
        if r % 8 == 0 or r == opts.max_iters:
            _check_finite(_block_values(st), r)
        min_sinr = (_projected_min_sinr(st["F"], H, sig2n,
                                        opts.report_projection)
                    if opts.track_sinr else None)
        _record(trace, opts, st["F"], gamma, min_sinr,
                np.sqrt(max(out[1], 0.0)), np.sqrt(max(out[2], 0.0)), out[3],
                elapsed)
        if _stop(gamma_prev, gamma, opts.epsilon):
            trace.converged = True
            break
        gamma_prev = gamma
    _check_finite(_block_values(st), trace.iterations)
    if track_best:
        final = sinr_all(updates.project_feasible(st["F"], 1.0), H, sig2n)
        if best_F is not None and best_value > float(final.min()):
            return best_F, trace
    return st["F"], trace


def _block_values(st):
    return (
        ("per-element copy update", st["GR"]),
        ("per-user copy update", st["Tmat"]),
        ("per-user target update", st["eta"]),
        ("consensus average", st["F"]),
    )


def _user_step_scale(opts, n, sig2n):
    """Single-step mode only: the per-user subgradients scale with the
    constraint terms ~ (|u|^2 + sigma^2) = O(N + sigma^2) in normalized
    units, so the decayed steps are referred to that scale."""
    if opts.scale_user_steps:
        return (sig2n + n) / 2.0
    return np.ones_like(sig2n)


def _solve_reference(H, sig2n, n, k, opts, rng):
    """Materialized route: every copy, error term and multiplier held as the
    full object and advanced through the update functions one at a time."""
    F0 = _draw_full_power(n, k, 1.0, rng)
    gamma0 = float(np.min(sinr_all(F0, H, sig2n)))
    st = AdmmState(
        F=F0, gamma=gamma0,
        Gamma=np.repeat(F0[None, :, :], n, axis=0),
        Psi=np.repeat(F0[None, :, :], k, axis=0),
        eta=np.full(k, gamma0),
        Xi=np.zeros((n, n, k), dtype=complex),
        Lam=np.zeros((k, n, k), dtype=complex),
        xi=np.zeros(k), lam=np.zeros(n), mu=np.zeros(k), theta=np.zeros(k),
        anchor=np.repeat(F0[None, :, :], k, axis=0),
    )
    trace = SolveTrace()
    gamma_prev = gamma0
    best_value = -np.inf
    best_F = None
    for r in range(1, opts.max_iters + 1):
        t0 = time.perf_counter()
        if opts.return_best and opts.multiplier_solve == "exact":
            current = sinr_all(updates.project_feasible(st.F, 1.0), H, sig2n)
            if float(current.min()) > best_value:
                best_value = float(current.min())
                best_F = st.F.copy()
        reference_iteration(st, H, sig2n, 1.0, opts, iteration=r)
        elapsed = time.perf_counter() - t0
        _check_finite(
            (
                ("shared-target update", st.gamma),
                ("per-element copy update", st.Gamma),
                ("per-user copy update", st.Psi),
                ("per-user target update", st.eta),
                ("consensus average", st.F),
            ),
            r,
        )
        res_g = float(np.max(np.linalg.norm(st.Gamma - st.F, axis=(1, 2))))
        res_p = float(np.max(np.linalg.norm(st.Psi - st.F, axis=(1, 2))))
        res_eta = float(np.max(np.abs(st.eta - st.gamma)))
        min_sinr = (_projected_min_sinr(st.F, H, sig2n, opts.report_projection)
                    if opts.track_sinr else None)
        _record(trace, opts, st.F, st.gamma, min_sinr, res_g, res_p, res_eta,
                elapsed)
        if _stop(gamma_prev, st.gamma, opts.epsilon):
            trace.converged = True
            break
        gamma_prev = st.gamma
    if opts.return_best and opts.multiplier_solve == "exact":
        final = sinr_all(updates.project_feasible(st.F, 1.0), H, sig2n)
        if best_F is not None and best_value > float(final.min()):
            return best_F, trace
    return st.F, trace


def reference_iteration(st: AdmmState, H, sig2n, p_max, opts, iteration=1):
    """One full outer iteration on a materialized state (in place), block by
    block in algorithm order."""
    n, k = st.F.shape
    sign = opts.sign
    exact = opts.multiplier_solve == "exact"
    if not exact:
        decay = iteration**-opts.step_decay
        user_scale = _user_step_scale(opts, n, sig2n)
        alpha = opts.alpha0 * decay
        beta = opts.beta0 * decay / user_scale
        tau = opts.tau0 * decay / user_scale

    st.gamma = updates.update_gamma(st.eta, st.xi, opts.rho)

    for idx in range(n):
        if exact:
            st.lam[idx] = updates.converged_lambda(st.F, st.Xi[idx], idx, p_max)
            st.Gamma[idx] = updates.update_Gamma(st.F, st.Xi[idx], st.lam[idx], idx)
        else:
            for _ in range(opts.inner_steps):
                st.Gamma[idx] = updates.update_Gamma(
                    st.F, st.Xi[idx], st.lam[idx], idx)
                st.lam[idx] = updates.update_lambda(
                    st.lam[idx], st.Gamma[idx], idx, p_max, alpha, sign)

    if exact:
        supply = sinr_all(updates.project_feasible(st.F, p_max), H, sig2n)
        mu_cap = opts.mu_rate * (n + k)
    new_anchor = np.empty_like(st.Psi)
    for u in range(k):
        h = H[u]
        if exact:
            # demand from the consensus pull, clamped to the annealed
            # headroom over the achievable level; linearization anchored at
            # the consensus beamformer
            demand = st.gamma - st.xi[u]
            if opts.trust_gain > 0:
                demand = min(demand,
                             (1.0 + opts.trust_gain / iteration) * supply[u])
            hn2 = float(np.real(np.conj(h) @ h))
            proj_base = np.conj(h) @ (st.F - st.Lam[u])
            anchor_amp = np.conj(h) @ st.F[:, u]
            st.mu[u] = updates.converged_mu(
                demand, proj_base, hn2, sig2n[u], anchor_amp, u, mu_cap)
            st.Psi[u] = updates.update_Psi(
                st.F, st.Lam[u], h, st.mu[u], max(demand, 0.0), st.F, u)
        else:
            for _ in range(opts.inner_steps):
                st.Psi[u] = updates.update_Psi(
                    st.F, st.Lam[u], h, st.mu[u], max(st.eta[u], 0.0),
                    st.anchor[u], u)
                lb = updates.sca_lower_bound(st.Psi[u], st.anchor[u], h, u)
                viol = updates.sinr_violation(
                    st.Psi[u], h, st.eta[u], sig2n[u], u, lb=lb)
                st.mu[u] = updates.update_mu(st.mu[u], beta[u], viol, sign)
        new_anchor[u] = st.Psi[u]

    for u in range(k):
        h = H[u]
        proj = np.abs(updates.user_projections(st.Psi[u], h)) ** 2
        interf = float(proj.sum() - proj[u]) + sig2n[u]
        if exact:
            st.eta[u], st.theta[u] = updates.converged_eta_theta(
                st.gamma, st.xi[u], float(proj[u]) / interf, interf)
        else:
            for _ in range(opts.inner_steps):
                st.eta[u] = updates.update_eta(
                    st.gamma, st.xi[u], st.theta[u], interf)
                viol = updates.sinr_violation(
                    st.Psi[u], h, st.eta[u], sig2n[u], u)
                st.theta[u] = updates.update_theta(
                    st.theta[u], tau[u], viol, sign)

    st.F = updates.update_F(st.Psi, st.Lam, st.Gamma, st.Xi)
    updates.update_errors(st)
    st.anchor = new_anchor
    st.r += 1
