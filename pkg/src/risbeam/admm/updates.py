"""Closed-form block updates of the consensus solver, one function per
sub-problem, written against plain arrays. These are the reference route:
the production kernels reproduce them through a structured state, and the
tests pin both against each other and against the finite-difference
stationarity oracles."""

import numpy as np


def clip_multiplier(value, step, violation, sign) -> float:
    """Projected multiplier move [value + sign * step * violation]^+;
    sign=+1 is projected dual ascent, sign=-1 the as-printed variant."""
    return max(0.0, value + sign * step * violation)


def update_gamma(eta, xi, rho) -> float:
    """Maximizer of the penalized objective over the shared SINR target:
    gamma = (1 + rho * sum_k (eta_k + xi_k)) / (rho * K)."""
    eta = np.asarray(eta, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return float((1.0 + rho * np.sum(eta + xi)) / (rho * eta.size))


def update_Gamma(F, Xi_n, lam_n, n) -> np.ndarray:
    """Per-element copy: Gamma_n equals F - Xi_n except row n, which the
    diagonal inverse divides by (1 + lam_n)."""
    out = F - Xi_n
    out[n, :] /= 1.0 + lam_n
    return out


def power_violation(Gamma_n, n, p_max) -> float:
    """Constraint slack of element n: sum_k |Gamma_n[n, k]|^2 - P_t."""
    return float(np.sum(np.abs(Gamma_n[n, :]) ** 2) - p_max)


def update_lambda(lam_n, Gamma_n, n, p_max, alpha, sign=1.0) -> float:
    """One projected step of element n's power multiplier."""
    return clip_multiplier(lam_n, alpha, power_violation(Gamma_n, n, p_max), sign)


def user_projections(Psi_k, h_k) -> np.ndarray:
    """u_i = h_k^H Psi_k[:, i] for every column i (the per-stream receive
    amplitudes at user k under the copy Psi_k)."""
    return np.conj(h_k) @ Psi_k


def sca_lower_bound(Psi_k, anchor_k, h_k, k) -> float:
    """First-order minorant of the signal power |h_k^H Psi_k[:, k]|^2 around
    the anchor iterate: 2 Re(u_r^* u) - |u_r|^2.

    The linearization includes the conjugate-coordinate pair of the
    vectorized expansion, so it is the exact first-order Taylor expansion of
    the convex quadratic; the gap to the true value is |u - u_r|^2 >= 0 and
    the bound is tight at the anchor.
    """
    u = np.conj(h_k) @ Psi_k[:, k]
    u_r = np.conj(h_k) @ anchor_k[:, k]
    return float(2.0 * np.real(np.conj(u_r) * u) - np.abs(u_r) ** 2)


def update_Psi(F, Lam_k, h_k, mu_k, eta_k, anchor_k, k) -> np.ndarray:
    """Per-user copy via the structured inverse.

    The masked normal matrix I + mu*eta * sum_{i != k} (H_k o A_i) is block
    diagonal with one N x N block per column: block i != k is the rank-one
    update I + mu*eta h h^H (inverted by Sherman-Morrison), block k is the
    identity. The right-hand side adds the anchor pull mu (h^H anchor_k) h to
    column k of F - Lam_k.
    """
    cvec = F - Lam_k
    out = cvec.copy()
    hn2 = float(np.real(np.conj(h_k) @ h_k))
    coef = mu_k * eta_k / (1.0 + mu_k * eta_k * hn2)
    proj = np.conj(h_k) @ cvec          # (K,)
    out -= np.outer(h_k, coef * proj)
    out[:, k] = cvec[:, k] + mu_k * (np.conj(h_k) @ anchor_k[:, k]) * h_k
    return out


def sinr_violation(Psi_k, h_k, eta_k, noise_k, k, lb=None) -> float:
    """Slack of user k's SINR constraint under the copy Psi_k:
    eta_k * (interference + noise) - signal, with the signal term replaced by
    the convexified lower bound when ``lb`` is given."""
    u = user_projections(Psi_k, h_k)
    pw = np.abs(u) ** 2
    interference = float(pw.sum() - pw[k])
    signal = float(pw[k]) if lb is None else lb
    return eta_k * (interference + noise_k) - signal


def update_mu(mu_k, beta, violation, sign=1.0) -> float:
    """One projected step of user k's SINR multiplier (violation computed
    with the lower-bounded signal term)."""
    return clip_multiplier(mu_k, beta, violation, sign)


def update_eta(gamma, xi_k, theta_k, interference_plus_noise) -> float:
    """Minimizer of the per-user scalar sub-problem:
    eta = gamma - xi - (theta/2) * (interference + noise)."""
    return float(gamma - xi_k - 0.5 * theta_k * interference_plus_noise)


def update_theta(theta_k, tau, violation, sign=1.0) -> float:
    """One projected step of user k's target-coupling multiplier (violation
    computed with the plain signal term)."""
    return clip_multiplier(theta_k, tau, violation, sign)


def update_F(Psi, Lam, Gamma, Xi) -> np.ndarray:
    """Consensus average: F = (sum_k (Psi_k + Lam_k) + sum_n (Gamma_n + Xi_n))
    / (K + N)."""
    k_users = Psi.shape[0]
    n_el = Gamma.shape[0]
    return ((Psi + Lam).sum(axis=0) + (Gamma + Xi).sum(axis=0)) / (k_users + n_el)


def update_errors(state) -> None:
    """Accumulate the consensus gaps into the error terms (in place):
    xi_k += eta_k - gamma, Xi_n += Gamma_n - F, Lam_k += Psi_k - F."""
    state.xi += state.eta - state.gamma
    state.Xi += state.Gamma - state.F[None, :, :]
    state.Lam += state.Psi - state.F[None, :, :]


def project_feasible(F, p_max) -> np.ndarray:
    """Scale any row whose power exceeds P_t back to the boundary; feasible
    input passes through unchanged."""
    F = np.asarray(F, dtype=complex)
    if not p_max > 0:
        raise ValueError("p_max must be > 0")
    power = np.sum(np.abs(F) ** 2, axis=1)
    scale = np.where(power > p_max, np.sqrt(p_max / np.maximum(power, 1e-300)), 1.0)
    return F * scale[:, None]


# ---------------------------------------------------------------------------
# Converged-multiplier forms. Each sub-problem's Lagrangian multiplier admits
# a closed form (or a monotone scalar equation) at its inner fixed point;
# these are the "multipliers driven to convergence" the source algorithm asks
# for and the solver's default mode.

def converged_lambda(F, Xi_n, n, p_max) -> float:
    """Multiplier at which the n-th power copy sits exactly on its cap:
    lambda* = sqrt(power / P_t) - 1 when violated, else 0."""
    power = np.sum(np.abs((F - Xi_n)[n, :]) ** 2)
    return float(max(0.0, np.sqrt(power / p_max) - 1.0))


def mu_constraint_slack(mu, demand, proj_base, hn2, noise_k, anchor_amp, k) -> float:
    """Slack of the convexified SINR constraint of one user copy as a scalar
    function of its multiplier.

    ``proj_base`` holds h^H (F - Lam_k) per column; under the structured
    inverse the copy's receive amplitudes are u_i = proj_base_i /
    (1 + mu * demand * hn2) for i != k and u_k = proj_base_k +
    mu * anchor_amp * hn2, so the slack
    demand * (sum_{i != k} |u_i|^2 + noise) - lb(mu) is strictly decreasing
    in mu whenever demand > 0.
    """
    dem_pos = max(demand, 0.0)
    den = (1.0 + mu * dem_pos * hn2) ** 2
    pw = np.abs(proj_base) ** 2
    interference = (pw.sum() - pw[k]) / den
    lb0 = 2.0 * np.real(np.conj(anchor_amp) * proj_base[k]) - np.abs(anchor_amp) ** 2
    return float(demand * (interference + noise_k)
                 - lb0 - 2.0 * mu * np.abs(anchor_amp) ** 2 * hn2)


def converged_mu(demand, proj_base, hn2, noise_k, anchor_amp, k, mu_cap) -> float:
    """Smallest multiplier satisfying the copy's convexified SINR constraint,
    by bisection on the monotone slack; saturates at ``mu_cap`` when the
    demand is out of reach of this sub-problem."""
    def slack(mu):
        return mu_constraint_slack(mu, demand, proj_base, hn2, noise_k,
                                   anchor_amp, k)

    if slack(0.0) <= 0.0:
        return 0.0
    hi = min(1.0, mu_cap)
    while slack(hi) > 0.0 and hi < mu_cap:
        hi = min(2.0 * hi, mu_cap)
    if slack(hi) > 0.0:
        return float(mu_cap)
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if slack(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def converged_eta_theta(gamma, xi_k, sinr_copy_k, interference_plus_noise):
    """Fixed point of the per-user target sub-problem: eta is the projection
    of gamma - xi onto eta <= SINR_k(Psi), theta its complementary-slackness
    multiplier."""
    target = gamma - xi_k
    if target <= sinr_copy_k:
        return float(target), 0.0
    return float(sinr_copy_k), float(
        2.0 * (target - sinr_copy_k) / interference_plus_noise
    )
