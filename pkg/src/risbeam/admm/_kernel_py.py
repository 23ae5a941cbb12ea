"""NumPy fallback of the iteration kernels.

Both backends advance a structured solver state that stores, instead of the
N + K full matrix copies, only what the closed forms can make differ from the
shared beamformer:

* ``F``       (N,K)  shared beamformer
* ``D``       (N,K)  common error component; every Xi_n equals D outside its
                     own row n and every Lam_k equals D plus a rank-one term
                     (exactly F_prev - F once the recursions start from zero)
* ``XiR``     (N,K)  row n holds row n of Xi_n
* ``GR``      (N,K)  row n holds row n of Gamma_n (its only non-shared row)
* ``Cmat``    (K,K)  Lam_k = D + h_k Cmat[k, :]^T
* ``PsiBase`` (N,K)  F - D of the iteration that produced the current Psi
* ``Tmat``    (K,K)  Psi_k = PsiBase - h_k Tmat[k, :]^T
* ``ua``      (K,)   receive amplitudes h_k^H Psi_k[:, k] (the SCA anchors of
                     the single-step mode)

``iterate_single`` performs the literal algorithm iteration: one projected
subgradient step per multiplier per outer pass, SCA anchored at the previous
Psi copies. ``iterate_exact`` drives each sub-problem's multiplier to its
inner fixed point (row projection for the power copies, scalar bisection for
the SINR copies, complementary slackness for the targets), anchors the SINR
linearization at the consensus beamformer, and reads the per-user demand from
the consensus pull gamma - xi clamped to ``trust`` times the projected
beamformer's actual SINR.

Both leave [gamma, max_n ||Gamma_n - F||_F^2, max_k ||Psi_k - F||_F^2,
max_k |eta_k - gamma|] in ``out`` (norms against the new F);
``iterate_exact`` additionally leaves the entry beamformer's projected
min-SINR in out[4].
"""

import numpy as np


def iterate_single(F, D, GR, XiR, Cmat, PsiBase, Tmat, ua, eta, xi, lam, mu,
                   th, H, hn2, sig2, p_max, rho, alpha, beta, tau, sign, out):
    n_el, k_users = F.shape
    diag = np.arange(k_users)

    gam = (1.0 + rho * float(np.sum(eta + xi))) / (rho * k_users)

    # per-element copies, one multiplier step each
    np.subtract(F, XiR, out=GR)
    GR /= (1.0 + lam)[:, None]
    power = np.sum(np.abs(GR) ** 2, axis=1)
    np.maximum(0.0, lam + sign * alpha * (power - p_max), out=lam)

    # per-user copies via the structured inverse, batched over users
    np.subtract(F, D, out=PsiBase)
    proj = np.conj(H) @ PsiBase                  # proj[k, j] = h_k^H (F-D)[:, j]
    eta_old = eta.copy()
    gain = mu * np.maximum(eta_old, 0.0)
    coef = gain / (1.0 + gain * hn2)
    Tmat[...] = Cmat + coef[:, None] * (proj - Cmat * hn2[:, None])
    Tmat[diag, diag] = Cmat[diag, diag] - mu * ua
    U = proj - Tmat * hn2[:, None]               # u[k, j] = h_k^H Psi_k[:, j]
    u_sig = U[diag, diag].copy()
    pw = np.abs(U) ** 2
    interf = pw.sum(axis=1) - pw[diag, diag] + sig2
    lb = 2.0 * np.real(np.conj(ua) * u_sig) - np.abs(ua) ** 2
    np.maximum(0.0, mu + sign * beta * (eta_old * interf - lb), out=mu)

    # per-user targets, one multiplier step each
    eta_new = gam - xi - 0.5 * th * interf
    np.maximum(0.0, th + sign * tau * (eta_new * interf - np.abs(u_sig) ** 2),
               out=th)

    _finish(F, D, GR, XiR, Cmat, PsiBase, Tmat, ua, eta, xi, H, hn2, gam,
            eta_new, u_sig, out)


def iterate_exact(F, D, GR, XiR, Cmat, PsiBase, Tmat, ua, eta, xi, lam, mu,
                  th, H, hn2, sig2, p_max, rho, mu_cap, trust, out):
    n_el, k_users = F.shape
    diag = np.arange(k_users)

    gam = (1.0 + rho * float(np.sum(eta + xi))) / (rho * k_users)

    # achievable per-user SINR of the entry beamformer, rows projected onto
    # the power cap: the incorruptible supply reference for the demand clamp
    fp = np.sum(np.abs(F) ** 2, axis=1)
    fscale = np.where(fp > p_max, np.sqrt(p_max / np.maximum(fp, 1e-300)), 1.0)
    up = np.conj(H) @ (F * fscale[:, None])
    pw_p = np.abs(up) ** 2
    sig_p = pw_p[diag, diag]
    supply = sig_p / (pw_p.sum(axis=1) - sig_p + sig2)

    # per-element copies: exact projection onto the power cap
    rows = F - XiR
    power = np.sum(np.abs(rows) ** 2, axis=1)
    scale = np.where(power > p_max,
                     np.sqrt(p_max / np.maximum(power, 1e-300)), 1.0)
    GR[...] = rows * scale[:, None]
    lam[...] = 1.0 / scale - 1.0

    # per-user copies: bisection for the converged SINR multiplier, SCA
    # anchored at the consensus beamformer
    np.subtract(F, D, out=PsiBase)
    proj = np.conj(H) @ PsiBase
    proj_base = proj - Cmat * hn2[:, None]       # h_k^H (F - Lam_k) per column
    anchor = np.einsum("kn,nk->k", np.conj(H), F)
    demand_raw = gam - xi
    demand = np.minimum(demand_raw, trust * supply) if trust > 0 else demand_raw
    dem_pos = np.maximum(demand, 0.0)
    for k in range(k_users):
        pb = proj_base[k]
        pw_b = np.abs(pb) ** 2
        interf0 = float(pw_b.sum() - pw_b[k])
        lb0 = (2.0 * np.real(np.conj(anchor[k]) * pb[k])
               - np.abs(anchor[k]) ** 2)
        ua2 = float(np.abs(anchor[k]) ** 2) * hn2[k]
        dk, hk = dem_pos[k], hn2[k]

        def slack(m):
            return (demand[k] * (interf0 / (1.0 + m * dk * hk) ** 2 + sig2[k])
                    - lb0 - 2.0 * m * ua2)

        if slack(0.0) <= 0.0:
            mu[k] = 0.0
            continue
        hi = min(1.0, mu_cap)
        while slack(hi) > 0.0 and hi < mu_cap:
            hi = min(2.0 * hi, mu_cap)
        if slack(hi) > 0.0:
            mu[k] = mu_cap
        else:
            lo = 0.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if slack(mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            mu[k] = 0.5 * (lo + hi)

    gain = mu * dem_pos
    coef = gain / (1.0 + gain * hn2)
    Tmat[...] = Cmat + coef[:, None] * proj_base
    Tmat[diag, diag] = Cmat[diag, diag] - mu * anchor
    U = proj - Tmat * hn2[:, None]
    u_sig = U[diag, diag].copy()
    pw = np.abs(U) ** 2
    interf = pw.sum(axis=1) - pw[diag, diag] + sig2

    # per-user targets: complementary-slackness fixed point
    sinr_copy = np.abs(u_sig) ** 2 / interf
    eta_new = np.minimum(demand_raw, sinr_copy)
    th[...] = 2.0 * np.maximum(demand_raw - sinr_copy, 0.0) / interf

    _finish(F, D, GR, XiR, Cmat, PsiBase, Tmat, ua, eta, xi, H, hn2, gam,
            eta_new, u_sig, out)
    out[4] = float(supply.min())


def _finish(F, D, GR, XiR, Cmat, PsiBase, Tmat, ua, eta, xi, H, hn2, gam,
            eta_new, u_sig, out):
    """Shared tail: target bookkeeping, consensus average, residual norms and
    the error-term recursion."""
    n_el, k_users = F.shape
    xi += eta_new - gam
    eta[...] = eta_new
    ua[...] = u_sig

    delta = Cmat - Tmat
    Fnew = F + (H.T @ delta + GR + XiR - F) / (k_users + n_el)

    Moff = PsiBase - Fnew
    row2 = np.sum(np.abs(Moff) ** 2, axis=1)
    moff2 = float(row2.sum())
    res_g2 = moff2 - row2 + np.sum(np.abs(GR - Fnew) ** 2, axis=1)
    HM = np.conj(H) @ Moff
    res_p2 = (moff2
              - 2.0 * np.real(np.einsum("kj,kj->k", np.conj(Tmat), HM))
              + np.sum(np.abs(Tmat) ** 2, axis=1) * hn2)

    XiR += GR - Fnew
    np.subtract(F, Fnew, out=D)
    F[...] = Fnew
    Cmat[...] = delta

    out[0] = gam
    out[1] = float(np.max(res_g2))
    out[2] = float(np.max(res_p2))
    out[3] = float(np.max(np.abs(eta_new - gam)))
