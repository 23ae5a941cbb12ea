# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled iteration kernels: the same structured updates as _kernel_py,
with the per-element and per-user blocks as plain C loops. See _kernel_py for
the state layout, the two modes and the meaning of ``out``."""

from libc.math cimport sqrt


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _finish(double complex[:, ::1] F, double complex[:, ::1] D,
                  double complex[:, ::1] GR, double complex[:, ::1] XiR,
                  double complex[:, ::1] Cmat, double complex[:, ::1] PsiBase,
                  double complex[:, ::1] Tmat, double complex[:, ::1] H,
                  double[::1] hn2, double gam, double[::1] eta,
                  double[::1] out, double complex[:, ::1] scratch_nk,
                  double[::1] scratch_n) noexcept:
    """Consensus average, residual norms, error recursion, state rotation."""
    cdef Py_ssize_t n_el = F.shape[0]
    cdef Py_ssize_t k_users = F.shape[1]
    cdef Py_ssize_t n, j, k
    cdef double scale = 1.0 / (k_users + n_el)
    cdef double moff2, row2, res2, res_g2_max, res_p2_max, res_eta, g
    cdef double complex acc, z, d

    for n in range(n_el):
        for j in range(k_users):
            acc = GR[n, j] + XiR[n, j] - F[n, j]
            for k in range(k_users):
                acc = acc + H[k, n] * (Cmat[k, j] - Tmat[k, j])
            scratch_nk[n, j] = F[n, j] + acc * scale

    moff2 = 0.0
    for n in range(n_el):
        row2 = 0.0
        for j in range(k_users):
            row2 += cabs2(PsiBase[n, j] - scratch_nk[n, j])
        scratch_n[n] = row2
        moff2 += row2

    res_g2_max = 0.0
    for n in range(n_el):
        res2 = 0.0
        for j in range(k_users):
            res2 += cabs2(GR[n, j] - scratch_nk[n, j])
        g = moff2 - scratch_n[n] + res2
        if g > res_g2_max:
            res_g2_max = g

    res_p2_max = 0.0
    for k in range(k_users):
        res2 = moff2
        for j in range(k_users):
            acc = 0
            for n in range(n_el):
                acc = acc + H[k, n].conjugate() * (PsiBase[n, j] - scratch_nk[n, j])
            res2 += cabs2(Tmat[k, j]) * hn2[k] \
                - 2.0 * (Tmat[k, j].conjugate() * acc).real
        if res2 > res_p2_max:
            res_p2_max = res2

    res_eta = 0.0
    for k in range(k_users):
        g = eta[k] - gam
        if g < 0.0:
            g = -g
        if g > res_eta:
            res_eta = g

    for n in range(n_el):
        for j in range(k_users):
            z = scratch_nk[n, j]
            XiR[n, j] = XiR[n, j] + GR[n, j] - z
            D[n, j] = F[n, j] - z
            F[n, j] = z
    for k in range(k_users):
        for j in range(k_users):
            Cmat[k, j] = Cmat[k, j] - Tmat[k, j]

    out[0] = gam
    out[1] = res_g2_max
    out[2] = res_p2_max
    out[3] = res_eta


def iterate_single(double complex[:, ::1] F, double complex[:, ::1] D,
                   double complex[:, ::1] GR, double complex[:, ::1] XiR,
                   double complex[:, ::1] Cmat, double complex[:, ::1] PsiBase,
                   double complex[:, ::1] Tmat, double complex[::1] ua,
                   double[::1] eta, double[::1] xi, double[::1] lam,
                   double[::1] mu, double[::1] th,
                   double complex[:, ::1] H, double[::1] hn2, double[::1] sig2,
                   double p_max, double rho, double alpha,
                   double[::1] beta, double[::1] tau, double sign,
                   double[::1] out,
                   double complex[:, ::1] scratch_nk, double[::1] scratch_n):
    cdef Py_ssize_t n_el = F.shape[0]
    cdef Py_ssize_t k_users = F.shape[1]
    cdef Py_ssize_t n, j, k
    cdef double gam, s, pw, g, scale, interf, lb, eta_old, eta_new
    cdef double complex p, t, u, u_sig

    s = 0.0
    for k in range(k_users):
        s += eta[k] + xi[k]
    gam = (1.0 + rho * s) / (rho * k_users)

    for n in range(n_el):
        scale = 1.0 / (1.0 + lam[n])
        pw = 0.0
        for j in range(k_users):
            u = (F[n, j] - XiR[n, j]) * scale
            GR[n, j] = u
            pw += cabs2(u)
        g = lam[n] + sign * alpha * (pw - p_max)
        lam[n] = g if g > 0.0 else 0.0

    for n in range(n_el):
        for j in range(k_users):
            PsiBase[n, j] = F[n, j] - D[n, j]

    for k in range(k_users):
        eta_old = eta[k]
        g = eta_old if eta_old > 0.0 else 0.0
        scale = mu[k] * g / (1.0 + mu[k] * g * hn2[k])
        interf = 0.0
        u_sig = 0
        for j in range(k_users):
            p = 0
            for n in range(n_el):
                p = p + H[k, n].conjugate() * PsiBase[n, j]
            if j == k:
                t = Cmat[k, k] - mu[k] * ua[k]
            else:
                t = Cmat[k, j] + scale * (p - Cmat[k, j] * hn2[k])
            Tmat[k, j] = t
            u = p - t * hn2[k]
            if j == k:
                u_sig = u
            else:
                interf += cabs2(u)
        interf += sig2[k]
        lb = 2.0 * (ua[k].conjugate() * u_sig).real - cabs2(ua[k])
        g = mu[k] + sign * beta[k] * (eta_old * interf - lb)
        mu[k] = g if g > 0.0 else 0.0

        eta_new = gam - xi[k] - 0.5 * th[k] * interf
        g = th[k] + sign * tau[k] * (eta_new * interf - cabs2(u_sig))
        th[k] = g if g > 0.0 else 0.0
        xi[k] = xi[k] + eta_new - gam
        eta[k] = eta_new
        ua[k] = u_sig

    _finish(F, D, GR, XiR, Cmat, PsiBase, Tmat, H, hn2, gam, eta, out,
            scratch_nk, scratch_n)




def iterate_exact(double complex[:, ::1] F, double complex[:, ::1] D,
                  double complex[:, ::1] GR, double complex[:, ::1] XiR,
                  double complex[:, ::1] Cmat, double complex[:, ::1] PsiBase,
                  double complex[:, ::1] Tmat, double complex[::1] ua,
                  double[::1] eta, double[::1] xi, double[::1] lam,
                  double[::1] mu, double[::1] th,
                  double complex[:, ::1] H, double[::1] hn2, double[::1] sig2,
                  double p_max, double rho,
                  double mu_cap, double trust, double[::1] out,
                  double complex[:, ::1] scratch_nk, double[::1] scratch_n,
                  double complex[:, ::1] scratch_kk, double[::1] scratch_k):
    cdef Py_ssize_t n_el = F.shape[0]
    cdef Py_ssize_t k_users = F.shape[1]
    cdef Py_ssize_t n, j, k, it
    cdef double gam, s, pw, g, interf0, lb0, ua2, demand, dem_pos
    cdef double lo, hi, mid, eta_new, interf, sinr_copy, supply_min
    cdef double complex p, t, u, anchor, u_sig

    s = 0.0
    for k in range(k_users):
        s += eta[k] + xi[k]
    gam = (1.0 + rho * s) / (rho * k_users)

    # achievable per-user SINR of the entry beamformer (rows projected onto
    # the power cap): the supply reference for the demand clamp; row scale
    # factors pass through scratch_n, receive amplitudes through scratch_kk
    for n in range(n_el):
        pw = 0.0
        for j in range(k_users):
            pw += cabs2(F[n, j])
        scratch_n[n] = sqrt(p_max / pw) if pw > p_max else 1.0
    for k in range(k_users):
        for j in range(k_users):
            p = 0
            for n in range(n_el):
                p = p + H[k, n].conjugate() * (F[n, j] * scratch_n[n])
            scratch_kk[k, j] = p
    supply_min = -1.0
    for k in range(k_users):
        interf = 0.0
        for j in range(k_users):
            if j != k:
                interf += cabs2(scratch_kk[k, j])
        scratch_k[k] = cabs2(scratch_kk[k, k]) / (interf + sig2[k])
        if supply_min < 0.0 or scratch_k[k] < supply_min:
            supply_min = scratch_k[k]
    out[4] = supply_min

    # exact projection of each power copy onto its cap
    for n in range(n_el):
        pw = 0.0
        for j in range(k_users):
            u = F[n, j] - XiR[n, j]
            GR[n, j] = u
            pw += cabs2(u)
        if pw > p_max:
            s = sqrt(p_max / pw)
            for j in range(k_users):
                GR[n, j] = GR[n, j] * s
            lam[n] = 1.0 / s - 1.0
        else:
            lam[n] = 0.0

    for n in range(n_el):
        for j in range(k_users):
            PsiBase[n, j] = F[n, j] - D[n, j]

    for k in range(k_users):
        # proj_base[j] = h_k^H (F - Lam_k)[:, j], stored in scratch_kk row k
        for j in range(k_users):
            p = 0
            for n in range(n_el):
                p = p + H[k, n].conjugate() * PsiBase[n, j]
            scratch_kk[k, j] = p - Cmat[k, j] * hn2[k]
        anchor = 0
        for n in range(n_el):
            anchor = anchor + H[k, n].conjugate() * F[n, k]

        demand = gam - xi[k]
        if trust > 0.0 and demand > trust * scratch_k[k]:
            demand = trust * scratch_k[k]
        dem_pos = demand if demand > 0.0 else 0.0
        interf0 = 0.0
        for j in range(k_users):
            if j != k:
                interf0 += cabs2(scratch_kk[k, j])
        lb0 = 2.0 * (anchor.conjugate() * scratch_kk[k, k]).real - cabs2(anchor)
        ua2 = cabs2(anchor) * hn2[k]

        # slack(m) = demand*(interf0/(1+m*dem_pos*hn2)^2 + sig2) - lb0 - 2 m ua2
        g = demand * (interf0 + sig2[k]) - lb0
        if g <= 0.0:
            mu[k] = 0.0
        else:
            hi = 1.0 if mu_cap > 1.0 else mu_cap
            while hi < mu_cap:
                s = 1.0 + hi * dem_pos * hn2[k]
                g = demand * (interf0 / (s * s) + sig2[k]) - lb0 - 2.0 * hi * ua2
                if g <= 0.0:
                    break
                hi = 2.0 * hi if 2.0 * hi < mu_cap else mu_cap
            s = 1.0 + hi * dem_pos * hn2[k]
            g = demand * (interf0 / (s * s) + sig2[k]) - lb0 - 2.0 * hi * ua2
            if g > 0.0:
                mu[k] = mu_cap
            else:
                lo = 0.0
                for it in range(80):
                    mid = 0.5 * (lo + hi)
                    s = 1.0 + mid * dem_pos * hn2[k]
                    g = demand * (interf0 / (s * s) + sig2[k]) - lb0 - 2.0 * mid * ua2
                    if g > 0.0:
                        lo = mid
                    else:
                        hi = mid
                mu[k] = 0.5 * (lo + hi)

        # copy coefficients and receive amplitudes at the solved multiplier
        s = mu[k] * dem_pos / (1.0 + mu[k] * dem_pos * hn2[k])
        interf = 0.0
        u_sig = 0
        for j in range(k_users):
            if j == k:
                t = Cmat[k, k] - mu[k] * anchor
            else:
                t = Cmat[k, j] + s * scratch_kk[k, j]
            Tmat[k, j] = t
            u = (scratch_kk[k, j] + Cmat[k, j] * hn2[k]) - t * hn2[k]
            if j == k:
                u_sig = u
            else:
                interf += cabs2(u)
        interf += sig2[k]

        sinr_copy = cabs2(u_sig) / interf
        demand = gam - xi[k]          # unclamped target for eta/theta
        if demand <= sinr_copy:
            eta_new = demand
            th[k] = 0.0
        else:
            eta_new = sinr_copy
            th[k] = 2.0 * (demand - sinr_copy) / interf
        xi[k] = xi[k] + eta_new - gam
        eta[k] = eta_new
        ua[k] = u_sig

    _finish(F, D, GR, XiR, Cmat, PsiBase, Tmat, H, hn2, gam, eta, out,
            scratch_nk, scratch_n)
