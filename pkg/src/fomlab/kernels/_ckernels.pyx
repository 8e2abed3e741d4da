# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors kernels._ref exactly; see that module for
the derivations. Tested against the NumPy reference in the suite."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, sinh, tanh, fabs

cnp.import_array()

DEF MAX_LAYERS = 8


def cap_series_sums(double alpha, double rel_tol, long max_terms):
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    cdef double cota = 1.0 / tanh(alpha)
    cdef double inv_sinh2_a = 1.0 / (sinh(alpha) * sinh(alpha))
    cdef double total = 0.0, total_d = 0.0
    cdef double na, em, em2, s_inv, cn, t, dt, fn
    cdef long n, streak = 0
    for n in range(1, max_terms + 1):
        fn = <double> n
        na = fn * alpha
        em = exp(-na)
        em2 = em * em
        s_inv = 2.0 * em / (1.0 - em2)
        cn = (1.0 + em2) / (1.0 - em2)
        t = s_inv * (cota - fn * cn)
        dt = s_inv * (-inv_sinh2_a - fn * cota * cn + fn * fn * (s_inv * s_inv + cn * cn))
        total += t
        total_d += dt
        if fabs(t) < rel_tol * fabs(total) and fabs(dt) < rel_tol * fabs(total_d):
            streak += 1
            if streak >= 3:
                return total, total_d, n, True
        else:
            streak = 0
    return total, total_d, max_terms, False


cdef inline void _stack_r(double kap0, double kx2, double xi_c2, double eps_gap,
                          double *eps_l, double *thick, int n_layers,
                          double *rtm_out, double *rte_out) nogil:
    cdef double kaps[MAX_LAYERS]
    cdef int j
    cdef double eps_out, kap_out, eps_in, kap_in, rtm, rte, ph, acc_tm, acc_te
    cdef bint have = False
    for j in range(n_layers):
        kaps[j] = sqrt(kx2 + eps_l[j] * xi_c2)
    eps_out = eps_l[n_layers - 1]
    kap_out = kaps[n_layers - 1]
    acc_tm = 0.0
    acc_te = 0.0
    for j in range(n_layers - 2, -1, -1):
        eps_in = eps_l[j]
        kap_in = kaps[j]
        rtm = (eps_out * kap_in - eps_in * kap_out) / (eps_out * kap_in + eps_in * kap_out)
        rte = (kap_in - kap_out) / (kap_in + kap_out)
        if not have:
            acc_tm = rtm
            acc_te = rte
            have = True
        else:
            ph = exp(-2.0 * kap_out * thick[j + 1])
            acc_tm = (rtm + acc_tm * ph) / (1.0 + rtm * acc_tm * ph)
            acc_te = (rte + acc_te * ph) / (1.0 + rte * acc_te * ph)
        eps_out = eps_in
        kap_out = kap_in
    rtm = (eps_out * kap0 - eps_gap * kap_out) / (eps_out * kap0 + eps_gap * kap_out)
    rte = (kap0 - kap_out) / (kap0 + kap_out)
    if not have:
        rtm_out[0] = rtm
        rte_out[0] = rte
        return
    ph = exp(-2.0 * kap_out * thick[0])
    rtm_out[0] = (rtm + acc_tm * ph) / (1.0 + rtm * acc_tm * ph)
    rte_out[0] = (rte + acc_te * ph) / (1.0 + rte * acc_te * ph)


def lifshitz_terms(double d,
                   cnp.ndarray[cnp.float64_t, ndim=1] xi_c,
                   cnp.ndarray[cnp.float64_t, ndim=1] eps_gap,
                   cnp.ndarray[cnp.float64_t, ndim=2] eps_a,
                   cnp.ndarray[cnp.float64_t, ndim=1] t_a,
                   cnp.ndarray[cnp.float64_t, ndim=2] eps_b,
                   cnp.ndarray[cnp.float64_t, ndim=1] t_b,
                   cnp.ndarray[cnp.float64_t, ndim=1] u_nodes,
                   cnp.ndarray[cnp.float64_t, ndim=1] u_weights):
    cdef int nf = xi_c.shape[0]
    cdef int nn = u_nodes.shape[0]
    cdef int la = eps_a.shape[1]
    cdef int lb = eps_b.shape[1]
    if la > MAX_LAYERS or lb > MAX_LAYERS:
        raise ValueError("too many layers for the compiled kernel")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nf)
    cdef double ea[MAX_LAYERS]
    cdef double eb[MAX_LAYERS]
    cdef double ta[MAX_LAYERS]
    cdef double tb[MAX_LAYERS]
    cdef int i, m, j
    cdef double xc2, xi2, kap_min, kap, kx2, ex, rr, term, acc
    cdef double rtm_a, rte_a, rtm_b, rte_b
    for j in range(la):
        ta[j] = t_a[j]
    for j in range(lb):
        tb[j] = t_b[j]
    for i in range(nf):
        xi2 = xi_c[i] * xi_c[i]
        xc2 = eps_gap[i] * xi2
        kap_min = sqrt(xc2)
        for j in range(la):
            ea[j] = eps_a[i, j]
        for j in range(lb):
            eb[j] = eps_b[i, j]
        acc = 0.0
        for m in range(nn):
            kap = kap_min + u_nodes[m] / (2.0 * d)
            kx2 = kap * kap - xc2
            _stack_r(kap, kx2, xi2, eps_gap[i], ea, ta, la, &rtm_a, &rte_a)
            _stack_r(kap, kx2, xi2, eps_gap[i], eb, tb, lb, &rtm_b, &rte_b)
            ex = exp(-u_nodes[m] - 2.0 * kap_min * d)
            rr = rtm_a * rtm_b * ex
            term = rr / (1.0 - rr)
            rr = rte_a * rte_b * ex
            term += rr / (1.0 - rr)
            acc += u_weights[m] * kap * kap * term
        out[i] = acc / (2.0 * d)
    return out
