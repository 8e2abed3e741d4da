"""Pure-NumPy reference implementations of the hot kernels.

These are the fallback used when the Cython extension is unavailable, and
the ground truth the compiled kernels are tested against.
"""
import numpy as np

_CHUNK = 256


def _series_chunk(alpha, n):
    """Terms t_n of the capacitance series and their alpha-derivatives.

    t_n = (coth(a) - n coth(na)) / sinh(na), written with exp(-na) so that
    large n*alpha never overflows.
    """
    na = n * alpha
    em = np.exp(-na)
    em2 = em * em
    s_inv = 2.0 * em / (1.0 - em2)  # 1/sinh(na)
    cn = (1.0 + em2) / (1.0 - em2)  # coth(na)
    cota = 1.0 / np.tanh(alpha)
    inv_sinh2_a = 1.0 / np.sinh(alpha) ** 2
    t = s_inv * (cota - n * cn)
    dt = s_inv * (-inv_sinh2_a - n * cota * cn + n * n * (s_inv * s_inv + cn * cn))
    return t, dt


def cap_series_sums(alpha, rel_tol, max_terms):
    """Sum the bispherical capacitance series and its alpha-derivative.

    Stops when three consecutive terms are each below rel_tol times the
    running partial sum (both sums must satisfy the rule).

    Returns (S, dS_dalpha, n_terms, converged).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    total = 0.0
    total_d = 0.0
    small_streak = 0
    n_done = 0
    while n_done < max_terms:
        n = np.arange(n_done + 1, min(n_done + _CHUNK, max_terms) + 1, dtype=float)
        t, dt = _series_chunk(alpha, n)
        # emulate the scalar early-exit rule within the chunk
        for i in range(len(n)):
            total += t[i]
            total_d += dt[i]
            n_done += 1
            ok = abs(t[i]) < rel_tol * abs(total) and abs(dt[i]) < rel_tol * abs(
                total_d
            )
            small_streak = small_streak + 1 if ok else 0
            if small_streak >= 3:
                return total, total_d, n_done, True
    return total, total_d, n_done, False


def _fresnel_stack(kap0, kx2, xi_c2, eps_gap, eps_layers, thick):
    """Reflection coefficients (TM, TE) of one layered side.

    kap0: gap decay constants, shape (nodes,). eps_layers: (n_layers,)
    ordered from the gap-adjacent layer inward; thick matches, with the
    final entry < 0 meaning semi-infinite.
    """
    n_layers = len(eps_layers)
    # decay constant in each layer
    kaps = [np.sqrt(kx2 + eps_layers[j] * xi_c2) for j in range(n_layers)]
    # start from the innermost interface and recurse outward
    eps_out = eps_layers[n_layers - 1]
    kap_out = kaps[n_layers - 1]
    r_tm = None
    r_te = None
    for j in range(n_layers - 2, -1, -1):
        eps_in, kap_in = eps_layers[j], kaps[j]
        rtm = (eps_out * kap_in - eps_in * kap_out) / (
            eps_out * kap_in + eps_in * kap_out
        )
        rte = (kap_in - kap_out) / (kap_in + kap_out)
        if r_tm is None:
            r_tm, r_te = rtm, rte
        else:
            ph = np.exp(-2.0 * kap_out * thick[j + 1])
            r_tm = (rtm + r_tm * ph) / (1.0 + rtm * r_tm * ph)
            r_te = (rte + r_te * ph) / (1.0 + rte * r_te * ph)
        eps_out, kap_out = eps_in, kap_in
    # outermost interface: gap | first layer
    rtm = (eps_out * kap0 - eps_gap * kap_out) / (eps_out * kap0 + eps_gap * kap_out)
    rte = (kap0 - kap_out) / (kap0 + kap_out)
    if r_tm is None:
        return rtm, rte
    ph = np.exp(-2.0 * kap_out * thick[0])
    r_tm = (rtm + r_tm * ph) / (1.0 + rtm * r_tm * ph)
    r_te = (rte + r_te * ph) / (1.0 + rte * r_te * ph)
    return r_tm, r_te


def lifshitz_terms(d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, u_nodes, u_weights):
    """Transverse-kappa integrals of the Lifshitz pressure, one per frequency.

    Integration variable u = 2*d*(kappa - kappa_min); the integrand is
    kappa^2 sum_p rr exp(-2 kappa d)/(1 - rr exp(-2 kappa d)).

    Returns an array of shape (len(xi_c),); multiply by k_B*T/pi and halve
    the n=0 entry to obtain the pressure.
    """
    xi_c = np.asarray(xi_c, dtype=float)
    out = np.empty(len(xi_c))
    for i in range(len(xi_c)):
        xc2 = eps_gap[i] * xi_c[i] ** 2
        kap_min = np.sqrt(xc2)
        kap = kap_min + u_nodes / (2.0 * d)
        kx2 = kap * kap - xc2  # transverse wavevector squared
        rtm_a, rte_a = _fresnel_stack(kap, kx2, xi_c[i] ** 2, eps_gap[i], eps_a[i], t_a)
        rtm_b, rte_b = _fresnel_stack(kap, kx2, xi_c[i] ** 2, eps_gap[i], eps_b[i], t_b)
        ex = np.exp(-u_nodes - 2.0 * kap_min * d)
        term = np.zeros_like(kap)
        for r1, r2 in ((rtm_a, rtm_b), (rte_a, rte_b)):
            rr = r1 * r2 * ex
            term += rr / (1.0 - rr)
        out[i] = np.sum(u_weights * kap * kap * term) / (2.0 * d)
    return out
