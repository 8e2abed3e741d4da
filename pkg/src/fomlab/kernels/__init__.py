"""Numerical hot loops with a compiled core and a NumPy fallback.

The Cython extension ``_ckernels`` is preferred when it was built; otherwise
the pure-NumPy reference implementation ``_ref`` is used. Both expose the
same two functions:

``cap_series_sums(alpha, rel_tol, max_terms)``
    Partial sums of the bispherical sphere-plate capacitance series and its
    alpha-derivative, with a running truncation rule.

``lifshitz_terms(d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, u_nodes, u_weights)``
    Per-Matsubara-frequency transverse integrals of the finite-temperature
    Lifshitz pressure between layered half-spaces.

``BACKEND`` names the implementation in use ("cython" or "numpy");
``set_backend`` switches explicitly (used by the benchmark and tests).
"""
from . import _ref

try:
    from . import _ckernels

    _HAVE_C = True
except ImportError:
    _ckernels = None
    _HAVE_C = False

_impl = _ckernels if _HAVE_C else _ref
BACKEND = "cython" if _HAVE_C else "numpy"


def set_backend(name):
    """Force a backend ("cython" or "numpy"). Returns the previous name."""
    global _impl, BACKEND
    previous = BACKEND
    if name == "cython":
        if not _HAVE_C:
            raise RuntimeError("compiled kernels are not available")
        _impl, BACKEND = _ckernels, "cython"
    elif name == "numpy":
        _impl, BACKEND = _ref, "numpy"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def cap_series_sums(alpha, rel_tol, max_terms):
    return _impl.cap_series_sums(alpha, rel_tol, max_terms)


def lifshitz_terms(d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, u_nodes, u_weights):
    return _impl.lifshitz_terms(
        d, xi_c, eps_gap, eps_a, t_a, eps_b, t_b, u_nodes, u_weights
    )
