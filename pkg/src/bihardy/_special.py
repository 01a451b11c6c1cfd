"""Numerically stable elementwise helpers shared by the radial backends."""

import numpy as np

_LN2 = np.log(2.0)


def logsinh(x):
    """log(sinh(x)) for x > 0, accurate for tiny and huge arguments."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1e-4
    big = x > 20.0
    mid = ~(small | big)
    xs = x[small]
    # sinh(x)/x = 1 + x^2/6 + x^4/120 + ...
    out[small] = np.log(xs) + np.log1p(xs * xs / 6.0 * (1.0 + xs * xs / 20.0))
    xb = x[big]
    out[big] = xb - _LN2 + np.log1p(-np.exp(-2.0 * xb))
    out[mid] = np.log(np.sinh(x[mid]))
    return out


def log_sinhc(x):
    """log(sinh(x)/x) for x >= 0 with the limit 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < 1e-4
    xs = x[small]
    out[small] = np.log1p(xs * xs / 6.0 * (1.0 + xs * xs / 20.0))
    xl = x[~small]
    out[~small] = logsinh(xl) - np.log(xl)
    return out
