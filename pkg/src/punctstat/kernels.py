"""Hot numeric loops, each in a numba and a numpy flavour.

The public names (``window_variances``, ``weibull_loglik_grid``) bind to one
flavour at import time according to :mod:`punctstat._accel`. Both flavours
stay importable under ``*_numba`` / ``*_numpy`` for tests and benchmarks.
Within one flavour every reduction runs in a fixed order, so repeated calls
are bit-identical.
"""
import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit


def detrend_basis(s: int, order: int) -> np.ndarray:
    """Orthonormal basis (s x order+1) of polynomials of degree <= ``order`` on 1..s."""
    x = (np.arange(1, s + 1, dtype=np.float64) - 0.5 * (s + 1)) / s
    vander = np.vander(x, order + 1, increasing=True)
    q, _ = np.linalg.qr(vander)
    return np.ascontiguousarray(q)


def _windows(profile: np.ndarray, s: int) -> np.ndarray:
    """2*M_s windows: M_s from the start, then M_s from the end (nearest the end first)."""
    t = len(profile)
    m = t // s
    fwd = profile[: m * s].reshape(m, s)
    bwd = profile[t - m * s:].reshape(m, s)[::-1]
    return np.concatenate([fwd, bwd])


# -- detrended window variances ----------------------------------------------------

def window_variances_numpy(profile: np.ndarray, s: int, basis: np.ndarray):
    """Per-window variance of the residual after removing the fitted polynomial.

    Returns ``(f2, ref)`` where ``ref`` is the largest absolute centred profile
    value in each window, used to decide whether ``f2`` is numerically zero.
    """
    w = _windows(np.asarray(profile, dtype=np.float64), s)
    w = w - w.mean(axis=1, keepdims=True)
    ref = np.abs(w).max(axis=1)
    resid = w - (w @ basis) @ basis.T
    resid -= resid.mean(axis=1, keepdims=True)
    f2 = (resid * resid).mean(axis=1)
    return f2, ref


@njit
def _window_variances_loop(profile, s, basis):
    t = profile.shape[0]
    m = t // s
    nb = basis.shape[1]
    f2 = np.empty(2 * m)
    ref = np.empty(2 * m)
    w = np.empty(s)
    coef = np.empty(nb)
    for v in range(2 * m):
        start = v * s if v < m else t - (v - m + 1) * s
        mean = 0.0
        for k in range(s):
            mean += profile[start + k]
        mean /= s
        peak = 0.0
        for k in range(s):
            w[k] = profile[start + k] - mean
            if abs(w[k]) > peak:
                peak = abs(w[k])
        for j in range(nb):
            acc = 0.0
            for k in range(s):
                acc += w[k] * basis[k, j]
            coef[j] = acc
        rmean = 0.0
        for k in range(s):
            acc = w[k]
            for j in range(nb):
                acc -= coef[j] * basis[k, j]
            w[k] = acc
            rmean += acc
        rmean /= s
        var = 0.0
        for k in range(s):
            d = w[k] - rmean
            var += d * d
        f2[v] = var / s
        ref[v] = peak
    return f2, ref


def window_variances_numba(profile: np.ndarray, s: int, basis: np.ndarray):
    return _window_variances_loop(np.ascontiguousarray(profile, dtype=np.float64), int(s),
                                  np.ascontiguousarray(basis))


# -- discrete Weibull log-likelihood on a grid -----------------------------------------

def weibull_loglik_grid_numpy(support: np.ndarray, counts: np.ndarray,
                              p_grid: np.ndarray, beta_grid: np.ndarray) -> np.ndarray:
    """Log-likelihood matrix, shape (len(p_grid), len(beta_grid))."""
    k = np.asarray(support, dtype=np.float64)[None, None, :]
    c = np.asarray(counts, dtype=np.float64)
    lq = np.log1p(-np.asarray(p_grid, dtype=np.float64))[:, None, None]
    b = np.asarray(beta_grid, dtype=np.float64)[None, :, None]
    km1 = np.maximum(k - 1.0, 1.0)
    a = np.where(k > 1.0, km1 ** b, 0.0)
    d = np.where(k > 1.0, a * np.expm1(b * np.log1p(1.0 / km1)), 1.0)
    with np.errstate(divide="ignore"):
        logpmf = lq * a + np.log(-np.expm1(lq * d))
    return (logpmf * c).sum(axis=2)


@njit
def _weibull_loglik_grid_loop(support, counts, p_grid, beta_grid):
    out = np.empty((p_grid.shape[0], beta_grid.shape[0]))
    for i in range(p_grid.shape[0]):
        lq = np.log1p(-p_grid[i])
        for j in range(beta_grid.shape[0]):
            b = beta_grid[j]
            acc = 0.0
            for n in range(support.shape[0]):
                k = support[n]
                if k == 1.0:
                    a = 0.0
                    d = 1.0
                else:
                    a = (k - 1.0) ** b
                    d = a * np.expm1(b * np.log1p(1.0 / (k - 1.0)))
                h = -np.expm1(lq * d)
                if h <= 0.0:
                    acc = -np.inf
                    break
                acc += counts[n] * (lq * a + np.log(h))
            out[i, j] = acc
    return out


def weibull_loglik_grid_numba(support, counts, p_grid, beta_grid) -> np.ndarray:
    return _weibull_loglik_grid_loop(
        np.ascontiguousarray(support, dtype=np.float64),
        np.ascontiguousarray(counts, dtype=np.float64),
        np.ascontiguousarray(p_grid, dtype=np.float64),
        np.ascontiguousarray(beta_grid, dtype=np.float64),
    )


if USE_NUMBA:
    window_variances = window_variances_numba
    weibull_loglik_grid = weibull_loglik_grid_numba
else:
    window_variances = window_variances_numpy
    weibull_loglik_grid = weibull_loglik_grid_numpy

__all__ = [
    "HAVE_NUMBA", "USE_NUMBA", "detrend_basis",
    "window_variances", "window_variances_numpy", "window_variances_numba",
    "weibull_loglik_grid", "weibull_loglik_grid_numpy", "weibull_loglik_grid_numba",
]
