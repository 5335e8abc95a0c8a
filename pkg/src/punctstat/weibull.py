"""Discrete Weibull distribution: evaluation, maximum-likelihood fit, Weibull plots.

Parametrisation: ``F(k) = 1 - (1-p)**(k**beta)`` for ``k = 1, 2, ...``.
Everything is evaluated through ``log(1-p) * k**beta`` so survival
probabilities far below the float range still give finite log values.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (DegenerateSupportError, DomainError, FitDivergedError,
                     SampleTooSmallError)
from .kernels import weibull_loglik_grid
from .series import DistanceSeries, DistributionTable, empirical_distribution

P_GRID = np.round(np.arange(1, 100) * 0.01, 10)
BETA_GRID = np.round(0.2 + np.arange(57) * 0.05, 10)
MIN_SAMPLE = 30


@dataclass(frozen=True)
class WeibullParams:
    p: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0) or not (self.beta > 0.0) or not np.isfinite(self.beta):
            raise DomainError(f"invalid discrete Weibull parameters p={self.p}, beta={self.beta}")

    @property
    def log_q(self) -> float:
        return float(np.log1p(-self.p))


def _as_k(k) -> np.ndarray:
    arr = np.asarray(k)
    if arr.size and (np.any(arr < 1) or np.any(arr != np.floor(arr))):
        raise DomainError("k must be a positive integer")
    return arr.astype(np.float64)


def _exponents(k: np.ndarray, beta: float):
    """``(k-1)**beta`` and the increment ``k**beta - (k-1)**beta`` without cancellation."""
    km1 = np.maximum(k - 1.0, 1.0)
    a = np.where(k > 1.0, km1 ** beta, 0.0)
    d = np.where(k > 1.0, a * np.expm1(beta * np.log1p(1.0 / km1)), 1.0)
    return a, d


def log_sf(k, params: WeibullParams):
    """``log(1 - F(k))``."""
    k = _as_k(k)
    return params.log_q * k ** params.beta


def hazard(k, params: WeibullParams):
    k = _as_k(k)
    _, d = _exponents(k, params.beta)
    h = -np.expm1(params.log_q * d)
    return np.where(k == 1.0, params.p, h)


def logpmf(k, params: WeibullParams):
    k = _as_k(k)
    a, d = _exponents(k, params.beta)
    with np.errstate(divide="ignore"):
        out = params.log_q * a + np.log(-np.expm1(params.log_q * d))
    return np.where(k == 1.0, np.log(params.p), out)


def pmf(k, params: WeibullParams):
    k = _as_k(k)
    a, _ = _exponents(k, params.beta)
    return np.exp(params.log_q * a) * hazard(k, params)


def cmf(k, params: WeibullParams):
    k = _as_k(k)
    out = -np.expm1(params.log_q * k ** params.beta)
    return np.where(k == 1.0, params.p, out)


def sf(k, params: WeibullParams):
    return np.exp(log_sf(k, params))


def dweibull_eval(k, params: WeibullParams) -> dict:
    """PMF, CMF and hazard at ``k`` (scalar or array)."""
    out = {"pmf": pmf(k, params), "cmf": cmf(k, params), "hazard": hazard(k, params)}
    if np.ndim(k) == 0:
        out = {name: float(v) for name, v in out.items()}
    return out


def sample(params: WeibullParams, size: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draws by inverting the CMF: the smallest k with ``F(k) >= u``."""
    rng = rng or np.random.default_rng()
    u = rng.random(size)
    # -log1p(-u) > 0 is the required value of -log(1-p) * k**beta
    t = np.log1p(-u) / params.log_q
    k = np.ceil(t ** (1.0 / params.beta))
    # guard against t**(1/beta) landing a hair above an integer
    k_lo = k - 1.0
    ok = (k_lo >= 1.0) & (k_lo ** params.beta >= t)
    k = np.where(ok, k_lo, k)
    return np.maximum(k, 1.0).astype(np.int64)


# -- fitting -----------------------------------------------------------------------

@dataclass(frozen=True)
class WeibullFit:
    params: WeibullParams
    log_likelihood: float
    n: int
    ks_distance: float

    def to_dict(self) -> dict:
        return {
            "p": self.params.p,
            "beta": self.params.beta,
            "log_likelihood": self.log_likelihood,
            "ks_distance": self.ks_distance,
            "n": self.n,
        }


def log_likelihood(params: WeibullParams, support, counts) -> float:
    return float(np.dot(np.asarray(counts, dtype=np.float64), logpmf(support, params)))


def ks_distance(table: DistributionTable, params: WeibullParams) -> float:
    return float(np.max(np.abs(table.cmf - cmf(table.support, params))))


def fit_discrete_weibull(series: DistanceSeries | np.ndarray, min_n: int = MIN_SAMPLE) -> WeibullFit:
    """Maximum-likelihood (p, beta): coarse grid search then Nelder-Mead refinement."""
    table = empirical_distribution(series)
    if table.n < min_n:
        raise SampleTooSmallError(f"need at least {min_n} values to fit, got {table.n}")
    support = table.support.astype(np.float64)
    counts = table.counts.astype(np.float64)

    grid = weibull_loglik_grid(support, counts, P_GRID, BETA_GRID)
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    p0, b0 = float(P_GRID[i]), float(BETA_GRID[j])

    def objective(x):
        p, b = x[0] * p0, x[1] * b0
        if not (0.0 < p < 1.0 and b > 0.0):
            return np.inf
        ll = log_likelihood(WeibullParams(p, b), support, counts)
        return -ll / table.n if np.isfinite(ll) else np.inf

    res = minimize(objective, x0=np.ones(2), method="Nelder-Mead",
                   options={"xatol": 1e-6, "fatol": 1e-12, "maxiter": 4000})
    p, b = float(res.x[0] * p0), float(res.x[1] * b0)
    if not (0.0 < p < 1.0 and b > 0.0) or not np.isfinite(res.fun):
        raise FitDivergedError(f"refinement left the parameter domain (p={p}, beta={b})")
    params = WeibullParams(p, b)
    ll = log_likelihood(params, support, counts)
    return WeibullFit(params, ll, table.n, ks_distance(table, params))


# -- Weibull plots -----------------------------------------------------------------

def weibull_transform(k, cmf_values=None, log_sf_values=None):
    """``(log k, log(-log(1-F)))``; pass ``log_sf_values`` when ``1-F`` underflows."""
    x = np.log(np.asarray(k, dtype=np.float64))
    if log_sf_values is None:
        log_sf_values = np.log1p(-np.asarray(cmf_values, dtype=np.float64))
    y = np.log(-np.asarray(log_sf_values, dtype=np.float64))
    return x, y


@dataclass(frozen=True, eq=False)
class PlotSeries:
    x: np.ndarray
    y: np.ndarray
    fit_x: np.ndarray | None = None
    fit_y: np.ndarray | None = None
    rescaled: bool = False
    # affine map applied when rescaled: x' = (x - x_min) / x_span, same for y
    transform: dict | None = None

    def rows(self):
        for a, b in zip(self.x, self.y):
            yield float(a), float(b), "empirical"
        if self.fit_x is not None:
            for a, b in zip(self.fit_x, self.fit_y):
                yield float(a), float(b), "fitted"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "kind"])
        w.writerows(self.rows())
        return buf.getvalue()


def weibull_plot(table: DistributionTable, params: WeibullParams | None = None,
                 rescaled: bool = False) -> PlotSeries:
    keep = table.sf > 0
    if keep.sum() < 2:
        raise DegenerateSupportError("a Weibull plot needs at least two support points with F(k) < 1")
    k = table.support[keep]
    x, y = weibull_transform(k, log_sf_values=np.log(table.sf[keep]))
    fx = fy = None
    if params is not None:
        fx = x.copy()
        fy = params.beta * fx + np.log(-params.log_q)
    if not rescaled:
        return PlotSeries(x, y, fx, fy)
    x_min, y_min = x.min(), y.min()
    x_span, y_span = x.max() - x_min, y.max() - y_min
    transform = {"method": "min-max of empirical points",
                 "x_min": float(x_min), "x_span": float(x_span),
                 "y_min": float(y_min), "y_span": float(y_span)}
    xs, ys = (x - x_min) / x_span, (y - y_min) / y_span
    if fx is not None:
        fx, fy = (fx - x_min) / x_span, (fy - y_min) / y_span
    return PlotSeries(xs, ys, fx, fy, True, transform)
