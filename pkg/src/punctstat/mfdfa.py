"""Multifractal detrended fluctuation analysis.

Pipeline: profile -> per-window polynomial detrending over ``2 M_s``
windows (taken from both ends) -> q-order fluctuation functions ``F_q(s)``
-> generalised Hurst exponents ``h(q)`` over a scaling range -> singularity
spectrum ``f(alpha)`` via the Legendre transform of ``tau(q) = q h(q) - 1``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ._linfit import fit_line
from .errors import (RangeTooSmallError, ScaleOutOfRangeError, SeriesTooShortError,
                     TooFewPointsError, ZeroVarianceError)
from .kernels import detrend_basis, window_variances
from .series import DistanceSeries

MIN_LENGTH = 64
MIN_RANGE_POINTS = 6
FINITE_SIZE_WARNING_LENGTH = 5000
MONOFRACTAL_MAX_WIDTH = 0.1
MULTIFRACTAL_MIN_WIDTH = 0.2
# f2 below (ZERO_VARIANCE_RTOL * window amplitude)**2 is rounding noise
ZERO_VARIANCE_RTOL = 1e-10


def default_qs(q_min: float = -4.0, q_max: float = 4.0, step: float = 0.25) -> np.ndarray:
    n = int(np.floor((q_max - q_min) / step + 1e-9)) + 1
    qs = q_min + step * np.arange(n)
    qs[np.abs(qs) < 1e-12] = 0.0
    return qs


def default_scales(n: int, s_min: int = 16, n_scales: int = 24, s_max: int | None = None) -> np.ndarray:
    """Log-spaced integer scales from ``s_min`` to ``n // 4``, de-duplicated."""
    s_max = n // 4 if s_max is None else s_max
    if s_max < s_min:
        raise ScaleOutOfRangeError(f"series of length {n} leaves no scale between {s_min} and {s_max}")
    return np.unique(np.rint(np.geomspace(s_min, s_max, n_scales)).astype(np.int64))


@dataclass(frozen=True, eq=False)
class Profile:
    values: np.ndarray
    mean: float

    def __len__(self) -> int:
        return len(self.values)


def profile_values(u) -> np.ndarray:
    """Cumulative sum of the mean-centred values, with no length floor."""
    u = np.asarray(u, dtype=np.float64)
    return np.cumsum(u - u.mean())


def compute_profile(series) -> Profile:
    u = np.asarray(series.values if isinstance(series, DistanceSeries) else series, dtype=np.float64)
    if len(u) < MIN_LENGTH:
        raise SeriesTooShortError(f"MFDFA needs at least {MIN_LENGTH} values, got {len(u)}")
    return Profile(profile_values(u), float(u.mean()))


@dataclass(frozen=True, eq=False)
class FluctuationMatrix:
    scales: np.ndarray
    qs: np.ndarray
    # values[i, j] = F_{qs[i]}(scales[j])
    values: np.ndarray
    detrend_order: int
    n: int

    def column(self, q: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.qs - q)))
        return self.values[i]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "q", "Fq"])
        for j, s in enumerate(self.scales):
            for i, q in enumerate(self.qs):
                w.writerow([int(s), repr(float(q)), repr(float(self.values[i, j]))])
        return buf.getvalue()


def q_moments(f2: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """``F_q`` from window variances, evaluated in log space (q = 0 by the geometric mean)."""
    log_f2 = np.log(f2)
    out = np.empty(len(qs))
    n = len(f2)
    for i, q in enumerate(qs):
        if q == 0.0:
            out[i] = np.exp(0.5 * log_f2.mean())
        else:
            z = 0.5 * q * log_f2
            zmax = z.max()
            lse = zmax + np.log(np.exp(z - zmax).sum())
            out[i] = np.exp((lse - np.log(n)) / q)
    return out


def fluctuation_matrix(profile: Profile | np.ndarray, scales=None, qs=None, order: int = 2) -> FluctuationMatrix:
    y = np.asarray(profile.values if isinstance(profile, Profile) else profile, dtype=np.float64)
    n = len(y)
    if not 1 <= order <= 4:
        raise ScaleOutOfRangeError(f"detrending order must be 1..4, got {order}")
    scales = default_scales(n) if scales is None else np.unique(np.asarray(scales, dtype=np.int64))
    qs = default_qs() if qs is None else np.asarray(qs, dtype=np.float64)
    if len(scales) == 0:
        raise ScaleOutOfRangeError("no scales given")
    if scales[-1] > n // 4:
        raise ScaleOutOfRangeError(f"largest scale {scales[-1]} exceeds T/4 = {n // 4}")
    if scales[0] < order + 2:
        raise ScaleOutOfRangeError(f"smallest scale {scales[0]} is below order + 2 = {order + 2}")
    values = np.empty((len(qs), len(scales)))
    for j, s in enumerate(scales):
        f2, ref = window_variances(y, int(s), detrend_basis(int(s), order))
        zero = f2 <= (ZERO_VARIANCE_RTOL * ref) ** 2
        if zero.any():
            raise ZeroVarianceError(int(s), int(np.argmax(zero)))
        values[:, j] = q_moments(f2, qs)
    return FluctuationMatrix(scales, qs, values, order, n)


# -- scaling ranges ---------------------------------------------------------------------

def _window_msr(x: np.ndarray, y: np.ndarray, i: int, j: int) -> float:
    line = fit_line(x[i:j], y[i:j])
    return line.ssr / (j - i)


def select_scaling_range(matrix: FluctuationMatrix, mode="auto", min_points: int = MIN_RANGE_POINTS,
                         q: float = 2.0) -> list[tuple[int, int]]:
    """Scaling range(s) for the h(q) fit, as inclusive ``(s_lo, s_hi)`` pairs.

    ``mode``: ``"auto"`` (contiguous window with the smallest mean squared
    residual of the log-log fit at ``q``; near-ties go to the widest window),
    ``"two"`` (best split into two adjacent windows) or an explicit
    ``(s_lo, s_hi)`` pair.
    """
    scales = matrix.scales
    if not isinstance(mode, str):
        lo, hi = int(mode[0]), int(mode[1])
        inside = (scales >= lo) & (scales <= hi)
        if lo < scales[0] or hi > scales[-1] or inside.sum() < min_points:
            raise RangeTooSmallError(
                f"range ({lo}, {hi}) must lie within {scales[0]}..{scales[-1]} "
                f"and cover >= {min_points} scales")
        return [(lo, hi)]
    if len(scales) < 8:
        raise RangeTooSmallError(f"automatic range selection needs >= 8 scales, got {len(scales)}")
    x = np.log(scales.astype(np.float64))
    y = np.log(matrix.column(q))
    ns = len(scales)
    if mode == "auto":
        best, best_key = None, None
        for i in range(ns - min_points + 1):
            for j in range(i + min_points, ns + 1):
                msr = _window_msr(x, y, i, j)
                # rms residuals below 1e-9 are rounding noise: treat as exact
                key = (max(msr, 1e-18), -(j - i), i)
                if best_key is None or key < best_key:
                    best, best_key = (i, j), key
        i, j = best
        return [(int(scales[i]), int(scales[j - 1]))]
    if mode == "two":
        if ns < 2 * min_points:
            raise RangeTooSmallError(f"two ranges need >= {2 * min_points} scales, got {ns}")
        best, best_ssr = None, np.inf
        for b in range(min_points, ns - min_points + 1):
            ssr = fit_line(x[:b], y[:b]).ssr + fit_line(x[b:], y[b:]).ssr
            if ssr < best_ssr:
                best, best_ssr = b, ssr
        return [(int(scales[0]), int(scales[best - 1])), (int(scales[best]), int(scales[-1]))]
    raise ValueError(f"unknown scale mode {mode!r}")


# -- h(q) and f(alpha) ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HurstFunction:
    qs: np.ndarray
    h: np.ndarray
    stderr: np.ndarray
    scale_range: tuple

    @property
    def hurst(self) -> float:
        """h(2), or the value at the q closest to 2."""
        return float(self.h[int(np.argmin(np.abs(self.qs - 2.0)))])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "h", "stderr"])
        w.writerows((repr(float(q)), repr(float(h)), repr(float(e)))
                    for q, h, e in zip(self.qs, self.h, self.stderr))
        return buf.getvalue()


def estimate_hq(matrix: FluctuationMatrix, scale_range: tuple[int, int] | None = None) -> HurstFunction:
    scales = matrix.scales
    lo, hi = (int(scales[0]), int(scales[-1])) if scale_range is None else map(int, scale_range)
    sel = (scales >= lo) & (scales <= hi)
    if sel.sum() < MIN_RANGE_POINTS:
        raise RangeTooSmallError(f"scale range ({lo}, {hi}) holds {sel.sum()} scales, need {MIN_RANGE_POINTS}")
    x = np.log(scales[sel].astype(np.float64))
    fits = [fit_line(x, np.log(row[sel])) for row in matrix.values]
    return HurstFunction(matrix.qs.copy(), np.array([f.slope for f in fits]),
                         np.array([f.slope_stderr for f in fits]), (lo, hi))


@dataclass(frozen=True, eq=False)
class Spectrum:
    qs: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    tau: np.ndarray
    delta_alpha: float
    nonphysical_mask: np.ndarray

    @property
    def label(self) -> str:
        return width_label(self.delta_alpha)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q", "alpha", "f", "nonphysical"])
        w.writerows((repr(float(q)), repr(float(a)), repr(float(f)), int(m))
                    for q, a, f, m in zip(self.qs, self.alpha, self.f, self.nonphysical_mask))
        return buf.getvalue()


def width_label(delta_alpha: float) -> str:
    if delta_alpha <= MONOFRACTAL_MAX_WIDTH:
        return "monofractal"
    if delta_alpha >= MULTIFRACTAL_MIN_WIDTH:
        return "multifractal"
    return "indecisive"


def singularity_spectrum(hq: HurstFunction, tol: float = 1e-9) -> Spectrum:
    """Legendre transform with central differences for dh/dq.

    A point is flagged non-physical where alpha increases with q, i.e. where
    f(alpha) loses concavity.
    """
    q, h = np.asarray(hq.qs, dtype=np.float64), np.asarray(hq.h, dtype=np.float64)
    if len(q) < 5:
        raise TooFewPointsError(f"singularity spectrum needs >= 5 q values, got {len(q)}")
    dh = np.gradient(h, q, edge_order=1)
    alpha = h + q * dh
    f = q * (alpha - h) + 1.0
    dalpha = np.gradient(alpha, q, edge_order=1)
    mask = dalpha > tol
    good = alpha[~mask]
    width = float(good.max() - good.min()) if len(good) else 0.0
    return Spectrum(q, alpha, f, q * h - 1.0, width, mask)


# -- one-call driver -----------------------------------------------------------------------

@dataclass
class RangeResult:
    scale_range: tuple
    hq: HurstFunction
    spectrum: Spectrum

    def to_dict(self) -> dict:
        return {
            "s_lo": int(self.scale_range[0]),
            "s_hi": int(self.scale_range[1]),
            "H": self.hq.hurst,
            "h": self.hq.h.tolist(),
            "h_stderr": self.hq.stderr.tolist(),
            "alpha": self.spectrum.alpha.tolist(),
            "f": self.spectrum.f.tolist(),
            "nonphysical": self.spectrum.nonphysical_mask.astype(int).tolist(),
            "delta_alpha": self.spectrum.delta_alpha,
            "label": self.spectrum.label,
        }


@dataclass
class MfdfaResult:
    matrix: FluctuationMatrix
    ranges: list = field(default_factory=list)
    scale_mode: object = "auto"
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        m = self.matrix
        return {
            "n": m.n,
            "detrend_order": m.detrend_order,
            "scale_mode": self.scale_mode if isinstance(self.scale_mode, str) else list(self.scale_mode),
            "scales": m.scales.tolist(),
            "qs": m.qs.tolist(),
            "Fq": m.values.tolist(),
            "ranges": [r.to_dict() for r in self.ranges],
            "warnings": list(self.warnings),
        }


def run_mfdfa(series, order: int = 2, qs=None, scales=None, scale_mode="auto",
              s_min: int = 16, n_scales: int = 24, min_points: int = MIN_RANGE_POINTS) -> MfdfaResult:
    profile = compute_profile(series)
    n = len(profile)
    if scales is None:
        scales = default_scales(n, s_min=s_min, n_scales=n_scales)
    matrix = fluctuation_matrix(profile, scales, qs, order)
    warnings = []
    if n < FINITE_SIZE_WARNING_LENGTH:
        warnings.append(
            f"series length {n} < {FINITE_SIZE_WARNING_LENGTH}: finite-size effects can "
            "widen f(alpha) spuriously")
    out = MfdfaResult(matrix, [], scale_mode, warnings)
    for rng in select_scaling_range(matrix, scale_mode, min_points=min_points):
        hq = estimate_hq(matrix, rng)
        out.ranges.append(RangeResult(rng, hq, singularity_spectrum(hq)))
    return out
