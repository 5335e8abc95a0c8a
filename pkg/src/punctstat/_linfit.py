"""Ordinary least squares for a straight line, with the diagnostics we report."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    ssr: float
    slope_stderr: float
    n: int


def fit_line(x, y) -> LineFit:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(x)
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(np.dot(dx, dx))
    slope = float(np.dot(dx, dy)) / sxx
    intercept = float(ym - slope * xm)
    resid = dy - slope * dx
    ssr = float(np.dot(resid, resid))
    sst = float(np.dot(dy, dy))
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    stderr = float(np.sqrt(ssr / (n - 2) / sxx)) if n > 2 else float("nan")
    return LineFit(slope, intercept, min(max(r2, 0.0), 1.0), ssr, stderr, n)
