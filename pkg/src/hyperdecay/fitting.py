"""Small shared helpers for log-log slope estimation."""

from __future__ import annotations

import numpy as np


def fit_loglog(x, y, window: tuple[float, float] | None = None) -> tuple[float, float]:
    """Least-squares slope of log|y| vs log x, with its standard error.

    Points with y == 0 or outside `window` (an x interval) are dropped.
    Returns (slope, stderr); (nan, nan) when fewer than 3 points remain.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    mask = (x > 0) & (y > 0) & np.isfinite(y)
    if window is not None:
        mask &= (x >= window[0]) & (x <= window[1])
    x, y = x[mask], y[mask]
    if len(x) < 3:
        return float("nan"), float("nan")
    lx, ly = np.log(x), np.log(y)
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coef[0]), float(np.sqrt(max(cov[0, 0], 0.0)))


def last_decades_window(x, decades: float) -> tuple[float, float]:
    """The x interval spanning the trailing `decades` of a positive array."""
    x = np.asarray(x, dtype=float)
    hi = float(np.max(x))
    return hi / 10.0**decades, hi
