"""Log-log slope fitting and Monte Carlo L^p error estimates over the unit cube."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    residual_norm: float
    points: int


def loglog_fit(x, y):
    """Ordinary least squares of log y on log x."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    keep = np.isfinite(x) & np.isfinite(y) & (x > 0) & (y > 0)
    lx, ly = np.log(x[keep]), np.log(y[keep])
    if lx.size < 2 or np.ptp(lx) == 0:
        raise ValueError("need at least two distinct positive points to fit a slope")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return Fit(float(coef[0]), float(coef[1]), float(np.linalg.norm(resid)), int(lx.size))


def cube_points(Q, d, seed):
    return np.random.default_rng([int(seed), d, Q]).random((Q, d))


def lp_error(approx, exact, p=2.0):
    """(E|approx - exact|^p)^{1/p} over equally weighted samples, with a delta-method stderr."""
    diff = np.abs(np.asarray(approx, dtype=np.float64) - np.asarray(exact, dtype=np.float64)) ** p
    Q = diff.size
    mean = diff.mean()
    err = mean ** (1 / p)
    if Q < 2 or mean == 0:
        return float(err), 0.0
    se_mean = diff.std(ddof=1) / np.sqrt(Q)
    return float(err), float(se_mean * mean ** (1 / p - 1) / p)
