"""Monte Carlo Euler simulation of dX = drift(X) dt + A dW and closed-form oracles."""

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtr


@dataclass(frozen=True)
class SDEProblem:
    """Drift maps (..., d) arrays to (..., d); payoff maps (..., d) to (...)."""

    d: int
    T: float
    drift: Callable
    payoff: Callable
    diffusion_factor: np.ndarray
    lipschitz_kappa: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if not self.T > 0:
            raise ValueError("T must be positive")
        A = np.array(self.diffusion_factor, dtype=np.float64)
        if A.shape != (self.d, self.d):
            raise ValueError(f"diffusion factor must be {self.d}x{self.d}, got {A.shape}")
        A.setflags(write=False)
        object.__setattr__(self, "diffusion_factor", A)


@dataclass
class EnsembleResult:
    terminal: np.ndarray  # shape (M, d)
    value: float
    stderr: float
    elapsed: float = field(default=0.0, compare=False)

    @property
    def M(self):
        return self.terminal.shape[0]


def _increments(sampler, problem, N, paths):
    """Frozen increments Z for the given 1-based path indices, shape (len(paths), N, d)."""
    xi = sampler.block(paths, N, problem.d)
    return np.sqrt(problem.T / N) * xi @ problem.diffusion_factor.T


def brownian_increment(sampler, problem, N, m, n):
    if m < 1 or not 0 <= n < N:
        raise IndexError(f"increment index (m={m}, n={n}) outside m >= 1, 0 <= n < {N}")
    xi = sampler.normal(m, n, np.arange(problem.d))
    return problem.diffusion_factor @ (np.sqrt(problem.T / N) * xi)


def path_increments(sampler, problem, N, m):
    """All N increments of path m as an (N, d) array."""
    if m < 1:
        raise IndexError("path indices start at 1")
    return _increments(sampler, problem, N, [m])[0]


def euler_step(z, y, problem, N):
    return z + y + (problem.T / N) * problem.drift(y)


def simulate_ensemble(problem, N, M, x, sampler, chunk=1 << 16):
    if N < 1 or M < 1:
        raise ValueError("N and M must be positive")
    start = time.perf_counter()
    x = np.asarray(x, dtype=np.float64)
    terminal = np.empty((M, problem.d))
    for lo in range(0, M, chunk):
        hi = min(M, lo + chunk)
        Z = _increments(sampler, problem, N, np.arange(lo + 1, hi + 1))
        y = np.broadcast_to(x, (hi - lo, problem.d)).copy()
        for n in range(N):
            y = euler_step(Z[:, n], y, problem, N)
        terminal[lo:hi] = y
    values = np.asarray(problem.payoff(terminal), dtype=np.float64).reshape(M)
    stderr = float(values.std(ddof=1) / np.sqrt(M)) if M > 1 else float("nan")
    return EnsembleResult(terminal, float(values.mean()), stderr, time.perf_counter() - start)


def frozen_estimate(problem, N, M, points, sampler, chunk=1 << 22):
    """Frozen-noise Monte Carlo Euler estimate at many points, shape (Q,).

    Paths m = 1..M share their increments across all points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    Q = points.shape[0]
    Z = _increments(sampler, problem, N, np.arange(1, M + 1))
    out = np.empty(Q)
    rows = max(1, chunk // (M * problem.d))
    for lo in range(0, Q, rows):
        hi = min(Q, lo + rows)
        y = np.repeat(points[lo:hi, None, :], M, axis=1)
        for n in range(N):
            y = euler_step(Z[None, :, n], y, problem, N)
        out[lo:hi] = problem.payoff(y).mean(axis=1)
    return out


# --- closed-form oracles --------------------------------------------------

def abs_gaussian_mean(mu, var):
    """E|mu + sigma Z| for standard normal Z."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.sqrt(var)
    if sigma == 0:
        return np.abs(mu)
    return sigma * np.sqrt(2 / np.pi) * np.exp(-mu ** 2 / (2 * var)) + mu * (1 - 2 * ndtr(-mu / sigma))


def reference_solution(problem_id, d, T, x):
    """E[sum_i |X_T^i|] for the bundled problems; x may be a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != d:
        raise ValueError(f"point of dimension {x.shape[-1]} for d = {d}")
    if problem_id == "heat_abs":
        mu, var = x, 2.0 * T
    elif problem_id == "ou_abs":
        mu, var = np.exp(-T) * x, -np.expm1(-2.0 * T)
    else:
        raise ValueError(f"unknown problem id {problem_id!r}")
    return abs_gaussian_mean(mu, var).sum(axis=-1)
