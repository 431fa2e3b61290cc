"""Explicit error and moment bounds for the discrete Gronwall argument and Monte Carlo Euler."""

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class BoundParams:
    kappa: float = 1.0
    theta: float = 1.0
    p: float = 2.0
    e: float = 0.0
    d0: float = 0.0
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0
    d4: float = 0.0
    d5: float = 0.0
    d6: float = 0.0
    n0: float = 0.5
    n1: float = 0.0
    n2: float = 2.0

    def __post_init__(self):
        checks = [
            ("kappa >= 1", self.kappa >= 1),
            ("theta >= 1", self.theta >= 1),
            ("p >= 2", self.p >= 2),
            ("e >= 0", self.e >= 0),
            ("n0 > 0", self.n0 > 0),
            ("n1 >= 0", self.n1 >= 0),
            ("n2 >= 0", self.n2 >= 0),
        ]
        checks += [(f"d{k} >= 0", getattr(self, f"d{k}") >= 0) for k in range(7)]
        failed = [name for name, ok in checks if not ok]
        if failed:
            raise ValueError("bound parameters out of range: " + ", ".join(failed))

    def to_dict(self):
        return asdict(self)


def gronwall_bound(alpha, beta, x0, n):
    """(alpha^n x0 + beta sum_{k<n} alpha^k, alpha^n x0 + beta e^alpha)."""
    if n < 1:
        raise ValueError("n must be positive")
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    lead = alpha ** n * x0
    geometric = math.fsum(alpha ** k for k in range(n))
    return lead + beta * geometric, lead + beta * math.exp(alpha)


def apriori_moment_bound(alpha, beta, gamma, x0_norm, z_sup, N):
    if min(alpha, beta, gamma, x0_norm, z_sup) < 0:
        raise ValueError("all inputs must be nonnegative")
    return alpha ** N * x0_norm + math.exp(alpha) * beta * (gamma + z_sup)


def euler_weak_bound(L0, L1, l, T, h, trace_BtB, xi_norm, f1_at_0_norm):
    if not 0 < h <= T:
        raise ValueError(f"step h = {h} must lie in (0, T] with T = {T}")
    rate = math.sqrt(h / T)
    growth = math.exp(l + 3 + 2 * L1 + (l * L1 + 2 * L1 + 2) * T)
    bracket = (
        xi_norm + 2 + max(1.0, f1_at_0_norm) * max(1.0, T)
        + math.sqrt((2 * max(l, 1) - 1) * trace_BtB * T)
    )
    return rate * growth * max(1.0, L0) * bracket ** (1 + l)


def mc_error_bound(params, d, T, M):
    if M < 1:
        raise ValueError("M must be positive")
    k, th, p = params.kappa, params.theta, params.p
    return (
        2 ** (th + 2) * p * k * (p * th + p + 1) ** th * (k * T + 1) ** th
        * math.exp(k * th * T) * (k ** th + 1)
        * d ** (params.d0 + params.d1 * th) / math.sqrt(M)
    )


def combined_weak_constant(params, d, T):
    """Prefactor of (sqrt(h/T) + M^{-1/2}) in the combined weak bound."""
    th, p = params.theta, params.p
    iota = max(params.kappa, th, 1.0)
    return (
        2 ** (4 * th + 5) * max(1.0, T) ** (th + 1) * iota ** (2 * th + 3)
        * math.exp(6 * iota + 5 * iota ** 2 * T)
        * p * (p * th + p + 1) ** th * d ** (params.d0 + params.d1 * (th + 1))
    )


def combined_weak_bound(params, d, T, h, M):
    if not 0 < h <= T:
        raise ValueError(f"step h = {h} must lie in (0, T] with T = {T}")
    if M < 1:
        raise ValueError("M must be positive")
    return combined_weak_constant(params, d, T) * (math.sqrt(h / T) + 1 / math.sqrt(M))


def moment_stability_bound(kappa, x_norm, d, d1, d2):
    """2 e^{kappa+1} kappa^2 (|x| + d^{d1+d2}), the uniform bound on Euler moments."""
    return 2 * math.exp(kappa + 1) * kappa ** 2 * (x_norm + d ** (d1 + d2))
