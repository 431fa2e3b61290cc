"""Compile the frozen-noise Monte Carlo Euler scheme into one deep ReLU network."""

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .bounds import BoundParams
from .calculus import (
    block_sum_dims,
    bias_net,
    compose,
    compose_dims,
    compose_via_identity,
    fanout,
    parallel_dims,
    parallelize,
    relu_identity,
    scalar_mul,
    skip_compose,
    skip_compose_dims,
    weighted_block_sum,
)
from .network import PreconditionError, param_count_of_dims
from .sampling import GaussianSampler


@dataclass(frozen=True)
class SchemeConfig:
    params: BoundParams
    gamma: Optional[float] = None
    delta: Optional[float] = None
    samples: Optional[Callable] = None  # N -> M; defaults to M = N

    def __post_init__(self):
        p = self.params
        if self.gamma is None:
            c, th = p.kappa, p.theta
            try:
                gamma = 46 * math.exp(c) * c ** 2 * (4 * math.exp(c + 1) * c ** 3) ** (2 * th)
            except OverflowError:
                gamma = math.inf
            object.__setattr__(self, "gamma", gamma)
        if self.delta is None:
            s = p.d1 + p.d2
            object.__setattr__(self, "delta", max(p.d5 + p.theta * s, p.d4 + p.d6 + 2 * p.theta * s))

    def sample_count(self, N):
        return N if self.samples is None else int(self.samples(N))


@dataclass(frozen=True)
class ApproximationFamily:
    """Coefficient networks phi0 (payoff, R^d -> R) and phi1 (drift, R^d -> R^d)."""

    name: str
    payoff_net: Callable
    drift_net: Callable
    kappa: float = 1.0
    theta: float = 1.0
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0
    d4: float = 0.0
    d5: float = 0.0
    d6: float = 0.0
    e: float = 0.0
    diffusion_scale: float = math.sqrt(2.0)

    def check(self, d, eps):
        """Verify the shape and size requirements on the coefficient nets at (d, eps)."""
        phi0, phi1 = self.payoff_net(d, eps), self.drift_net(d, eps)
        if phi0.input_dim != d or phi0.output_dim != 1:
            raise PreconditionError(f"payoff net must map R^{d} to R, has dims {phi0.dims}")
        if phi1.input_dim != d or phi1.output_dim != d:
            raise PreconditionError(f"drift net must map R^{d} to R^{d}, has dims {phi1.dims}")
        cap0 = self.kappa * d ** self.d3 * eps ** -self.e
        cap1 = self.kappa * d ** (self.d3 / 2) * eps ** (-self.e / 2)
        if phi0.param_count() > cap0:
            raise PreconditionError(f"payoff net has {phi0.param_count()} parameters, cap {cap0:g}")
        if phi1.param_count() > cap1:
            raise PreconditionError(f"drift net has {phi1.param_count()} parameters, cap {cap1:g}")
        return phi0, phi1

    def bound_params(self, kappa, p=2.0, d0=None):
        """Scheme constants with the Kolmogorov exponents n0 = 1/2, n1 = 0, n2 = 2."""
        if d0 is None:
            d0 = self.d6 + (self.d1 + self.d2) * (self.theta + 1)
        return BoundParams(
            kappa=kappa, theta=self.theta, p=p, e=self.e, d0=d0,
            d1=self.d1, d2=self.d2, d3=max(4.0, self.d3), d4=self.d4, d5=self.d5, d6=self.d6,
            n0=0.5, n1=0.0, n2=2.0,
        )


def kolmogorov_constant(kappa, theta, p, T):
    """The scheme constant of the PDE result, built from the coefficient constants."""
    iota = max(kappa, theta)
    return (
        2 ** (4 * theta + 6) * max(1.0, T) ** (theta + 1) * iota ** (2 * theta + 3)
        * math.exp(6 * iota + 5 * iota ** 2 * T) * p * (p * theta + p + 1) ** theta
    )


def theorem_config(family, T, p=2.0):
    return SchemeConfig(family.bound_params(kolmogorov_constant(family.kappa, family.theta, p, T), p))


def desk_config(family, kappa=1.0, d0=0.0, p=2.0):
    """Same exponents as theorem_config but a small scheme constant.

    The theorem's constant makes N astronomically large; this keeps the
    scheduler's eps- and d-dependence while giving buildable networks.
    """
    return SchemeConfig(family.bound_params(kappa, p, d0=d0))


def choose_discretization(config, d, eps):
    if not 0 < eps <= 1:
        raise ValueError(f"eps = {eps} must lie in (0, 1]")
    p = config.params
    threshold = (2 * p.kappa * d ** p.d0 / eps) ** (1 / p.n0)
    N = max(1, math.ceil(threshold))
    eps_inner = min(1.0, eps / (config.gamma * d ** config.delta))
    if eps_inner <= 0:
        raise ValueError("inner accuracy underflows to zero; eps, gamma or delta too extreme")
    return N, eps_inner


def param_bound(config, d, eps):
    p = config.params
    s = p.n1 + p.n2 + 1
    c = 3 * p.kappa ** 2 * 2 ** s * (2 * p.kappa) ** (s / p.n0) * config.gamma ** p.e
    E_d = p.d0 * s / p.n0 + p.d3 + p.e * config.delta
    E_eps = s / p.n0 + p.e
    return c * d ** E_d * eps ** -E_eps, (E_d, E_eps)


# --- network stages -------------------------------------------------------

def _step_core(drift_net, N, T):
    d = drift_net.input_dim
    if drift_net.output_dim != d:
        raise PreconditionError(f"drift net must map R^{d} to R^{d}, has dims {drift_net.dims}")
    return scalar_mul(T / N, drift_net), relu_identity(d)


def build_step_net(drift_net, N, T, z):
    """Network realizing x -> z + x + (T/N) drift(x)."""
    increment, ident = _step_core(drift_net, N, T)
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (drift_net.input_dim,):
        raise PreconditionError(f"shift of shape {z.shape} for d = {drift_net.input_dim}")
    return compose(bias_net(z), skip_compose(increment, ident, ident))


def build_path_net(drift_net, N, T, increments):
    """Network realizing the frozen-noise Euler endpoint x -> Y_N."""
    increments = np.asarray(increments, dtype=np.float64)
    d = drift_net.input_dim
    if increments.shape != (N, d):
        raise PreconditionError(f"expected {N} increments in R^{d}, got shape {increments.shape}")
    increment, ident = _step_core(drift_net, N, T)
    net = ident
    for z in increments:
        net = compose(bias_net(z), skip_compose(increment, net, ident))
    return net


def build_mc_net(payoff_net, M):
    """Network realizing (x_1, ..., x_M) -> mean_i payoff(x_i)."""
    return weighted_block_sum([1.0 / M] * M, [payoff_net] * M)


@dataclass
class BuildReport:
    d: int
    eps: float
    N: int
    M: int
    eps_inner: float
    seed: int
    param_count: int
    dims: tuple
    bound: float
    exponents: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        out["dims"] = list(self.dims)
        return out


def frozen_increments(seed, d, T, N, M, diffusion_scale):
    """Increments Z of paths 1..M, shape (M, N, d), from the counter-based sampler."""
    xi = GaussianSampler(seed).block(np.arange(1, M + 1), N, d)
    # A = s I, so A (sqrt(T/N) xi) = s sqrt(T/N) xi
    return np.sqrt(T / N) * xi @ (diffusion_scale * np.eye(d)).T


def build_solution_net(family, config, d, eps, T, seed, n_steps=None):
    """Network whose realization is the frozen-noise Monte Carlo Euler estimate of u(T, x).

    n_steps overrides the scheduler's N (the inner accuracy is still scheduled).
    """
    N, eps_inner = choose_discretization(config, d, eps)
    if n_steps is not None:
        N = int(n_steps)
    M = config.sample_count(N)
    phi0, phi1 = family.check(d, eps_inner)
    Z = frozen_increments(seed, d, T, N, M, family.diffusion_scale)
    paths = [build_path_net(phi1, N, T, Z[m]) for m in range(M)]
    inner = compose(parallelize(paths), fanout(d, M))
    psi = compose_via_identity(build_mc_net(phi0, M), inner, relu_identity(M * d))
    bound, (E_d, E_eps) = param_bound(config, d, eps)
    report = BuildReport(
        d=d, eps=eps, N=N, M=M, eps_inner=eps_inner, seed=int(seed),
        param_count=psi.param_count(), dims=psi.dims, bound=bound,
        exponents={"d": E_d, "eps": E_eps},
    )
    return psi, report


def solution_dims(family, config, d, eps, n_steps=None):
    """(N, dims of the solution network) without building any weights."""
    N, eps_inner = choose_discretization(config, d, eps)
    if n_steps is not None:
        N = int(n_steps)
    M = config.sample_count(N)
    phi0, phi1 = family.check(d, eps_inner)
    ident = (d, 2 * d, d)
    path = ident
    for _ in range(N):
        path = skip_compose_dims(phi1.dims, path, 2 * d)
    inner = compose_dims(parallel_dims([path] * M), (d, M * d))
    mc = block_sum_dims(phi0.dims, M)
    return N, compose_dims(mc, compose_dims((M * d, 2 * M * d, M * d), inner))


def solution_param_count(family, config, d, eps, n_steps=None):
    N, dims = solution_dims(family, config, d, eps, n_steps)
    return N, param_count_of_dims(dims)
