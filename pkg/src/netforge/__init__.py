"""Explicit ReLU network calculus and Monte Carlo Euler emulation networks."""

from .bounds import (
    BoundParams,
    apriori_moment_bound,
    combined_weak_bound,
    euler_weak_bound,
    gronwall_bound,
    mc_error_bound,
)
from .calculus import (
    bias_net,
    compose,
    compose_via_identity,
    fanout,
    matrix_net,
    parallelize,
    relu_identity,
    same_length_sum,
    scalar_mul,
    skip_compose,
    sum_fanin,
    weighted_block_sum,
)
from .euler import SDEProblem, brownian_increment, euler_step, reference_solution, simulate_ensemble
from .kolmogorov import (
    ApproximationFamily,
    SchemeConfig,
    build_mc_net,
    build_path_net,
    build_solution_net,
    build_step_net,
    choose_discretization,
    param_bound,
)
from .network import RELU, Activation, NeuralNet, param_count, realize, structure
from .sampling import GaussianSampler

__version__ = "0.1.0"
