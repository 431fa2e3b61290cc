"""Bundled test problems, their exact coefficient networks, and the problem JSON format.

heat_abs: zero drift, A = sqrt(2) I, payoff sum_i |x_i|.
ou_abs:   drift -y, A = sqrt(2) I, payoff sum_i |x_i|.
"""

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .calculus import compose, matrix_net, relu_identity, scalar_mul
from .euler import SDEProblem
from .kolmogorov import ApproximationFamily
from .network import RELU, NeuralNet, net_from_dict, net_to_dict, realize

DEFAULT_T = 1.0


def sum_abs_net(d):
    """sum_i |x_i| = sum_i relu(x_i) + relu(-x_i)."""
    first = np.vstack([np.eye(d), -np.eye(d)])
    return NeuralNet([(first, np.zeros(2 * d)), (np.ones((1, 2 * d)), np.zeros(1))])


def neg_identity_net(d):
    return compose(matrix_net(-np.eye(d)), relu_identity(d))


def zero_drift_net(d):
    return scalar_mul(0.0, relu_identity(d))


_DRIFT_NETS = {"zero": zero_drift_net, "neg_identity": neg_identity_net}
_DRIFT_FUNCS = {"zero": lambda y: np.zeros_like(y), "neg_identity": lambda y: -y}
_DRIFT_LIPSCHITZ = {"zero": 0.0, "neg_identity": 1.0}
_PAYOFF_NETS = {"sum_abs": sum_abs_net}
_PAYOFF_FUNCS = {"sum_abs": lambda y: np.abs(y).sum(axis=-1)}


@dataclass(frozen=True)
class ProblemSpec:
    """A problem family; drift and payoff are names of exact nets or fixed networks."""

    id: str
    drift: Union[str, NeuralNet]
    payoff: Union[str, NeuralNet]
    T: float = DEFAULT_T
    diffusion_scale: float = math.sqrt(2.0)
    d: Union[int, None] = None

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if isinstance(self.drift, str) and self.drift not in _DRIFT_NETS:
            raise ValueError(f"unknown drift {self.drift!r}")
        if isinstance(self.payoff, str) and self.payoff not in _PAYOFF_NETS:
            raise ValueError(f"unknown payoff {self.payoff!r}")

    def _dim(self, d):
        if d is None:
            d = self.d
        if d is None:
            raise ValueError(f"problem {self.id!r} needs a dimension")
        if self.d is not None and d != self.d:
            raise ValueError(f"problem {self.id!r} is fixed to d = {self.d}, asked for {d}")
        return d

    def drift_net(self, d=None):
        d = self._dim(d)
        return _DRIFT_NETS[self.drift](d) if isinstance(self.drift, str) else self.drift

    def payoff_net(self, d=None):
        d = self._dim(d)
        return _PAYOFF_NETS[self.payoff](d) if isinstance(self.payoff, str) else self.payoff

    def sde_problem(self, d=None, net_backed=False):
        d = self._dim(d)
        if net_backed or not isinstance(self.drift, str):
            dnet = self.drift_net(d)
            drift = lambda y: realize(dnet, RELU, y)
        else:
            drift = _DRIFT_FUNCS[self.drift]
        if net_backed or not isinstance(self.payoff, str):
            pnet = self.payoff_net(d)
            payoff = lambda y: realize(pnet, RELU, y)[..., 0]
        else:
            payoff = _PAYOFF_FUNCS[self.payoff]
        kappa = _DRIFT_LIPSCHITZ.get(self.drift, 0.0) if isinstance(self.drift, str) else 0.0
        return SDEProblem(d, self.T, drift, payoff, self.diffusion_scale * np.eye(d), kappa, self.id)

    def family(self):
        """Exact coefficient nets; 7 d^2 dominates the parameter counts of the bundled nets."""
        return ApproximationFamily(
            name=self.id,
            payoff_net=lambda d, eps: self.payoff_net(d),
            drift_net=lambda d, eps: self.drift_net(d),
            kappa=7.0, theta=1.0, d1=0.5, d2=0.0, d3=4.0, d4=0.0, d5=0.0, d6=0.5, e=0.0,
            diffusion_scale=self.diffusion_scale,
        )

    def has_reference(self):
        return self.id in BUNDLED and self.diffusion_scale == math.sqrt(2.0) \
            and self.drift == BUNDLED[self.id].drift and self.payoff == BUNDLED[self.id].payoff

    def to_dict(self):
        out = {"id": self.id, "T": self.T, "diffusion_scale": self.diffusion_scale}
        if self.d is not None:
            out["d"] = self.d
        out["drift"] = self.drift if isinstance(self.drift, str) else {"net": net_to_dict(self.drift)}
        out["payoff"] = self.payoff if isinstance(self.payoff, str) else {"net": net_to_dict(self.payoff)}
        return out


BUNDLED = {
    "heat_abs": ProblemSpec("heat_abs", "zero", "sum_abs"),
    "ou_abs": ProblemSpec("ou_abs", "neg_identity", "sum_abs"),
}


def get_problem(name, T=None):
    if name not in BUNDLED:
        raise ValueError(f"unknown problem {name!r}; bundled: {', '.join(BUNDLED)}")
    spec = BUNDLED[name]
    return spec if T is None else ProblemSpec(spec.id, spec.drift, spec.payoff, T, spec.diffusion_scale)


def _coefficient(value, kind):
    if isinstance(value, str):
        return value
    if isinstance(value, dict) and "net" in value:
        return net_from_dict(value["net"])
    raise ValueError(f"{kind} must be a name or {{'net': ...}}")


def problem_from_dict(doc):
    try:
        return ProblemSpec(
            id=str(doc["id"]),
            drift=_coefficient(doc["drift"], "drift"),
            payoff=_coefficient(doc["payoff"], "payoff"),
            T=float(doc.get("T", DEFAULT_T)),
            diffusion_scale=float(doc.get("diffusion_scale", math.sqrt(2.0))),
            d=None if doc.get("d") is None else int(doc["d"]),
        )
    except KeyError as exc:
        raise ValueError(f"problem document is missing {exc}") from None


def load_problem(path):
    with open(path) as fh:
        return problem_from_dict(json.load(fh))
