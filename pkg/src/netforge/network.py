"""Feedforward networks stored as explicit (weight, bias) layer lists."""

import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class ShapeError(ValueError):
    """Raised when layer shapes do not chain or an input has the wrong length."""


class PreconditionError(ValueError):
    """Raised when a structural requirement of a construction is violated."""


@dataclass(frozen=True)
class Activation:
    kind: str
    fn: Optional[Callable] = None

    @classmethod
    def relu(cls):
        return cls("relu")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def custom(cls, fn):
        # fn must act componentwise on numpy arrays
        return cls("custom", fn)

    @classmethod
    def from_name(cls, name):
        if name == "relu":
            return cls.relu()
        if name == "identity":
            return cls.identity()
        raise ValueError(f"unknown activation {name!r}")

    def __call__(self, x):
        if self.kind == "relu":
            return np.maximum(x, 0.0)
        if self.kind == "identity":
            return x
        return self.fn(x)


RELU = Activation.relu()


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class NeuralNet:
    """Immutable list of layers (W_k, b_k), W_k of shape l_k x l_{k-1}."""

    __slots__ = ("_layers", "_dims")

    def __init__(self, layers):
        layers = list(layers)
        if not layers:
            raise ShapeError("a network needs at least one layer")
        frozen = []
        for k, (W, b) in enumerate(layers, start=1):
            W = _frozen(W)
            b = _frozen(b)
            if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
                raise ShapeError(f"layer {k}: weight must be a nonempty matrix, got shape {W.shape}")
            if b.shape != (W.shape[0],):
                raise ShapeError(f"layer {k}: bias shape {b.shape} does not match {W.shape[0]} rows")
            if frozen and W.shape[1] != frozen[-1][0].shape[0]:
                raise ShapeError(
                    f"layer {k}: {W.shape[1]} columns but previous layer has {frozen[-1][0].shape[0]} rows"
                )
            frozen.append((W, b))
        self._layers = tuple(frozen)
        self._dims = (frozen[0][0].shape[1],) + tuple(W.shape[0] for W, _ in frozen)

    @property
    def layers(self):
        return self._layers

    @property
    def depth(self):
        return len(self._layers)

    @property
    def dims(self):
        return self._dims

    @property
    def input_dim(self):
        return self._dims[0]

    @property
    def output_dim(self):
        return self._dims[-1]

    @property
    def hidden_count(self):
        return self.depth - 1

    def dim_at(self, n):
        if n < 0:
            raise ValueError("level must be nonnegative")
        return self._dims[n] if n <= self.depth else 0

    def param_count(self):
        return param_count_of_dims(self._dims)

    def __call__(self, x, act=RELU):
        return realize(self, act, x)

    def __repr__(self):
        return f"NeuralNet(dims={self._dims})"


def param_count_of_dims(dims):
    return sum(dims[k] * (dims[k - 1] + 1) for k in range(1, len(dims)))


def param_count(net):
    return net.param_count()


@dataclass(frozen=True)
class Structure:
    depth: int
    input_dim: int
    output_dim: int
    hidden_count: int
    dims: tuple
    dim_at: Callable


def structure(net):
    return Structure(net.depth, net.input_dim, net.output_dim, net.hidden_count, net.dims, net.dim_at)


def realize(net, act, x):
    """Evaluate the network at x; leading axes of x are batch axes."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (net.input_dim,):
        raise ShapeError(f"input of shape {x.shape} does not fit input dimension {net.input_dim}")
    h = x
    last = net.depth - 1
    for k, (W, b) in enumerate(net.layers):
        h = h @ W.T + b
        if k < last:
            h = act(h)
    return h


# --- JSON -----------------------------------------------------------------

def net_to_dict(net, activation="relu"):
    return {
        "activation": activation,
        "layers": [
            {
                "rows": int(W.shape[0]),
                "cols": int(W.shape[1]),
                "weights": W.ravel().tolist(),
                "bias": b.tolist(),
            }
            for W, b in net.layers
        ],
    }


def net_from_dict(doc):
    if not isinstance(doc, dict) or "layers" not in doc:
        raise ValueError("network document needs a 'layers' list")
    if doc.get("activation", "relu") not in ("relu", "identity"):
        raise ValueError(f"unsupported activation {doc.get('activation')!r}")
    layers = []
    for k, layer in enumerate(doc["layers"], start=1):
        try:
            rows, cols = int(layer["rows"]), int(layer["cols"])
            w = np.asarray(layer["weights"], dtype=np.float64)
            b = np.asarray(layer["bias"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"layer {k}: malformed entry ({exc})") from None
        if w.size != rows * cols:
            raise ShapeError(f"layer {k}: expected {rows * cols} weights, got {w.size}")
        layers.append((w.reshape(rows, cols), b))
    return NeuralNet(layers)


def dumps(net, activation="relu"):
    # json writes floats with repr, the shortest string that round-trips exactly
    return json.dumps(net_to_dict(net, activation), allow_nan=False)


def loads(text):
    return net_from_dict(json.loads(text))


def save(net, path, activation="relu"):
    with open(path, "w") as fh:
        fh.write(dumps(net, activation))
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return loads(fh.read())
