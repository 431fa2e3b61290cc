"""Network combinators: composition, parallelization, affine pieces, sums.

Every combinator returns a new NeuralNet. The ``*_dims`` helpers compute the
layer dimensions of a construction without building any weights, which is
what makes parameter counts of very large networks cheap to obtain.
"""

import numpy as np
from scipy.linalg import block_diag

from .network import NeuralNet, PreconditionError, ShapeError


class SkipComposeError(PreconditionError):
    """Names the inequality of the skip-composition requirements that failed."""

    def __init__(self, inequality, message):
        super().__init__(f"{inequality}: {message}")
        self.inequality = inequality


def _nonempty(nets, what):
    nets = list(nets)
    if not nets:
        raise PreconditionError(f"{what} needs at least one network")
    return nets


# --- composition and parallelization --------------------------------------

def compose(outer, inner):
    """Network realizing outer(inner(x)); the junction layers are merged."""
    if outer.input_dim != inner.output_dim:
        raise ShapeError(
            f"cannot compose: outer takes {outer.input_dim} inputs, inner gives {inner.output_dim}"
        )
    W1, B1 = outer.layers[0]
    Wl, Bl = inner.layers[-1]
    merged = (W1 @ Wl, W1 @ Bl + B1)
    L, Linner = outer.depth, inner.depth
    if L > 1 and Linner > 1:
        layers = inner.layers[:-1] + (merged,) + outer.layers[1:]
    elif L > 1:
        layers = (merged,) + outer.layers[1:]
    elif Linner > 1:
        layers = inner.layers[:-1] + (merged,)
    else:
        layers = (merged,)
    return NeuralNet(layers)


def parallelize(nets):
    """Block-diagonal stacking of equal-depth networks."""
    nets = _nonempty(nets, "parallelize")
    depth = nets[0].depth
    if any(n.depth != depth for n in nets):
        raise PreconditionError(f"parallelize needs equal depths, got {[n.depth for n in nets]}")
    if len(nets) == 1:
        return nets[0]
    layers = []
    for k in range(depth):
        layers.append((
            block_diag(*[n.layers[k][0] for n in nets]),
            np.concatenate([n.layers[k][1] for n in nets]),
        ))
    return NeuralNet(layers)


# --- affine building blocks -----------------------------------------------

def bias_net(B):
    B = np.atleast_1d(np.asarray(B, dtype=np.float64))
    return NeuralNet([(np.eye(B.size), B)])


def matrix_net(W):
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    return NeuralNet([(W, np.zeros(W.shape[0]))])


def scalar_mul(lam, net):
    # emitted even for lam == 0 so that the dims never change
    return compose(matrix_net(lam * np.eye(net.output_dim)), net)


def relu_identity(d):
    """Two-unit relu split per coordinate: x = relu(x) - relu(-x)."""
    if d < 1:
        raise PreconditionError("dimension must be positive")
    one = NeuralNet([
        (np.array([[1.0], [-1.0]]), np.zeros(2)),
        (np.array([[1.0, -1.0]]), np.zeros(1)),
    ])
    return parallelize([one] * d)


def _stacked_identities(m, n):
    return np.tile(np.eye(m), (1, n))


def sum_fanin(m, n):
    return matrix_net(_stacked_identities(m, n))


def fanout(m, n):
    return matrix_net(_stacked_identities(m, n).T)


# --- sums -------------------------------------------------------------------

def same_length_sum(nets):
    """Network realizing x -> sum_k net_k(x)."""
    nets = _nonempty(nets, "same_length_sum")
    first = nets[0]
    for n in nets[1:]:
        if (n.depth, n.input_dim, n.output_dim) != (first.depth, first.input_dim, first.output_dim):
            raise PreconditionError("same_length_sum needs equal depth, input and output dims")
    k = len(nets)
    return compose(sum_fanin(first.output_dim, k), compose(parallelize(nets), fanout(first.input_dim, k)))


def block_selector(k, n, m):
    """Matrix picking the k-th (0-based) m-block out of n stacked blocks."""
    A = np.zeros((m, n * m))
    A[:, k * m:(k + 1) * m] = np.eye(m)
    return A


def weighted_block_sum(weights, nets):
    """Network realizing (x_1, ..., x_n) -> sum_k h_k net_k(x_k)."""
    nets = _nonempty(nets, "weighted_block_sum")
    weights = [float(h) for h in weights]
    if len(weights) != len(nets):
        raise PreconditionError(f"{len(weights)} weights for {len(nets)} networks")
    if any(n.dims != nets[0].dims for n in nets):
        raise PreconditionError("weighted_block_sum needs identical dims")
    n, m = len(nets), nets[0].input_dim
    terms = [
        scalar_mul(h, compose(net, matrix_net(block_selector(k, n, m))))
        for k, (h, net) in enumerate(zip(weights, nets))
    ]
    return same_length_sum(terms)


# --- identity-assisted constructions --------------------------------------

def identity_chain(idnet, depth):
    """Identity on R^d with the given depth, built from idnet (depth 1 is I_d)."""
    if depth == 1:
        return matrix_net(np.eye(idnet.input_dim))
    chain = idnet
    for _ in range(depth - 2):
        chain = compose(idnet, chain)
    return chain


def _check_skip(phi1, phi2, idnet):
    d = phi2.input_dim
    if idnet.depth != 2 or idnet.input_dim != idnet.output_dim:
        raise SkipComposeError("dims(I) = (d, i, d)", f"identity net has dims {idnet.dims}")
    for name, net in (("phi1", phi1), ("phi2", phi2)):
        if net.input_dim != d or net.output_dim != d:
            raise SkipComposeError(f"I({name}) = O({name}) = d", f"{name} has dims {net.dims}, d = {d}")
    if idnet.input_dim != d:
        raise SkipComposeError("I(I) = d", f"identity net acts on R^{idnet.input_dim}, d = {d}")
    width = idnet.dims[1]
    if not 2 <= width <= 2 * d:
        raise SkipComposeError("2 <= i <= 2d", f"identity width {width} with d = {d}")
    if phi1.depth >= 2:
        lhs, rhs = phi2.dims[-2], phi1.dims[-2] + width
        if lhs > rhs:
            raise SkipComposeError(
                "D_{L2-1}(phi2) <= D_{L1-1}(phi1) + i", f"{lhs} > {rhs}"
            )
    return width


def skip_compose(phi1, phi2, idnet):
    """Network realizing x -> phi2(x) + phi1(phi2(x)).

    phi1 runs next to identity channels that carry phi2(x) through its
    hidden layers; both branches are added by the last layer.
    """
    _check_skip(phi1, phi2, idnet)
    carried = same_length_sum([phi1, identity_chain(idnet, phi1.depth)])
    return compose(carried, phi2)


def compose_via_identity(outer, inner, idnet):
    if idnet.input_dim != inner.output_dim or idnet.output_dim != outer.input_dim:
        raise PreconditionError(
            f"identity net dims {idnet.dims} do not fit between {inner.dims} and {outer.dims}"
        )
    return compose(outer, compose(idnet, inner))


# --- dims-only mirrors ----------------------------------------------------

def compose_dims(outer, inner):
    if outer[0] != inner[-1]:
        raise ShapeError(f"cannot compose dims {outer} after {inner}")
    return tuple(inner[:-1]) + tuple(outer[1:])


def parallel_dims(all_dims):
    all_dims = [tuple(d) for d in all_dims]
    if len({len(d) for d in all_dims}) != 1:
        raise PreconditionError("parallelize needs equal depths")
    return tuple(int(sum(col)) for col in zip(*all_dims))


def sum_dims(all_dims):
    p = parallel_dims(all_dims)
    return (all_dims[0][0],) + p[1:-1] + (all_dims[0][-1],)


def block_sum_dims(dims, n):
    return (n * dims[0],) + tuple(n * l for l in dims[1:-1]) + (dims[-1],)


def skip_compose_dims(dims1, dims2, width):
    return tuple(dims2[:-1]) + tuple(l + width for l in dims1[1:-1]) + (dims1[-1],)
