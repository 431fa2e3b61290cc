"""Randomized property suites for the network calculus.

Each suite builds random instances, evaluates them against an independent
oracle and returns the number of failing instances. ``corrupt=True`` nudges
one weight of every constructed network; the realization suites must catch it.
"""

import numpy as np

from . import calculus as C
from .network import RELU, NeuralNet, dumps, loads, realize

RTOL = 1e-10


def random_dims(rng, depth=None, d_in=None, d_out=None, max_width=8, max_depth=4):
    depth = int(rng.integers(1, max_depth + 1)) if depth is None else depth
    dims = list(rng.integers(1, max_width + 1, size=depth + 1))
    if d_in is not None:
        dims[0] = d_in
    if d_out is not None:
        dims[-1] = d_out
    return tuple(int(v) for v in dims)


def random_net(rng, dims):
    return NeuralNet([
        (rng.standard_normal((dims[k], dims[k - 1])), rng.standard_normal(dims[k]))
        for k in range(1, len(dims))
    ])


def close(a, b, rtol=RTOL):
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= rtol * max(1.0, float(np.max(np.abs(b))))))


def corrupted(net):
    W, b = net.layers[-1]
    W = W.copy()
    W[0, 0] += 1e-3 * max(1.0, abs(W[0, 0]))
    return NeuralNet(net.layers[:-1] + ((W, b),))


class _Runner:
    def __init__(self, rng, corrupt, points):
        self.rng, self.corrupt, self.points = rng, corrupt, points

    def net(self, net):
        return corrupted(net) if self.corrupt else net

    def xs(self, d, scale=3.0):
        return scale * self.rng.standard_normal((self.points, d))


def _suite_compose(r):
    n1 = random_dims(r.rng)
    outer = random_net(r.rng, n1)
    inner = random_net(r.rng, random_dims(r.rng, d_out=n1[0]))
    net = r.net(C.compose(outer, inner))
    x = r.xs(inner.input_dim)
    return close(realize(net, RELU, x), realize(outer, RELU, realize(inner, RELU, x)))


def _suite_compose_depth(r):
    n1 = random_dims(r.rng)
    outer = random_net(r.rng, n1)
    inner = random_net(r.rng, random_dims(r.rng, d_out=n1[0]))
    net = r.net(C.compose(outer, inner))
    ok = net.depth == outer.depth + inner.depth - 1
    return ok and net.dims == C.compose_dims(outer.dims, inner.dims)


def _suite_associativity(r):
    a = random_net(r.rng, random_dims(r.rng))
    b = random_net(r.rng, random_dims(r.rng, d_out=a.input_dim))
    c = random_net(r.rng, random_dims(r.rng, d_out=b.input_dim))
    left = r.net(C.compose(C.compose(a, b), c))
    right = C.compose(a, C.compose(b, c))
    x = r.xs(c.input_dim)
    return close(realize(left, RELU, x), realize(right, RELU, x))


def _suite_parallelize(r):
    depth = int(r.rng.integers(1, 5))
    nets = [random_net(r.rng, random_dims(r.rng, depth)) for _ in range(int(r.rng.integers(1, 4)))]
    net = r.net(C.parallelize(nets))
    additive = all(net.dim_at(k) == sum(n.dim_at(k) for n in nets) for k in range(depth + 2))
    x = r.xs(net.input_dim)
    parts, lo = [], 0
    for n in nets:
        parts.append(realize(n, RELU, x[:, lo:lo + n.input_dim]))
        lo += n.input_dim
    return additive and close(realize(net, RELU, x), np.hstack(parts))


def _suite_bias(r):
    n = int(r.rng.integers(1, 9))
    B = r.rng.standard_normal(n)
    net = r.net(C.bias_net(B))
    x = r.xs(n)
    return net.dims == (n, n) and close(realize(net, RELU, x), x + B)


def _suite_matrix(r):
    m, n = (int(v) for v in r.rng.integers(1, 9, size=2))
    W = r.rng.standard_normal((m, n))
    net = r.net(C.matrix_net(W))
    x = r.xs(n)
    return net.dims == (n, m) and close(realize(net, RELU, x), x @ W.T)


def _suite_scalar(r):
    base = random_net(r.rng, random_dims(r.rng))
    lam = float(r.rng.normal(scale=3.0))
    net = r.net(C.scalar_mul(lam, base))
    x = r.xs(base.input_dim)
    return net.dims == base.dims and close(realize(net, RELU, x), lam * realize(base, RELU, x))


def _suite_relu_identity(r):
    d = int(r.rng.integers(1, 9))
    net = r.net(C.relu_identity(d))
    x = r.xs(d, scale=10.0)
    return net.dims == (d, 2 * d, d) and np.array_equal(realize(net, RELU, x), x)


def _suite_identity_params(r):
    d = int(r.rng.integers(1, 51))
    net = r.net(C.relu_identity(d))
    x = r.xs(d)
    return net.param_count() == 4 * d * d + 3 * d and np.array_equal(realize(net, RELU, x), x)


def _suite_fanin(r):
    m, n = (int(v) for v in r.rng.integers(1, 6, size=2))
    net = r.net(C.sum_fanin(m, n))
    x = r.xs(m * n)
    return net.dims == (n * m, m) and close(realize(net, RELU, x), x.reshape(-1, n, m).sum(axis=1))


def _suite_fanout(r):
    m, n = (int(v) for v in r.rng.integers(1, 6, size=2))
    net = r.net(C.fanout(m, n))
    x = r.xs(m)
    return net.dims == (m, n * m) and close(realize(net, RELU, x), np.tile(x, (1, n)))


def _suite_sum(r):
    first = random_dims(r.rng)
    nets = [random_net(r.rng, random_dims(r.rng, len(first) - 1, first[0], first[-1]))
            for _ in range(int(r.rng.integers(1, 4)))]
    net = r.net(C.same_length_sum(nets))
    x = r.xs(first[0])
    ok = net.dims == C.sum_dims([n.dims for n in nets])
    return ok and close(realize(net, RELU, x), sum(realize(n, RELU, x) for n in nets))


def _suite_block_sum(r):
    dims = random_dims(r.rng)
    n = int(r.rng.integers(1, 5))
    nets = [random_net(r.rng, dims) for _ in range(n)]
    h = r.rng.standard_normal(n)
    net = r.net(C.weighted_block_sum(h, nets))
    x = r.xs(n * dims[0])
    blocks = x.reshape(x.shape[0], n, dims[0])
    expect = sum(h[k] * realize(nets[k], RELU, blocks[:, k]) for k in range(n))
    ok = net.dims == C.block_sum_dims(dims, n) and net.param_count() <= n * n * nets[0].param_count()
    return ok and close(realize(net, RELU, x), expect)


def _random_skip_pair(rng):
    d = int(rng.integers(1, 6))
    phi1 = random_net(rng, random_dims(rng, d_in=d, d_out=d))
    # keep the last hidden width of phi2 within the admissible range
    cap = phi1.dims[-2] + 2 * d if phi1.depth >= 2 else 8
    dims2 = list(random_dims(rng, d_in=d, d_out=d))
    if len(dims2) > 2:
        dims2[-2] = min(dims2[-2], cap)
    return d, phi1, random_net(rng, dims2)


def _suite_skip(r):
    d, phi1, phi2 = _random_skip_pair(r.rng)
    ident = C.relu_identity(d)
    net = r.net(C.skip_compose(phi1, phi2, ident))
    x = r.xs(d)
    y = realize(phi2, RELU, x)
    ok = net.dims == C.skip_compose_dims(phi1.dims, phi2.dims, 2 * d)
    ok = ok and net.param_count() <= phi2.param_count() + (ident.param_count() / 2 + phi1.param_count()) ** 2
    return ok and close(realize(net, RELU, x), y + realize(phi1, RELU, y))


def _suite_via_identity(r):
    d = int(r.rng.integers(1, 6))
    outer = random_net(r.rng, random_dims(r.rng, d_in=d))
    inner = random_net(r.rng, random_dims(r.rng, d_out=d))
    net = r.net(C.compose_via_identity(outer, inner, C.relu_identity(d)))
    x = r.xs(inner.input_dim)
    ok = net.param_count() <= 2 * (outer.param_count() + inner.param_count())
    return ok and close(realize(net, RELU, x), realize(outer, RELU, realize(inner, RELU, x)))


def _suite_roundtrip(r):
    net = r.net(random_net(r.rng, random_dims(r.rng)))
    back = loads(dumps(net))
    same = all(np.array_equal(W, V) and np.array_equal(b, c)
               for (W, b), (V, c) in zip(net.layers, back.layers))
    return same and back.dims == net.dims


SUITES = [
    ("compose realization", _suite_compose),
    ("compose depth L1+L2-1", _suite_compose_depth),
    ("compose associativity", _suite_associativity),
    ("parallelize blockwise", _suite_parallelize),
    ("bias net x+B", _suite_bias),
    ("matrix net Wx", _suite_matrix),
    ("scalar multiple", _suite_scalar),
    ("relu identity bit-exact", _suite_relu_identity),
    ("P(𝔦_d)=4d²+3d", _suite_identity_params),
    ("fan-in sum", _suite_fanin),
    ("fan-out copy", _suite_fanout),
    ("same-length sum", _suite_sum),
    ("weighted block sum", _suite_block_sum),
    ("skip composition", _suite_skip),
    ("composition via identity", _suite_via_identity),
    ("JSON round-trip", _suite_roundtrip),
]


def run_suites(instances=200, points=10, seed=0, corrupt=False):
    """[(name, failures, instances)] for every suite."""
    results = []
    for k, (name, fn) in enumerate(SUITES):
        runner = _Runner(np.random.default_rng([seed, k]), corrupt, points)
        failures = sum(0 if fn(runner) else 1 for _ in range(instances))
        results.append((name, failures, instances))
    return results
