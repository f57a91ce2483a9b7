"""Minimal reverse-mode automatic differentiation over numpy arrays.

Every operation builds a `Var` whose ``parents`` hold (parent, vjp) pairs;
``backward`` walks the graph in reverse topological order and accumulates
gradients into ``Var.grad``. The op set is deliberately small: dense linear
maps, elementwise arithmetic, column stacking/slicing, sum-of-squares
reductions, and the activation-jet primitive from ``kernels``. That is
enough to express network forwards, derivative jets, learned-dynamics
residuals, and every training loss in the package, with gradients that are
exact by construction.

Values are float64 throughout. Losses are 0-d arrays.
"""

import numpy as np

from . import kernels


class Var:
    """A node in the computation graph: a value plus vjp edges to parents."""

    __slots__ = ("value", "parents", "grad")

    def __init__(self, value, parents=()):
        self.value = value
        self.parents = parents
        self.grad = None

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Var(shape={np.shape(self.value)})"


def leaf(x):
    """Wrap an array (or scalar) as a graph leaf."""
    return Var(np.asarray(x, dtype=np.float64))


def backward(root):
    """Accumulate d(root)/d(leaf) into .grad of every node reachable from root."""
    if root.value.ndim != 0:
        raise ValueError("backward expects a scalar root")
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent, _ in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    root.grad = np.ones(())
    for node in reversed(order):
        g = node.grad
        if g is None:
            continue
        for parent, vjp in node.parents:
            contrib = vjp(g)
            parent.grad = contrib if parent.grad is None else parent.grad + contrib


# ---------------------------------------------------------------------------
# elementwise arithmetic (same-shape operands, or Var op python float)

def add(a, b):
    return Var(a.value + b.value, ((a, lambda g: g), (b, lambda g: g)))


def sub(a, b):
    return Var(a.value - b.value, ((a, lambda g: g), (b, lambda g: -g)))


def mul(a, b):
    av, bv = a.value, b.value
    return Var(av * bv, ((a, lambda g: g * bv), (b, lambda g: g * av)))


def neg(a):
    return Var(-a.value, ((a, lambda g: -g),))


def scale(a, c):
    c = float(c)
    return Var(a.value * c, ((a, lambda g: g * c),))


def add_const(a, c):
    return Var(a.value + np.asarray(c, dtype=np.float64), ((a, lambda g: g),))


def square(a):
    av = a.value
    return Var(av * av, ((a, lambda g: 2.0 * g * av),))


def mul_rowvec(a, r):
    """Multiply (n, F) by a constant row vector (F,), broadcast over rows."""
    r = np.asarray(r, dtype=np.float64)
    return Var(a.value * r, ((a, lambda g: g * r),))


# ---------------------------------------------------------------------------
# reductions

def sum_all(a):
    return Var(np.sum(a.value), ((a, lambda g: np.broadcast_to(g, a.value.shape)),))


def sumsq(a):
    """sum(a**2) as a single fused node."""
    av = a.value
    return Var(np.sum(av * av), ((a, lambda g: (2.0 * g) * av),))


def mean_all(a):
    n = a.value.size
    return Var(np.mean(a.value),
               ((a, lambda g: np.broadcast_to(g / n, a.value.shape)),))


# ---------------------------------------------------------------------------
# structure: columns and slot stacks

def hstack(cols):
    """Stack (n, 1) columns into (n, F)."""
    vals = [c.value for c in cols]
    out = np.concatenate(vals, axis=1)
    parents = []
    j = 0
    for c in cols:
        w = c.value.shape[1]
        parents.append((c, _col_slice_vjp(j, j + w)))
        j += w
    return Var(out, tuple(parents))


def _col_slice_vjp(j0, j1):
    return lambda g: g[:, j0:j1]


def col(a, j):
    """Extract column j of (n, F) as (n, 1)."""
    F = a.value.shape[1]

    def vjp(g):
        out = np.zeros_like(a.value)
        out[:, j:j + 1] = g
        return out

    if not 0 <= j < F:
        raise IndexError(f"column {j} out of range for {F} features")
    return Var(a.value[:, j:j + 1].copy(), ((a, vjp),))


def slot(z, i):
    """Extract slot i of a (S, n, w) stack as (n, w)."""

    def vjp(g):
        out = np.zeros_like(z.value)
        out[i] = g
        return out

    return Var(z.value[i].copy(), ((z, vjp),))


# ---------------------------------------------------------------------------
# dense layers

def linear(a, W, b=None):
    """(n, k) @ W.T + b with W stored (out, in)."""
    av, Wv = a.value, W.value
    out = av @ Wv.T
    parents = [(a, lambda g: g @ Wv),
               (W, lambda g: g.T @ av)]
    if b is not None:
        out = out + b.value
        parents.append((b, lambda g: g.sum(axis=0)))
    return Var(out, tuple(parents))


def linear_slots(z, W, b=None):
    """Apply a dense layer to every slot of a (S, n, k) stack.

    The bias is added to the value slot (index 0) only: derivative slots are
    linear in the input and carry no constant term.
    """
    zv, Wv = z.value, W.value
    S, n, k = zv.shape
    m = Wv.shape[0]
    out = (zv.reshape(S * n, k) @ Wv.T).reshape(S, n, m)
    parents = [(z, lambda g: (g.reshape(S * n, m) @ Wv).reshape(S, n, k)),
               (W, lambda g: g.reshape(S * n, m).T @ zv.reshape(S * n, k))]
    if b is not None:
        out[0] += b.value

        def bias_vjp(g):
            return g[0].sum(axis=0)

        parents.append((b, bias_vjp))
    return Var(out, tuple(parents))


# ---------------------------------------------------------------------------
# activations

def act(a, kind):
    """Plain elementwise activation on (n, w)."""
    z = a.value[np.newaxis]
    Y, cache = kernels.act_jet_forward(kind, kernels.PLAIN, z)

    def vjp(g):
        return kernels.act_jet_backward(kind, kernels.PLAIN, z, cache,
                                        g[np.newaxis])[0]

    return Var(Y[0], ((a, vjp),))


def act_slots(z, kind, layout):
    """Activation jet applied to a (S, n, w) slot stack."""
    zv = z.value
    Y, cache = kernels.act_jet_forward(kind, layout, zv)

    def vjp(g):
        return kernels.act_jet_backward(kind, layout, zv, cache, g)

    return Var(Y, ((z, vjp),))
