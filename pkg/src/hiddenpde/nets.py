"""Dense feed-forward networks with exact input-derivative jets.

The two differentiation mechanisms live here:

* forward jet propagation: directional derivatives of the network output
  with respect to its inputs, up to 4th order in one spatial direction (or
  the full second-order set in two), carried layer by layer through the
  closed-form activation derivatives — exact to machine precision;
* reverse mode: gradients of scalar losses with respect to all weights and
  biases, obtained by running the same propagation through the tape, so
  parameter gradients are exact even for losses built from input-derivative
  terms.

Networks are plain immutable parameter containers; all computation is in
free functions or the thin TapedMlp wrapper.
"""

import base64
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels, tape
from .errors import (
    ConfigError,
    InvalidArchitectureError,
    IoError,
    NumericError,
    ShapeError,
    UnsupportedOrderError,
)

ACTIVATIONS = ("tanh", "sin", "identity")

MAX_SPATIAL_ORDER = 4

CHECKPOINT_FORMAT = "hiddenpde-mlp"
CHECKPOINT_VERSION = 1


def _readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MlpParams:
    """Weights and biases of one dense network.

    ``weights[k]`` has shape (layer_widths[k+1], layer_widths[k]); the
    activation applies to hidden layers only. A two-width network is plain
    affine. Arrays are read-only; instances are safe to share.
    """

    layer_widths: tuple
    weights: tuple
    biases: tuple
    activation: str = "tanh"
    seed: Optional[int] = None

    def __post_init__(self):
        widths = tuple(int(w) for w in self.layer_widths)
        if len(widths) < 2 or any(w <= 0 for w in widths):
            raise InvalidArchitectureError(
                f"layer widths must be >=2 positive integers, got {widths}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if len(self.weights) != len(widths) - 1 or len(self.biases) != len(widths) - 1:
            raise InvalidArchitectureError("parameter count does not match widths")
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (widths[k + 1], widths[k]) or b.shape != (widths[k + 1],):
                raise InvalidArchitectureError(
                    f"layer {k}: weight {W.shape} / bias {b.shape} inconsistent "
                    f"with widths {widths}")
        object.__setattr__(self, "layer_widths", widths)
        object.__setattr__(self, "weights", tuple(_readonly(W) for W in self.weights))
        object.__setattr__(self, "biases", tuple(_readonly(b) for b in self.biases))

    @property
    def input_dim(self):
        return self.layer_widths[0]

    @property
    def output_dim(self):
        return self.layer_widths[-1]

    @property
    def n_params(self):
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))


def mlp_init(layer_widths, activation="tanh", seed=0):
    """Glorot-uniform weights, zero biases; deterministic in the seed."""
    widths = tuple(int(w) for w in layer_widths)
    if len(widths) < 2 or any(w <= 0 for w in widths):
        raise InvalidArchitectureError(
            f"layer widths must be >=2 positive integers, got {layer_widths}")
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(widths, tuple(weights), tuple(biases), activation, seed)


def mlp_forward(params, x):
    """Plain forward pass. Accepts (d,) or (n, d); returns matching shape."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = x[np.newaxis] if single else x
    if a.ndim != 2 or a.shape[1] != params.input_dim:
        raise ShapeError(
            f"input dim {x.shape} incompatible with network input "
            f"{params.input_dim}")
    kind = kernels.ACTIVATION_CODES[params.activation]
    last = len(params.weights) - 1
    for k, (W, b) in enumerate(zip(params.weights, params.biases)):
        a = a @ W.T + b
        if k < last:
            a, _ = kernels.act_jet_forward(kind, kernels.PLAIN, a[np.newaxis])
            a = a[0]
    return a[0] if single else a


# ---------------------------------------------------------------------------
# jets

@dataclass(frozen=True)
class JetRequest:
    """Which input-derivatives to propagate.

    1D: derivatives along ``space_axes[0]`` up to ``order`` (<= 4), plus a
    first derivative along ``time_axis`` when given. 2D: the full
    second-order set (x, y, xx, xy, yy) over ``space_axes`` plus d/dt.
    """

    order: int = 2
    time_axis: Optional[int] = 0
    space_axes: tuple = (1,)

    def __post_init__(self):
        if len(self.space_axes) not in (1, 2):
            raise ConfigError("jets support 1 or 2 spatial axes")
        if len(self.space_axes) == 1:
            if not 1 <= self.order <= MAX_SPATIAL_ORDER:
                raise UnsupportedOrderError(
                    f"spatial order {self.order} outside 1..{MAX_SPATIAL_ORDER}")
        else:
            if not 1 <= self.order <= 2:
                raise UnsupportedOrderError(
                    "2D jets carry mixed derivatives up to total order 2")

    @property
    def dims(self):
        return len(self.space_axes)

    @property
    def layout(self):
        return kernels.JET2D if self.dims == 2 else self.order

    @property
    def n_slots(self):
        return 7 if self.dims == 2 else self.order + 2


@dataclass
class JetSlots:
    """Batched jet of one network over n points (tape Vars).

    ``spatial`` is the list [u_x, u_xx, ...] (1D, ascending order). For 2D
    requests the named second-order partials are populated instead.
    """

    value: tape.Var
    d_t: tape.Var
    spatial: list
    d_y: Optional[tape.Var] = None
    d_xy: Optional[tape.Var] = None
    d_yy: Optional[tape.Var] = None

    def by_name(self, name):
        named = {"u": self.value, "t": self.d_t, "y": self.d_y,
                 "xy": self.d_xy, "yy": self.d_yy}
        if name in named and named[name] is not None:
            return named[name]
        if name.startswith("x") and set(name) == {"x"}:
            k = len(name)
            if k <= len(self.spatial):
                return self.spatial[k - 1]
        raise ConfigError(f"jet does not carry derivative {name!r}")


@dataclass(frozen=True)
class DerivativeJet:
    """Single-point jet: exact derivatives of the network at one point."""

    point: tuple
    value: np.ndarray
    d_t: np.ndarray
    spatial: tuple
    d_y: Optional[np.ndarray] = None
    d_xy: Optional[np.ndarray] = None
    d_yy: Optional[np.ndarray] = None


class TapedMlp:
    """A network wired into the tape so losses backpropagate to parameters."""

    def __init__(self, params):
        self.params = params
        self.kind = kernels.ACTIVATION_CODES[params.activation]
        self.w_vars = [tape.leaf(W) for W in params.weights]
        self.b_vars = [tape.leaf(b) for b in params.biases]

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.params.input_dim:
            raise ShapeError(f"expected (n, {self.params.input_dim}) input, "
                             f"got {x.shape}")
        a = tape.leaf(x)
        last = len(self.w_vars) - 1
        for k, (W, b) in enumerate(zip(self.w_vars, self.b_vars)):
            a = tape.linear(a, W, b)
            if k < last:
                a = tape.act(a, self.kind)
        return a

    def jet(self, x, req):
        """Propagate value + requested derivative slots over a batch.

        Seeds the input stack with unit directions, then alternates dense
        layers (applied to every slot, bias on the value slot only) with
        the activation-jet kernel.
        """
        x = np.asarray(x, dtype=np.float64)
        d = self.params.input_dim
        if x.ndim != 2 or x.shape[1] != d:
            raise ShapeError(f"expected (n, {d}) input, got {x.shape}")
        for ax in req.space_axes:
            if not 0 <= ax < d:
                raise ShapeError(f"space axis {ax} outside input dim {d}")
        if req.time_axis is not None and not 0 <= req.time_axis < d:
            raise ShapeError(f"time axis {req.time_axis} outside input dim {d}")

        n = x.shape[0]
        S = req.n_slots
        seed = np.zeros((S, n, d))
        seed[0] = x
        if req.time_axis is not None:
            seed[1, :, req.time_axis] = 1.0
        seed[2, :, req.space_axes[0]] = 1.0
        if req.dims == 2:
            seed[3, :, req.space_axes[1]] = 1.0

        z = tape.leaf(seed)
        layout = req.layout
        last = len(self.w_vars) - 1
        for k, (W, b) in enumerate(zip(self.w_vars, self.b_vars)):
            z = tape.linear_slots(z, W, b)
            if k < last:
                z = tape.act_slots(z, self.kind, layout)

        if req.dims == 2:
            names = list(range(7))
            v, t, dx, dy, dxx, dxy, dyy = (tape.slot(z, i) for i in names)
            spatial = [dx, dxx] if req.order == 2 else [dx]
            return JetSlots(value=v, d_t=t, spatial=spatial,
                            d_y=dy, d_xy=dxy, d_yy=dyy)
        v = tape.slot(z, 0)
        t = tape.slot(z, 1)
        spatial = [tape.slot(z, 2 + k) for k in range(req.order)]
        return JetSlots(value=v, d_t=t, spatial=spatial)

    def grads(self):
        """Per-layer (dW, db) pairs accumulated by the last backward pass."""
        out = []
        for W, b in zip(self.w_vars, self.b_vars):
            gW = W.grad if W.grad is not None else np.zeros_like(W.value)
            gb = b.grad if b.grad is not None else np.zeros_like(b.value)
            out.append((gW, gb))
        return out


def jet_propagate(params, point, order=2, time_axis=0, space_axes=None):
    """Exact derivatives of the network at one point.

    For the default 1D layout the point is (t, x) and the jet carries
    (u, u_t, u_x, ..., up to the requested order). Pass ``time_axis=None``
    for networks without a time input (d_t comes back zero).
    """
    point = np.asarray(point, dtype=np.float64)
    if point.ndim != 1:
        raise ShapeError("jet_propagate expects a single point")
    if space_axes is None:
        space_axes = (1,) if params.input_dim >= 2 else (0,)
    if params.input_dim < 2:
        time_axis = None
    req = JetRequest(order=order, time_axis=time_axis,
                     space_axes=tuple(space_axes))
    net = TapedMlp(params)
    slots = net.jet(point[np.newaxis], req)

    def val(v):
        return None if v is None else v.value[0].copy()

    return DerivativeJet(
        point=tuple(point.tolist()),
        value=val(slots.value),
        d_t=val(slots.d_t),
        spatial=tuple(val(s) for s in slots.spatial),
        d_y=val(slots.d_y),
        d_xy=val(slots.d_xy),
        d_yy=val(slots.d_yy),
    )


# ---------------------------------------------------------------------------
# parameter gradients

@dataclass
class GradientVector:
    """Loss value plus per-layer partials matching an MlpParams layout."""

    loss: float
    layers: list  # [(dW, db), ...]

    def flat(self):
        return np.concatenate([np.concatenate([dW.ravel(), db.ravel()])
                               for dW, db in self.layers])


def param_gradient(loss_builder, params_list):
    """Gradients of a scalar loss with respect to several networks.

    ``loss_builder`` receives one TapedMlp per entry of ``params_list`` and
    must return a scalar tape Var built from their forwards/jets.
    """
    nets = [TapedMlp(p) for p in params_list]
    loss = loss_builder(nets)
    if not np.isfinite(loss.value):
        raise NumericError(f"loss is non-finite ({loss.value})")
    tape.backward(loss)
    return [GradientVector(float(loss.value), net.grads()) for net in nets]


# ---------------------------------------------------------------------------
# flat parameter vectors (optimizer interface)

def flatten_params(params_list):
    """Concatenate all weights/biases into one float64 vector."""
    chunks = []
    for p in params_list:
        for W, b in zip(p.weights, p.biases):
            chunks.append(W.ravel())
            chunks.append(b.ravel())
    return np.concatenate(chunks) if chunks else np.zeros(0)


def unflatten_params(theta, templates):
    """Rebuild MlpParams list from a flat vector (inverse of flatten_params)."""
    out = []
    i = 0
    for p in templates:
        weights, biases = [], []
        for W, b in zip(p.weights, p.biases):
            weights.append(theta[i:i + W.size].reshape(W.shape).copy())
            i += W.size
            biases.append(theta[i:i + b.size].copy())
            i += b.size
        out.append(MlpParams(p.layer_widths, tuple(weights), tuple(biases),
                             p.activation, p.seed))
    if i != theta.size:
        raise ShapeError(f"flat vector length {theta.size} != expected {i}")
    return out


# ---------------------------------------------------------------------------
# checkpoints

def _encode(a):
    return base64.b64encode(np.ascontiguousarray(a, dtype="<f8").tobytes()).decode()


def _decode(s, shape):
    buf = base64.b64decode(s.encode())
    return np.frombuffer(buf, dtype="<f8").reshape(shape).copy()


def save_mlp(params, path):
    """Self-describing JSON checkpoint; round-trips bitwise."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_widths": list(params.layer_widths),
        "activation": params.activation,
        "seed": params.seed,
        "weights": [_encode(W) for W in params.weights],
        "biases": [_encode(b) for b in params.biases],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_mlp(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoError(f"cannot read checkpoint {path}: {exc}") from exc
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise IoError(f"{path}: not a network checkpoint")
    widths = tuple(doc["layer_widths"])
    weights = tuple(_decode(s, (widths[k + 1], widths[k]))
                    for k, s in enumerate(doc["weights"]))
    biases = tuple(_decode(s, (widths[k + 1],))
                   for k, s in enumerate(doc["biases"]))
    return MlpParams(widths, weights, biases, doc["activation"], doc.get("seed"))
