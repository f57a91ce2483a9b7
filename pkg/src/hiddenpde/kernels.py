"""Backend selection for the activation jet kernels.

The compiled extension (``hiddenpde._jetcore``) is preferred when present;
the pure-numpy rules are the fallback and the reference. Set the
environment variable ``HIDDENPDE_FORCE_NUMPY=1`` to force the fallback,
e.g. for debugging or benchmarking.
"""

import os

import numpy as np

from . import _jet_rules
from ._jet_rules import (  # noqa: F401  (re-exported constants)
    ACTIVATION_CODES,
    IDENTITY,
    JET2D,
    PLAIN,
    SIN,
    TANH,
)

_jetcore = None
if os.environ.get("HIDDENPDE_FORCE_NUMPY", "") not in ("1", "true", "yes"):
    try:
        from . import _jetcore  # type: ignore[no-redef]
    except ImportError:
        _jetcore = None


def backend_name():
    return "numpy" if _jetcore is None else "cython"


def act_jet_forward(kind, layout, Z):
    """Activation applied to a (S, n, w) slot stack -> (Y, cache)."""
    if _jetcore is None:
        return _jet_rules.act_jet_forward(kind, layout, Z)
    S = Z.shape[0]
    flat = np.ascontiguousarray(Z).reshape(S, -1)
    Y, cache = _jetcore.act_jet_forward(kind, layout, flat)
    return Y.reshape(Z.shape), cache.reshape(Z.shape[1:])


def act_jet_backward(kind, layout, Z, cache, Ybar):
    """Adjoint of act_jet_forward -> Zbar with the shape of Z."""
    if _jetcore is None:
        return _jet_rules.act_jet_backward(kind, layout, Z, cache, Ybar)
    S = Z.shape[0]
    flat_z = np.ascontiguousarray(Z).reshape(S, -1)
    flat_c = np.ascontiguousarray(cache).reshape(-1)
    flat_g = np.ascontiguousarray(Ybar).reshape(S, -1)
    Zbar = _jetcore.act_jet_backward(kind, layout, flat_z, flat_c, flat_g)
    return Zbar.reshape(Z.shape)


def jet1d_layout(order):
    """Slot layout code for a 1D jet of the given spatial order."""
    if not 1 <= order <= 4:
        raise ValueError(f"spatial order must be in 1..4, got {order}")
    return order
