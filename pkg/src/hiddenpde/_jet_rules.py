"""Pure-numpy activation jet kernels.

A "jet" here is a stack of directional-derivative slots propagated through
the network alongside the value. Applying a scalar activation sigma to a
preactivation stack Z requires combining the slots with the closed-form
derivatives of sigma (chain rule for repeated differentiation). This module
implements that combination, and its exact adjoint, for three slot layouts:

  PLAIN      Z[0] = value                                  (S = 1)
  JET1D(m)   Z = [value, d/dt, d/dx, ..., d^m/dx^m]        (S = m + 2)
  JET2D      Z = [value, d/dt, d/dx, d/dy, dxx, dxy, dyy]  (S = 7)

All slots are raw directional derivatives (not Taylor coefficients). The
compiled twin in ``_jetcore.pyx`` implements the same two entry points with
identical semantics; ``kernels.py`` picks one at import time.

Shapes: Z is (S, n, w) float64, C-contiguous. Returns (Y, cache) where the
cache is whatever the backward pass needs to rebuild the sigma derivatives
(tanh(z0) for tanh, z0 for sin, None for identity).
"""

import numpy as np

TANH = 0
SIN = 1
IDENTITY = 2

ACTIVATION_CODES = {"tanh": TANH, "sin": SIN, "identity": IDENTITY}

PLAIN = 0
JET2D = 10

# Highest sigma-derivative order needed: order-4 forward uses sigma^(4),
# its adjoint w.r.t. z0 uses sigma^(5).
_MAX_SIGMA_ORDER = 5


def sigma_chain(kind, cache, upto):
    """Derivatives sigma^(1..upto) evaluated from the forward cache.

    For tanh the cache is T = tanh(z0) and every derivative is a polynomial
    in T; for sin the cache is z0 itself.
    """
    if kind == TANH:
        T = cache
        T2 = T * T
        out = [1.0 - T2]
        if upto >= 2:
            out.append(-2.0 * T * out[0])
        if upto >= 3:
            out.append(-2.0 + T2 * (8.0 - 6.0 * T2))
        if upto >= 4:
            out.append(T * (16.0 + T2 * (-40.0 + 24.0 * T2)))
        if upto >= 5:
            out.append(16.0 + T2 * (-136.0 + T2 * (240.0 - 120.0 * T2)))
        return out
    if kind == SIN:
        z = cache
        c, s = np.cos(z), np.sin(z)
        cycle = [c, -s, -c, s, c]
        return cycle[:upto]
    # identity
    shape = cache.shape
    out = [np.ones(shape)]
    for _ in range(upto - 1):
        out.append(np.zeros(shape))
    return out


def _value_and_cache(kind, z0):
    if kind == TANH:
        T = np.tanh(z0)
        return T, T
    if kind == SIN:
        return np.sin(z0), z0.copy()
    return z0.copy(), z0


def act_jet_forward(kind, layout, Z):
    """Apply the activation to a slot stack. Returns (Y, cache)."""
    S = Z.shape[0]
    Y = np.empty_like(Z)
    z0 = Z[0]
    Y[0], cache = _value_and_cache(kind, z0)

    if layout == PLAIN:
        return Y, cache

    if layout == JET2D:
        s1, s2 = sigma_chain(kind, cache, 2)
        zt, zx, zy, zxx, zxy, zyy = Z[1], Z[2], Z[3], Z[4], Z[5], Z[6]
        Y[1] = s1 * zt
        Y[2] = s1 * zx
        Y[3] = s1 * zy
        Y[4] = s2 * zx * zx + s1 * zxx
        Y[5] = s2 * zx * zy + s1 * zxy
        Y[6] = s2 * zy * zy + s1 * zyy
        return Y, cache

    m = layout  # 1..4
    if S != m + 2:
        raise ValueError(f"layout {layout} expects {m + 2} slots, got {S}")
    sig = sigma_chain(kind, cache, m)
    s1 = sig[0]
    Y[1] = s1 * Z[1]
    a1 = Z[2]
    Y[2] = s1 * a1
    if m >= 2:
        s2 = sig[1]
        a2 = Z[3]
        Y[3] = s2 * a1 * a1 + s1 * a2
    if m >= 3:
        s3 = sig[2]
        a3 = Z[4]
        Y[4] = s3 * a1 ** 3 + 3.0 * s2 * a1 * a2 + s1 * a3
    if m >= 4:
        s4 = sig[3]
        a4 = Z[5]
        Y[5] = (s4 * a1 ** 4 + 6.0 * s3 * a1 * a1 * a2
                + 3.0 * s2 * a2 * a2 + 4.0 * s2 * a1 * a3 + s1 * a4)
    return Y, cache


def act_jet_backward(kind, layout, Z, cache, Ybar):
    """Adjoint of act_jet_forward: accumulate Zbar from Ybar."""
    Zbar = np.empty_like(Z)

    if layout == PLAIN:
        (s1,) = sigma_chain(kind, cache, 1)
        Zbar[0] = Ybar[0] * s1
        return Zbar

    if layout == JET2D:
        s1, s2, s3 = sigma_chain(kind, cache, 3)
        zt, zx, zy, zxx, zxy, zyy = Z[1], Z[2], Z[3], Z[4], Z[5], Z[6]
        g0, gt, gx, gy, gxx, gxy, gyy = Ybar
        Zbar[0] = (g0 * s1 + gt * s2 * zt + gx * s2 * zx + gy * s2 * zy
                   + gxx * (s3 * zx * zx + s2 * zxx)
                   + gxy * (s3 * zx * zy + s2 * zxy)
                   + gyy * (s3 * zy * zy + s2 * zyy))
        Zbar[1] = gt * s1
        Zbar[2] = gx * s1 + 2.0 * gxx * s2 * zx + gxy * s2 * zy
        Zbar[3] = gy * s1 + 2.0 * gyy * s2 * zy + gxy * s2 * zx
        Zbar[4] = gxx * s1
        Zbar[5] = gxy * s1
        Zbar[6] = gyy * s1
        return Zbar

    m = layout
    sig = sigma_chain(kind, cache, m + 1)
    s1, s2 = sig[0], sig[1]
    zt = Z[1]
    a1 = Z[2]
    g = Ybar
    zb0 = g[0] * s1 + g[1] * s2 * zt + g[2] * s2 * a1
    Zbar[1] = g[1] * s1
    zb1 = g[2] * s1
    if m >= 2:
        s3 = sig[2]
        a2 = Z[3]
        zb0 = zb0 + g[3] * (s3 * a1 * a1 + s2 * a2)
        zb1 = zb1 + 2.0 * g[3] * s2 * a1
        zb2 = g[3] * s1
    if m >= 3:
        s4 = sig[3]
        a3 = Z[4]
        zb0 = zb0 + g[4] * (s4 * a1 ** 3 + 3.0 * s3 * a1 * a2 + s2 * a3)
        zb1 = zb1 + g[4] * (3.0 * s3 * a1 * a1 + 3.0 * s2 * a2)
        zb2 = zb2 + 3.0 * g[4] * s2 * a1
        zb3 = g[4] * s1
    if m >= 4:
        s5 = sig[4]
        a4 = Z[5]
        zb0 = zb0 + g[5] * (s5 * a1 ** 4 + 6.0 * s4 * a1 * a1 * a2
                            + 3.0 * s3 * a2 * a2 + 4.0 * s3 * a1 * a3
                            + s2 * a4)
        zb1 = zb1 + g[5] * (4.0 * s4 * a1 ** 3 + 12.0 * s3 * a1 * a2
                            + 4.0 * s2 * a3)
        zb2 = zb2 + g[5] * (6.0 * s3 * a1 * a1 + 6.0 * s2 * a2)
        zb3 = zb3 + 4.0 * g[5] * s2 * a1
        Zbar[5] = g[5] * s1
    Zbar[0] = zb0
    Zbar[2] = zb1
    if m >= 2:
        Zbar[3] = zb2
    if m >= 3:
        Zbar[4] = zb3
    return Zbar
