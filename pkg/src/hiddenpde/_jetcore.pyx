# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled activation jet kernels.

Fused single-pass implementation of the slot-combination rules in
``_jet_rules.py`` (same layouts, same semantics, bit-compatible formulas).
Operates on slot stacks flattened to (S, n*w); ``kernels.py`` handles the
reshaping and backend selection.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport tanh as ctanh, sin as csin, cos as ccos

cnp.import_array()

DEF TANH = 0
DEF SIN = 1
DEF IDENTITY = 2

DEF PLAIN = 0
DEF JET2D = 10


cdef inline void _sigma(int kind, double z0, double T, int upto, double* s) nogil:
    # s[0..upto-1] = sigma^(1..upto); T is tanh(z0) when kind == TANH.
    cdef double T2
    if kind == TANH:
        T2 = T * T
        s[0] = 1.0 - T2
        if upto >= 2:
            s[1] = -2.0 * T * s[0]
        if upto >= 3:
            s[2] = -2.0 + T2 * (8.0 - 6.0 * T2)
        if upto >= 4:
            s[3] = T * (16.0 + T2 * (-40.0 + 24.0 * T2))
        if upto >= 5:
            s[4] = 16.0 + T2 * (-136.0 + T2 * (240.0 - 120.0 * T2))
    elif kind == SIN:
        s[0] = ccos(z0)
        if upto >= 2:
            s[1] = -csin(z0)
        if upto >= 3:
            s[2] = -s[0]
        if upto >= 4:
            s[3] = -s[1]
        if upto >= 5:
            s[4] = s[0]
    else:
        s[0] = 1.0
        if upto >= 2:
            s[1] = 0.0
        if upto >= 3:
            s[2] = 0.0
        if upto >= 4:
            s[3] = 0.0
        if upto >= 5:
            s[4] = 0.0


def act_jet_forward(int kind, int layout, double[:, ::1] Z):
    cdef Py_ssize_t S = Z.shape[0]
    cdef Py_ssize_t N = Z.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Y = np.empty((S, N))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cache = np.empty(N)
    cdef double[:, ::1] Yv = Y
    cdef double[::1] cv = cache
    cdef Py_ssize_t i
    cdef int m
    cdef double z0, v, a1, a2, a3, a4
    cdef double zx, zy
    cdef double s[5]

    if layout == PLAIN:
        m = 0
    elif layout == JET2D:
        m = -1
    else:
        m = layout

    with nogil:
        for i in range(N):
            z0 = Z[0, i]
            if kind == TANH:
                v = ctanh(z0)
                cv[i] = v
            elif kind == SIN:
                v = csin(z0)
                cv[i] = z0
            else:
                v = z0
                cv[i] = z0
            Yv[0, i] = v

            if m == 0:
                continue

            if m == -1:  # 2D second-order stack
                _sigma(kind, z0, v, 2, s)
                zx = Z[2, i]
                zy = Z[3, i]
                Yv[1, i] = s[0] * Z[1, i]
                Yv[2, i] = s[0] * zx
                Yv[3, i] = s[0] * zy
                Yv[4, i] = s[1] * zx * zx + s[0] * Z[4, i]
                Yv[5, i] = s[1] * zx * zy + s[0] * Z[5, i]
                Yv[6, i] = s[1] * zy * zy + s[0] * Z[6, i]
                continue

            _sigma(kind, z0, v, m, s)
            Yv[1, i] = s[0] * Z[1, i]
            a1 = Z[2, i]
            Yv[2, i] = s[0] * a1
            if m >= 2:
                a2 = Z[3, i]
                Yv[3, i] = s[1] * a1 * a1 + s[0] * a2
            if m >= 3:
                a3 = Z[4, i]
                Yv[4, i] = s[2] * a1 * a1 * a1 + 3.0 * s[1] * a1 * a2 + s[0] * a3
            if m >= 4:
                a4 = Z[5, i]
                Yv[5, i] = (s[3] * a1 * a1 * a1 * a1
                            + 6.0 * s[2] * a1 * a1 * a2
                            + 3.0 * s[1] * a2 * a2
                            + 4.0 * s[1] * a1 * a3
                            + s[0] * a4)
    return Y, cache


def act_jet_backward(int kind, int layout, double[:, ::1] Z,
                     double[::1] cache, double[:, ::1] Ybar):
    cdef Py_ssize_t S = Z.shape[0]
    cdef Py_ssize_t N = Z.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Zbar = np.empty((S, N))
    cdef double[:, ::1] Zb = Zbar
    cdef Py_ssize_t i
    cdef int m
    cdef double z0, T, a1, a2, a3, a4, zt, zx, zy
    cdef double g0, g1, g2, g3, g4, g5, g6
    cdef double zb0, zb1, zb2, zb3
    cdef double s[5]

    if layout == PLAIN:
        m = 0
    elif layout == JET2D:
        m = -1
    else:
        m = layout

    with nogil:
        for i in range(N):
            z0 = Z[0, i]
            T = cache[i]

            if m == 0:
                _sigma(kind, z0, T, 1, s)
                Zb[0, i] = Ybar[0, i] * s[0]
                continue

            if m == -1:
                _sigma(kind, z0, T, 3, s)
                zt = Z[1, i]
                zx = Z[2, i]
                zy = Z[3, i]
                g0 = Ybar[0, i]
                g1 = Ybar[1, i]
                g2 = Ybar[2, i]
                g3 = Ybar[3, i]
                g4 = Ybar[4, i]
                g5 = Ybar[5, i]
                g6 = Ybar[6, i]
                Zb[0, i] = (g0 * s[0] + g1 * s[1] * zt + g2 * s[1] * zx
                            + g3 * s[1] * zy
                            + g4 * (s[2] * zx * zx + s[1] * Z[4, i])
                            + g5 * (s[2] * zx * zy + s[1] * Z[5, i])
                            + g6 * (s[2] * zy * zy + s[1] * Z[6, i]))
                Zb[1, i] = g1 * s[0]
                Zb[2, i] = g2 * s[0] + 2.0 * g4 * s[1] * zx + g5 * s[1] * zy
                Zb[3, i] = g3 * s[0] + 2.0 * g6 * s[1] * zy + g5 * s[1] * zx
                Zb[4, i] = g4 * s[0]
                Zb[5, i] = g5 * s[0]
                Zb[6, i] = g6 * s[0]
                continue

            _sigma(kind, z0, T, m + 1, s)
            zt = Z[1, i]
            a1 = Z[2, i]
            g0 = Ybar[0, i]
            g1 = Ybar[1, i]
            g2 = Ybar[2, i]
            zb0 = g0 * s[0] + g1 * s[1] * zt + g2 * s[1] * a1
            Zb[1, i] = g1 * s[0]
            zb1 = g2 * s[0]
            if m >= 2:
                a2 = Z[3, i]
                g3 = Ybar[3, i]
                zb0 = zb0 + g3 * (s[2] * a1 * a1 + s[1] * a2)
                zb1 = zb1 + 2.0 * g3 * s[1] * a1
                zb2 = g3 * s[0]
            if m >= 3:
                a3 = Z[4, i]
                g4 = Ybar[4, i]
                zb0 = zb0 + g4 * (s[3] * a1 * a1 * a1 + 3.0 * s[2] * a1 * a2
                                  + s[1] * a3)
                zb1 = zb1 + g4 * (3.0 * s[2] * a1 * a1 + 3.0 * s[1] * a2)
                zb2 = zb2 + 3.0 * g4 * s[1] * a1
                zb3 = g4 * s[0]
            if m >= 4:
                a4 = Z[5, i]
                g5 = Ybar[5, i]
                zb0 = zb0 + g5 * (s[4] * a1 * a1 * a1 * a1
                                  + 6.0 * s[3] * a1 * a1 * a2
                                  + 3.0 * s[2] * a2 * a2
                                  + 4.0 * s[2] * a1 * a3
                                  + s[1] * a4)
                zb1 = zb1 + g5 * (4.0 * s[3] * a1 * a1 * a1
                                  + 12.0 * s[2] * a1 * a2
                                  + 4.0 * s[1] * a3)
                zb2 = zb2 + g5 * (6.0 * s[2] * a1 * a1 + 6.0 * s[1] * a2)
                zb3 = zb3 + 4.0 * g5 * s[1] * a1
                Zb[5, i] = g5 * s[0]
            Zb[0, i] = zb0
            Zb[2, i] = zb1
            if m >= 2:
                Zb[3, i] = zb2
            if m >= 3:
                Zb[4, i] = zb3
    return Zbar
