# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the closed 17-component equations of motion.

Same layout and API as ``_kernels_py``.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF N = 17

NCOMP = N

cdef double SQRT2 = 1.4142135623730951
cdef double complex I = 1j


cdef inline double complex cj(double complex z) noexcept nogil:
    return z.real - I * z.imag


cdef void _rhs(double g1, double g2, double d1, double d2, double k,
               const double complex* y, double complex* dy) noexcept nogil:
    cdef double complex r11 = y[0], r22 = y[1], r33 = y[2], r44 = y[3]
    cdef double complex r55 = y[4], r66 = y[5], r77 = y[6]
    cdef double complex c12 = y[8], c14 = y[9], c16 = y[10], c24 = y[11]
    cdef double complex c26 = y[12], c35 = y[13], c37 = y[14], c46 = y[15]
    cdef double complex c57 = y[16]
    cdef double complex c21 = cj(c12), c41 = cj(c14), c42 = cj(c24)
    cdef double complex c53 = cj(c35), c62 = cj(c26), c64 = cj(c46)
    cdef double complex c73 = cj(c37), c75 = cj(c57)
    cdef double s2 = SQRT2

    dy[0] = I * g1 * (c14 - c41) + I * g2 * (c12 - c21)
    dy[1] = I * s2 * g1 * (c26 - c62) + I * g2 * (c21 - c12) - k * r22
    dy[2] = I * g1 * (c37 - c73) + k * r22
    dy[3] = I * g1 * (c41 - c14) + I * s2 * g2 * (c46 - c64) - k * r44
    dy[4] = I * g2 * (c57 - c75) + k * r44
    dy[5] = I * s2 * g1 * (c62 - c26) + I * s2 * g2 * (c64 - c46) - 2 * k * r66
    dy[6] = I * g1 * (c73 - c37) + I * g2 * (c75 - c57) + k * (2 * r66 - r77)
    dy[7] = k * r77
    dy[8] = -I * d2 * c12 + I * g1 * (s2 * c16 - c42) + I * g2 * (r11 - r22) - 0.5 * k * c12
    dy[9] = -I * d1 * c14 + I * g1 * (r11 - r44) + I * g2 * (s2 * c16 - c24) - 0.5 * k * c14
    dy[10] = -I * (d1 + d2) * c16 + I * g1 * (s2 * c12 - c46) + I * g2 * (s2 * c14 - c26) - k * c16
    dy[11] = -I * (d1 - d2) * c24 + I * g1 * (c21 - s2 * c64) + I * g2 * (s2 * c26 - c14) - k * c24
    dy[12] = -I * d1 * c26 + I * s2 * g1 * (r22 - r66) + I * g2 * (s2 * c24 - c16) - 1.5 * k * c26
    dy[13] = -I * (d1 - d2) * c35 - I * g1 * c75 + I * g2 * c37 + k * c24
    dy[14] = -I * d1 * c37 + I * g1 * (r33 - r77) + I * g2 * c35 + 0.5 * k * (2 * s2 * c26 - c37)
    dy[15] = -I * d2 * c46 + I * g1 * (s2 * c42 - c16) + I * s2 * g2 * (r44 - r66) - 1.5 * k * c46
    dy[16] = -I * d2 * c57 + I * g1 * c53 + I * g2 * (r55 - r77) + 0.5 * k * (2 * s2 * c46 - c57)


def rhs(double g1, double g2, double d1, double d2, double k, y):
    cdef double complex yy[N]
    cdef double complex dy[N]
    cdef int m
    for m in range(N):
        yy[m] = y[m]
    _rhs(g1, g2, d1, d2, k, yy, dy)
    return [dy[m] for m in range(N)]


def rk4(double g1, double g2, double d1, double d2, double k, y0,
        double h, long n_sub, long n_out):
    """Fixed-step RK4; returns an (n_out + 1, 17) array sampled every n_sub steps."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((n_out + 1, N), dtype=np.complex128)
    cdef double complex y[N]
    cdef double complex tmp[N]
    cdef double complex k1[N]
    cdef double complex k2[N]
    cdef double complex k3[N]
    cdef double complex k4[N]
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef long j, s
    cdef int m
    for m in range(N):
        y[m] = y0[m]
        out[0, m] = y[m]
    with nogil:
        for j in range(1, n_out + 1):
            for s in range(n_sub):
                _rhs(g1, g2, d1, d2, k, y, k1)
                for m in range(N):
                    tmp[m] = y[m] + h2 * k1[m]
                _rhs(g1, g2, d1, d2, k, tmp, k2)
                for m in range(N):
                    tmp[m] = y[m] + h2 * k2[m]
                _rhs(g1, g2, d1, d2, k, tmp, k3)
                for m in range(N):
                    tmp[m] = y[m] + h * k3[m]
                _rhs(g1, g2, d1, d2, k, tmp, k4)
                for m in range(N):
                    y[m] = y[m] + h6 * (k1[m] + 2 * k2[m] + 2 * k3[m] + k4[m])
            for m in range(N):
                out[j, m] = y[m]
    return out
