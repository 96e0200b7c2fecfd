"""Pure-Python kernels for the closed 17-component equations of motion.

Mirror of ``_kernels.pyx``; used when the compiled module is unavailable or
``LOSSY_CAVITY_PURE_PYTHON`` is set.

Component layout (shared with the compiled kernel)::

    0..7   rho11 .. rho88            populations
    8..16  rho12 rho14 rho16 rho24 rho26 rho35 rho37 rho46 rho57
"""

import numpy as np

NCOMP = 17
SQRT2 = 2.0 ** 0.5


def rhs(g1, g2, d1, d2, k, y):
    r11, r22, r33, r44, r55, r66, r77, r88 = y[0:8]
    c12, c14, c16, c24, c26, c35, c37, c46, c57 = y[8:17]
    c21 = c12.conjugate()
    c41 = c14.conjugate()
    c42 = c24.conjugate()
    c53 = c35.conjugate()
    c62 = c26.conjugate()
    c64 = c46.conjugate()
    c73 = c37.conjugate()
    c75 = c57.conjugate()
    i = 1j
    s2 = SQRT2
    return [
        i * g1 * (c14 - c41) + i * g2 * (c12 - c21),
        i * s2 * g1 * (c26 - c62) + i * g2 * (c21 - c12) - k * r22,
        i * g1 * (c37 - c73) + k * r22,
        i * g1 * (c41 - c14) + i * s2 * g2 * (c46 - c64) - k * r44,
        i * g2 * (c57 - c75) + k * r44,
        i * s2 * g1 * (c62 - c26) + i * s2 * g2 * (c64 - c46) - 2 * k * r66,
        i * g1 * (c73 - c37) + i * g2 * (c75 - c57) + k * (2 * r66 - r77),
        k * r77,
        -i * d2 * c12 + i * g1 * (s2 * c16 - c42) + i * g2 * (r11 - r22) - 0.5 * k * c12,
        -i * d1 * c14 + i * g1 * (r11 - r44) + i * g2 * (s2 * c16 - c24) - 0.5 * k * c14,
        -i * (d1 + d2) * c16 + i * g1 * (s2 * c12 - c46) + i * g2 * (s2 * c14 - c26) - k * c16,
        -i * (d1 - d2) * c24 + i * g1 * (c21 - s2 * c64) + i * g2 * (s2 * c26 - c14) - k * c24,
        -i * d1 * c26 + i * s2 * g1 * (r22 - r66) + i * g2 * (s2 * c24 - c16) - 1.5 * k * c26,
        -i * (d1 - d2) * c35 - i * g1 * c75 + i * g2 * c37 + k * c24,
        -i * d1 * c37 + i * g1 * (r33 - r77) + i * g2 * c35 + 0.5 * k * (2 * s2 * c26 - c37),
        -i * d2 * c46 + i * g1 * (s2 * c42 - c16) + i * s2 * g2 * (r44 - r66) - 1.5 * k * c46,
        -i * d2 * c57 + i * g1 * c53 + i * g2 * (r55 - r77) + 0.5 * k * (2 * s2 * c46 - c57),
    ]


def rk4(g1, g2, d1, d2, k, y0, h, n_sub, n_out):
    """Fixed-step RK4; returns an (n_out + 1, 17) array sampled every n_sub steps."""
    out = np.empty((n_out + 1, NCOMP), dtype=complex)
    y = [complex(v) for v in y0]
    out[0] = y
    h2 = 0.5 * h
    h6 = h / 6.0
    rng = range(NCOMP)
    for j in range(1, n_out + 1):
        for _ in range(n_sub):
            k1 = rhs(g1, g2, d1, d2, k, y)
            k2 = rhs(g1, g2, d1, d2, k, [y[m] + h2 * k1[m] for m in rng])
            k3 = rhs(g1, g2, d1, d2, k, [y[m] + h2 * k2[m] for m in rng])
            k4 = rhs(g1, g2, d1, d2, k, [y[m] + h * k3[m] for m in rng])
            y = [y[m] + h6 * (k1[m] + 2 * k2[m] + 2 * k3[m] + k4[m]) for m in rng]
        out[j] = y
    return out
