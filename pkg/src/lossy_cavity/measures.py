"""Correlation measures of the atomic two-qubit X-state.

The reduced atomic state in the basis ee, eg, ge, gg is::

    [[a, 0,  0, 0],
     [0, b,  e, 0],
     [0, e*, c, 0],
     [0, 0,  0, d]]

All closed-form measures are written on arrays so whole trajectories can be
evaluated at once; the scalar functions take an ``XState``.  Entropies are in
bits with the convention 0 log 0 = 0.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import ContractError, herm_eigvals, partial_trace

# matches the eigenvalue floor tolerated for full density matrices
EIG_CLIP = 1e-8


class PositivityError(ContractError):
    """The reduced state is not a valid density matrix."""


@dataclass(frozen=True)
class XState:
    a: float
    b: float
    c: float
    d: float
    e: complex = 0j

    def check(self, tol=1e-9):
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.e
        if abs(a + b + c + d - 1) > tol:
            raise PositivityError(f"X-state trace is {a + b + c + d:.12f}")
        if min(a, b, c, d) < -tol:
            raise PositivityError(f"X-state has negative population {min(a, b, c, d):.3e}")
        if abs(e) ** 2 > b * c + tol:
            raise PositivityError("X-state coherence exceeds sqrt(b c)")
        return self

    def matrix(self):
        a, b, c, d, e = self.a, self.b, self.c, self.d, complex(self.e)
        return np.array(
            [[a, 0, 0, 0], [0, b, e, 0], [0, e.conjugate(), c, 0], [0, 0, 0, d]],
            dtype=complex,
        )

    @classmethod
    def from_matrix(cls, rho, tol=1e-9):
        rho = np.asarray(rho)
        mask = np.ones((4, 4), dtype=bool)
        mask[np.diag_indices(4)] = False
        mask[1, 2] = mask[2, 1] = False
        if np.max(np.abs(rho[mask])) > tol:
            raise ContractError("matrix is not of the X form with a single coherence pair")
        return cls(*(float(rho[i, i].real) for i in range(4)), complex(rho[1, 2])).check(tol)

    def with_phase(self, phi):
        return XState(self.a, self.b, self.c, self.d, self.e * np.exp(1j * phi))


@dataclass(frozen=True)
class CorrelationRecord:
    t: float
    C: float
    B: float
    D: float
    I: float  # noqa: E741
    J: float
    purity: float


# --- entropy helpers ---------------------------------------------------------


def _clip_probs(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < -EIG_CLIP):
        raise PositivityError(f"negative eigenvalue {p.min():.3e} in entropy")
    return np.clip(p, 0.0, None)


def xlog2x(p):
    p = _clip_probs(p)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def binary_entropy(alpha):
    """M(alpha) = -alpha log2 alpha - (1 - alpha) log2 (1 - alpha)."""
    alpha = np.asarray(alpha, dtype=float)
    out = -xlog2x(alpha) - xlog2x(1.0 - alpha)
    return out if out.ndim else float(out)


def von_neumann(eigs):
    return float(-np.sum(xlog2x(eigs)))


# --- array kernels -----------------------------------------------------------


def _inner_eigs(b, c, abs_e):
    half = 0.5 * (b + c)
    r = np.sqrt(0.25 * (b - c) ** 2 + abs_e**2)
    return half + r, half - r


def _sum_xlogx_ab(a, b, c, d, abs_e):
    lp, lm = _inner_eigs(b, c, abs_e)
    return xlog2x(a) + xlog2x(d) + xlog2x(lp) + xlog2x(lm)


def concurrence_arr(a, b, c, d, abs_e):
    return 2.0 * np.maximum(0.0, abs_e - np.sqrt(np.clip(a * d, 0.0, None)))


def chsh_arr(a, b, c, d, abs_e):
    u1 = 4.0 * abs_e**2
    u2 = (a + d - b - c) ** 2
    u3 = u1
    return np.maximum(2.0 * np.sqrt(u1 + u2), 2.0 * np.sqrt(u1 + u3))


def mutual_information_arr(a, b, c, d, abs_e):
    s_ab = -_sum_xlogx_ab(a, b, c, d, abs_e)
    return binary_entropy(a + b) + binary_entropy(a + c) - s_ab


def _conditional_entropies(a, b, c, d, abs_e):
    tau = 0.5 * (1.0 + np.sqrt((1.0 - 2.0 * (c + d)) ** 2 + 4.0 * abs_e**2))
    p1 = binary_entropy(tau)
    p2 = -(xlog2x(a) + xlog2x(b) + xlog2x(c) + xlog2x(d)) - binary_entropy(a + c)
    return p1, p2


def classical_correlation_arr(a, b, c, d, abs_e):
    p1, p2 = _conditional_entropies(a, b, c, d, abs_e)
    s_a = binary_entropy(a + b)
    return np.maximum(s_a - p1, s_a - p2)


def discord_arr(a, b, c, d, abs_e):
    p1, p2 = _conditional_entropies(a, b, c, d, abs_e)
    base = binary_entropy(a + c) + _sum_xlogx_ab(a, b, c, d, abs_e)
    return np.minimum(base + p1, base + p2)


def purity_arr(a, b, c, d, abs_e):
    return a**2 + b**2 + c**2 + d**2 + 2.0 * abs_e**2


def _fields(x):
    return x.a, x.b, x.c, x.d, abs(x.e)


# --- public scalar API -------------------------------------------------------


def reduce_to_xstate(s, tol=1e-9):
    """Atomic X-state from a ClosedState (partial trace over the field)."""
    r = s.rho
    a = r(1, 1).real
    b = r(2, 2).real + r(3, 3).real
    c = r(4, 4).real + r(5, 5).real
    d = r(6, 6).real + r(7, 7).real + r(8, 8).real
    e = r(2, 4) + r(3, 5)
    return XState(a, b, c, d, e).check(tol)


def xstate_from_full(state, tol=1e-9):
    rho = state.rho if hasattr(state, "rho") else np.asarray(state)
    return XState.from_matrix(partial_trace(rho, (2, 2, 3), keep=(0, 1)), tol)


def concurrence(x):
    return float(concurrence_arr(*_fields(x)))


def chsh(x):
    return float(chsh_arr(*_fields(x)))


def mutual_information(x):
    return float(mutual_information_arr(*_fields(x)))


def classical_correlation(x):
    return float(classical_correlation_arr(*_fields(x)))


def discord_closed(x):
    return float(discord_arr(*_fields(x)))


def purity(x):
    return float(purity_arr(*_fields(x)))


def eof_pure(x, tol=1e-6):
    """Entanglement of formation of a pure X-state."""
    if abs(purity(x) - 1.0) > tol:
        raise ContractError(f"eof_pure needs a pure state, purity is {purity(x):.8f}")
    cc = min(1.0, concurrence(x))
    return float(binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - cc**2))))


# --- brute-force discord -----------------------------------------------------


def _projectors(theta, phi):
    """Rank-one projectors onto +/- n(theta, phi), shape (..., 2, 2, 2)."""
    st, ct = np.sin(theta), np.cos(theta)
    nx, ny, nz = st * np.cos(phi), st * np.sin(phi), ct
    off = 0.5 * (nx - 1j * ny)
    plus = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    plus[..., 0, 0] = 0.5 * (1 + nz)
    plus[..., 1, 1] = 0.5 * (1 - nz)
    plus[..., 0, 1] = off
    plus[..., 1, 0] = np.conj(off)
    minus = np.eye(2) - plus
    return plus, minus


def _entropy_2x2(m):
    """Von Neumann entropy of a batch of 2x2 Hermitian PSD matrices (unnormalised ok)."""
    tr = np.real(m[..., 0, 0] + m[..., 1, 1])
    det = np.real(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
    disc = np.sqrt(np.clip(tr**2 - 4 * det, 0.0, None))
    l1 = np.clip(0.5 * (tr + disc), 0.0, None)
    l2 = np.clip(0.5 * (tr - disc), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(l1 > 0, -l1 * np.log2(np.where(l1 > 0, l1, 1)), 0.0)
        h += np.where(l2 > 0, -l2 * np.log2(np.where(l2 > 0, l2, 1)), 0.0)
    return h, tr


def _conditional_entropy(rho4, theta, phi, measured):
    """Average entropy of the unmeasured qubit after a projective measurement."""
    t = rho4.reshape(2, 2, 2, 2)  # [iA, iB, jA, jB]
    total = np.zeros(np.shape(theta))
    for proj in _projectors(theta, phi):
        if measured == "B":
            cond = np.einsum("ikjl,...lk->...ij", t, proj)
        else:
            cond = np.einsum("kilj,...lk->...ij", t, proj)
        # S(cond/p) * p = S_unnorm(cond) + p log2 p
        h, p = _entropy_2x2(cond)
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1)), 0.0)
        total += h + plogp
    return total


def discord_numeric(x, grid=181, measured="B", sweeps=30):
    """Discord by direct minimisation over one-qubit projective measurements.

    A ``grid`` x ``grid`` scan over Bloch angles theta, phi in [0, pi] (the
    phi -> phi + pi half is the same measurement with outcomes swapped) is
    followed by coordinate descent with a halving step.
    """
    if grid < 64:
        raise ContractError("discord_numeric needs at least 64 grid points per angle")
    if measured not in ("A", "B"):
        raise ContractError("measured must be 'A' or 'B'")
    rho = x.matrix() if isinstance(x, XState) else np.asarray(x, dtype=complex)
    s_ab = von_neumann(herm_eigvals(rho))
    rho_a = partial_trace(rho, (2, 2), keep=(0,))
    rho_b = partial_trace(rho, (2, 2), keep=(1,))
    s_a = von_neumann(herm_eigvals(rho_a))
    s_b = von_neumann(herm_eigvals(rho_b))
    mutual = s_a + s_b - s_ab

    axis = np.linspace(0.0, np.pi, grid)
    th, ph = np.meshgrid(axis, axis, indexing="ij")
    ce = _conditional_entropy(rho, th, ph, measured)
    k = np.unravel_index(np.argmin(ce), ce.shape)
    best_t, best_p, best = th[k], ph[k], float(ce[k])

    step = axis[1] - axis[0]
    for _ in range(sweeps):
        for dt, dp in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
            val = float(_conditional_entropy(rho, np.array(best_t + dt), np.array(best_p + dp), measured))
            if val < best:
                best_t, best_p, best = best_t + dt, best_p + dp, val
        step *= 0.5

    unmeasured = s_a if measured == "B" else s_b
    classical = unmeasured - best
    return mutual - classical


# --- trajectories ------------------------------------------------------------


def xstate_series(traj):
    """Arrays a, b, c, d, e over a trajectory's samples."""
    a = traj.population(1)
    b = traj.population(2) + traj.population(3)
    c = traj.population(4) + traj.population(5)
    d = traj.population(6) + traj.population(7) + traj.population(8)
    e = traj.component(2, 4) + traj.component(3, 5)
    return a, b, c, d, e


def correlation_series(traj):
    a, b, c, d, e = xstate_series(traj)
    ae = np.abs(e)
    excess = ae**2 - b * c
    if np.any(excess > 1e-9):
        k = int(np.argmax(excess))
        raise PositivityError(f"atomic state loses positivity at gt={traj.times[k]:.4f}")
    mi = mutual_information_arr(a, b, c, d, ae)
    j = classical_correlation_arr(a, b, c, d, ae)
    return {
        "t": traj.times,
        "C": concurrence_arr(a, b, c, d, ae),
        "B": chsh_arr(a, b, c, d, ae),
        "D": discord_arr(a, b, c, d, ae),
        "I": mi,
        "J": j,
        "purity": purity_arr(a, b, c, d, ae),
    }


def records(traj):
    """CorrelationRecord per sample; also stored on ``traj.records``."""
    s = correlation_series(traj)
    out = [
        CorrelationRecord(*(float(s[key][k]) for key in ("t", "C", "B", "D", "I", "J", "purity")))
        for k in range(len(traj.times))
    ]
    traj.records = out
    return out
