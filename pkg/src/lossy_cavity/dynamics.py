"""Time evolution and steady states.

Two independent routes produce the same trajectories:

* ``integrate`` steps the closed 17-component equations of motion (eight
  populations, nine complex coherences) with fixed-step RK4 in the selected
  kernel backend;
* ``integrate_full`` steps the 144-dimensional Liouvillian built from the
  Hamiltonian and cavity dissipator, then projects onto the same components.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .linalg import ContractError, null_space
from .model import (
    DIM,
    EXCITATIONS,
    LABEL_TO_FLAT,
    FullState,
    InitialState,
    SystemParams,
    initial_density,
    liouvillian,
)

NCOMP = 17
POPULATIONS = tuple((i, i) for i in range(1, 9))
COHERENCES = ((1, 2), (1, 4), (1, 6), (2, 4), (2, 6), (3, 5), (3, 7), (4, 6), (5, 7))
COMPONENTS = POPULATIONS + COHERENCES
_SLOT = {pair: n for n, pair in enumerate(COMPONENTS)}

DEFAULT_STEP = 1e-3
TRACE_TOL = 1e-9
NEG_POP_TOL = 1e-9

_FLAT_ROWS = np.array([LABEL_TO_FLAT[i] for i, _ in COMPONENTS])
_FLAT_COLS = np.array([LABEL_TO_FLAT[j] for _, j in COMPONENTS])
_EXCITATION_WEIGHTS = np.array([EXCITATIONS[i] for i in range(1, 9)], dtype=float)


class IntegrationError(RuntimeError):
    """An invariant broke down during time stepping."""


class DegeneracyError(RuntimeError):
    """The steady state is not unique for the requested problem."""


class ClosedState:
    """Populations rho_ii and the nine coherences that close under the dynamics.

    Conjugate partners rho_ji = conj(rho_ij) are generated on request.
    """

    __slots__ = ("y",)

    def __init__(self, y):
        y = np.asarray(y, dtype=complex)
        if y.shape != (NCOMP,):
            raise ContractError(f"ClosedState needs {NCOMP} components, got {y.shape}")
        self.y = y

    def rho(self, i, j):
        if (i, j) in _SLOT:
            return complex(self.y[_SLOT[(i, j)]])
        if (j, i) in _SLOT:
            return complex(np.conj(self.y[_SLOT[(j, i)]]))
        if 1 <= i <= 8 and 1 <= j <= 8:
            return 0j
        raise KeyError((i, j))

    @property
    def populations(self):
        return self.y[:8].real.copy()

    def trace(self):
        return float(self.y[:8].real.sum())

    def check(self, trace_tol=TRACE_TOL, pop_tol=NEG_POP_TOL):
        if abs(self.trace() - 1.0) > trace_tol:
            raise ContractError(f"populations sum to {self.trace():.12f}")
        if self.populations.min() < -pop_tol:
            raise ContractError(f"negative population {self.populations.min():.3e}")
        return self

    def to_full(self):
        return _closed_to_full(self.y[None, :])[0]

    def full_state(self, check=True):
        return FullState(self.to_full(), check=check)

    @classmethod
    def from_full(cls, state):
        rho = state.rho if isinstance(state, FullState) else np.asarray(state)
        return cls(rho[_FLAT_ROWS, _FLAT_COLS])

    @classmethod
    def initial(cls, s):
        return cls.from_full(initial_density(s))

    def __repr__(self):
        return f"ClosedState(trace={self.trace():.6f})"


def _closed_to_full(ys):
    ys = np.asarray(ys)
    out = np.zeros((ys.shape[0], DIM, DIM), dtype=complex)
    out[:, _FLAT_ROWS, _FLAT_COLS] = ys
    off = slice(8, NCOMP)
    out[:, _FLAT_COLS[off], _FLAT_ROWS[off]] = ys[:, off].conj()
    return out


@dataclass
class Trajectory:
    times: np.ndarray
    y: np.ndarray  # (n_samples, 17)
    params: SystemParams
    initial: InitialState
    method: str = "closed"
    full: np.ndarray | None = None  # (n_samples, 12, 12) on the Liouvillian route
    records: list | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    @property
    def states(self):
        return [ClosedState(row) for row in self.y]

    def state(self, k):
        return ClosedState(self.y[k])

    def component(self, i, j):
        if (i, j) in _SLOT:
            return self.y[:, _SLOT[(i, j)]]
        return self.y[:, _SLOT[(j, i)]].conj()

    def population(self, i):
        return self.y[:, i - 1].real

    @property
    def populations(self):
        return self.y[:, :8].real

    def trace(self):
        return self.populations.sum(axis=1)

    def excitation(self):
        """Mean total excitation number at each sample."""
        return self.populations @ _EXCITATION_WEIGHTS

    def density_matrices(self):
        """12x12 density matrices, reconstructed if only components were kept."""
        if self.full is not None:
            return self.full
        return _closed_to_full(self.y)


def _grid(t_max, dt_out, dt):
    if not (t_max > 0 and dt_out > 0 and dt > 0):
        raise ContractError("t_max, dt_out and the internal step must be positive")
    n_out = int(round(t_max / dt_out))
    if n_out < 1 or abs(n_out * dt_out - t_max) > 1e-9 * max(1.0, t_max):
        raise ContractError(f"t_max={t_max} is not a multiple of dt_out={dt_out}")
    n_sub = max(1, math.ceil(dt_out / dt - 1e-9))
    return n_out, n_sub, dt_out / n_sub


def default_step(p):
    """Internal RK4 step: 1e-3/g, shrunk so that kappa * h stays <= 4e-3."""
    if p.kappa > 0:
        return min(DEFAULT_STEP, 4e-3 / p.kappa)
    return DEFAULT_STEP


def _validate_samples(times, y):
    tr = y[:, :8].real.sum(axis=1)
    bad = np.nonzero(np.abs(tr - 1.0) > TRACE_TOL)[0]
    if bad.size:
        k = bad[0]
        raise IntegrationError(
            f"trace conservation violated at gt={times[k]:.4f}: sum rho_ii = {tr[k]:.12f}"
        )
    pops = y[:, :8].real
    bad = np.nonzero(pops.min(axis=1) < -NEG_POP_TOL)[0]
    if bad.size:
        k = bad[0]
        raise IntegrationError(
            f"population positivity violated at gt={times[k]:.4f}: min rho_ii = {pops[k].min():.3e}"
        )
    # roundoff-level negatives are clamped only at output time
    y[:, :8] = np.where((pops < 0), 0.0, pops) + 1j * y[:, :8].imag
    return y


def rhs_closed(p, s):
    """Time derivative of every closed component, as a ClosedState-shaped object."""
    y = s.y if isinstance(s, ClosedState) else np.asarray(s, dtype=complex)
    return ClosedState(np.array(_backend.kernels.rhs(*p.as_tuple(), list(y)), dtype=complex))


def integrate(p, s0, t_max, dt_out=0.01, dt=None, kernels=None):
    """Integrate the closed equations of motion from an initial state.

    Samples are taken at multiples of ``dt_out`` from 0 to ``t_max``; the
    internal step is at most ``dt`` (default from ``default_step``).
    """
    s0 = InitialState.parse(s0.value if isinstance(s0, InitialState) else s0)
    n_out, n_sub, h = _grid(t_max, dt_out, dt or default_step(p))
    k = kernels or _backend.kernels
    y0 = ClosedState.initial(s0).y
    y = np.asarray(k.rk4(*p.as_tuple(), list(y0), h, n_sub, n_out))
    times = np.arange(n_out + 1) * dt_out
    y = _validate_samples(times, y)
    return Trajectory(times, y, p, s0, method="closed")


def rk4_propagator(generator, h, n_steps=1):
    """Matrix of ``n_steps`` classical RK4 steps for the linear ODE x' = A x."""
    a = h * np.asarray(generator)
    eye = np.eye(a.shape[0], dtype=complex)
    a2 = a @ a
    step = eye + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24
    return np.linalg.matrix_power(step, n_steps)


def integrate_full(p, s0, t_max, dt_out=0.01, dt=None):
    """Step vec(rho) with the full Liouvillian; samples keep the 12x12 matrices."""
    s0 = InitialState.parse(s0.value if isinstance(s0, InitialState) else s0)
    n_out, n_sub, h = _grid(t_max, dt_out, dt or default_step(p))
    prop = rk4_propagator(liouvillian(p), h, n_sub)
    v = initial_density(s0).rho.reshape(-1).copy()
    full = np.empty((n_out + 1, DIM, DIM), dtype=complex)
    full[0] = v.reshape(DIM, DIM)
    for j in range(1, n_out + 1):
        v = prop @ v
        full[j] = v.reshape(DIM, DIM)
    times = np.arange(n_out + 1) * dt_out
    tr = np.einsum("kii->k", full)
    bad = np.nonzero(np.abs(tr - 1.0) > TRACE_TOL)[0]
    if bad.size:
        raise IntegrationError(
            f"trace conservation violated at gt={times[bad[0]]:.4f}: tr rho = {tr[bad[0]].real:.12f}"
        )
    y = full[:, _FLAT_ROWS, _FLAT_COLS]
    y = _validate_samples(times, y)
    return Trajectory(times, y, p, s0, method="liouvillian", full=full)


def steady_state(p, initial=None, tol=1e-9):
    """Stationary state reached under cavity decay.

    When the Liouvillian kernel is one-dimensional the result is unique.  For
    identical atoms the antisymmetric one-excitation state is dark, the kernel
    is two-dimensional and the limit depends on the starting point; ``initial``
    then selects it by projecting with the conserved quantities (left kernel).
    """
    if p.kappa <= 0:
        raise DegeneracyError("no dissipation (kappa=0): the dynamics has no unique steady state")
    lv = liouvillian(p)
    right = null_space(lv, tol)
    dim = right.shape[1]
    if dim == 0:
        raise DegeneracyError("Liouvillian has an empty kernel at the given tolerance")
    if dim == 1:
        v = right[:, 0]
    else:
        if initial is None:
            raise DegeneracyError(
                f"Liouvillian kernel has dimension {dim}; pass an initial state to select the limit"
            )
        s0 = initial if isinstance(initial, InitialState) else InitialState.parse(initial)
        left = null_space(lv.conj().T, tol)
        if left.shape[1] != dim:
            raise DegeneracyError("left and right kernels differ in dimension")
        rho0 = initial_density(s0).rho.reshape(-1)
        coeffs = np.linalg.solve(left.conj().T @ right, left.conj().T @ rho0)
        v = right @ coeffs
    rho = v.reshape(DIM, DIM)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho)
    return FullState(rho, tol=1e-8)


def kernel_dimension(p, tol=1e-9):
    return null_space(liouvillian(p), tol).shape[1]
