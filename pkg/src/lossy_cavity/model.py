"""Two two-level atoms in one lossy cavity mode.

The Hilbert space is atom A (x) atom B (x) photon number 0..2, with atomic
index 0 = excited, 1 = ground.  Flat index = 6*A + 3*B + n.

Only eight of the twelve product states are ever populated from the initial
states used here; they carry the labels 1..8 below.  The remaining four
(|e,e,1>, |e,e,2>, |e,g,2>, |g,e,2>) live in the three- and four-excitation
sectors, which nothing couples into.

All rates are in units of a reference coupling g; the Hamiltonian is written
in the frame rotating at the cavity frequency so only detunings appear.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import ContractError, herm_eigvals, kron, partial_trace, superop_lr

N_PHOTON = 3
DIM = 2 * 2 * N_PHOTON
ATOM_DIMS = (2, 2, N_PHOTON)

E, G = 0, 1


def flat_index(atom_a, atom_b, n):
    return 6 * atom_a + 3 * atom_b + n


# label (1-based) -> (atom A, atom B, photons)
LABELS = {
    1: (E, E, 0),
    2: (E, G, 1),
    3: (E, G, 0),
    4: (G, E, 1),
    5: (G, E, 0),
    6: (G, G, 2),
    7: (G, G, 1),
    8: (G, G, 0),
}
LABEL_TO_FLAT = {k: flat_index(*v) for k, v in LABELS.items()}
FLAT_TO_LABEL = {v: k for k, v in LABEL_TO_FLAT.items()}
# total excitation number of each label
EXCITATIONS = {k: (a == E) + (b == E) + n for k, (a, b, n) in LABELS.items()}

_NAMES = {E: "e", G: "g"}


def label_name(label):
    a, b, n = LABELS[label]
    return f"|{_NAMES[a]}_A,{_NAMES[b]}_B,{n}>"


@dataclass(frozen=True)
class SystemParams:
    g1: float = 1.0
    g2: float = 1.0
    delta1: float = 5.0
    delta2: float = 5.0
    kappa: float = 0.0

    def __post_init__(self):
        for name in ("g1", "g2", "delta1", "delta2", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ContractError(f"{name} must be finite, got {v!r}")
        if self.g1 <= 0 or self.g2 <= 0:
            raise ContractError("couplings g1, g2 must be positive")
        if self.kappa < 0:
            raise ContractError("kappa must be non-negative")

    @classmethod
    def identical(cls, delta=5.0, kappa=0.0, g=1.0):
        return cls(g, g, delta, delta, kappa)

    @classmethod
    def unidentical(cls, delta=5.0, kappa=0.0, g=1.0):
        return cls(g, g, delta, -delta, kappa)

    def as_tuple(self):
        return (self.g1, self.g2, self.delta1, self.delta2, self.kappa)


class InitialState(enum.Enum):
    EE0 = "ee0"
    EG1 = "eg1"
    GE1 = "ge1"
    BELL_PLUS1 = "bell"

    @classmethod
    def parse(cls, text):
        key = str(text).strip().lower()
        aliases = {"bellplus1": "bell", "bell_plus1": "bell", "bell+": "bell"}
        key = aliases.get(key, key)
        for s in cls:
            if s.value == key:
                return s
        raise ContractError(
            f"unknown initial state {text!r}; choose from "
            + ", ".join(s.value for s in cls)
        )


# --- operators on the 12-dim space ----------------------------------------

_I2 = np.eye(2)
_I3 = np.eye(N_PHOTON)
_SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
_SIGMA_Z = np.diag([1.0, -1.0])
_A = np.diag(np.sqrt(np.arange(1, N_PHOTON)), 1).astype(complex)


def annihilation():
    return kron(_I2, _I2, _A)


def sigma_plus_a():
    return kron(_SIGMA_PLUS, _I2, _I3)


def sigma_plus_b():
    return kron(_I2, _SIGMA_PLUS, _I3)


def number_operator():
    """Total excitation number N = s+s-(A) + s+s-(B) + a^dag a."""
    sa, sb, a = sigma_plus_a(), sigma_plus_b(), annihilation()
    return sa @ sa.conj().T + sb @ sb.conj().T + a.conj().T @ a


def hamiltonian(p):
    a = annihilation()
    ad = a.conj().T
    sa, sb = sigma_plus_a(), sigma_plus_b()
    h = 0.5 * p.delta1 * kron(_SIGMA_Z, _I2, _I3)
    h = h + 0.5 * p.delta2 * kron(_I2, _SIGMA_Z, _I3)
    h = h + p.g1 * (a @ sa + ad @ sa.conj().T)
    h = h + p.g2 * (a @ sb + ad @ sb.conj().T)
    return h


def liouvillian(p):
    """144x144 generator with vec(drho/dt) = L @ vec(rho), row-major vec."""
    h = hamiltonian(p)
    a = annihilation()
    ad = a.conj().T
    n = ad @ a
    eye = np.eye(DIM)
    lv = -1j * (superop_lr(h, eye) - superop_lr(eye, h))
    if p.kappa:
        lv = lv + p.kappa * superop_lr(a, ad)
        lv = lv - 0.5 * p.kappa * (superop_lr(n, eye) + superop_lr(eye, n))
    return lv


# --- states ----------------------------------------------------------------


class FullState:
    """Density matrix on the 12-dim atom-atom-field space."""

    def __init__(self, rho, check=True, tol=1e-10):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (DIM, DIM):
            raise ContractError(f"FullState needs a {DIM}x{DIM} matrix, got {rho.shape}")
        self.rho = rho
        if check:
            self.check(tol)

    def check(self, tol=1e-10, eig_tol=1e-8):
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1) > tol:
            raise ContractError(f"density matrix trace is {tr.real:.3e}, expected 1")
        lo = herm_eigvals(rho, tol).min()
        if lo < -eig_tol:
            raise ContractError(f"density matrix has eigenvalue {lo:.3e}")

    def element(self, i, j):
        """Matrix element between labelled basis states (1..8)."""
        return self.rho[LABEL_TO_FLAT[i], LABEL_TO_FLAT[j]]

    def atomic(self):
        """Reduced 4x4 atomic state in the order ee, eg, ge, gg."""
        return partial_trace(self.rho, ATOM_DIMS, keep=(0, 1))

    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))

    def excitation(self):
        return float(np.real(np.trace(number_operator() @ self.rho)))


def basis_ket(label):
    v = np.zeros(DIM, dtype=complex)
    v[LABEL_TO_FLAT[label]] = 1.0
    return v


def initial_density(s):
    s = InitialState.parse(s.value if isinstance(s, InitialState) else s)
    if s is InitialState.EE0:
        psi = basis_ket(1)
    elif s is InitialState.EG1:
        psi = basis_ket(2)
    elif s is InitialState.GE1:
        psi = basis_ket(4)
    else:
        psi = (basis_ket(2) + basis_ket(4)) / np.sqrt(2)
    return FullState(np.outer(psi, psi.conj()))
