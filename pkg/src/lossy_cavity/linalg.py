"""Small dense complex linear-algebra helpers.

Everything here works on plain ``numpy`` arrays; the largest operand in the
package is the 144x144 Liouvillian, so LAPACK-backed routines are used behind
thin contract checks.
"""

from dataclasses import dataclass

import numpy as np


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ContractError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    return m


def is_hermitian(m, tol=1e-12):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= tol * scale


def herm_eig(m, tol=1e-12):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ContractError(f"herm_eig needs a square matrix, got {m.shape}")
    if not is_hermitian(m, tol):
        raise ContractError("herm_eig input is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return HermitianSpectrum(w, v)


def herm_eigvals(m, tol=1e-12):
    return herm_eig(m, tol).eigenvalues


def kron(*ms):
    """Kronecker product of one or more matrices, left to right."""
    if not ms:
        raise ContractError("kron needs at least one operand")
    out = as_matrix(ms[0])
    for m in ms[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def null_space(m, tol=1e-9):
    """Orthonormal kernel basis of a square matrix, one vector per column.

    Singular values below ``tol`` times the largest one are treated as zero.
    An all-zero matrix has the full space as its kernel.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ContractError(f"null_space needs a square matrix, got {m.shape}")
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(m.shape[1], dtype=complex)
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj().T


def singular_values(m):
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def partial_trace(rho, dims, keep):
    """Reduce ``rho`` on a tensor-product space to the subsystems in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order; ``keep`` is a
    collection of subsystem indices to retain (order preserved).
    """
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    n = int(np.prod(dims))
    if rho.shape != (n, n):
        raise ContractError(f"rho shape {rho.shape} does not match dims {dims}")
    keep = sorted(set(keep))
    k = len(dims)
    t = rho.reshape(dims + dims)
    traced = [i for i in range(k) if i not in keep]
    # trace out from the highest index so positions stay valid
    for i in reversed(traced):
        cur = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + cur)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(d, d)


def vec(m):
    """Row-major vectorisation; pairs with ``unvec`` and ``superop_lr``."""
    return np.asarray(m, dtype=complex).reshape(-1)


def unvec(v, n=None):
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ContractError(f"vector of length {v.size} is not a square matrix")
    return v.reshape(n, n)


def superop_lr(left, right):
    """Superoperator of X -> left @ X @ right under row-major ``vec``."""
    return np.kron(as_matrix(left), as_matrix(right).T)
