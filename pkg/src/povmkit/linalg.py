"""Dense Hermitian-operator linear algebra.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``. The
``check_*`` helpers validate and return a cleaned copy; everything else is a
pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT, Tolerances
from .errors import DimMismatch, NotHermitian, NotPSD


def check_hermitian(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Return ``A`` as a complex Hermitian array, symmetrized.

    Raises :class:`NotHermitian` if ``A`` is not square or if
    ``max |A - A^dag|`` exceeds ``tol.herm_tol``.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NotHermitian(f"expected a square matrix, got shape {A.shape}")
    dev = np.max(np.abs(A - A.conj().T))
    if dev > tol.herm_tol:
        raise NotHermitian(f"matrix is not Hermitian (max asymmetry {dev:.3e})")
    return 0.5 * (A + A.conj().T)


def check_psd(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Hermitian check plus an eigenvalue floor of ``-tol.psd_tol``.

    The returned matrix has its slightly negative eigenvalues clipped to zero.
    """
    A = check_hermitian(A, tol)
    w, V = np.linalg.eigh(A)
    if w[0] < -tol.psd_tol:
        raise NotPSD(f"matrix has negative eigenvalue {w[0]:.3e}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        A = (V * w) @ V.conj().T
        A = 0.5 * (A + A.conj().T)
    return A


def psd_sqrt(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Unique positive semidefinite square root of ``A``."""
    A = check_psd(A, tol)
    R, _ = _kernels.sqrt_psd(A[None, :, :])
    return R[0]


def psd_sqrt_batch(E: np.ndarray):
    """Square roots of a stack of (already validated) PSD matrices.

    Returns ``(roots, eigenvalues)``; eigenvalues are the raw, unclipped ones.
    """
    E = np.ascontiguousarray(E, dtype=np.complex128)
    return _kernels.sqrt_psd(E)


def hs_inner(A, B) -> float:
    """Hilbert-Schmidt inner product ``tr(A B)`` of two Hermitian operators."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimMismatch(f"shapes {A.shape} and {B.shape} differ")
    return float(np.vdot(B, A).real)


@dataclass(frozen=True)
class OperatorBasis:
    """Hilbert-Schmidt orthonormal basis of the d x d Hermitian operators.

    ``elements`` has shape ``(d*d, d, d)``.
    """

    dim: int
    elements: np.ndarray

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    @property
    def vec_matrix(self) -> np.ndarray:
        """``d^2 x d^2`` matrix whose columns are the row-major vectorized elements."""
        d = self.dim
        return self.elements.reshape(d * d, d * d).T

    def gram(self) -> np.ndarray:
        M = self.elements.reshape(len(self), -1)
        return (M.conj() @ M.T).real


def standard_hermitian_basis(d: int) -> OperatorBasis:
    """The basis of diagonal projectors and symmetric/antisymmetric off-diagonals.

    Elements are enumerated by ``(mu, nu)`` in row-major order: ``mu == nu``
    gives ``|mu><mu|``, ``mu < nu`` gives ``(|mu><nu| + |nu><mu|)/sqrt 2`` and
    ``mu > nu`` gives ``i(|mu><nu| - |nu><mu|)/sqrt 2``.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    s = 1.0 / np.sqrt(2.0)
    out = np.zeros((d * d, d, d), dtype=np.complex128)
    for mu in range(d):
        for nu in range(d):
            X = out[mu * d + nu]
            if mu == nu:
                X[mu, mu] = 1.0
            elif mu < nu:
                X[mu, nu] = s
                X[nu, mu] = s
            else:
                X[mu, nu] = 1j * s
                X[nu, mu] = -1j * s
    return OperatorBasis(d, out)


def vectorize(A, basis: OperatorBasis) -> np.ndarray:
    """Real coordinates ``v_i = tr(X_i A)`` of ``A`` in ``basis``."""
    A = np.asarray(A, dtype=np.complex128)
    if A.shape != (basis.dim, basis.dim):
        raise DimMismatch(f"operator shape {A.shape} does not match basis dimension {basis.dim}")
    return (basis.vec_matrix.conj().T @ A.reshape(-1)).real


def unvectorize(v, basis: OperatorBasis) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (len(basis),):
        raise DimMismatch(f"vector length {v.shape} does not match basis size {len(basis)}")
    return np.tensordot(v, basis.elements, axes=1)


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_psd(d: int, rng, rank: int | None = None) -> np.ndarray:
    k = d if rank is None else rank
    G = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    return G @ G.conj().T


def random_state(d: int, rng, rank: int | None = None) -> np.ndarray:
    A = random_psd(d, rng, rank)
    return A / np.trace(A).real
