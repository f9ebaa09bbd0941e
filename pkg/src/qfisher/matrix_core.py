"""Hermitian linear algebra used throughout the package.

States are stored as complex128 numpy arrays together with their
eigendecomposition, which is computed once at validation time and never
mutated afterwards. All J_D^f computations work in that eigenbasis.
"""

from typing import NamedTuple

import numpy as np

from .errors import (
    BadParams,
    ConvergenceFailure,
    DimMismatch,
    NotHermitian,
    NotPsd,
    TraceNotOne,
)

TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_PSD = 1e-10
TOL_RECON = 1e-9

# relative cutoff behind eps_zero / eps_cluster (scaled by dim and lambda_max)
REL_EPS = 1e-12


class EigDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        U = self.vectors
        return (U * self.eigenvalues) @ U.conj().T


def as_matrix(M):
    """Coerce ``M`` to a finite square complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise BadParams("matrix has non-finite entries")
    return A


def check_same_dim(*mats):
    dims = {m.shape for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")


def hermitian_defect(M):
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def is_hermitian(M, tol=TOL_HERM):
    return hermitian_defect(M) <= tol


def as_hermitian(M, tol=TOL_HERM):
    A = as_matrix(M)
    if hermitian_defect(A) > tol:
        raise NotHermitian(f"matrix is not Hermitian (defect {hermitian_defect(A):.3e})")
    return 0.5 * (A + A.conj().T)


def eig_hermitian(M):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Returns an :class:`EigDecomposition` whose ``vectors`` are unitary.
    """
    A = as_matrix(M)
    A = 0.5 * (A + A.conj().T)
    try:
        w, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return EigDecomposition(w, U)


def cluster_eigenvalues(eigenvalues, eps):
    """Label ascending eigenvalues; neighbours closer than ``eps`` share a label."""
    labels = np.zeros(len(eigenvalues), dtype=int)
    for k in range(1, len(eigenvalues)):
        gap = eigenvalues[k] - eigenvalues[k - 1]
        labels[k] = labels[k - 1] + (gap > eps)
    return labels


class PositiveMatrix:
    """Validated positive semidefinite Hermitian matrix.

    The trace is not constrained; :class:`DensityMatrix` adds that. Use
    :func:`validate_positive` / :func:`validate_density` to construct.
    Eigenvalues within ``tol_psd`` below zero are clipped to zero.
    """

    __slots__ = ("_matrix", "_eig", "strictly_positive")

    def __init__(self, matrix, eig):
        m = np.array(matrix, dtype=np.complex128)
        m.setflags(write=False)
        w = np.clip(np.array(eig.eigenvalues, dtype=float), 0.0, None)
        U = np.array(eig.vectors, dtype=np.complex128)
        w.setflags(write=False)
        U.setflags(write=False)
        self._matrix = m
        self._eig = EigDecomposition(w, U)
        self.strictly_positive = bool(w.size and w[0] > self.eps_zero)

    @classmethod
    def from_eig(cls, eigenvalues, vectors):
        """Build from a given spectral decomposition (vectors must be unitary)."""
        eig = EigDecomposition(np.asarray(eigenvalues, dtype=float), np.asarray(vectors))
        order = np.argsort(eig.eigenvalues)
        eig = EigDecomposition(eig.eigenvalues[order], eig.vectors[:, order])
        return cls(eig.reconstruct(), eig)

    @property
    def matrix(self):
        return self._matrix

    @property
    def eig(self):
        return self._eig

    @property
    def eigenvalues(self):
        return self._eig.eigenvalues

    @property
    def dim(self):
        return self._matrix.shape[0]

    @property
    def trace(self):
        return float(np.real(np.trace(self._matrix)))

    @property
    def eps_zero(self):
        lam_max = self._eig.eigenvalues[-1] if self.dim else 0.0
        return self.dim * REL_EPS * max(lam_max, np.finfo(float).tiny)

    eps_cluster = eps_zero

    def cluster_labels(self):
        return cluster_eigenvalues(self.eigenvalues, self.eps_cluster)

    def to_eigenbasis(self, B):
        U = self._eig.vectors
        return U.conj().T @ B @ U

    def from_eigenbasis(self, B):
        U = self._eig.vectors
        return U @ B @ U.conj().T

    def power(self, p):
        """Fractional power via the spectrum; zero eigenvalues map to zero."""
        w = self.eigenvalues
        vals = np.zeros_like(w)
        pos = w > self.eps_zero
        vals[pos] = w[pos] ** p
        return self.from_eigenbasis(np.diag(vals).astype(complex))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, strictly_positive={self.strictly_positive})"


class DensityMatrix(PositiveMatrix):
    """Positive semidefinite Hermitian matrix of unit trace."""

    __slots__ = ()


def _validated(M, tol, cls, check_trace):
    A = as_matrix(M)
    if hermitian_defect(A) > tol:
        raise NotHermitian(f"matrix is not Hermitian (defect {hermitian_defect(A):.3e})")
    A = 0.5 * (A + A.conj().T)
    if check_trace:
        tr = np.trace(A).real
        if abs(tr - 1.0) > tol:
            raise TraceNotOne(f"trace is {tr!r}, expected 1")
    eig = eig_hermitian(A)
    if eig.eigenvalues.size and eig.eigenvalues[0] < -tol:
        raise NotPsd(f"minimum eigenvalue {eig.eigenvalues[0]:.3e} is negative")
    return cls(A, eig)


def validate_density(M, tol=TOL_TRACE):
    """Check Hermiticity, unit trace and positivity, returning a :class:`DensityMatrix`.

    Raises
    ------
    NotHermitian, TraceNotOne, NotPsd
    """
    return _validated(M, tol, DensityMatrix, check_trace=True)


def validate_positive(M, tol=TOL_PSD):
    """Like :func:`validate_density` without the trace condition."""
    return _validated(M, tol, PositiveMatrix, check_trace=False)


def as_density(D, tol=TOL_TRACE):
    if isinstance(D, DensityMatrix):
        return D
    return validate_density(D, tol)


def as_positive(D, tol=TOL_PSD):
    if isinstance(D, PositiveMatrix):
        return D
    return validate_positive(D, tol)


def hs_inner(A, B):
    """Hilbert-Schmidt inner product Tr A*B."""
    A = as_matrix(A)
    B = as_matrix(B)
    check_same_dim(A, B)
    return complex(np.vdot(A, B))


def commutator_tangent(D, X):
    """Return i[D, X]."""
    Dm = np.asarray(D.matrix if isinstance(D, PositiveMatrix) else as_matrix(D))
    X = as_matrix(X)
    check_same_dim(Dm, X)
    return 1j * (Dm @ X - X @ Dm)


def tangent_decompose(D, B):
    """Split Hermitian ``B`` into a part commuting with ``D`` and a part in {i[D, A]}.

    The split is done in D's eigenbasis: entries inside blocks of (clustered)
    equal eigenvalues form the commuting part, the rest is the commutator part.
    The two parts are Hilbert-Schmidt orthogonal.
    """
    D = as_positive(D)
    B = as_hermitian(B)
    check_same_dim(D.matrix, B)
    labels = D.cluster_labels()
    same = labels[:, None] == labels[None, :]
    Bt = D.to_eigenbasis(B)
    commuting = D.from_eigenbasis(np.where(same, Bt, 0.0))
    commuting = 0.5 * (commuting + commuting.conj().T)
    return commuting, B - commuting
