"""The superoperator J_D^f and its generalized inverse.

In the eigenbasis of D, J_D^f is Hadamard multiplication by the mean kernel
[m_f(l_i, l_j)] and the inverse multiplies by the entrywise reciprocal on
the support (Moore-Penrose branch elsewhere). The quadrature oracles at the
bottom evaluate the classical integral representations and exist to check
that fast path.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm

from .errors import SingularState
from .matrix_core import as_matrix, as_positive, check_same_dim
from .monotone import mean

N_QUAD = 96


@dataclass(frozen=True)
class MeanKernel:
    eigenvalues: np.ndarray
    kernel: np.ndarray
    zero_mask: np.ndarray

    @property
    def dim(self):
        return len(self.eigenvalues)

    @property
    def inverse(self):
        """Entrywise reciprocal on the support, zero on masked entries."""
        return np.divide(1.0, self.kernel, out=np.zeros_like(self.kernel), where=~self.zero_mask)


def mean_kernel(f, D):
    D = as_positive(D)
    lam = D.eigenvalues
    K = mean(f, lam[:, None], lam[None, :])
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, lam)
    return MeanKernel(lam, K, K <= D.eps_zero)


def _prepare(D, B):
    D = as_positive(D)
    B = as_matrix(B)
    check_same_dim(D.matrix, B)
    return D, B


def jd_apply(f, D, B):
    """Apply J_D^f to ``B``."""
    D, B = _prepare(D, B)
    K = mean_kernel(f, D)
    return D.from_eigenbasis(K.kernel * D.to_eigenbasis(B))


def jd_inverse_apply(f, D, B):
    """Apply the (Moore-Penrose) inverse of J_D^f to ``B``."""
    D, B = _prepare(D, B)
    K = mean_kernel(f, D)
    return D.from_eigenbasis(K.inverse * D.to_eigenbasis(B))


def masked_weight(f, D, B):
    """Largest |entry| of ``B`` (in D's eigenbasis) on kernel-null positions."""
    D, B = _prepare(D, B)
    K = mean_kernel(f, D)
    Bt = D.to_eigenbasis(B)
    return float(np.max(np.abs(Bt[K.zero_mask]), initial=0.0))


def positivity_report(f, D):
    """Whether the mean kernel and its reciprocal (on the support) are PSD.

    Returns ``(kernel_psd, inverse_kernel_psd)``; J_D^f (resp. its inverse)
    is positivity preserving exactly when the kernel (resp. reciprocal) is.
    """
    D = as_positive(D)
    K = mean_kernel(f, D)
    tol = 1e-12 * max(1.0, float(np.max(K.kernel)))
    kernel_psd = bool(np.linalg.eigvalsh(K.kernel)[0] >= -tol)
    support = ~np.all(K.zero_mask, axis=1)
    inv = K.inverse[np.ix_(support, support)]
    inv_tol = 1e-12 * max(1.0, float(np.max(inv, initial=0.0)))
    inverse_psd = bool(inv.size == 0 or np.linalg.eigvalsh(inv)[0] >= -inv_tol)
    return kernel_psd, inverse_psd


def _legendre_01(n):
    s, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (s + 1.0), 0.5 * w


def _half_line(n, scale):
    # t = scale * s / (1 - s) maps (0, 1) onto (0, inf)
    s, w = _legendre_01(n)
    return scale * s / (1.0 - s), w * scale / (1.0 - s) ** 2


def _require_positive(D):
    D = as_positive(D)
    if not D.strictly_positive:
        raise SingularState("integral representations need a strictly positive state")
    return D


def sld_inverse_oracle(D, B, n_quad=N_QUAD):
    """Integral form of the SLD inverse: int_0^inf exp(-tD/2) B exp(-tD/2) dt.

    Uses Gauss-Legendre on (0, 1) after t = tau s/(1 - s), with tau = 2/l_min
    so the slowest decay rate maps to order one.
    """
    D = _require_positive(D)
    B = as_matrix(B)
    check_same_dim(D.matrix, B)
    Dm = np.asarray(D.matrix)
    t, w = _half_line(n_quad, 2.0 / D.eigenvalues[0])
    out = np.zeros_like(B)
    for tk, wk in zip(t, w):
        E = expm(-0.5 * tk * Dm)
        out += wk * (E @ B @ E)
    return out


def bkm_oracles(D, B, n_quad=N_QUAD):
    """Integral forms of the BKM map and its inverse.

    forward = int_0^1 D^t B D^(1-t) dt
    inverse = int_0^inf (D + t)^-1 B (D + t)^-1 dt
    """
    D = _require_positive(D)
    B = as_matrix(B)
    check_same_dim(D.matrix, B)
    Dm = np.asarray(D.matrix)
    n = D.dim
    logD = logm(Dm)

    s, w = _legendre_01(n_quad)
    forward = np.zeros_like(B)
    for sk, wk in zip(s, w):
        forward += wk * (expm(sk * logD) @ B @ expm((1.0 - sk) * logD))

    lam = D.eigenvalues
    t, w = _half_line(n_quad, float(np.sqrt(lam[0] * lam[-1])))
    inverse = np.zeros_like(B)
    eye = np.eye(n)
    for tk, wk in zip(t, w):
        R = np.linalg.inv(Dm + tk * eye)
        inverse += wk * (R @ B @ R)
    return forward, inverse
