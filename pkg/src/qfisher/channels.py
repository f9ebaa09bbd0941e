"""Completely positive trace preserving maps in Kraus form.

Also hosts the numerical checks of monotonicity under coarse-graining: the
metric, the Fisher information matrix and the variance all contract.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadParams, DimMismatch, NotProjective, NotTracePreserving
from .matrix_core import as_density, as_hermitian, as_matrix, validate_density
from .metrics import ParamFamily, _mat, covariance, fisher_metric, qfim
from .superop import jd_apply, masked_weight

TOL_TP = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    """beta(M) = sum_k K_k M K_k*, each K_k of shape (n_out, n_in)."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.array(K, dtype=np.complex128) for K in self.kraus_ops)
        if not ops:
            raise BadParams("a channel needs at least one Kraus operator")
        shapes = {K.shape for K in ops}
        if len(shapes) != 1 or ops[0].ndim != 2:
            raise DimMismatch(f"Kraus operators must share one 2-d shape, got {sorted(shapes)}")
        n_in = ops[0].shape[1]
        S = sum(K.conj().T @ K for K in ops)
        defect = float(np.max(np.abs(S - np.eye(n_in))))
        if defect > TOL_TP:
            raise NotTracePreserving(f"sum K*K deviates from identity by {defect:.3e}")
        for K in ops:
            K.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def n_in(self):
        return self.kraus_ops[0].shape[1]

    @property
    def n_out(self):
        return self.kraus_ops[0].shape[0]


def apply(ch, M):
    M = as_matrix(M)
    if M.shape[0] != ch.n_in:
        raise DimMismatch(f"channel input dim {ch.n_in}, matrix dim {M.shape[0]}")
    return sum(K @ M @ K.conj().T for K in ch.kraus_ops)


def adjoint_apply(ch, M):
    M = as_matrix(M)
    if M.shape[0] != ch.n_out:
        raise DimMismatch(f"channel output dim {ch.n_out}, matrix dim {M.shape[0]}")
    return sum(K.conj().T @ M @ K for K in ch.kraus_ops)


def apply_state(ch, D):
    """beta(D) as a validated density matrix (Hermitian part of the image)."""
    out = apply(ch, as_density(D).matrix)
    return validate_density(0.5 * (out + out.conj().T), tol=1e-9)


def identity_channel(n):
    return KrausChannel((np.eye(n),))


def unitary_channel(U):
    return KrausChannel((np.asarray(U),))


def depolarizing(p, n=2):
    """rho -> (1 - p) rho + p I/n via the generalized Pauli (Weyl) operators."""
    if not 0.0 <= p <= 1.0:
        raise BadParams(f"depolarizing probability must lie in [0, 1], got {p}")
    omega = np.exp(2j * np.pi / n)
    X = np.roll(np.eye(n), 1, axis=0)
    Z = np.diag(omega ** np.arange(n))
    ops = []
    for a in range(n):
        for b in range(n):
            W = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            weight = 1.0 - p + p / n**2 if a == b == 0 else p / n**2
            ops.append(np.sqrt(weight) * W)
    return KrausChannel(tuple(ops))


def random_channel(n_in, n_out, kraus_rank, seed):
    """Random channel from a Haar-distributed isometry C^n_in -> C^(n_out * rank).

    The isometry is cut into ``kraus_rank`` blocks of shape (n_out, n_in).
    """
    if kraus_rank < 1 or n_in < 1 or n_out < 1:
        raise BadParams("dimensions and kraus_rank must be positive")
    if n_out * kraus_rank < n_in:
        raise BadParams(f"n_out * kraus_rank = {n_out * kraus_rank} < n_in = {n_in}: no isometry exists")
    rng = np.random.default_rng(seed)
    N = n_out * kraus_rank
    G = rng.standard_normal((N, n_in)) + 1j * rng.standard_normal((N, n_in))
    Q, R = np.linalg.qr(G)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return KrausChannel(tuple(Q[k * n_out : (k + 1) * n_out] for k in range(kraus_rank)))


def pinching_from_povm(povm, tol=1e-8):
    """The channel A -> sum_k E_k A E_k for a projective measurement."""
    effects = povm.effects if hasattr(povm, "effects") else povm
    for E in effects:
        if np.max(np.abs(E @ E - E)) > tol:
            raise NotProjective("pinching needs projective effects (E^2 = E)")
    return KrausChannel(tuple(effects))


# -- monotonicity checks ------------------------------------------------------


def metric_monotonicity_gap(f, ch, D, A):
    """gamma_D(A, A) - gamma_{beta(D)}(beta(A), beta(A)); nonnegative in theory.

    If beta(D) is singular the Moore-Penrose branch is used; see
    :func:`image_masked_weight` for whether it mattered.
    """
    D = as_density(D)
    A = as_hermitian(_mat(A))
    BD = apply_state(ch, D)
    BA = apply(ch, A)
    return fisher_metric(f, D, A) - fisher_metric(f, BD, 0.5 * (BA + BA.conj().T), strict=False)


def image_masked_weight(f, ch, D, A):
    """Weight of beta(A) on the masked entries of J_{beta(D)}^f."""
    BD = apply_state(ch, D)
    return masked_weight(f, BD, apply(ch, _mat(A)))


def image_family(ch, family):
    BD = apply_state(ch, family.base)
    ders = []
    for B in family.matrices:
        BB = apply(ch, B)
        ders.append(0.5 * (BB + BB.conj().T))
    return ParamFamily(BD, ders)


def qfim_monotonicity_gap(f, ch, family):
    """J_1 - J_2, the Fisher information lost by pushing the family through ``ch``."""
    J1 = qfim(f, family)
    J2 = _qfim_lenient(f, image_family(ch, family))
    return J1 - J2


def _qfim_lenient(f, family):
    # Moore-Penrose branch without the support check
    m = family.m
    J = np.empty((m, m))
    mats = family.matrices
    for i in range(m):
        for j in range(i, m):
            J[i, j] = J[j, i] = fisher_metric(f, family.base, mats[i], mats[j], strict=False)
    return J


def jd_contraction_gap(f, ch, D, Y):
    """<Y, J_{beta(D)}(Y)> - <Y, beta J_D beta*(Y)>; nonnegative in theory."""
    D = as_density(D)
    Y = as_hermitian(Y)
    BD = apply_state(ch, D)
    lhs = np.vdot(Y, apply(ch, jd_apply(f, D, adjoint_apply(ch, Y)))).real
    rhs = np.vdot(Y, jd_apply(f, BD, Y)).real
    return float(rhs - lhs)


def variance_contraction_gap(f, ch, D, A):
    """Var_{beta(D)}(A) - Var_D(beta*(A)); nonnegative in theory."""
    D = as_density(D)
    A = as_hermitian(A)
    BD = apply_state(ch, D)
    pulled = adjoint_apply(ch, A)
    pulled = 0.5 * (pulled + pulled.conj().T)
    return covariance(f, BD, A, A) - covariance(f, D, pulled, pulled)

