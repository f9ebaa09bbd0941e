"""Monotone metrics, covariances, Fisher information matrices and friends.

Every bilinear form here is evaluated in the eigenbasis of the footpoint D as
a weighted sum over index pairs, after a single eigendecomposition.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import (
    DimMismatch,
    NotCentered,
    NotLocallyUnbiased,
    ParamOutOfRange,
    PositivityConditionViolated,
    SingularState,
    UnsupportedTangent,
)
from .matrix_core import (
    DensityMatrix,
    as_density,
    as_hermitian,
    as_matrix,
    as_positive,
    check_same_dim,
    eig_hermitian,
)
from .monotone import SLD, chi2, f_zero, tilde_transform
from .superop import jd_apply, jd_inverse_apply, mean_kernel

TOL_TRACELESS = 1e-10
TOL_UNBIASED = 1e-8


@dataclass(frozen=True)
class TangentVector:
    matrix: np.ndarray
    traceless: bool = True

    def __post_init__(self):
        m = as_hermitian(self.matrix)
        if self.traceless and abs(np.trace(m)) > TOL_TRACELESS:
            raise ParamOutOfRange(f"tangent vector has trace {np.trace(m).real:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def as_tangent(A, traceless=True):
    if isinstance(A, TangentVector):
        return A
    return TangentVector(A, traceless)


@dataclass(frozen=True)
class ParamFamily:
    """A smooth family at one point: the state and its partial derivatives."""

    base: DensityMatrix
    derivatives: tuple

    def __post_init__(self):
        base = as_density(self.base)
        ders = tuple(as_tangent(B) for B in self.derivatives)
        if not ders:
            raise ParamOutOfRange("a family needs at least one derivative")
        for B in ders:
            check_same_dim(base.matrix, B.matrix)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "derivatives", ders)

    @property
    def m(self):
        return len(self.derivatives)

    @property
    def matrices(self):
        return [B.matrix for B in self.derivatives]


def _mat(A):
    return A.matrix if isinstance(A, TangentVector) else as_matrix(A)


def _pair_form(Xt, Yt, weights):
    # Tr X* (W o Y) for matrices already in the eigenbasis
    return complex(np.sum(np.conj(Xt) * weights * Yt))


def _inverse_form(f, D, A, B, strict=True):
    """<A, (J_D^f)^-1 B> with an optional support check on both arguments."""
    K = mean_kernel(f, D)
    At = D.to_eigenbasis(A)
    Bt = D.to_eigenbasis(B)
    if strict and np.any(K.zero_mask):
        scale = max(1.0, float(np.max(np.abs(At))), float(np.max(np.abs(Bt))))
        leak = max(np.max(np.abs(At[K.zero_mask])), np.max(np.abs(Bt[K.zero_mask])))
        if leak > 1e-10 * scale:
            raise UnsupportedTangent(f"tangent has weight {leak:.3e} outside the support of J_D^f")
    return _pair_form(At, Bt, K.inverse)


# -- covariances --------------------------------------------------------------


def covariance(f, D, A, B):
    """Cov_D^f(A, B) = <A, J_D^f(B)> - Tr(DA) Tr(DB)."""
    D = as_density(D)
    A = as_hermitian(_mat(A))
    B = as_hermitian(_mat(B))
    check_same_dim(D.matrix, A, B)
    K = mean_kernel(f, D)
    val = _pair_form(D.to_eigenbasis(A), D.to_eigenbasis(B), K.kernel).real
    Dm = D.matrix
    return float(val - np.trace(Dm @ A).real * np.trace(Dm @ B).real)


def variance(f, D, A):
    return covariance(f, D, A, A)


def covariance_matrix(f, D, observables):
    """The k x k matrix [Cov_D^f(A_i, A_j)]."""
    if not observables:
        raise ParamOutOfRange("need at least one observable")
    D = as_density(D)
    obs = [as_hermitian(_mat(A)) for A in observables]
    check_same_dim(D.matrix, *obs)
    K = mean_kernel(f, D)
    rot = [D.to_eigenbasis(A) for A in obs]
    means = np.array([np.trace(D.matrix @ A).real for A in obs])
    k = len(obs)
    C = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            C[i, j] = C[j, i] = _pair_form(rot[i], rot[j], K.kernel).real
    return C - np.outer(means, means)


# -- metrics ------------------------------------------------------------------


def fisher_metric(f, D, A, B=None, strict=True):
    """gamma_D^f(A, B) = Tr A (J_D^f)^-1(B).

    For singular D the Moore-Penrose inverse is used. With ``strict`` the
    tangents must vanish on the masked kernel entries (else
    UnsupportedTangent); otherwise that weight is silently dropped.
    """
    D = as_positive(D)
    A = as_hermitian(_mat(A))
    B = A if B is None else as_hermitian(_mat(B))
    check_same_dim(D.matrix, A, B)
    return float(_inverse_form(f, D, A, B, strict).real)


def score_operators(f, family):
    """L_i = (J^f)^-1(dρ/dθ_i)."""
    D = family.base
    out = []
    for B in family.matrices:
        _inverse_form(f, D, B, B)  # support check
        L = jd_inverse_apply(f, D, B)
        out.append(0.5 * (L + L.conj().T))
    return out


def qfim(f, family):
    """Quantum Fisher information matrix J_ij = Tr B_i (J^f)^-1(B_j)."""
    D = family.base
    K = mean_kernel(f, D)
    rot = [D.to_eigenbasis(B) for B in family.matrices]
    for Bt in rot:
        leak = np.max(np.abs(Bt[K.zero_mask]), initial=0.0)
        if leak > 1e-10 * max(1.0, float(np.max(np.abs(Bt)))):
            raise UnsupportedTangent(f"derivative has weight {leak:.3e} outside the support")
    m = len(rot)
    J = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            J[i, j] = J[j, i] = _pair_form(rot[i], rot[j], K.inverse).real
    return J


def locally_unbiased_check(f, family, A, i):
    """Tr A J_D^f(L_i), the derivative of Tr ρ(θ)A along θ_i (1 when locally unbiased)."""
    if not 0 <= i < family.m:
        raise ParamOutOfRange(f"parameter index {i} out of range")
    A = as_hermitian(_mat(A))
    check_same_dim(family.base.matrix, A)
    L = score_operators(f, family)[i]
    return float(np.trace(A @ jd_apply(f, family.base, L)).real)


def unbiased_estimators(f, family, perturbation=0.0, seed=0):
    """Locally unbiased estimators A_i = sum_j (J^-1)_ij L_j (+ optional noise).

    With ``perturbation > 0`` each A_i gets a random centered Hermitian term
    orthogonal to span{L_j} in the <X, J_D^f(Y)> inner product, which keeps
    local unbiasedness and strictly increases the covariance.
    """
    D = family.base
    L = score_operators(f, family)
    J = qfim(f, family)
    Jinv = np.linalg.inv(J)
    A = [sum(Jinv[i, j] * L[j] for j in range(family.m)) for i in range(family.m)]
    if perturbation <= 0:
        return A
    rng = np.random.default_rng(seed)
    n = D.dim
    JL = [jd_apply(f, D, Lj) for Lj in L]
    out = []
    for Ai in A:
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        P = 0.5 * (G + G.conj().T)
        P = P - np.trace(D.matrix @ P).real * np.eye(n)
        coeffs = Jinv @ np.array([np.trace(P @ JLj).real for JLj in JL])
        P = P - sum(c * Lj for c, Lj in zip(coeffs, L))
        out.append(Ai + perturbation * P)
    return out


@dataclass(frozen=True)
class CramerRaoCertificate:
    block: np.ndarray
    covariance: np.ndarray
    fisher: np.ndarray
    gap_min_eig: float
    block_min_eig: float
    tol: float = 1e-8

    @property
    def passed(self):
        return self.block_min_eig >= -self.tol and self.gap_min_eig >= -self.tol


def cramer_rao_certificate(f, family, estimators, tol_unbiased=TOL_UNBIASED, tol=1e-8):
    """Check C(D) >= J(D)^-1 for locally unbiased estimators.

    The block matrix [[C, I], [I, J]] is the Gram matrix of the centered
    estimators and score operators in the inner product <X, J_D^f(Y)>.
    """
    D = family.base
    m = family.m
    if len(estimators) != m:
        raise DimMismatch(f"need {m} estimators, got {len(estimators)}")
    A = [as_hermitian(_mat(Ai)) for Ai in estimators]
    check_same_dim(D.matrix, *A)
    L = score_operators(f, family)
    n = D.dim
    JL = [jd_apply(f, D, Lj) for Lj in L]
    U = np.array([[np.trace(Ai @ JLj).real for JLj in JL] for Ai in A])
    dev = float(np.max(np.abs(U - np.eye(m))))
    if dev > tol_unbiased:
        raise NotLocallyUnbiased(f"Tr A_i J(L_j) deviates from delta_ij by {dev:.3e}")
    centered = [Ai - np.trace(D.matrix @ Ai).real * np.eye(n) for Ai in A]
    vecs = centered + L
    K = mean_kernel(f, D)
    rot = [D.to_eigenbasis(V) for V in vecs]
    X = np.array([[_pair_form(a, b, K.kernel).real for b in rot] for a in rot])
    X = 0.5 * (X + X.T)
    C = X[:m, :m]
    J = X[m:, m:]
    gap = C - np.linalg.inv(J)
    return CramerRaoCertificate(
        block=X,
        covariance=C,
        fisher=J,
        gap_min_eig=float(np.linalg.eigvalsh(0.5 * (gap + gap.T))[0]),
        block_min_eig=float(np.linalg.eigvalsh(X)[0]),
        tol=tol,
    )


# -- skew information ---------------------------------------------------------


def skew_information(f, D, A):
    """I_D^f(A) = f(0)/2 * gamma_D^f(i[D, A], i[D, A])."""
    D = as_positive(D)
    A = as_hermitian(_mat(A))
    check_same_dim(D.matrix, A)
    f0 = f_zero(f)
    if f0 == 0.0:
        return 0.0
    lam = D.eigenvalues
    K = mean_kernel(f, D)
    At = D.to_eigenbasis(A)
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    return float(0.5 * f0 * np.sum(diff2 * K.inverse * np.abs(At) ** 2))


def _commutator(X, Y):
    return X @ Y - Y @ X


def wyd_skew(p, D, A):
    """Wigner-Yanase-Dyson skew information -1/2 Tr [D^p, A][D^(1-p), A]."""
    if not 0.0 < p < 1.0:
        raise ParamOutOfRange(f"p must lie in (0, 1), got {p}")
    D = as_positive(D)
    A = as_hermitian(_mat(A))
    check_same_dim(D.matrix, A)
    val = -0.5 * np.trace(_commutator(D.power(p), A) @ _commutator(D.power(1.0 - p), A))
    return float(val.real)


def skew_vs_covariance_identity(f, D, A, tol=1e-10):
    """Both sides of I_D^f(A) = Cov_D(A, A) - Cov_D^{f~}(A, A) for centered A."""
    D = as_density(D)
    A = as_hermitian(_mat(A))
    check_same_dim(D.matrix, A)
    centre = np.trace(D.matrix @ A).real
    if abs(centre) > tol:
        raise NotCentered(f"Tr DA = {centre:.3e}, expected 0")
    lhs = skew_information(f, D, A)
    rhs = covariance(SLD, D, A, A) - covariance(tilde_transform(f), D, A, A)
    return lhs, rhs


# -- divergences and extended metrics -----------------------------------------


def chi2_divergence(alpha, rho, sigma):
    """chi^2_alpha(rho, sigma) = Tr (rho - sigma) sigma^-alpha (rho - sigma) sigma^(alpha-1)."""
    if not 0.0 < alpha < 1.0:
        raise ParamOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    rho = as_density(rho)
    sigma = as_density(sigma)
    check_same_dim(rho.matrix, sigma.matrix)
    if not sigma.strictly_positive:
        raise SingularState("chi2 divergence needs a strictly positive sigma")
    delta = rho.matrix - sigma.matrix
    val = np.trace(delta @ sigma.power(-alpha) @ delta @ sigma.power(alpha - 1.0))
    return float(val.real)


def chi2_as_metric(alpha, rho, sigma):
    """gamma_sigma^{f_alpha}(rho - sigma, rho - sigma); equals chi2_divergence."""
    rho = as_density(rho)
    sigma = as_density(sigma)
    return fisher_metric(chi2(alpha), sigma, rho.matrix - sigma.matrix)


@dataclass(frozen=True)
class ExtendedMetricSpec:
    """K_rho(A, B) = b(Tr rho) conj(Tr A) Tr B + c <A, (J_rho^f)^-1 B>.

    ``x_max`` bounds the sampled range for the x b(x) + c > 0 check.
    """

    f: object
    b: object = field(compare=False)
    c: float = 1.0
    x_max: float = 1e3
    n_samples: int = 400

    def condition_values(self, extra=()):
        x = np.concatenate([np.logspace(-6, np.log10(self.x_max), self.n_samples), np.asarray(extra, float)])
        return x, x * np.array([float(self.b(xi)) for xi in x]) + self.c

    def check(self, extra=()):
        if not self.c > 0:
            raise PositivityConditionViolated(f"c must be positive, got {self.c}")
        x, vals = self.condition_values(extra)
        bad = vals <= 0
        if np.any(bad):
            raise PositivityConditionViolated(
                f"x b(x) + c = {vals[bad][0]:.3e} <= 0 at x = {x[bad][0]:.6g}"
            )


def extended_metric(spec, rho, A, B=None, check=True):
    """Evaluate the extended monotone metric K_rho(A, B) (complex).

    ``check=False`` skips the x b(x) + c > 0 test; only useful for showing
    what goes wrong without it.
    """
    rho = as_positive(rho)
    if not rho.strictly_positive:
        raise SingularState("extended metrics need a strictly positive footpoint")
    A = as_matrix(A)
    B = A if B is None else as_matrix(B)
    check_same_dim(rho.matrix, A, B)
    tr = rho.trace
    if check:
        spec.check(extra=(tr,))
    K = mean_kernel(spec.f, rho)
    inner = _pair_form(rho.to_eigenbasis(A), rho.to_eigenbasis(B), K.inverse)
    return complex(float(spec.b(tr)) * np.conj(np.trace(A)) * np.trace(B) + spec.c * inner)


# -- perturbation variance ----------------------------------------------------


def bkm_perturbation_variance(H, A, n_quad=96):
    """int_0^1 Tr e^{sH} A e^{(1-s)H} A ds - (Tr DA)^2 with D = e^H / Tr e^H.

    H is shifted by log Tr e^H first so that e^H is the normalized state.
    """
    H = as_hermitian(H)
    A = as_hermitian(_mat(A))
    check_same_dim(H, A)
    w = eig_hermitian(H).eigenvalues
    shift = w[-1] + np.log(np.sum(np.exp(w - w[-1])))
    Hn = H - shift * np.eye(H.shape[0])
    s, wq = np.polynomial.legendre.leggauss(n_quad)
    s = 0.5 * (s + 1.0)
    wq = 0.5 * wq
    total = 0.0
    for sk, wk in zip(s, wq):
        total += wk * np.trace(expm(sk * Hn) @ A @ expm((1.0 - sk) * Hn) @ A).real
    D = expm(Hn)
    return float(total - np.trace(D @ A).real ** 2)
