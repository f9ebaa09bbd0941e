"""POVMs, measured (classical) Fisher information and the SLD optimum.

The classical Fisher information of any measurement is bounded by the SLD
quantum Fisher information Tr B J_D^-1(B), and the bound is attained by
measuring the observable C = J_D^-1(B) in its eigenbasis.
"""

from dataclasses import dataclass

import numpy as np

from .channels import adjoint_apply, random_channel
from .errors import DimMismatch, InvalidPovm, SingularState, ZeroProbabilityOutcomeWithSignal
from .matrix_core import as_density, as_hermitian, check_same_dim, cluster_eigenvalues, eig_hermitian
from .metrics import _mat, fisher_metric
from .monotone import SLD
from .superop import jd_inverse_apply

EPS_PROB = 1e-12
TOL_POVM = 1e-10


@dataclass(frozen=True)
class Povm:
    effects: tuple

    def __post_init__(self):
        effects = tuple(as_hermitian(E) for E in self.effects)
        if not effects:
            raise InvalidPovm("a POVM needs at least one effect")
        check_same_dim(*effects)
        for E in effects:
            if np.linalg.eigvalsh(E)[0] < -TOL_POVM:
                raise InvalidPovm("POVM effects must be positive semidefinite")
        n = effects[0].shape[0]
        defect = float(np.max(np.abs(sum(effects) - np.eye(n))))
        if defect > TOL_POVM:
            raise InvalidPovm(f"effects sum to identity only up to {defect:.3e}")
        for E in effects:
            E.setflags(write=False)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self):
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: np.ndarray


def computational_basis(n):
    return Povm(tuple(np.diag(np.eye(n)[k]).astype(complex) for k in range(n)))


def projective_from_basis(U):
    """Rank-one projective measurement onto the columns of unitary ``U``."""
    U = np.asarray(U)
    return Povm(tuple(np.outer(U[:, k], U[:, k].conj()) for k in range(U.shape[1])))


def random_projective_povm(n, rng):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return projective_from_basis(Q * (np.diag(R) / np.abs(np.diag(R))))


def random_povm(n, k, seed):
    """k-outcome POVM E_i = beta*(|i><i|) for a random channel beta: M_n -> M_k."""
    rank = max(1, -(-n // k))
    ch = random_channel(n, k, rank, seed)
    effects = []
    for i in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[i, i] = 1.0
        E = adjoint_apply(ch, e)
        effects.append(0.5 * (E + E.conj().T))
    return Povm(tuple(effects))


def _check_dim(D, povm):
    if D.dim != povm.dim:
        raise DimMismatch(f"state dim {D.dim}, POVM dim {povm.dim}")


def outcome_probs(D, povm):
    D = as_density(D)
    _check_dim(D, povm)
    p = np.array([np.trace(D.matrix @ E).real for E in povm.effects])
    return OutcomeDistribution(np.clip(p, -1e-12, None))


def classical_fisher(D, tangents, povm, eps_prob=EPS_PROB):
    """F_ij = sum_k Tr(B_i E_k) Tr(B_j E_k) / Tr(D E_k) for the measured distribution.

    Outcomes with Tr(D E_k) <= eps_prob are dropped when the derivatives also
    vanish there; otherwise ZeroProbabilityOutcomeWithSignal.
    """
    D = as_density(D)
    _check_dim(D, povm)
    Bs = [as_hermitian(_mat(B)) for B in tangents]
    check_same_dim(D.matrix, *Bs)
    p = outcome_probs(D, povm).probs
    dp = np.array([[np.trace(B @ E).real for E in povm.effects] for B in Bs])
    small = p <= eps_prob
    if np.any(np.abs(dp[:, small]) > eps_prob):
        raise ZeroProbabilityOutcomeWithSignal("an outcome with zero probability has nonzero derivative")
    keep = ~small
    return (dp[:, keep] / p[keep]) @ dp[:, keep].T


def classical_fisher_from_distribution(probs, dprobs):
    """Fisher information of a finite family: sum_x p(x) d_i log p(x) d_j log p(x)."""
    probs = np.asarray(probs, dtype=float)
    dprobs = np.atleast_2d(np.asarray(dprobs, dtype=float))
    score = dprobs / probs
    return (score * probs) @ score.T


def classical_fisher_reference(D, tangents, povm, reference):
    """Same quantity written with densities f(i) = Tr rho E_i / Tr D' E_i against a
    reference state D'; the result does not depend on D'."""
    D = as_density(D)
    ref = as_density(reference)
    _check_dim(D, povm)
    mu = np.array([np.trace(ref.matrix @ E).real for E in povm.effects])
    dens = np.array([np.trace(D.matrix @ E).real for E in povm.effects]) / mu
    ddens = np.array([[np.trace(_mat(B) @ E).real for E in povm.effects] for B in tangents]) / mu
    score = ddens / dens
    return (score * dens * mu) @ score.T


def _require_positive(D):
    D = as_density(D)
    if not D.strictly_positive:
        raise SingularState("the SLD optimum needs a strictly positive state")
    return D


def sld_optimal_observable(D, B):
    """C = J_D^-1(B) for the SLD map, i.e. the solution of DC + CD = 2B."""
    D = _require_positive(D)
    B = as_hermitian(_mat(B))
    check_same_dim(D.matrix, B)
    C = jd_inverse_apply(SLD, D, B)
    return 0.5 * (C + C.conj().T)


def optimal_measurement(D, B):
    """Projective measurement onto the eigenspaces of the optimal observable."""
    C = sld_optimal_observable(D, B)
    w, U = eig_hermitian(C)
    scale = max(1.0, float(np.max(np.abs(w))))
    labels = cluster_eigenvalues(w, C.shape[0] * 1e-12 * scale)
    effects = []
    for lab in np.unique(labels):
        V = U[:, labels == lab]
        effects.append(V @ V.conj().T)
    return Povm(tuple(effects))


@dataclass(frozen=True)
class SupremumCertificate:
    bound: float
    attained: float
    max_random: float
    tol: float = 1e-8

    @property
    def passed(self):
        return self.attained >= self.bound - self.tol and self.max_random <= self.bound + self.tol


def supremum_certificate(D, B, n_random_povms=200, seed=0, tol=1e-8):
    """Compare the SLD bound with the optimal and with random measurements.

    Half of the random measurements are Haar-random projective bases, the
    rest are k-outcome POVMs (k = 2..2n) built from random channels.
    """
    D = _require_positive(D)
    B = as_hermitian(_mat(B))
    bound = fisher_metric(SLD, D, B)
    attained = float(classical_fisher(D, [B], optimal_measurement(D, B))[0, 0])
    rng = np.random.default_rng(seed)
    n = D.dim
    best = -np.inf
    for r in range(n_random_povms):
        if r % 2 == 0:
            povm = random_projective_povm(n, rng)
        else:
            povm = random_povm(n, int(rng.integers(2, 2 * n + 1)), int(rng.integers(2**63)))
        best = max(best, float(classical_fisher(D, [B], povm)[0, 0]))
    return SupremumCertificate(bound, attained, best if n_random_povms else 0.0, tol)
