"""Random test instances: states, observables, tangents and families."""

import numpy as np

from .matrix_core import validate_density
from .metrics import ParamFamily


def random_unitary(n, rng):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(n, rng, scale=1.0):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (G + G.conj().T)


def random_traceless(n, rng, scale=1.0):
    H = random_hermitian(n, rng, scale)
    return H - np.trace(H).real / n * np.eye(n)


def random_spectrum(n, rng, floor=0.05):
    """Dirichlet spectrum mixed with the uniform one; min eigenvalue >= floor / n."""
    w = rng.dirichlet(np.ones(n))
    return (1.0 - floor) * w + floor / n


def random_density(n, rng, floor=0.05):
    U = random_unitary(n, rng)
    return validate_density((U * random_spectrum(n, rng, floor)) @ U.conj().T)


def random_centered(D, rng):
    """Random Hermitian A with Tr DA = 0."""
    n = D.dim
    A = random_hermitian(n, rng)
    return A - np.trace(D.matrix @ A).real * np.eye(n)


def random_family(n, m, rng, floor=0.05):
    D = random_density(n, rng, floor)
    return ParamFamily(D, [random_traceless(n, rng) for _ in range(m)])
