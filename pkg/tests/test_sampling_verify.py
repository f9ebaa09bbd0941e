import numpy as np
import pytest

from qfisher.sampling import random_centered, random_density, random_spectrum, random_unitary
from qfisher.verify import CHECKS, Certificate, check_cramer_rao, check_degenerate, verify_all


def test_unitary(rng):
    U = random_unitary(4, rng)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(4), atol=1e-13)


def test_spectrum_floor(rng):
    for n in range(2, 8):
        p = random_spectrum(n, rng)
        assert p.sum() == pytest.approx(1.0)
        assert p.min() >= 0.05 / n - 1e-15


def test_density_valid(rng):
    D = random_density(5, rng)
    assert D.strictly_positive
    assert D.trace == pytest.approx(1.0)


def test_centered(rng):
    D = random_density(3, rng)
    A = random_centered(D, rng)
    assert abs(np.trace(D.matrix @ A)) < 1e-14


def test_certificate_consistency():
    c = Certificate("x", 2e-9, 1e-8)
    assert c.passed
    assert c.line().startswith("[PASS] x")
    assert not Certificate("y", 1.0, 0.5).passed


def test_reproducible():
    a = [c.worst_violation for c in check_cramer_rao(10, seed=3)]
    b = [c.worst_violation for c in check_cramer_rao(10, seed=3)]
    assert a == b


def test_degenerate_other_spectrum():
    assert all(c.passed for c in check_degenerate(lam=0.2, mu=0.6, seed=4))


@pytest.mark.parametrize("seed", [1, 2])
def test_verify_all_small(seed):
    certs = verify_all(seed=seed, scale=0.1)
    failed = [c.line() for c in certs if not c.passed]
    assert not failed
    assert len(CHECKS) == 11
