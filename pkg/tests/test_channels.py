import numpy as np
import pytest
from hypothesis import given, settings

from conftest import SX, SZ, dims, seeds
from qfisher import channels as chn
from qfisher.errors import BadParams, DimMismatch, NotProjective, NotTracePreserving
from qfisher.matrix_core import hs_inner, validate_density
from qfisher.measurement import Povm, computational_basis
from qfisher.metrics import ParamFamily
from qfisher.monotone import SLD, catalog
from qfisher.sampling import random_density, random_family, random_hermitian, random_traceless, random_unitary

FS = catalog()


class TestApply:
    def test_identity(self, rng):
        M = random_hermitian(3, rng)
        np.testing.assert_allclose(chn.apply(chn.identity_channel(3), M), M)
        np.testing.assert_allclose(chn.adjoint_apply(chn.identity_channel(3), M), M)

    def test_pinching_is_diagonal_part(self, rng):
        M = random_hermitian(3, rng)
        P = chn.pinching_from_povm(computational_basis(3))
        np.testing.assert_allclose(chn.apply(P, M), np.diag(np.diag(M)))
        np.testing.assert_allclose(chn.adjoint_apply(P, M), chn.apply(P, M))

    def test_block_pinching(self, rng):
        P1 = np.diag([1.0, 1.0, 0.0]).astype(complex)
        ch = chn.pinching_from_povm(Povm((P1, np.eye(3) - P1)))
        M = random_hermitian(3, rng)
        out = chn.apply(ch, M)
        np.testing.assert_allclose(out[:2, :2], M[:2, :2])
        np.testing.assert_allclose(out[:2, 2], 0)
        assert out[2, 2] == pytest.approx(M[2, 2])

    def test_not_projective(self):
        with pytest.raises(NotProjective):
            chn.pinching_from_povm(Povm((0.5 * np.eye(2), 0.5 * np.eye(2))))

    def test_fully_depolarizing(self, rng):
        ch = chn.depolarizing(1.0)
        for _ in range(3):
            np.testing.assert_allclose(chn.apply(ch, random_density(2, rng).matrix), np.eye(2) / 2, atol=1e-15)

    def test_depolarizing_partial(self):
        ch = chn.depolarizing(0.4)
        rho = np.diag([1.0, 0.0])
        np.testing.assert_allclose(chn.apply(ch, rho), 0.6 * rho + 0.4 * np.eye(2) / 2, atol=1e-15)

    def test_adjoint_definition(self, rng):
        ch = chn.random_channel(3, 2, 2, seed=5)
        for _ in range(5):
            A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            B = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            assert hs_inner(chn.apply(ch, A), B) == pytest.approx(hs_inner(A, chn.adjoint_apply(ch, B)), abs=1e-10)

    def test_dim_checks(self):
        ch = chn.random_channel(3, 2, 2, seed=0)
        with pytest.raises(DimMismatch):
            chn.apply(ch, np.eye(2))
        with pytest.raises(DimMismatch):
            chn.adjoint_apply(ch, np.eye(3))

    def test_not_trace_preserving(self):
        with pytest.raises(NotTracePreserving):
            chn.KrausChannel((0.9 * np.eye(2),))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, n=dims)
    def test_preserves_states(self, seed, n):
        rng = np.random.default_rng(seed)
        ch = chn.random_channel(n, int(rng.integers(1, 5)), int(rng.integers(n, n + 2)), seed)
        out = chn.apply(ch, random_density(n, rng).matrix)
        assert abs(np.trace(out) - 1) <= 1e-10
        assert np.linalg.eigvalsh(out)[0] >= -1e-10


class TestRandomChannel:
    def test_rank_one_is_unitary(self):
        ch = chn.random_channel(3, 3, 1, seed=9)
        (K,) = ch.kraus_ops
        np.testing.assert_allclose(K @ K.conj().T, np.eye(3), atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_isometry(self, seed):
        ch = chn.random_channel(4, 3, 2, seed)
        S = sum(K.conj().T @ K for K in ch.kraus_ops)
        assert np.max(np.abs(S - np.eye(4))) <= 1e-12

    def test_deterministic(self):
        a = chn.random_channel(3, 2, 3, seed=42)
        b = chn.random_channel(3, 2, 3, seed=42)
        for Ka, Kb in zip(a.kraus_ops, b.kraus_ops):
            np.testing.assert_array_equal(Ka, Kb)

    def test_too_small(self):
        with pytest.raises(BadParams):
            chn.random_channel(5, 2, 2, seed=0)


class TestMonotonicity:
    @pytest.mark.parametrize("f", FS, ids=lambda f: f.spec)
    def test_identity_gap_zero(self, f, rng):
        D = random_density(3, rng)
        A = random_traceless(3, rng)
        assert chn.metric_monotonicity_gap(f, chn.identity_channel(3), D, A) == pytest.approx(0.0, abs=1e-12)
        fam = random_family(3, 2, rng)
        np.testing.assert_allclose(chn.qfim_monotonicity_gap(f, chn.identity_channel(3), fam), 0, atol=1e-10)

    @pytest.mark.parametrize("f", FS, ids=lambda f: f.spec)
    def test_unitary_invariance(self, f, rng):
        D = random_density(3, rng)
        A = random_traceless(3, rng)
        gap = chn.metric_monotonicity_gap(f, chn.unitary_channel(random_unitary(3, rng)), D, A)
        assert abs(gap) <= 1e-9

    def test_sld_qubit_sweep(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            ch = chn.random_channel(2, 2, int(rng.integers(1, 4)), seed)
            gap = chn.metric_monotonicity_gap(SLD, ch, random_density(2, rng), random_traceless(2, rng))
            assert gap >= -1e-8

    def test_pinching_commuting_family(self, rng):
        U = random_unitary(3, rng)
        lam = np.array([0.2, 0.3, 0.5])
        D = (U * lam) @ U.conj().T
        ders = [(U * d) @ U.conj().T for d in ([0.1, -0.05, -0.05], [0.0, 0.1, -0.1])]
        fam = ParamFamily(D, ders)
        pinch = chn.pinching_from_povm(Povm(tuple(np.outer(U[:, k], U[:, k].conj()) for k in range(3))))
        for f in FS:
            np.testing.assert_allclose(chn.qfim_monotonicity_gap(f, pinch, fam), 0, atol=1e-10)

    def test_depolarizing_strict_loss(self, rng):
        fam = ParamFamily(random_density(2, rng), [random_traceless(2, rng) for _ in range(2)])
        gap = chn.qfim_monotonicity_gap(SLD, chn.depolarizing(0.5), fam)
        assert np.linalg.eigvalsh(gap)[0] > 1e-6

    def test_masked_weight_reported(self):
        # a channel onto a pure state makes beta(D) singular
        K0 = np.array([[1, 0], [0, 0]], dtype=complex)
        K1 = np.array([[0, 1], [0, 0]], dtype=complex)
        ch = chn.KrausChannel((K0, K1))
        D = validate_density(np.diag([0.3, 0.7]))
        assert chn.image_masked_weight(SLD, ch, D, SZ) >= 0.0
        assert chn.metric_monotonicity_gap(SLD, ch, D, SX) >= -1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=dims)
    def test_operator_contraction(self, seed, n):
        rng = np.random.default_rng(seed)
        ch = chn.random_channel(n, int(rng.integers(2, 5)), n, seed)
        D = random_density(n, rng)
        Y = random_hermitian(ch.n_out, rng)
        for f in FS:
            assert chn.jd_contraction_gap(f, ch, D, Y) >= -1e-8
            assert chn.variance_contraction_gap(f, ch, D, Y) >= -1e-8
