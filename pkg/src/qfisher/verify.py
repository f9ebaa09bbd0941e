"""Randomised verification sweeps.

Each ``check_*`` function runs one family of checks and returns a list of
:class:`Certificate` records. ``verify_all`` runs every sweep; the command
line ``verify-all`` and the acceptance tests both go through here.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import sqrtm

from . import channels as chn
from .errors import PositivityConditionViolated
from .matrix_core import validate_density, validate_positive
from .measurement import supremum_certificate, sld_optimal_observable
from .metrics import (
    ExtendedMetricSpec,
    ParamFamily,
    chi2_as_metric,
    chi2_divergence,
    covariance,
    cramer_rao_certificate,
    extended_metric,
    fisher_metric,
    skew_information,
    skew_vs_covariance_identity,
    unbiased_estimators,
    wyd_skew,
    bkm_perturbation_variance,
)
from .monotone import BKM, GEOMETRIC, HARMONIC, SLD, WY, catalog, f_zero, mean, tilde_transform, wyd
from .sampling import (
    random_centered,
    random_density,
    random_hermitian,
    random_spectrum,
    random_traceless,
    random_unitary,
)
from .superop import bkm_oracles, jd_apply, jd_inverse_apply, mean_kernel, sld_inverse_oracle


@dataclass
class Certificate:
    name: str
    worst_violation: float
    tolerance: float
    details: dict = field(default_factory=dict)
    passed: bool = None

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.worst_violation <= self.tolerance)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst={self.worst_violation:.3e} tol={self.tolerance:.1e}"


def _unit(A):
    return A / np.linalg.norm(A)


def check_closed_form_observable(n_trials=100, seed=0):
    """SLD optimal observable vs the 2x2 closed form [[a/r, 2b], [2 conj b, -a/(1-r)]]."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        r = rng.uniform(0.02, 0.98)
        a = rng.uniform(-1, 1)
        b = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        D = validate_density(np.diag([r, 1 - r]))
        B = np.array([[a, b], [np.conj(b), -a]])
        C = sld_optimal_observable(D, B)
        expected = np.array([[a / r, 2 * b], [2 * np.conj(b), -a / (1 - r)]])
        worst = max(worst, float(np.max(np.abs(C - expected))))
    return [Certificate("closed_form_optimal_observable", worst, 1e-10)]


def check_supremum(n_instances=50, n_povms=200, seed=0):
    rng = np.random.default_rng(seed)
    attain, exceed = 0.0, 0.0
    for k in range(n_instances):
        n = int(rng.integers(2, 5))
        D = random_density(n, rng)
        B = _unit(random_traceless(n, rng))
        cert = supremum_certificate(D, B, n_povms, seed=seed * 100003 + k)
        attain = max(attain, abs(cert.attained - cert.bound))
        exceed = max(exceed, cert.max_random - cert.bound)
    return [
        Certificate("supremum_attained_equals_sld_bound", attain, 1e-8),
        Certificate("supremum_random_povms_below_bound", max(exceed, 0.0), 1e-8, {"max_excess": exceed}),
    ]


def _random_channel_for(n_in, rng):
    n_out = int(rng.integers(2, 5))
    rank = int(rng.integers(max(1, -(-n_in // n_out)), 4))
    rank = max(rank, -(-n_in // n_out))
    return chn.random_channel(n_in, n_out, rank, int(rng.integers(2**63)))


def check_monotonicity(n_triples=100, n_families=50, seed=0, fs=None):
    rng = np.random.default_rng(seed)
    fs = catalog() if fs is None else fs
    worst_metric = 0.0
    worst_qfim = 0.0
    for f in fs:
        for _ in range(n_triples):
            n = int(rng.integers(2, 5))
            ch = _random_channel_for(n, rng)
            D = random_density(n, rng)
            A = _unit(random_traceless(n, rng))
            worst_metric = max(worst_metric, -chn.metric_monotonicity_gap(f, ch, D, A))
        for _ in range(n_families):
            n = int(rng.integers(2, 5))
            ch = _random_channel_for(n, rng)
            fam = ParamFamily(random_density(n, rng), [_unit(random_traceless(n, rng)) for _ in range(2)])
            gap = chn.qfim_monotonicity_gap(f, ch, fam)
            worst_qfim = max(worst_qfim, -float(np.linalg.eigvalsh(0.5 * (gap + gap.T))[0]))
    return [
        Certificate("metric_monotonicity", max(worst_metric, 0.0), 1e-8),
        Certificate("qfim_monotonicity", max(worst_qfim, 0.0), 1e-8),
    ]


def check_contractions(n_trials=50, seed=0, fs=None):
    """Operator inequality beta J_D beta* <= J_beta(D) and variance contraction."""
    rng = np.random.default_rng(seed)
    fs = catalog() if fs is None else fs
    worst_j, worst_var = 0.0, 0.0
    for f in fs:
        for _ in range(n_trials):
            n = int(rng.integers(2, 5))
            ch = _random_channel_for(n, rng)
            D = random_density(n, rng)
            Y = _unit(random_hermitian(ch.n_out, rng))
            worst_j = max(worst_j, -chn.jd_contraction_gap(f, ch, D, Y))
            worst_var = max(worst_var, -chn.variance_contraction_gap(f, ch, D, Y))
    return [
        Certificate("jd_operator_contraction", max(worst_j, 0.0), 1e-8),
        Certificate("variance_contraction", max(worst_var, 0.0), 1e-8),
    ]


def check_oracles(n_instances=50, seed=0):
    rng = np.random.default_rng(seed)
    w_sld, w_fwd, w_inv, w_pert = 0.0, 0.0, 0.0, 0.0
    for _ in range(n_instances):
        n = int(rng.integers(2, 5))
        D = random_density(n, rng)
        B = random_hermitian(n, rng)
        w_sld = max(w_sld, float(np.max(np.abs(sld_inverse_oracle(D, B) - jd_inverse_apply(SLD, D, B)))))
        fwd, inv = bkm_oracles(D, B)
        w_fwd = max(w_fwd, float(np.max(np.abs(fwd - jd_apply(BKM, D, B)))))
        w_inv = max(w_inv, float(np.max(np.abs(inv - jd_inverse_apply(BKM, D, B)))))
        H = random_hermitian(n, rng)
        A = random_hermitian(n, rng)
        w, U = np.linalg.eigh(H)
        p = np.exp(w - w.max())
        Dh = validate_density((U * (p / p.sum())) @ U.conj().T)
        w_pert = max(w_pert, abs(bkm_perturbation_variance(H, A) - covariance(BKM, Dh, A, A)))
    return [
        Certificate("sld_inverse_vs_integral", w_sld, 1e-6),
        Certificate("bkm_forward_vs_integral", w_fwd, 1e-6),
        Certificate("bkm_inverse_vs_integral", w_inv, 1e-6),
        Certificate("bkm_perturbation_variance", w_pert, 1e-6),
    ]


def check_metric_ordering(n_instances=100, seed=0):
    rng = np.random.default_rng(seed)
    fs = catalog()
    worst_order, worst_spread = 0.0, 0.0
    for _ in range(n_instances):
        n = int(rng.integers(2, 7))
        D = random_density(n, rng)
        A = _unit(random_traceless(n, rng))
        lo = fisher_metric(SLD, D, A)
        hi = fisher_metric(HARMONIC, D, A)
        for f in fs:
            g = fisher_metric(f, D, A)
            worst_order = max(worst_order, lo - g, g - hi)
        # commuting sector: A diagonal in D's eigenbasis
        U = D.eig.vectors
        a = rng.standard_normal(n)
        a -= a.mean()
        Ac = (U * a) @ U.conj().T
        vals = [fisher_metric(f, D, Ac) for f in fs]
        worst_spread = max(worst_spread, max(vals) - min(vals))
    return [
        Certificate("metric_ordering_sld_f_harmonic", max(worst_order, 0.0), 1e-9),
        Certificate("commuting_sector_universality", worst_spread, 1e-10),
    ]


def check_skew(n_instances=100, seed=0):
    rng = np.random.default_rng(seed)
    fs = catalog() + [wyd(0.7), wyd(1.5)]
    w_ident, w_order, w_wy = 0.0, 0.0, 0.0
    for _ in range(n_instances):
        n = int(rng.integers(2, 5))
        D = random_density(n, rng)
        A = random_centered(D, rng)
        for f in fs:
            lhs, rhs = skew_vs_covariance_identity(f, D, A)
            w_ident = max(w_ident, abs(lhs - rhs))
        i_wy = skew_information(WY, D, A)
        i_sld = skew_information(SLD, D, A)
        w_order = max(w_order, i_wy - i_sld, i_sld - 2 * i_wy)
        R = sqrtm(np.asarray(D.matrix))
        direct = float((-0.5 * np.trace((R @ A - A @ R) @ (R @ A - A @ R))).real)
        w_wy = max(w_wy, abs(wyd_skew(0.5, D, A) - direct))
    x = np.logspace(-4, 4, 2001)
    w_tilde = max(
        float(np.max(np.abs(tilde_transform(SLD)(x) - HARMONIC(x)))),
        float(np.max(np.abs(tilde_transform(WY)(x) - GEOMETRIC(x)))),
    )
    return [
        Certificate("skew_covariance_identity", w_ident, 1e-8),
        Certificate("tilde_sld_harmonic_tilde_wy_geometric", w_tilde, 1e-10),
        Certificate("wy_sld_skew_sandwich", max(w_order, 0.0), 1e-10),
        Certificate("wyd_half_equals_wigner_yanase", w_wy, 1e-10),
    ]


def check_cramer_rao(n_trials=100, seed=0, perturbation=0.3):
    rng = np.random.default_rng(seed)
    fs = catalog()
    w_eq, w_pert, w_block = 0.0, 0.0, 0.0
    strict = 0
    for k in range(n_trials):
        n = int(rng.integers(2, 5))
        # unbiased perturbations live in an (n^2 - 1 - m)-dim complement of the
        # score span; a positive definite gap needs room for m of them
        m = int(rng.integers(1, min(3, (n * n - 1) // 2) + 1))
        fam = ParamFamily(random_density(n, rng), [_unit(random_traceless(n, rng)) for _ in range(m)])
        f = fs[k % len(fs)]
        eq = cramer_rao_certificate(f, fam, unbiased_estimators(f, fam))
        w_eq = max(w_eq, abs(eq.gap_min_eig))
        est = unbiased_estimators(f, fam, perturbation=perturbation, seed=int(rng.integers(2**63)))
        pc = cramer_rao_certificate(f, fam, est)
        w_pert = max(w_pert, -pc.gap_min_eig)
        strict += pc.gap_min_eig > 1e-8
        w_block = max(w_block, -eq.block_min_eig, -pc.block_min_eig)
    frac = strict / n_trials
    return [
        Certificate("cramer_rao_equality_case", w_eq, 1e-8),
        Certificate("cramer_rao_perturbed_gap_nonnegative", max(w_pert, 0.0), 1e-8),
        Certificate(
            "cramer_rao_strict_gap_fraction",
            1.0 - frac,
            0.05,
            {"strict_fraction": frac},
        ),
        Certificate("cramer_rao_block_psd", max(w_block, 0.0), 1e-8),
    ]


def check_chi2(n_instances=100, seed=0):
    rng = np.random.default_rng(seed)
    alphas = (0.2, 0.5, 0.8)
    rho = np.diag([0.3, 0.7])
    sigma = np.diag([0.25, 0.75])
    worked = [chi2_divergence(a, rho, sigma) for a in alphas]
    w_worked = max(abs(v - 0.0025 / 0.25 - 0.0025 / 0.75) for v in worked)
    w_spread = max(worked) - min(worked)
    w_cross = 0.0
    for _ in range(n_instances):
        n = int(rng.integers(2, 5))
        U = random_unitary(n, rng)
        p, q = random_spectrum(n, rng), random_spectrum(n, rng)
        r_c = validate_density((U * p) @ U.conj().T)
        s_c = validate_density((U * q) @ U.conj().T)
        vals = [chi2_divergence(a, r_c, s_c) for a in alphas]
        w_spread = max(w_spread, max(vals) - min(vals))
        r, s = random_density(n, rng), random_density(n, rng)
        for a in alphas:
            w_cross = max(w_cross, abs(chi2_divergence(a, r, s) - chi2_as_metric(a, r, s)))
    return [
        Certificate("chi2_commuting_alpha_independent", w_spread, 1e-10),
        Certificate("chi2_worked_pair", w_worked, 1e-10, {"value": worked[0]}),
        Certificate("chi2_metric_cross_check", w_cross, 1e-8),
    ]


def extended_specs(rng, n_each=20):
    """Random (b, c) specs: ``n_each`` satisfying x b(x) + c > 0 and ``n_each`` violating it."""
    good, bad = [], []
    for k in range(n_each):
        c = float(rng.uniform(0.2, 3.0))
        f = catalog()[k % 7]
        kind = k % 3
        if kind == 0:
            s = float(rng.uniform(-2.0, 0.95))
            good.append(ExtendedMetricSpec(f, lambda x, s=s, c=c: -s * c / x, c))
        elif kind == 1:
            v = float(rng.uniform(0.0, 2.0))
            good.append(ExtendedMetricSpec(f, lambda x, v=v: v, c))
        else:
            s = float(rng.uniform(0.1, 0.9))
            good.append(ExtendedMetricSpec(f, lambda x, s=s, c=c: -s * c / (x + x**2), c))
    for k in range(n_each):
        c = float(rng.uniform(0.2, 3.0))
        f = catalog()[k % 7]
        if k % 2 == 0:
            s = float(rng.uniform(1.1, 3.0))
            bad.append(ExtendedMetricSpec(f, lambda x, s=s, c=c: -s * c / x, c))
        else:
            v = float(rng.uniform(0.05, 5.0))
            bad.append(ExtendedMetricSpec(f, lambda x, v=v: -v, c))
    return good, bad


def _random_positive(n, rng):
    U = random_unitary(n, rng)
    w = random_spectrum(n, rng) * 10.0 ** rng.uniform(-1, 1)
    return validate_positive((U * w) @ U.conj().T)


def check_extended(n_samples=100, seed=0):
    rng = np.random.default_rng(seed)
    good, bad = extended_specs(rng)
    worst_good = 0.0
    for spec in good:
        for _ in range(n_samples):
            n = int(rng.integers(1, 5))
            rho = _random_positive(n, rng)
            A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            worst_good = max(worst_good, -extended_metric(spec, rho, A).real)
    rejected = 0
    negative_found = 0
    for spec in bad:
        try:
            extended_metric(spec, _random_positive(2, rng), np.eye(2))
        except PositivityConditionViolated:
            rejected += 1
        # unchecked evaluation at A = rho with Tr rho at a violating point is negative
        x, vals = spec.condition_values()
        t = float(x[np.argmin(vals)])
        rho = validate_positive(np.diag([0.4 * t, 0.6 * t]))
        negative_found += extended_metric(spec, rho, rho.matrix, check=False).real < -1e-10
    return [
        Certificate("extended_metric_positive_when_condition_holds", max(worst_good, 0.0), 1e-10),
        Certificate(
            "extended_metric_violations_rejected",
            float(len(bad) - rejected),
            0.0,
            {"rejected": rejected, "total": len(bad)},
        ),
        Certificate(
            "extended_metric_violations_negative_unchecked",
            float(len(bad) - negative_found),
            0.0,
            {"negative_found": negative_found},
        ),
    ]


def check_degenerate(lam=0.3, mu=0.4, seed=0):
    """The state diag(0, lam, lam, mu): kernel pattern and Moore-Penrose round trip."""
    rng = np.random.default_rng(seed)
    D = validate_density(np.diag([0.0, lam, lam, mu]))
    worst_pattern, worst_round = 0.0, 0.0
    ok_pattern = True
    for f in catalog():
        K = mean_kernel(f, D)
        expected_mask = np.zeros((4, 4), dtype=bool)
        expected_mask[0, 0] = True
        if f_zero(f) == 0.0:
            expected_mask[0, :] = expected_mask[:, 0] = True
        ok_pattern &= bool(np.array_equal(K.zero_mask, expected_mask))
        lam_v = np.array([0.0, lam, lam, mu])
        ref = mean(f, lam_v[:, None], lam_v[None, :])
        B = random_hermitian(4, rng)
        out = jd_apply(f, D, B)
        worst_pattern = max(worst_pattern, float(np.max(np.abs(out - ref * B))))
        back = jd_apply(f, D, jd_inverse_apply(f, D, B))
        worst_round = max(worst_round, float(np.max(np.abs(np.where(K.zero_mask, back, back - B)))))
    return [
        Certificate("degenerate_kernel_pattern", worst_pattern, 1e-12, {"mask_ok": ok_pattern}, passed=ok_pattern and worst_pattern <= 1e-12),
        Certificate("degenerate_moore_penrose_round_trip", worst_round, 1e-12),
    ]


CHECKS = {
    "closed_form": check_closed_form_observable,
    "supremum": check_supremum,
    "monotonicity": check_monotonicity,
    "contractions": check_contractions,
    "oracles": check_oracles,
    "metric_ordering": check_metric_ordering,
    "skew": check_skew,
    "cramer_rao": check_cramer_rao,
    "chi2": check_chi2,
    "extended": check_extended,
    "degenerate": check_degenerate,
}


def verify_all(seed=0, scale=1.0):
    """Run every sweep; ``scale`` < 1 shrinks instance counts for quick runs."""

    def n(k):
        return max(1, int(round(k * scale)))

    certs = []
    certs += check_closed_form_observable(n(100), seed)
    certs += check_supremum(n(50), n(200), seed)
    certs += check_monotonicity(n(100), n(50), seed)
    certs += check_contractions(n(50), seed)
    certs += check_oracles(n(50), seed)
    certs += check_metric_ordering(n(100), seed)
    certs += check_skew(n(100), seed)
    certs += check_cramer_rao(n(100), seed)
    certs += check_chi2(n(100), seed)
    certs += check_extended(n(100), seed)
    certs += check_degenerate(seed=seed)
    return certs
