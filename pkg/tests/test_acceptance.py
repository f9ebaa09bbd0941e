"""Acceptance criteria, each run at its stated size and tolerance.

Every criterion prints one PASS/FAIL line (collected in the pytest terminal
summary, or printed directly with ``python3 tests/test_acceptance.py``).
"""

import pytest

from qfisher.verify import (
    check_chi2,
    check_closed_form_observable,
    check_cramer_rao,
    check_degenerate,
    check_extended,
    check_metric_ordering,
    check_monotonicity,
    check_oracles,
    check_skew,
    check_supremum,
)

SEED = 0

CRITERIA = [
    (1, "closed-form optimal observable, 100 random (r, a, b)", lambda: check_closed_form_observable(100, SEED)),
    (2, "classical FI supremum equals SLD bound, 50 instances x 200 POVMs", lambda: check_supremum(50, 200, SEED)),
    (3, "monotonicity sweeps over the catalog", lambda: check_monotonicity(100, 50, SEED)),
    (4, "Hadamard form vs integral oracles, 50 instances", lambda: check_oracles(50, SEED)),
    (5, "metric ordering and commuting universality, 100 instances", lambda: check_metric_ordering(100, SEED)),
    (6, "skew information suite, 100 instances", lambda: check_skew(100, SEED)),
    (7, "Cramer-Rao equality, perturbation and block PSD, 100 trials", lambda: check_cramer_rao(100, SEED)),
    (8, "chi2 alpha independence, worked pair and metric form", lambda: check_chi2(100, SEED)),
    (9, "extended metric positivity, 20 + 20 specs x 100 samples", lambda: check_extended(100, SEED)),
    (10, "degenerate state diag(0, l, l, mu)", lambda: check_degenerate(seed=SEED)),
]


def evaluate(number, title, run):
    certs = run()
    ok = all(c.passed for c in certs)
    detail = "; ".join(f"{c.name} worst={c.worst_violation:.2e} tol={c.tolerance:.0e}" for c in certs)
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{detail}]"
    return ok, line, certs


@pytest.mark.parametrize("number, title, run", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, run, pytestconfig):
    ok, line, certs = evaluate(number, title, run)
    print(line)
    pytestconfig.acceptance_lines.append(line)
    failed = [c.name for c in certs if not c.passed]
    assert ok, f"criterion {number} failed: {failed}"


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line, _ in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _, _ in results) else 1)
