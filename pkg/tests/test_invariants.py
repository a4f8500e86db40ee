"""Heavier module invariants that go beyond the per-operation unit tests."""

import pytest

from ncstar import presentations as P
from ncstar import verifier as V
from ncstar.cli import RunConfig, run_sweep
from ncstar.ncalg import INCONCLUSIVE, PROVED_ZERO


def test_comultiplication_random_n4_sample():
    """The coproduct check holds for all pairs, regular or not; sample 50 at n=4."""
    config = RunConfig(seed=0, format="json")
    body = run_sweep(4, ("hopf",), config, sample=50)
    assert body["totals"]["tasks"] == 50
    bad = [r for r in body["results"] if r["overall"] != "ProvedZero"]
    assert not bad, bad[:3]


def test_regularization_consistency_all_n_le_3():
    """Added relations of the regularized sphere either certify at product bound
    4 or stay Inconclusive; they never produce a bogus nonzero verdict."""
    inconclusive_pairs = 0
    checked = 0
    for n in (1, 2, 3):
        for pair in P.enumerate_pairs(n):
            if P.is_regular(pair).is_regular:
                continue
            report = V.verify_regularization_consistency(pair)
            checked += 1
            assert report.checks, f"{pair.compact()}: regularize changed nothing?"
            statuses = {c.certificate.status for c in report.checks}
            assert statuses <= {PROVED_ZERO, INCONCLUSIVE}, pair.compact()
            if INCONCLUSIVE in statuses:
                inconclusive_pairs += 1
    assert checked > 400  # 1 + 11 + 414 non-regular pairs at n = 1, 2, 3
    # the conclusive cases exist (the merge-type pairs) and so do the open ones
    assert 0 < inconclusive_pairs < checked


def test_sweep_results_independent_of_job_count():
    config1 = RunConfig(jobs=1, format="json")
    config2 = RunConfig(jobs=2, format="json")
    body1 = run_sweep(2, ("hopf", "tuple-action"), config1)
    body2 = run_sweep(2, ("hopf", "tuple-action"), config2)
    assert body1 == body2
