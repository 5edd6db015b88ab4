"""Full-profile acceptance gate.

One test per report criterion at reference settings and tolerances; each
prints its verdict line so a plain ``pytest -s tests/test_acceptance.py``
reads as the reproduction checklist.  These are the same checks ``steergap
report`` runs, asserted individually.
"""

from steergap.report import (
    ReportSettings,
    criterion_bound_chain,
    criterion_commuting_violation,
    criterion_conjugation,
    criterion_heat_vision,
    criterion_moment_oracle,
    criterion_norm_sweep,
    criterion_seesaw_bound,
    criterion_table_sanity,
    criterion_tightness,
)

SETTINGS = ReportSettings()


def _check(criterion):
    result = criterion(SETTINGS)
    print(result.line())
    assert result.passed, result.line()


def test_criterion_1_norm_sweep_converges_from_below():
    _check(criterion_norm_sweep)


def test_criterion_2_walk_moment_oracle():
    _check(criterion_moment_oracle)


def test_criterion_3_first_letter_bound_chain():
    _check(criterion_bound_chain)


def test_criterion_4_tightness_family():
    _check(criterion_tightness)


def test_criterion_5_commuting_strategy_violates():
    _check(criterion_commuting_violation)


def test_criterion_6_seesaw_under_tensor_bound():
    _check(criterion_seesaw_bound)


def test_criterion_7_conjugation_identity():
    _check(criterion_conjugation)


def test_criterion_8_heat_vision_decay():
    _check(criterion_heat_vision)


def test_criterion_9_probability_table_sanity():
    _check(criterion_table_sanity)
