"""Acceptance suite: one test per criterion, each printing its verdict line."""

from rotorlab import acceptance


def _check(result):
    print()
    print(result.line())
    assert result.ok, result.details


def test_criterion_1_perfect_ball():
    _check(acceptance.criterion_1_perfect_ball())


def test_criterion_2_exit_measure():
    _check(acceptance.criterion_2_exit_measure())


def test_criterion_3_root_order():
    _check(acceptance.criterion_3_root_order())


def test_criterion_4_isomorphism():
    _check(acceptance.criterion_4_isomorphism())


def test_criterion_5_hitting_probabilities():
    _check(acceptance.criterion_5_hitting_probabilities())


def test_criterion_6_alternation():
    _check(acceptance.criterion_6_alternation())


def test_criterion_7_extremal_configs():
    _check(acceptance.criterion_7_extremal_configs())


def test_criterion_8_escape_characterization():
    _check(acceptance.criterion_8_escape_characterization())


def test_criterion_9_word_calculus():
    _check(acceptance.criterion_9_word_calculus())
