import json
import math
import random

import pytest

from descrank import sentiment
from descrank.errors import BadAlphaError, DataError, EmptyInputError
from descrank.sentiment import (
    POLARITIES,
    PolarityRecord,
    critical_value,
    ecdf,
    ks_statistic,
    ks_test,
    ks_threshold,
    read_polarity_file,
)

FIVE_LEVELS = (0.20, 0.15, 0.10, 0.05, 0.01)


def trunc4(x):
    return math.floor(x * 10**4) / 10**4


# --- ecdf ------------------------------------------------------------------


def test_ecdf_single_point():
    f = ecdf([0.5])
    assert f(0.5) == 1.0
    assert f(0.49) == 0.0
    assert f.n == 1


def test_ecdf_with_ties():
    f = ecdf([0.2, 0.4, 0.4, 0.8])
    assert f(0.4) == 0.75
    assert f(0.2) == 0.25
    assert f(0.8) == 1.0


def test_ecdf_right_continuous():
    f = ecdf([0.2, 0.4, 0.4, 0.8])
    assert f(0.4 - 1e-9) == 0.25
    assert f(0.4) == 0.75
    assert f(0.4 + 1e-9) == 0.75


def test_ecdf_limits():
    f = ecdf([1.0, 2.0, 3.0])
    assert f(0.0) == 0.0
    assert f(3.0) == 1.0
    assert f(99.0) == 1.0


def test_ecdf_non_decreasing():
    rng = random.Random(11)
    values = [rng.random() for _ in range(40)]
    f = ecdf(values)
    grid = sorted(rng.uniform(-0.5, 1.5) for _ in range(200))
    outputs = [f(x) for x in grid]
    assert outputs == sorted(outputs)


def test_ecdf_rejects_empty():
    with pytest.raises(EmptyInputError):
        ecdf([])


# --- ks statistic -------------------------------------------------------------


def test_ks_statistic_identical_is_zero():
    assert ks_statistic([0.1, 0.5, 0.9], [0.1, 0.5, 0.9]) == 0.0


def test_ks_statistic_disjoint_is_one():
    assert ks_statistic([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]) == 1.0


def test_ks_statistic_hand_value():
    # shifted triples overlap on two points: sup gap is 1/3, reached at 0.1
    assert ks_statistic([0.1, 0.2, 0.3], [0.2, 0.3, 0.4]) == pytest.approx(1 / 3)


def test_ks_statistic_symmetric_and_bounded():
    rng = random.Random(23)
    for _ in range(100):
        a = [rng.random() for _ in range(rng.randint(1, 12))]
        b = [rng.random() for _ in range(rng.randint(1, 12))]
        d_ab = ks_statistic(a, b)
        d_ba = ks_statistic(b, a)
        assert d_ab == d_ba
        assert 0.0 <= d_ab <= 1.0
        assert ks_statistic(a, a) == 0.0


def test_ks_statistic_rejects_empty():
    with pytest.raises(EmptyInputError):
        ks_statistic([], [0.5])
    with pytest.raises(EmptyInputError):
        ks_statistic([0.5], [])


# --- critical values and thresholds ----------------------------------------------


def test_critical_value_formula():
    for alpha in FIVE_LEVELS:
        assert critical_value(alpha) == pytest.approx(
            math.sqrt(-math.log(alpha / 2) / 2), rel=1e-15
        )


def test_critical_value_four_decimal_table():
    expected = {
        0.20: 1.0729,
        0.15: 1.1380,
        0.10: 1.2238,
        0.05: 1.3581,
        0.01: 1.6276,
    }
    for alpha, want in expected.items():
        assert trunc4(critical_value(alpha)) == pytest.approx(want, abs=1e-12)


def test_critical_value_decreasing_in_alpha():
    values = [critical_value(a) for a in sorted(FIVE_LEVELS)]
    assert values == sorted(values, reverse=True)


def test_critical_value_rejects_bad_alpha():
    for alpha in (0.0, 1.0, -0.05, 1.5):
        with pytest.raises(BadAlphaError):
            critical_value(alpha)


def test_threshold_four_decimal_table():
    expected = {
        0.20: 0.0479,
        0.15: 0.0508,
        0.10: 0.0547,
        0.05: 0.0607,
        0.01: 0.0727,
    }
    for alpha, want in expected.items():
        assert trunc4(ks_threshold(alpha, 1000, 1000)) == pytest.approx(want, abs=1e-12)


def test_threshold_formula_and_scaling():
    assert ks_threshold(0.05, 50, 200) == pytest.approx(
        critical_value(0.05) * math.sqrt(250 / 10000), rel=1e-15
    )
    # larger samples push the threshold down
    assert ks_threshold(0.05, 2000, 2000) < ks_threshold(0.05, 1000, 1000)
    with pytest.raises(EmptyInputError):
        ks_threshold(0.05, 0, 10)


# --- ks test ------------------------------------------------------------------------


def test_ks_test_identical_accepts_everywhere():
    sample = [i / 1000 for i in range(1000)]
    result = ks_test(sample, sample, FIVE_LEVELS)
    assert result.d_statistic == 0.0
    assert all(v == "accept" for v in result.decisions.values())
    assert result.n_a == result.n_b == 1000


def test_ks_test_large_gap_rejects_everywhere():
    # D = 0.385 here, above even the strictest threshold (0.0727...)
    a = [0.0] * 615 + [1.0] * 385
    b = [0.0] * 1000
    result = ks_test(a, b, FIVE_LEVELS)
    assert result.d_statistic == pytest.approx(0.385, abs=1e-12)
    assert all(v == "reject" for v in result.decisions.values())


def test_ks_test_decision_matches_rule():
    rng = random.Random(31)
    for _ in range(50):
        a = [rng.gauss(0, 1) for _ in range(rng.randint(2, 30))]
        b = [rng.gauss(rng.uniform(0, 2), 1) for _ in range(rng.randint(2, 30))]
        result = ks_test(a, b, FIVE_LEVELS, polarity="positive")
        assert result.polarity == "positive"
        for alpha in FIVE_LEVELS:
            expected = "reject" if result.d_statistic > result.thresholds[alpha] else "accept"
            assert result.decisions[alpha] == expected


def test_ks_test_input_validation():
    with pytest.raises(EmptyInputError):
        ks_test([], [0.5], FIVE_LEVELS)
    with pytest.raises(BadAlphaError):
        ks_test([0.5], [0.6], [])
    with pytest.raises(BadAlphaError):
        ks_test([0.5], [0.6], [2.0])


# --- polarity file io ------------------------------------------------------------------


def polarity_line(id_, neg, neu, pos):
    return json.dumps({"id": id_, "negative": neg, "neutral": neu, "positive": pos})


def test_read_polarity_file(tmp_path):
    path = tmp_path / "pol.jsonl"
    path.write_text(
        polarity_line("a", 0.2, 0.3, 0.5) + "\n" + polarity_line("b", 0.0, 0.0, 1.0) + "\n",
        encoding="utf-8",
    )
    records = read_polarity_file(path)
    assert records == [
        PolarityRecord("a", 0.2, 0.3, 0.5),
        PolarityRecord("b", 0.0, 0.0, 1.0),
    ]
    assert records[0].component("neutral") == 0.3
    with pytest.raises(ValueError):
        records[0].component("angry")
    assert POLARITIES == ("negative", "neutral", "positive")


def test_read_polarity_file_rejects_bad_records(tmp_path):
    cases = [
        polarity_line("a", 1.2, -0.1, -0.1),  # out of bounds
        polarity_line("a", 0.5, 0.3, 0.3),  # sums to 1.1
        json.dumps({"id": "a", "negative": 0.5, "neutral": 0.5}),  # missing positive
        json.dumps({"negative": 0.5, "neutral": 0.3, "positive": 0.2}),  # missing id
        json.dumps({"id": "a", "negative": "x", "neutral": 0.5, "positive": 0.5}),
    ]
    for i, line in enumerate(cases):
        path = tmp_path / f"bad{i}.jsonl"
        path.write_text(polarity_line("ok", 0.1, 0.2, 0.7) + "\n" + line + "\n", encoding="utf-8")
        with pytest.raises(DataError, match=":2"):
            read_polarity_file(path)


def test_read_polarity_file_tolerates_rounding(tmp_path):
    path = tmp_path / "pol.jsonl"
    path.write_text(polarity_line("a", 0.333, 0.333, 0.333) + "\n", encoding="utf-8")
    (record,) = read_polarity_file(path)
    assert record.negative == 0.333


def test_read_polarity_file_rejects_empty(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(EmptyInputError):
        read_polarity_file(path)
