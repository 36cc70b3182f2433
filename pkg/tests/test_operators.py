from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, strategies as st

from fpf.errors import ValidationError
from fpf.operators import (
    aggregate,
    by_name,
    make_min,
    make_owa,
    make_owa_last,
    make_owa_mean,
    make_product,
    operator_names,
)

COMPARISON_SCORES = [0.95, 0.70, 0.90]


def test_min_comparison_scores():
    assert aggregate(make_min(), COMPARISON_SCORES) == 0.70


def test_product_comparison_scores():
    assert aggregate(make_product(), COMPARISON_SCORES) == pytest.approx(0.5985, abs=1e-9)


def test_owa_mean_comparison_scores():
    assert aggregate(make_owa_mean(), COMPARISON_SCORES) == pytest.approx(0.85, abs=1e-9)


def test_owa_last_recovers_min_exactly():
    rng = random.Random(3)
    owa = make_owa_last()
    low = make_min()
    for _ in range(2000):
        scores = [rng.random() for _ in range(rng.randint(1, 9))]
        assert aggregate(owa, scores) == aggregate(low, scores)


def test_min_singleton_identity():
    assert aggregate(make_min(), [0.42]) == 0.42


def test_explicit_owa_weights():
    op = make_owa([0.5, 0.5])
    assert aggregate(op, [0.2, 0.8]) == pytest.approx(0.5, abs=1e-12)


def test_explicit_owa_arity_mismatch():
    op = make_owa([0.5, 0.5])
    with pytest.raises(ValidationError):
        aggregate(op, [0.2, 0.8, 0.5])


@pytest.mark.parametrize(
    "weights",
    [[], [0.5, 0.4], [0.5, -0.5, 1.0], [float("nan"), 1.0]],
)
def test_bad_owa_weights_rejected(weights):
    with pytest.raises(ValidationError):
        make_owa(weights)


def test_empty_list_rejected():
    with pytest.raises(ValidationError):
        aggregate(make_min(), [])


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf"), -0.1, 1.1, "x", None])
def test_out_of_range_scores_rejected(bad):
    with pytest.raises(ValidationError):
        aggregate(make_min(), [0.5, bad])


def test_negative_zero_and_subnormals_accepted():
    assert aggregate(make_min(), [-0.0, 0.5]) == 0.0
    tiny = 5e-324
    assert aggregate(make_min(), [tiny, 0.5]) == tiny


def test_by_name_registry():
    assert operator_names() == ["min", "owa-last", "owa-mean", "product"]
    assert by_name("min").name == "min"
    with pytest.raises(ValidationError):
        by_name("dempster-shafer")


@given(st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=1, max_size=10))
def test_operators_total_and_bounded(scores):
    for name in operator_names():
        result = aggregate(by_name(name), scores)
        assert math.isfinite(result)
        assert -1e-12 <= result <= 1.0 + 1e-12
