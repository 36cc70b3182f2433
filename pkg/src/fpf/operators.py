"""Aggregation operator family: min (the default), product, and OWA.

Every operator is total on non-empty lists of scores in [0, 1]. The engine
itself always aggregates with min; the alternatives exist for the invariant
checker and for side-by-side comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class GammaOperator:
    name: str
    fn: Callable[[list[float]], float]
    parameters: dict = field(default_factory=dict)


def validate_scores(scores: Sequence[float]) -> list[float]:
    if len(scores) == 0:
        raise ValidationError("aggregate requires a non-empty score list")
    out: list[float] = []
    for value in scores:
        try:
            score = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"score must be a real number, got {value!r}") from None
        if not math.isfinite(score):
            raise ValidationError(f"score must be finite, got {score!r}")
        if score < 0.0 or score > 1.0:
            raise ValidationError(f"score must be within [0, 1], got {score!r}")
        out.append(score)
    return out


def aggregate(op: GammaOperator, scores: Sequence[float]) -> float:
    """Validate inputs, then apply the operator."""
    return op.fn(validate_scores(scores))


def _min_fn(scores: list[float]) -> float:
    lowest = scores[0]
    for score in scores[1:]:
        if score < lowest:
            lowest = score
    return lowest


def _product_fn(scores: list[float]) -> float:
    result = 1.0
    for score in scores:
        result *= score
    return result


def _owa_fn(scores: list[float], weights: Sequence[float]) -> float:
    ranked = sorted(scores, reverse=True)
    total = 0.0
    for weight, score in zip(weights, ranked):
        total += weight * score
    return total


def _check_weights(weights: Sequence[float]) -> tuple[float, ...]:
    vector = tuple(float(w) for w in weights)
    if not vector:
        raise ValidationError("OWA weight vector must be non-empty")
    if any(not math.isfinite(w) or w < 0.0 for w in vector):
        raise ValidationError("OWA weights must be finite and non-negative")
    if abs(sum(vector) - 1.0) > 1e-9:
        raise ValidationError(f"OWA weights must sum to 1 (got {sum(vector)!r})")
    return vector


def make_min() -> GammaOperator:
    return GammaOperator(name="min", fn=_min_fn)


def make_product() -> GammaOperator:
    return GammaOperator(name="product", fn=_product_fn)


def make_owa(weights: Sequence[float]) -> GammaOperator:
    """OWA with a fixed weight vector; list length must match its arity."""
    vector = _check_weights(weights)

    def fn(scores: list[float]) -> float:
        if len(scores) != len(vector):
            raise ValidationError(
                f"OWA arity mismatch: {len(vector)} weights, {len(scores)} scores"
            )
        return _owa_fn(scores, vector)

    return GammaOperator(name="owa", fn=fn, parameters={"weights": list(vector)})


def make_owa_last() -> GammaOperator:
    """OWA with all weight on the last (smallest) position: recovers min."""

    def fn(scores: list[float]) -> float:
        weights = [0.0] * (len(scores) - 1) + [1.0]
        return _owa_fn(scores, weights)

    return GammaOperator(name="owa-last", fn=fn, parameters={"weights": "last"})


def make_owa_mean() -> GammaOperator:
    """OWA with uniform weights: the arithmetic mean."""

    def fn(scores: list[float]) -> float:
        weights = [1.0 / len(scores)] * len(scores)
        return _owa_fn(scores, weights)

    return GammaOperator(name="owa-mean", fn=fn, parameters={"weights": "mean"})


_REGISTRY: dict[str, Callable[[], GammaOperator]] = {
    "min": make_min,
    "product": make_product,
    "owa-last": make_owa_last,
    "owa-mean": make_owa_mean,
}


def operator_names() -> list[str]:
    return sorted(_REGISTRY)


def by_name(name: str) -> GammaOperator:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValidationError(
            f"unknown operator {name!r}; known: {', '.join(operator_names())}"
        ) from None
