"""Loading problem descriptions from JSON.

Schema: {"B": [[...], ...], "dyads": [{"v": [...], "p": [...]}, ...],
"g": [[...], ...] (optional metric), "w": [{"q": [...], "p": [...]}, ...]
(optional dual perturbation)}. Vectors and covectors are plain arrays of
numbers; matrices are arrays of row arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .errors import ProblemFormatError
from .metric import Metric
from .tensor import Covector, Dyad, DyadicPerturbation, Operator, Vector

__all__ = ["Problem", "load_problem", "parse_problem"]


@dataclass(frozen=True)
class Problem:
    """A base operator with an optional dyadic and/or dual perturbation."""

    base: Operator
    dyads: DyadicPerturbation | None
    metric: Metric | None
    dual: tuple[tuple[Covector, Covector], ...] | None


def _require_number_list(value: Any, where: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ProblemFormatError(f"{where} must be a non-empty array of numbers")
    out = []
    for entry in value:
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise ProblemFormatError(f"{where} must contain only numbers")
        out.append(float(entry))
    return out


def _require_matrix(value: Any, where: str) -> list[list[float]]:
    if not isinstance(value, list) or not value:
        raise ProblemFormatError(f"{where} must be a non-empty array of row arrays")
    return [_require_number_list(row, f"{where} row {i}") for i, row in enumerate(value)]


def parse_problem(data: Any) -> Problem:
    """Build a Problem from decoded JSON, validating the schema."""
    if not isinstance(data, dict):
        raise ProblemFormatError("problem must be a JSON object")
    if "B" not in data:
        raise ProblemFormatError('problem is missing the operator key "B"')
    unknown = set(data) - {"B", "dyads", "g", "w"}
    if unknown:
        raise ProblemFormatError(f"unknown problem keys: {sorted(unknown)}")
    base = Operator(_require_matrix(data["B"], '"B"'))

    dyads = None
    if "dyads" in data:
        raw = data["dyads"]
        if not isinstance(raw, list) or not raw:
            raise ProblemFormatError('"dyads" must be a non-empty array')
        built = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or set(item) != {"v", "p"}:
                raise ProblemFormatError(
                    f'dyad {i} must be an object with exactly the keys "v" and "p"'
                )
            built.append(
                Dyad(
                    Vector(_require_number_list(item["v"], f'dyad {i} "v"')),
                    Covector(_require_number_list(item["p"], f'dyad {i} "p"')),
                )
            )
        dyads = DyadicPerturbation(tuple(built))

    metric = None
    if "g" in data:
        metric = Metric(_require_matrix(data["g"], '"g"'))

    dual = None
    if "w" in data:
        raw = data["w"]
        if not isinstance(raw, list) or not raw:
            raise ProblemFormatError('"w" must be a non-empty array')
        pairs = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or set(item) != {"q", "p"}:
                raise ProblemFormatError(
                    f'dual dyad {i} must be an object with exactly the keys "q" and "p"'
                )
            pairs.append(
                (
                    Covector(_require_number_list(item["q"], f'dual dyad {i} "q"')),
                    Covector(_require_number_list(item["p"], f'dual dyad {i} "p"')),
                )
            )
        dual = tuple(pairs)

    if dual is not None and metric is None:
        raise ProblemFormatError('a dual perturbation "w" requires a metric "g"')
    if dyads is None and dual is None:
        raise ProblemFormatError('problem needs "dyads" or a metric problem ("g" + "w")')
    return Problem(base=base, dyads=dyads, metric=metric, dual=dual)


def load_problem(text: str) -> Problem:
    """Parse a JSON document into a Problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    return parse_problem(data)
