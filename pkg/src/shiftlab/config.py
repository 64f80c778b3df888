"""Experiment configuration: JSON loading, vector and operator literals.

Vector literals map index strings to rational strings, e.g.
``{"0": "1", "3": "-2/3"}``; pair vectors carry ``top`` and ``bottom``
literals.  Operator specs are tagged dicts, e.g.
``{"kind": "foguel", "sparse_base": 3}`` or
``{"kind": "matrix", "entries": [["1/2", "0"], ["0", "1/3"]]}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import FinVec, PairVec, Rational, Vector, make_geometric_set
from .operators import (
    COSHIFT,
    IDENTITY,
    SHIFT,
    ZERO_OP,
    Block2x2,
    Compose,
    FiniteMatrix,
    Foguel,
    MatrixOp,
    OperatorExpr,
    Power,
    Scale,
    SparseProjection,
    Sum,
)


class ConfigError(ValueError):
    """Configuration problem, with the offending field named in the message."""


def load_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def parse_rational(value: Any, field: str = "value") -> Rational:
    if isinstance(value, bool):
        raise ConfigError(f"field '{field}': booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"field '{field}': {value!r} is not a rational 'p/q'") from exc
    raise ConfigError(f"field '{field}': expected an integer or 'p/q' string, got {value!r}")


def parse_finvec(obj: Any, field: str = "vector") -> FinVec:
    if not isinstance(obj, dict):
        raise ConfigError(f"field '{field}': expected an index->rational object")
    entries = {}
    for key, raw in obj.items():
        try:
            index = int(key)
        except ValueError as exc:
            raise ConfigError(f"field '{field}': index {key!r} is not an integer") from exc
        if index < 0:
            raise ConfigError(f"field '{field}': index {index} is negative")
        entries[index] = parse_rational(raw, f"{field}[{key}]")
    return FinVec(entries)


def parse_vector(obj: Any, field: str = "vector") -> Vector:
    if isinstance(obj, dict) and ("top" in obj or "bottom" in obj):
        extra = set(obj) - {"top", "bottom"}
        if extra:
            raise ConfigError(f"field '{field}': unexpected keys {sorted(extra)}")
        return PairVec(
            parse_finvec(obj.get("top", {}), f"{field}.top"),
            parse_finvec(obj.get("bottom", {}), f"{field}.bottom"),
        )
    return parse_finvec(obj, field)


def parse_vector_list(obj: Any, field: str) -> list[Vector]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"field '{field}': expected a nonempty list of vector literals")
    return [parse_vector(item, f"{field}[{i}]") for i, item in enumerate(obj)]


def _sparse_set(spec: dict, field: str):
    base = spec.get("sparse_base", 3)
    if not isinstance(base, int) or base < 3:
        raise ConfigError(f"field '{field}.sparse_base': must be an integer >= 3")
    return make_geometric_set(base)


def build_operator(spec: Any, field: str = "operator") -> OperatorExpr:
    """Build an operator expression from its tagged-dict description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"field '{field}': expected an object with a 'kind' tag")
    kind = spec["kind"]
    if kind == "shift":
        return SHIFT
    if kind == "coshift":
        return COSHIFT
    if kind == "identity":
        return IDENTITY
    if kind == "zero":
        return ZERO_OP
    if kind == "projection":
        return SparseProjection(_sparse_set(spec, field))
    if kind == "foguel":
        return Foguel(_sparse_set(spec, field))
    if kind == "matrix":
        entries = spec.get("entries")
        if not isinstance(entries, list) or not entries:
            raise ConfigError(f"field '{field}.entries': expected a nonempty row list")
        rows = [
            [parse_rational(v, f"{field}.entries[{i}][{j}]") for j, v in enumerate(row)]
            for i, row in enumerate(entries)
        ]
        try:
            return MatrixOp(FiniteMatrix.from_rows(rows))
        except ValueError as exc:
            raise ConfigError(f"field '{field}.entries': {exc}") from exc
    if kind == "scale":
        return Scale(
            parse_rational(spec.get("alpha", 1), f"{field}.alpha"),
            build_operator(spec.get("of"), f"{field}.of"),
        )
    if kind == "sum":
        return _fold(spec, field, Sum)
    if kind == "compose":
        return _fold(spec, field, Compose)
    if kind == "power":
        exponent = spec.get("exponent")
        if not isinstance(exponent, int) or exponent < 0:
            raise ConfigError(f"field '{field}.exponent': must be a nonnegative integer")
        return Power(build_operator(spec.get("of"), f"{field}.of"), exponent)
    if kind == "block2x2":
        return Block2x2(
            build_operator(spec.get("a"), f"{field}.a"),
            build_operator(spec.get("b"), f"{field}.b"),
            build_operator(spec.get("c"), f"{field}.c"),
            build_operator(spec.get("d"), f"{field}.d"),
        )
    raise ConfigError(f"field '{field}.kind': unknown operator kind {kind!r}")


def _fold(spec: dict, field: str, node) -> OperatorExpr:
    parts = spec.get("of")
    if not isinstance(parts, list) or len(parts) < 2:
        raise ConfigError(f"field '{field}.of': expected a list of at least two operators")
    built = [build_operator(p, f"{field}.of[{i}]") for i, p in enumerate(parts)]
    out = built[0]
    for nxt in built[1:]:
        out = node(out, nxt)
    return out


def get_int(config: dict, field: str, *, default: int | None = None, minimum: int = 0) -> int:
    value = config.get(field, default)
    if value is None:
        raise ConfigError(f"field '{field}': required")
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"field '{field}': must be an integer >= {minimum}")
    return value


def get_zero_mode(config: dict) -> tuple[str, Rational | None]:
    mode = config.get("zero_mode", "exact")
    if mode not in ("exact", "epsilon"):
        raise ConfigError("field 'zero_mode': must be 'exact' or 'epsilon'")
    epsilon = None
    if mode == "epsilon":
        epsilon = parse_rational(config.get("epsilon", "1/1000000000"), "epsilon")
        if epsilon < 0:
            raise ConfigError("field 'epsilon': must be nonnegative")
    return mode, epsilon


def get_gap_bounds(config: dict, field: str = "gap_bounds") -> list[int]:
    raw = config.get(field)
    if raw is None:
        return [get_int(config, "gap_bound", minimum=1)]
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"field '{field}': expected a nonempty integer list")
    bounds = []
    for i, v in enumerate(raw):
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"field '{field}[{i}]': gap bounds must be integers >= 1")
        bounds.append(v)
    return bounds


def get_subsequence_indices(config: dict, field: str = "subsequence") -> list[int]:
    spec = config.get(field)
    if isinstance(spec, dict) and "multiples_of" in spec:
        step = spec["multiples_of"]
        upto = spec.get("upto")
        if not isinstance(step, int) or step < 1 or not isinstance(upto, int) or upto < 0:
            raise ConfigError(f"field '{field}': multiples_of and upto must be positive integers")
        return list(range(0, upto + 1, step))
    if isinstance(spec, dict) and "indices" in spec:
        spec = spec["indices"]
    if not isinstance(spec, list) or len(spec) < 2:
        raise ConfigError(f"field '{field}': expected at least two indices")
    if not all(isinstance(v, int) and v >= 0 for v in spec):
        raise ConfigError(f"field '{field}': indices must be nonnegative integers")
    return list(spec)


def get_series(config: dict, field: str = "series") -> list[Rational]:
    raw = config.get(field)
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"field '{field}': expected a nonempty list of rationals")
    return [parse_rational(v, f"{field}[{i}]") for i, v in enumerate(raw)]
