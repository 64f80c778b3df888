"""Config parsing: rational/vector/operator literals and their diagnostics."""

from fractions import Fraction

import pytest

from shiftlab.config import (
    ConfigError,
    build_operator,
    get_gap_bounds,
    get_int,
    get_subsequence_indices,
    load_config,
    parse_rational,
    parse_vector,
)
from shiftlab.core import FinVec, PairVec, basis
from shiftlab.operators import SHIFT, Foguel, MatrixOp, apply


def test_parse_rational_forms():
    assert parse_rational("2/4") == Fraction(1, 2)
    assert parse_rational("-3") == -3
    assert parse_rational(7) == 7
    with pytest.raises(ConfigError, match="alpha"):
        parse_rational("x", "alpha")
    with pytest.raises(ConfigError):
        parse_rational("1/0")


def test_parse_vector_literals():
    assert parse_vector({"0": "1", "3": "-2/3"}) == FinVec({0: 1, 3: Fraction(-2, 3)})
    p = parse_vector({"top": {"0": "1"}, "bottom": {}})
    assert p == PairVec(basis(0), FinVec())
    with pytest.raises(ConfigError, match="index"):
        parse_vector({"-1": "1"})
    with pytest.raises(ConfigError, match="unexpected"):
        parse_vector({"top": {}, "middle": {}})


def test_build_operator_kinds():
    assert build_operator({"kind": "shift"}) is SHIFT
    foguel = build_operator({"kind": "foguel", "sparse_base": 3})
    assert isinstance(foguel, Foguel)
    matrix = build_operator({"kind": "matrix", "entries": [["1/2", 0], [0, "1/3"]]})
    assert isinstance(matrix, MatrixOp)
    assert matrix.matrix.entry(0, 0) == Fraction(1, 2)
    composed = build_operator(
        {"kind": "compose", "of": [{"kind": "coshift"}, {"kind": "shift"}]}
    )
    assert apply(composed, basis(0)) == basis(0)
    powered = build_operator({"kind": "power", "of": {"kind": "shift"}, "exponent": 3})
    assert apply(powered, basis(1)) == basis(4)
    block = build_operator(
        {
            "kind": "block2x2",
            "a": {"kind": "coshift"},
            "b": {"kind": "projection", "sparse_base": 3},
            "c": {"kind": "zero"},
            "d": {"kind": "shift"},
        }
    )
    foguel_builtin = build_operator({"kind": "foguel", "sparse_base": 3})
    probe = PairVec(basis(2), basis(1) + basis(4))
    assert apply(block, probe) == apply(foguel_builtin, probe)


def test_build_operator_diagnostics():
    with pytest.raises(ConfigError, match="kind"):
        build_operator({"kind": "rotation"})
    with pytest.raises(ConfigError, match="sparse_base"):
        build_operator({"kind": "foguel", "sparse_base": 2})
    with pytest.raises(ConfigError, match="entries"):
        build_operator({"kind": "matrix", "entries": [[1, 2]]})
    with pytest.raises(ConfigError, match="exponent"):
        build_operator({"kind": "power", "of": {"kind": "shift"}, "exponent": -1})


def test_load_config_reports_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"horizon": 5,\n  "oops"\n}')
    with pytest.raises(ConfigError, match=r"line \d+, column \d+"):
        load_config(bad)
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(missing)


def test_field_helpers():
    assert get_int({"horizon": 5}, "horizon", minimum=1) == 5
    with pytest.raises(ConfigError, match="horizon"):
        get_int({"horizon": 0}, "horizon", minimum=1)
    with pytest.raises(ConfigError, match="required"):
        get_int({}, "horizon")
    assert get_gap_bounds({"gap_bound": 3}) == [3]
    assert get_gap_bounds({"gap_bounds": [1, 2, 5]}) == [1, 2, 5]
    assert get_subsequence_indices({"subsequence": {"multiples_of": 5, "upto": 20}}) == [
        0,
        5,
        10,
        15,
        20,
    ]
    assert get_subsequence_indices({"subsequence": [0, 2, 4]}) == [0, 2, 4]
