"""Operator algebra: exact application, adjoints, projection powers, norms."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlab.core import (
    FinVec,
    PairVec,
    basis,
    inner,
    make_geometric_set,
    norm_sq,
    pairing,
)
from shiftlab.operators import (
    COSHIFT,
    IDENTITY,
    SHIFT,
    ZERO_OP,
    Block2x2,
    Compose,
    DomainKindError,
    FiniteMatrix,
    Foguel,
    MatrixOp,
    NormConvergenceError,
    Power,
    Scale,
    SparseProjection,
    Sum,
    adjoint,
    apply,
    apply_adjoint,
    apply_power,
    domain_kind,
    gelfand_estimate,
    matrix_power_norm,
    pn_closed_form,
    pn_recursive,
)

J3 = make_geometric_set(3)
J5 = make_geometric_set(5)

rationals = st.fractions(
    min_value=Fraction(-9), max_value=Fraction(9), max_denominator=8
)


def finvecs(max_index=12):
    return st.dictionaries(st.integers(min_value=0, max_value=max_index), rationals, max_size=5).map(
        FinVec
    )


def pairvecs(max_index=12):
    return st.tuples(finvecs(max_index), finvecs(max_index)).map(lambda t: PairVec(*t))


seq_leaves = st.sampled_from([SHIFT, COSHIFT, IDENTITY, ZERO_OP, SparseProjection(J3)])


def seq_exprs(depth=4):
    return st.recursive(
        seq_leaves,
        lambda children: st.one_of(
            st.tuples(rationals, children).map(lambda t: Scale(t[0], t[1])),
            st.tuples(children, children).map(lambda t: Sum(*t)),
            st.tuples(children, children).map(lambda t: Compose(*t)),
            st.tuples(children, st.integers(min_value=0, max_value=3)).map(
                lambda t: Power(*t)
            ),
        ),
        max_leaves=2**depth,
    )


def pair_exprs(depth=3):
    blocks = st.tuples(seq_exprs(2), seq_exprs(2), seq_exprs(2), seq_exprs(2)).map(
        lambda t: Block2x2(*t)
    )
    base = st.one_of(blocks, st.just(Foguel(J3)), st.just(Foguel(J5)))
    return st.recursive(
        base,
        lambda children: st.one_of(
            st.tuples(rationals, children).map(lambda t: Scale(t[0], t[1])),
            st.tuples(children, children).map(lambda t: Sum(*t)),
            st.tuples(children, children).map(lambda t: Compose(*t)),
            st.tuples(children, st.integers(min_value=0, max_value=2)).map(
                lambda t: Power(*t)
            ),
        ),
        max_leaves=2**depth,
    )


# --- application semantics ---


def test_shift_moves_basis():
    assert apply(SHIFT, basis(2)) == basis(3)


def test_coshift_kills_e0():
    assert apply(COSHIFT, basis(0)) == FinVec()


def test_projection_keeps_sparse_indices():
    assert apply(SparseProjection(J3), basis(3) + basis(4)) == basis(3)


def test_apply_power_examples():
    assert apply_power(SHIFT, 5, basis(0)) == basis(5)
    assert apply_power(COSHIFT, 3, basis(2)) == FinVec()


def test_foguel_one_step():
    image = apply_power(Foguel(J3), 1, PairVec(FinVec(), basis(1)))
    assert image == PairVec(basis(1), basis(2))


def test_domain_kind_mismatch_rejected():
    with pytest.raises(DomainKindError):
        apply(SHIFT, PairVec(basis(0), FinVec()))
    with pytest.raises(DomainKindError):
        apply(Foguel(J3), basis(0))
    with pytest.raises(DomainKindError):
        domain_kind(Sum(SHIFT, Foguel(J3)))


def test_matrix_operand_dimension_checked():
    m = MatrixOp(FiniteMatrix.identity(2))
    with pytest.raises(DomainKindError):
        apply(m, basis(5))


def test_power_zero_is_identity():
    v = basis(4) - 2 * basis(1)
    assert apply(Power(SHIFT, 0), v) == v


@given(finvecs())
def test_shift_is_an_isometry(x):
    assert norm_sq(apply(SHIFT, x)) == norm_sq(x)


# --- projection powers ---


def test_pn_zero_is_null_operator():
    assert pn_recursive(J3, 0, basis(5) + 7 * basis(2)) == FinVec()
    assert pn_closed_form(J3, 0, 5) == FinVec()


def test_pn_one_is_projection():
    assert pn_recursive(J3, 1, basis(1)) == basis(1)
    assert pn_recursive(J3, 1, basis(2)) == FinVec()


def test_pn_recursive_hand_values():
    assert pn_recursive(J3, 3, basis(0)) == basis(0)
    assert pn_recursive(J3, 7, basis(0)) == basis(0)


def test_pn_closed_form_examples():
    assert pn_closed_form(J3, 3, 0) == basis(0)
    assert pn_closed_form(J3, 7, 0) == basis(0)
    assert pn_closed_form(J3, 5, 10) == FinVec()


@pytest.mark.parametrize("jset", [J3, J5], ids=["powers3", "powers5"])
def test_closed_form_matches_recursion_spot_grid(jset):
    for n in range(0, 30):
        for k in range(0, 20):
            assert pn_closed_form(jset, n, k) == pn_recursive(jset, n, basis(k))


@given(finvecs(max_index=20), st.integers(min_value=0, max_value=25))
def test_pn_recursive_is_linear_in_x(x, n):
    by_parts = FinVec()
    for k, v in x:
        by_parts = by_parts + v * pn_recursive(J3, n, basis(k))
    assert pn_recursive(J3, n, x) == by_parts


@given(pairvecs(), st.integers(min_value=0, max_value=18))
def test_foguel_block_power_structure(x, n):
    image = apply_power(Foguel(J3), n, x)
    assert image.bottom == apply_power(SHIFT, n, x.bottom)
    assert image.top == apply_power(COSHIFT, n, x.top) + pn_recursive(J3, n, x.bottom)


# --- adjoints ---


def test_adjoint_examples():
    assert apply_adjoint(SHIFT, basis(0)) == FinVec()
    assert apply_adjoint(SparseProjection(J3), basis(3)) == basis(3)
    image = apply_adjoint(Foguel(J3), PairVec(basis(0), FinVec()))
    assert image == PairVec(basis(1), FinVec())


def test_adjoint_is_an_involution_on_foguel():
    expr = Foguel(J3)
    x = PairVec(basis(2), basis(1) + basis(3))
    assert apply(adjoint(adjoint(expr)), x) == apply(expr, x)


@settings(max_examples=150, deadline=None)
@given(seq_exprs(), finvecs(), finvecs())
def test_adjoint_pairing_contract_sequence(expr, x, z):
    assert inner(apply(expr, x), z) == inner(x, apply_adjoint(expr, z))


@settings(max_examples=100, deadline=None)
@given(pair_exprs(), pairvecs(), pairvecs())
def test_adjoint_pairing_contract_pair(expr, x, z):
    assert pairing(apply(expr, x), z) == pairing(x, apply_adjoint(expr, z))


# --- finite matrices and norms ---


def test_matrix_entries_canonical():
    m = FiniteMatrix.from_rows([["2/4", 0], [0, "1/3"]])
    assert m.entry(0, 0) == Fraction(1, 2)
    assert m.entry(1, 1) == Fraction(1, 3)
    assert m == FiniteMatrix.from_rows([["1/2", 0], [0, "1/3"]])


def test_matrix_power_exact():
    m = FiniteMatrix.from_rows([[0, 2], ["1/8", 0]])
    assert m.power(2) == FiniteMatrix.diagonal(["1/4", "1/4"])
    assert m.power(0) == FiniteMatrix.identity(2)


def test_matvec_matches_rows():
    m = FiniteMatrix.from_rows([[1, 2], [3, 4]])
    v = basis(0) + basis(1)
    assert m.matvec(v) == 3 * basis(0) + 7 * basis(1)


def test_matrix_power_norm_diagonal():
    m = FiniteMatrix.diagonal(["1/2", "1/3"])
    assert matrix_power_norm(m, 2, 1e-9) == pytest.approx(0.25, rel=1e-8)


def test_matrix_power_norm_nilpotent():
    m = FiniteMatrix.from_rows([[0, 1], [0, 0]])
    assert matrix_power_norm(m, 2, 1e-9) == 0.0


def test_matrix_power_norm_single_singular_value():
    m = FiniteMatrix.from_rows([[0, 2], [0, 0]])
    assert matrix_power_norm(m, 1, 1e-9) == pytest.approx(2.0, rel=1e-8)


def test_matrix_power_norm_rejects_bad_tol():
    with pytest.raises(ValueError):
        matrix_power_norm(FiniteMatrix.identity(2), 1, 0.0)


def test_non_convergence_carries_last_iterate():
    m = FiniteMatrix.from_rows([[1, "1/2"], ["1/3", 1]])
    with pytest.raises(NormConvergenceError) as info:
        matrix_power_norm(m, 1, 1e-9, max_iterations=0)
    assert info.value.iterations == 0
    assert info.value.last_estimate >= 0.0


def test_float_overflow_surfaces_as_norm_error():
    huge = FiniteMatrix.from_rows([[10**400, 0], [0, 1]])
    with pytest.raises(NormConvergenceError, match="overflow"):
        matrix_power_norm(huge, 1, 1e-9)


def test_gelfand_examples():
    assert gelfand_estimate(FiniteMatrix.diagonal(["1/2"]), 7, 1e-9) == pytest.approx(
        0.5, rel=1e-8
    )
    nil = FiniteMatrix.from_rows([[0, 1], [0, 0]])
    assert gelfand_estimate(nil, 2, 1e-9) == 0.0
    m = FiniteMatrix.from_rows([[0, 2], ["1/8", 0]])
    assert gelfand_estimate(m, 4, 1e-9) == pytest.approx(0.5, rel=1e-8)
    with pytest.raises(ValueError):
        gelfand_estimate(m, 1, 1e-9)


def test_norm_matches_svd_oracle():
    rng = np.random.default_rng(7)
    for _ in range(25):
        rows = [
            [Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 9))) for _ in range(4)]
            for _ in range(4)
        ]
        m = FiniteMatrix.from_rows(rows)
        for n in (1, 2, 5):
            expected = float(np.linalg.svd(m.power(n).to_float_array(), compute_uv=False)[0])
            assert matrix_power_norm(m, n, 1e-12) == pytest.approx(expected, rel=1e-7, abs=1e-12)


def test_submultiplicativity_of_power_norms():
    m = FiniteMatrix.from_rows([[1, "1/2"], ["-1/3", "1/4"]])
    tol = 1e-10
    norms = {n: matrix_power_norm(m, n, tol) for n in range(1, 11)}
    for a in range(1, 6):
        for b in range(1, 6):
            assert norms[a + b] <= norms[a] * norms[b] * (1 + 2 * tol) + 1e-15
