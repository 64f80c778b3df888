"""Projective-orbit probes: membership, scalar fits, and the dichotomy."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlab.core import FinVec, PairVec, basis, make_geometric_set
from shiftlab.operators import SHIFT, Foguel, apply_power
from shiftlab.supercyclicity import (
    ALT_A,
    ALT_B,
    FLAG_BOUNDED,
    FLAG_UNBOUNDED,
    IN_ORBIT,
    NO_CANDIDATES,
    ProbeReport,
    ProbeRow,
    alpha_boundedness_report,
    dichotomy_report,
    has_spanning_bounded_gap_walk,
    orbit_membership,
    projective_fit,
    quasistability_scan,
)

J3 = make_geometric_set(3)


def pair(top=None, bottom=None):
    return PairVec(top or FinVec(), bottom or FinVec())


def coordinate_family(limit):
    return [pair(top=basis(k)) for k in range(limit + 1)] + [
        pair(bottom=basis(k)) for k in range(limit + 1)
    ]


# --- orbit membership ---


def test_membership_scaled_shift():
    assert orbit_membership(SHIFT, basis(0), 5 * basis(3), 10) == (5, 3)


def test_membership_misses_off_orbit_targets():
    assert orbit_membership(SHIFT, basis(0), basis(0) + basis(1), 10) is None


def test_membership_foguel_roundtrip():
    y = pair(bottom=basis(0))
    x = Fraction(-2, 3) * apply_power(Foguel(J3), 7, y)
    assert orbit_membership(Foguel(J3), y, x, 30) == (Fraction(-2, 3), 7)


def test_membership_zero_target():
    assert orbit_membership(SHIFT, basis(0), FinVec(), 5) == (0, 0)


def test_membership_rejects_zero_candidate():
    with pytest.raises(ValueError):
        orbit_membership(SHIFT, FinVec(), basis(0), 5)


@settings(max_examples=40, deadline=None)
@given(
    st.fractions(min_value=Fraction(-8), max_value=Fraction(8), max_denominator=6).filter(
        lambda a: a != 0
    ),
    st.integers(min_value=0, max_value=25),
)
def test_membership_roundtrip_random(alpha, n):
    y = pair(bottom=basis(0))
    x = alpha * apply_power(Foguel(J3), n, y)
    assert orbit_membership(Foguel(J3), y, x, 30) == (alpha, n)


# --- projective fit ---


def test_fit_shift_target_on_orbit():
    family = [basis(k) for k in range(6)]
    report = projective_fit(SHIFT, basis(0), basis(3), family, 12, anchor=3)
    by_n = {r.n: r for r in report.rows}
    assert by_n[3].alpha == 1
    assert by_n[3].residual == 0
    for r in report.rows:
        if r.alpha is not None and r.n != 3:
            assert r.residual >= 1
    assert report.candidate_subsequence == (3,)
    assert report.alpha_sup == 1


def test_fit_zero_target():
    family = [basis(k) for k in range(4)]
    report = projective_fit(SHIFT, basis(0), FinVec(), family, 8, anchor=0, fallback_anchors=[1, 2, 3])
    for r in report.rows:
        if r.alpha is not None:
            assert r.alpha == 0
            assert r.residual == 0


def test_fit_foguel_anchor_defined_on_hits():
    family = coordinate_family(6)
    y = pair(bottom=basis(0))
    report = projective_fit(Foguel(J3), y, pair(top=basis(0)), family, 30, anchor=0)
    defined = tuple(r.n for r in report.rows if r.alpha is not None)
    assert defined == (3, 7, 19)
    assert all(r.alpha == 1 for r in report.rows if r.alpha is not None)


def test_fit_degenerate_anchor_flagged():
    family = [basis(5), basis(0)]
    report = projective_fit(SHIFT, basis(0), basis(5), family, 3, anchor=0)
    # shift orbit never reaches index 5 within horizon 3
    assert report.anchor_degenerate
    assert all(r.alpha is None for r in report.rows)


def test_fit_residual_recomputation():
    family = coordinate_family(5)
    y = pair(bottom=basis(0))
    x = pair(top=basis(0) + 2 * basis(1))
    report = projective_fit(
        Foguel(J3), y, x, family, 25, anchor=0, fallback_anchors=range(1, len(family))
    )
    from shiftlab.core import pairing

    for row in report.rows:
        if row.alpha is None:
            continue
        v = apply_power(Foguel(J3), row.n, y)
        recomputed = max(abs(pairing(row.alpha * v - x, z)) for z in family)
        assert recomputed == row.residual
        # the anchor that fixed alpha is matched exactly
        assert pairing(row.alpha * v - x, family[row.anchor_used]) == 0


# --- scalar boundedness ---


def _fabricated_report(alphas, horizon):
    rows = tuple(ProbeRow(n, a, Fraction(0), 0) for n, a in enumerate(alphas))
    return ProbeReport(
        operator=SHIFT,
        y=basis(0),
        x=basis(1),
        family=(basis(0),),
        horizon=horizon,
        anchor=0,
        fallback_anchors=(),
        threshold=Fraction(0),
        rows=rows,
        candidate_subsequence=tuple(range(len(alphas))),
        alpha_sup=max(abs(a) for a in alphas),
        candidate_gaps=None,
        anchor_degenerate=False,
    )


def test_alpha_constant_is_bounded_evidence():
    report = _fabricated_report([Fraction(1)] * 40, 39)
    diagnostic = alpha_boundedness_report(report, x_in_orbit=False)
    assert diagnostic.flag == FLAG_BOUNDED
    assert diagnostic.bounded_trend


def test_alpha_linear_growth_is_unbounded_trend():
    report = _fabricated_report([Fraction(n + 1) for n in range(40)], 39)
    diagnostic = alpha_boundedness_report(report, x_in_orbit=False)
    assert diagnostic.flag == FLAG_UNBOUNDED
    assert not diagnostic.bounded_trend


def test_alpha_diagnostic_suppressed_in_orbit():
    family = [basis(k) for k in range(6)]
    fit = projective_fit(SHIFT, basis(0), basis(3), family, 12, anchor=3)
    membership = orbit_membership(SHIFT, basis(0), basis(3), 12)
    assert membership == (1, 3)
    diagnostic = alpha_boundedness_report(fit, x_in_orbit=True)
    assert diagnostic.suppressed
    assert diagnostic.flag == IN_ORBIT


def test_alpha_diagnostic_requires_candidates():
    report = _fabricated_report([Fraction(1)], 0)
    empty = ProbeReport(
        **{**report.__dict__, "candidate_subsequence": (), "alpha_sup": None}
    )
    with pytest.raises(ValueError):
        alpha_boundedness_report(empty, x_in_orbit=False)


# --- quasistability scan ---


def test_scan_shift_all_minima_zero():
    scan = quasistability_scan(SHIFT, basis(0), [basis(k) for k in range(5)], 40)
    assert scan.all_tail_minima_zero


def test_scan_foguel_witness_minimum_attained_off_hits():
    scan = quasistability_scan(
        Foguel(J3), pair(bottom=basis(0)), [pair(top=basis(0))], 500
    )
    row = scan.rows[0]
    assert row.tail_min == 0
    assert set(range(501)) - set(row.min_indices) == {3, 7, 19, 55, 163, 487}


def test_scan_identity_fails_necessary_condition():
    from shiftlab.operators import FiniteMatrix, MatrixOp

    scan = quasistability_scan(
        MatrixOp(FiniteMatrix.identity(1)), basis(0), [basis(0)], 20
    )
    assert scan.rows[0].tail_min == 1
    assert not scan.all_tail_minima_zero


# --- dichotomy ---


def test_spanning_walk_classifier():
    horizon = 200
    sparse = [3, 7, 19, 55, 163]
    for bound in range(1, 11):
        assert not has_spanning_bounded_gap_walk(sparse, horizon, bound)
    evens = list(range(0, 201, 2))
    assert has_spanning_bounded_gap_walk(evens, horizon, 2)


def test_dichotomy_cells_on_fabricated_inputs():
    from shiftlab.supercyclicity import ANOMALY, classify_dichotomy_cell

    horizon = 200
    sparse = [3, 7, 19, 55, 163]
    for bound in range(1, 11):
        assert classify_dichotomy_cell(sparse, horizon, bound, bounded_trend=False) == ALT_A
    evens = list(range(0, 201, 2))
    assert classify_dichotomy_cell(evens, horizon, 2, bounded_trend=False) == ALT_B
    assert classify_dichotomy_cell(evens, horizon, 2, bounded_trend=True) == ANOMALY


def test_dichotomy_shift_orthogonal_target():
    family = [basis(k) for k in range(6)]
    report = dichotomy_report(
        SHIFT, basis(0), [basis(0) + basis(1)], family, 50, [2, 4]
    )
    assert report.power_bound_ok
    assert all(r.classification == NO_CANDIDATES for r in report.rows)


def test_dichotomy_in_orbit_target():
    family = [basis(k) for k in range(6)]
    report = dichotomy_report(SHIFT, basis(0), [5 * basis(3)], family, 50, [2])
    assert report.targets[0].in_orbit
    assert report.rows[0].classification == IN_ORBIT


def test_dichotomy_foguel_sparse_candidates_are_alternative_a():
    family = coordinate_family(8)
    y = pair(bottom=basis(0))
    report = dichotomy_report(
        Foguel(J3), y, [pair(top=basis(0))], family, 500, list(range(1, 11)), anchor=0
    )
    assert report.power_bound_ok
    assert not report.targets[0].in_orbit
    assert report.targets[0].candidate_count > 0
    assert all(r.classification == ALT_A for r in report.rows)
