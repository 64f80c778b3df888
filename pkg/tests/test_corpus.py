"""Seeded matrix corpora: determinism, bounds, and norm certification."""

from fractions import Fraction

import pytest

from shiftlab.corpus import (
    certified_contraction,
    rescale_to_norm,
    seeded_contraction_corpus,
    seeded_random_corpus,
    seeded_stability_corpus,
)
from shiftlab.operators import FiniteMatrix, gelfand_estimate, matrix_power_norm, spectral_norm


def test_corpus_deterministic():
    a = seeded_random_corpus(1, 4, 3, 2)
    b = seeded_random_corpus(1, 4, 3, 2)
    assert a == b
    c = seeded_random_corpus(2, 4, 3, 2)
    assert a != c


def test_corpus_empty_and_validation():
    assert seeded_random_corpus(1, 0, 3, 2) == []
    with pytest.raises(ValueError):
        seeded_random_corpus(1, 2, 0, 2)


def test_corpus_entries_within_bound():
    for matrix in seeded_random_corpus(7, 5, 4, 3):
        for row in matrix.rows():
            for value in row:
                assert abs(value) <= 3
                assert isinstance(value, Fraction)


def test_contractions_certified_exactly():
    for matrix in seeded_contraction_corpus(3, 10, 4, 5):
        assert matrix.frobenius_sq() <= 1
        assert spectral_norm(matrix, 1e-10) <= 1 + 1e-9


def test_certified_contraction_handles_zero():
    zero = FiniteMatrix.from_rows([[0, 0], [0, 0]])
    assert certified_contraction(zero) == zero


def test_rescale_to_norm_hits_target():
    matrix = seeded_random_corpus(9, 1, 4, 3)[0]
    scaled = rescale_to_norm(matrix, Fraction(1, 2))
    assert spectral_norm(scaled, 1e-10) == pytest.approx(0.5, rel=1e-5)


def test_stability_corpus_norms_below_one():
    for matrix in seeded_stability_corpus(5, 6, 4, 3):
        assert spectral_norm(matrix, 1e-10) < 1.0


def test_gelfand_consistency_on_corpus():
    # finite-step spectral-radius estimate below 1 iff deep power norms
    # drop below 1, away from the borderline
    tol = 1e-9
    for matrix in seeded_random_corpus(13, 8, 3, 2):
        g = gelfand_estimate(matrix, 30, tol)
        if g < 0.95:
            for n in (20, 25, 30):
                assert matrix_power_norm(matrix, n, tol) < 1.0
        elif g > 1.05:
            assert matrix_power_norm(matrix, 30, tol) > 1.0
