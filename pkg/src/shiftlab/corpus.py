"""Reproducible random rational-matrix corpora for the matrix harnesses."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .operators import FiniteMatrix, spectral_norm

DEFAULT_MAX_DENOMINATOR = 8


def seeded_random_corpus(
    seed: int,
    count: int,
    dim: int,
    entry_bound: int,
    max_denominator: int = DEFAULT_MAX_DENOMINATOR,
) -> list[FiniteMatrix]:
    """Deterministic rational matrices with entries in [-entry_bound, entry_bound].

    The same seed always reproduces the same corpus, entry by entry.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    if dim < 1 or entry_bound < 1 or max_denominator < 1:
        raise ValueError("dim, entry_bound, and max_denominator must be positive")
    rng = random.Random(seed)
    corpus = []
    for _ in range(count):
        rows = []
        for _ in range(dim):
            row = []
            for _ in range(dim):
                den = rng.randint(1, max_denominator)
                num = rng.randint(-entry_bound * den, entry_bound * den)
                row.append(Fraction(num, den))
            rows.append(row)
        corpus.append(FiniteMatrix.from_rows(rows))
    return corpus


def certified_contraction(matrix: FiniteMatrix) -> FiniteMatrix:
    """Rescale by an integer so the spectral norm is provably at most 1.

    Uses the Frobenius bound: dividing by any integer d with d^2 > sum of
    squared entries keeps the scaling rational and the bound exact.
    """
    frob = matrix.frobenius_sq()
    d = math.isqrt(frob.numerator // frob.denominator) + 1
    return matrix.scaled(Fraction(1, d))


def seeded_contraction_corpus(
    seed: int, count: int, dim: int, entry_bound: int
) -> list[FiniteMatrix]:
    """Deterministic corpus of certified contractions."""
    return [certified_contraction(m) for m in seeded_random_corpus(seed, count, dim, entry_bound)]


def rescale_to_norm(
    matrix: FiniteMatrix, target: Fraction, tol: float = 1e-9
) -> FiniteMatrix:
    """Rationally rescale so the spectral norm lands near ``target``.

    The scaling factor is a rational approximation of target/norm, so the
    result stays exact while its norm sits within ~1e-6 of the target.
    """
    norm = spectral_norm(matrix, tol)
    if norm == 0.0:
        raise ValueError("cannot rescale a matrix with zero norm")
    factor = Fraction(float(target) / norm).limit_denominator(10**6)
    return matrix.scaled(factor)


def seeded_stability_corpus(
    seed: int,
    count: int,
    dim: int,
    entry_bound: int,
    target: Fraction = Fraction(1, 2),
    tol: float = 1e-9,
) -> list[FiniteMatrix]:
    """Deterministic corpus rescaled so every spectral norm sits near target < 1."""
    if not 0 < target < 1:
        raise ValueError("target must lie strictly between 0 and 1")
    return [
        rescale_to_norm(m, target, tol)
        for m in seeded_random_corpus(seed, count, dim, entry_bound)
    ]
