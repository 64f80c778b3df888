"""Boundedly spaced subsequences: gap statistics, convergence transfer,
and the bounded-gap zero-walk detector/refuter.

A "walk" here is a strictly increasing index set whose consecutive gaps
stay within a bound M.  The central pigeonhole fact: such a walk cannot
jump over M+1 consecutive integers, so a fully nonzero window of length
M+1 blocks every zero walk that would have to cross it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Rational, Vector, pairing
from .operators import OperatorExpr, adjoint, apply, iterate_orbit
from .stability import PairingSeries

DEFAULT_BURN_IN = 10
DEFAULT_SPAN_FRACTION = Fraction(1, 4)

CERTIFICATE = "certificate"
REFUTATION = "refutation"
INCONCLUSIVE = "inconclusive"


class CoverageError(ValueError):
    """Raised when a transfer check is attempted without translate cover."""

    def __init__(self, message: str, report: "CoverReport"):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class IndexSubsequence:
    """Strictly increasing indices, optionally with a certified gap bound."""

    indices: tuple[int, ...]
    gap_bound: int | None = None

    def __post_init__(self):
        idx = tuple(int(v) for v in self.indices)
        if any(v < 0 for v in idx):
            raise ValueError("indices must be nonnegative")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.gap_bound is not None:
            if self.gap_bound < 1:
                raise ValueError("gap bound must be at least 1")
            worst = max((b - a for a, b in zip(idx, idx[1:])), default=0)
            if worst > self.gap_bound:
                raise ValueError(
                    f"gap {worst} exceeds the declared bound {self.gap_bound}"
                )
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class GapStats:
    gaps: tuple[int, ...]
    max_gap: int
    histogram: tuple[tuple[int, int], ...]  # (gap, count), increasing by gap

    def is_bounded_by(self, bound: int) -> bool:
        return self.max_gap <= bound

    def as_dict(self) -> dict[int, int]:
        return dict(self.histogram)


def gap_stats(indices: Sequence[int]) -> GapStats:
    """Exact gap statistics of a strictly increasing index list."""
    idx = list(indices)
    if len(idx) < 2:
        raise ValueError("need at least two indices")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing")
    gaps = tuple(b - a for a, b in zip(idx, idx[1:]))
    counts: dict[int, int] = {}
    for g in gaps:
        counts[g] = counts.get(g, 0) + 1
    return GapStats(gaps, max(gaps), tuple(sorted(counts.items())))


@dataclass(frozen=True)
class CoverReport:
    covered: bool
    range_start: int
    range_end: int
    gap_bound: int
    uncovered: tuple[int, ...]


def translate_cover_check(
    subseq: IndexSubsequence | Sequence[int],
    range_end: int,
    *,
    gap_bound: int | None = None,
) -> CoverReport:
    """Do the translates member + j, 0 <= j <= gap bound, cover every integer
    from the first member through range_end?  Returns any uncovered indices.

    Raw index lists may carry a merely *claimed* ``gap_bound``; the check
    exposes a false claim through the uncovered indices.
    """
    if isinstance(subseq, IndexSubsequence):
        indices = subseq.indices
        bound = subseq.gap_bound if gap_bound is None else gap_bound
    else:
        indices = tuple(int(v) for v in subseq)
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly increasing")
        bound = gap_bound
    if bound is None:
        raise ValueError("a gap bound is required")
    if not indices:
        raise ValueError("subsequence is empty")
    members = [m for m in indices if m <= range_end]
    uncovered: list[int] = []
    if not members:
        uncovered = list(range(indices[0], range_end + 1))
        return CoverReport(False, indices[0], range_end, bound, tuple(uncovered))
    for a, b in zip(members, members[1:]):
        if b - a > bound:
            uncovered.extend(range(a + bound + 1, b))
    tail_end = members[-1] + bound
    if tail_end < range_end:
        uncovered.extend(range(tail_end + 1, range_end + 1))
    return CoverReport(not uncovered, members[0], range_end, bound, tuple(uncovered))


@dataclass(frozen=True)
class TransferReport:
    alpha: Rational
    epsilon: Rational
    burn_in: int
    gap_bound: int
    members_used: tuple[int, ...]
    hypothesis_holds: bool
    hypothesis_violation: tuple[int, int, int, Rational] | None  # (member, j, n, value)
    conclusion_start: int | None
    first_violation: int | None
    transfer_holds: bool | None


def transfer_convergence(
    series: Sequence[Rational],
    subseq: IndexSubsequence,
    alpha: Rational,
    epsilon: Rational,
    burn_in: int = 0,
) -> TransferReport:
    """Finite-horizon convergence transfer along a boundedly spaced subsequence.

    If every translate a_{m+j}, 0 <= j <= M, of every member m >= burn_in
    stays within epsilon of alpha, then so does a_n for every n from the
    first used member + M through the horizon.  A reported violation would
    falsify the translate-cover argument itself, not merely the input.
    """
    if subseq.gap_bound is None:
        raise ValueError("subsequence needs a declared gap bound")
    alpha = Fraction(alpha)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    horizon = len(series) - 1
    bound = subseq.gap_bound
    members = tuple(m for m in subseq.indices if burn_in <= m <= horizon)
    if not members:
        raise ValueError("no subsequence members between burn_in and the horizon")
    cover = translate_cover_check(IndexSubsequence(members, bound), horizon)
    if not cover.covered:
        raise CoverageError(
            f"translates do not cover [{members[0]}, {horizon}]: "
            f"first uncovered index {cover.uncovered[0]}",
            cover,
        )

    hypothesis_violation = None
    for m in members:
        for j in range(bound + 1):
            n = m + j
            if n > horizon:
                break
            if abs(series[n] - alpha) >= epsilon:
                hypothesis_violation = (m, j, n, series[n])
                break
        if hypothesis_violation:
            break

    if hypothesis_violation is not None:
        return TransferReport(
            alpha, epsilon, burn_in, bound, members, False, hypothesis_violation,
            None, None, None,
        )

    conclusion_start = members[0] + bound
    first_violation = None
    for n in range(conclusion_start, horizon + 1):
        if abs(series[n] - alpha) >= epsilon:
            first_violation = n
            break
    return TransferReport(
        alpha, epsilon, burn_in, bound, members, True, None,
        conclusion_start, first_violation, first_violation is None,
    )


# --- bounded-gap zero-walk detector / refuter ---


@dataclass(frozen=True)
class PigeonholeWindow:
    """Index window [start, end] anchored at one nonzero hit of the witness
    functional; start may be negative (the walk domain clips it)."""

    start: int
    end: int
    anchor_hit: int


@dataclass(frozen=True)
class PigeonholeWitness:
    functional_index: int
    windows: tuple[PigeonholeWindow, ...]


@dataclass(frozen=True)
class ClusterSummary:
    first: int
    last: int
    size: int


@dataclass(frozen=True)
class SubseqCertificate:
    kind: str  # certificate | refutation | inconclusive
    horizon: int
    gap_bound: int
    burn_in: int
    zero_mode: str
    epsilon: Rational | None
    span_lo: int
    span_hi: int
    clusters: tuple[ClusterSummary, ...]
    subsequence: IndexSubsequence | None = None
    witness: PigeonholeWitness | None = None


def zero_walk_clusters(zeros: Sequence[int], gap_bound: int) -> list[list[int]]:
    """Maximal gap-bounded clusters of a strictly increasing zero set.

    Greedy and complete: a gap-bounded walk can never step across two
    consecutive zeros more than gap_bound apart, so every walk lies inside
    one cluster and the full cluster is the longest walk there.
    """
    clusters: list[list[int]] = []
    for n in zeros:
        if clusters and n - clusters[-1][-1] <= gap_bound:
            clusters[-1].append(n)
        else:
            clusters.append([n])
    return clusters


def find_bounded_gap_zero_subseq(
    family: Sequence[PairingSeries],
    gap_bound: int,
    zero_mode: str = "exact",
    *,
    epsilon: Rational | None = None,
    burn_in: int = DEFAULT_BURN_IN,
    span_fraction: Fraction = DEFAULT_SPAN_FRACTION,
) -> SubseqCertificate:
    """Search for a gap-bounded walk of simultaneous zeros, or refute it.

    A certificate is the longest gap-bounded cluster of indices at which
    every family pairing vanishes, provided it persists across the horizon:
    it must begin by the end of the first quarter of the scanned range and
    reach into the final quarter (the finite surrogate for an infinite
    subsequence; the quarter fraction is configurable).  A refutation
    exhibits pigeonhole windows anchored at the nonzero hits of the family
    member that is hit furthest out: each window is fully nonzero across
    the walk domain, so no qualifying zero walk can cross it.
    """
    if not family:
        raise ValueError("functional family must be nonempty")
    if gap_bound < 1:
        raise ValueError("gap bound must be at least 1")
    horizon = family[0].horizon
    if any(s.horizon != horizon for s in family):
        raise ValueError("family series must share one horizon")
    if any(s.x != family[0].x or s.operator != family[0].operator for s in family):
        raise ValueError("family series must share the operator and probe vector")
    if zero_mode not in ("exact", "epsilon"):
        raise ValueError(f"unknown zero_mode {zero_mode!r}")
    threshold = Fraction(0)
    eps = None
    if zero_mode == "epsilon":
        eps = Fraction(epsilon) if epsilon is not None else Fraction(1, 10**9)
        threshold = eps
    if not 0 <= burn_in <= horizon:
        raise ValueError("burn_in must lie within the horizon")

    blocked = [
        any(abs(s.values[n]) > threshold for s in family) for n in range(horizon + 1)
    ]
    zeros = [n for n in range(burn_in, horizon + 1) if not blocked[n]]
    clusters = zero_walk_clusters(zeros, gap_bound)
    summaries = tuple(ClusterSummary(c[0], c[-1], len(c)) for c in clusters)

    span_len = int((horizon - burn_in) * span_fraction)
    span_lo = burn_in + span_len
    span_hi = horizon - span_len

    qualifying = [c for c in clusters if c[0] <= span_lo and c[-1] >= span_hi]
    if qualifying:
        best = max(qualifying, key=lambda c: (len(c), -c[0]))
        return SubseqCertificate(
            kind=CERTIFICATE,
            horizon=horizon,
            gap_bound=gap_bound,
            burn_in=burn_in,
            zero_mode=zero_mode,
            epsilon=eps,
            span_lo=span_lo,
            span_hi=span_hi,
            clusters=summaries,
            subsequence=IndexSubsequence(tuple(best), gap_bound),
        )

    # refutation: windows anchored at the hits of the furthest-hit functional
    hit_lists = [
        [n for n in range(horizon + 1) if abs(s.values[n]) > threshold] for s in family
    ]
    candidates = [i for i, hits in enumerate(hit_lists) if hits]
    if not candidates:
        return SubseqCertificate(
            kind=INCONCLUSIVE,
            horizon=horizon,
            gap_bound=gap_bound,
            burn_in=burn_in,
            zero_mode=zero_mode,
            epsilon=eps,
            span_lo=span_lo,
            span_hi=span_hi,
            clusters=summaries,
        )
    witness_index = max(
        candidates, key=lambda i: (hit_lists[i][-1], len(hit_lists[i]), -i)
    )
    windows = tuple(
        PigeonholeWindow(h - gap_bound, h, h) for h in hit_lists[witness_index]
    )
    for window in windows:
        lo = max(window.start, burn_in)
        hi = min(window.end, horizon)
        if any(not blocked[n] for n in range(lo, hi + 1)):
            return SubseqCertificate(
                kind=INCONCLUSIVE,
                horizon=horizon,
                gap_bound=gap_bound,
                burn_in=burn_in,
                zero_mode=zero_mode,
                epsilon=eps,
                span_lo=span_lo,
                span_hi=span_hi,
                clusters=summaries,
            )
    return SubseqCertificate(
        kind=REFUTATION,
        horizon=horizon,
        gap_bound=gap_bound,
        burn_in=burn_in,
        zero_mode=zero_mode,
        epsilon=eps,
        span_lo=span_lo,
        span_hi=span_hi,
        clusters=summaries,
        witness=PigeonholeWitness(witness_index, windows),
    )


def strictly_increasing_gap_subsequence(indices: Sequence[int]) -> tuple[int, ...]:
    """Greedy subselection whose consecutive gaps strictly increase."""
    out: list[int] = []
    last_gap = 0
    for n in indices:
        if not out:
            out.append(n)
        elif n - out[-1] > last_gap:
            last_gap = n - out[-1]
            out.append(n)
    return tuple(out)


# --- translate identity along a subsequence ---


@dataclass(frozen=True)
class TranslateIdentityReport:
    gap_bound: int
    members: tuple[int, ...]
    identity_holds: bool
    identity_violation: tuple[int, int] | None  # (member, j)
    translates_zero_from: int | None  # member from which all translates vanish
    covered_zero_range: tuple[int, int] | None
    full_series_zero_on_cover: bool | None
    consistent: bool


def translate_identity_check(
    operator: OperatorExpr,
    x: Vector,
    z: Vector,
    subseq: IndexSubsequence,
    horizon: int,
) -> TranslateIdentityReport:
    """Exact translate identity <A^(m+j) x; z> = <A^m x; (A*)^j z> along the
    subsequence, plus the induced tail report: once all translates vanish
    from some member on, the full series must vanish on the covered range."""
    if subseq.gap_bound is None:
        raise ValueError("subsequence needs a declared gap bound")
    if not subseq.indices:
        raise ValueError("subsequence is empty")
    bound = subseq.gap_bound
    if horizon < subseq.indices[-1] + bound:
        raise ValueError("horizon must reach max(subsequence) + gap bound")

    orbit = list(iterate_orbit(operator, x, horizon))
    adjoint_expr = adjoint(operator)
    translated_functionals = [z]
    for _ in range(bound):
        translated_functionals.append(apply(adjoint_expr, translated_functionals[-1]))

    identity_violation = None
    last_nonzero_member = None
    for m in subseq.indices:
        for j in range(bound + 1):
            direct = pairing(orbit[m + j], z)
            via_adjoint = pairing(orbit[m], translated_functionals[j])
            if direct != via_adjoint:
                identity_violation = (m, j)
                break
            if direct != 0:
                last_nonzero_member = m
        if identity_violation:
            break

    if identity_violation is not None:
        return TranslateIdentityReport(
            bound, subseq.indices, False, identity_violation, None, None, None, False
        )

    members_after = [m for m in subseq.indices if last_nonzero_member is None or m > last_nonzero_member]
    if not members_after:
        zero_from = None
        covered = None
        full_zero = None
        consistent = True
    else:
        zero_from = members_after[0]
        cover_start = zero_from + bound
        cover_end = min(horizon, subseq.indices[-1] + bound)
        covered = (cover_start, cover_end)
        full_zero = all(pairing(orbit[n], z) == 0 for n in range(cover_start, cover_end + 1))
        consistent = full_zero
    return TranslateIdentityReport(
        bound, subseq.indices, True, None, zero_from, covered, full_zero, consistent
    )
