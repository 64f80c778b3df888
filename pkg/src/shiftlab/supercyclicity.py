"""Finite-horizon probes for weak l-sequential supercyclicity.

Everything here is evidence-gathering at a horizon, never proof: the probe
fits projective-orbit scalars exactly, tracks where the residual against a
functional family vanishes, and reports scalar-boundedness trends and the
bounded-gap dichotomy.  Whether any operator under study actually is weakly
l-sequentially supercyclic is left open by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Rational, Vector, pairing
from .gaps import GapStats, gap_stats, zero_walk_clusters
from .operators import OperatorExpr, iterate_orbit
from .stability import FunctionalEvidence, power_bounded_probe, series_family, tail_extrema

HORIZON_EVIDENCE_NOTE = "horizon evidence, not proof"

FLAG_BOUNDED = "bounded-alpha evidence: inconsistent with weak stability at horizon"
FLAG_UNBOUNDED = "unbounded-alpha trend"

ALT_A = "alternative-a: no bounded-gap supercyclic subsequence at horizon"
ALT_B = "alternative-b: unbounded scalar trend"
NO_CANDIDATES = "no-candidates"
IN_ORBIT = "in-orbit"
ANOMALY = "anomaly: bounded scalars along a bounded-gap subsequence"


def orbit_membership(
    operator: OperatorExpr, y: Vector, x: Vector, horizon: int
) -> tuple[Rational, int] | None:
    """Exact search for x = alpha * A^n y with n <= horizon, smallest n first."""
    if y.is_zero:
        raise ValueError("candidate vector y must be nonzero")
    for n, v in enumerate(iterate_orbit(operator, y, horizon)):
        alpha = _proportionality(x, v)
        if alpha is not None:
            return alpha, n
    return None


def _proportionality(x: Vector, v: Vector) -> Rational | None:
    """alpha with x = alpha * v, if one exists (0 when x = v = pairing-zero)."""
    if x.is_zero:
        return Fraction(0)
    if v.is_zero:
        return None
    ratio = None
    if hasattr(x, "top"):
        pairs = [(x.top, v.top), (x.bottom, v.bottom)]
    else:
        pairs = [(x, v)]
    for x_part, v_part in pairs:
        if x_part.support != v_part.support:
            return None
        for k in x_part.support:
            r = x_part[k] / v_part[k]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
    return ratio


@dataclass(frozen=True)
class ProbeRow:
    n: int
    alpha: Rational | None
    residual: Rational | None
    anchor_used: int | None


@dataclass(frozen=True)
class ProbeReport:
    operator: OperatorExpr
    y: Vector
    x: Vector
    family: tuple[Vector, ...]
    horizon: int
    anchor: int
    fallback_anchors: tuple[int, ...]
    threshold: Rational
    rows: tuple[ProbeRow, ...]
    candidate_subsequence: tuple[int, ...]
    alpha_sup: Rational | None
    candidate_gaps: GapStats | None
    anchor_degenerate: bool
    note: str = HORIZON_EVIDENCE_NOTE


def projective_fit(
    operator: OperatorExpr,
    y: Vector,
    x: Vector,
    family: Sequence[Vector],
    horizon: int,
    anchor: int,
    *,
    fallback_anchors: Sequence[int] = (),
    threshold: Rational = Fraction(0),
) -> ProbeReport:
    """Per-step exact scalar fit of the projective orbit of y against x.

    At each n the scalar is fixed by one anchor functional (exact division,
    staying rational); the residual is the worst family pairing of the
    rescaled orbit point against x.  Rows where every tried anchor
    annihilates A^n y stay undefined.
    """
    if not family:
        raise ValueError("functional family must be nonempty")
    order = [anchor, *fallback_anchors]
    if any(not 0 <= a < len(family) for a in order):
        raise ValueError("anchor indices must point into the family")
    threshold = Fraction(threshold)
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")

    x_pairings = [pairing(x, z) for z in family]
    rows = []
    for n, v in enumerate(iterate_orbit(operator, y, horizon)):
        orbit_pairings = [pairing(v, z) for z in family]
        used = next((a for a in order if orbit_pairings[a] != 0), None)
        if used is None:
            rows.append(ProbeRow(n, None, None, None))
            continue
        alpha = x_pairings[used] / orbit_pairings[used]
        residual = max(
            abs(alpha * op - xp) for op, xp in zip(orbit_pairings, x_pairings)
        )
        rows.append(ProbeRow(n, alpha, residual, used))

    defined = [r for r in rows if r.alpha is not None]
    candidates = tuple(r.n for r in defined if r.residual <= threshold)
    alpha_by_n = {r.n: r.alpha for r in defined}
    alpha_sup = max((abs(alpha_by_n[n]) for n in candidates), default=None)
    candidate_gaps = gap_stats(candidates) if len(candidates) >= 2 else None
    return ProbeReport(
        operator=operator,
        y=y,
        x=x,
        family=tuple(family),
        horizon=horizon,
        anchor=anchor,
        fallback_anchors=tuple(fallback_anchors),
        threshold=threshold,
        rows=tuple(rows),
        candidate_subsequence=candidates,
        alpha_sup=alpha_sup,
        candidate_gaps=candidate_gaps,
        anchor_degenerate=not defined,
    )


@dataclass(frozen=True)
class AlphaDiagnostic:
    suppressed: bool
    x_in_orbit: bool
    growth_slack: Rational
    first_quarter_max: Rational | None
    last_quarter_max: Rational | None
    bounded_trend: bool | None
    flag: str
    note: str = HORIZON_EVIDENCE_NOTE


def alpha_boundedness_report(
    report: ProbeReport, x_in_orbit: bool, *, growth_slack: Rational = Fraction(2)
) -> AlphaDiagnostic:
    """Scalar-boundedness trend over the candidate subsequence.

    A bounded scalar trend on a target outside the orbit is the
    horizon-scale form of the necessary condition that weak stability
    forces all fitted scalar sequences to blow up.  When the target lies in
    the orbit the scalars are eventually constant and the diagnostic says
    nothing, so it is suppressed.
    """
    candidates = report.candidate_subsequence
    if not candidates:
        raise ValueError("candidate subsequence is empty")
    if x_in_orbit:
        return AlphaDiagnostic(
            suppressed=True,
            x_in_orbit=True,
            growth_slack=Fraction(growth_slack),
            first_quarter_max=None,
            last_quarter_max=None,
            bounded_trend=None,
            flag=IN_ORBIT,
        )
    alpha_by_n = {r.n: abs(r.alpha) for r in report.rows if r.alpha is not None}
    magnitudes = [alpha_by_n[n] for n in candidates]
    quarter = max(1, len(magnitudes) // 4)
    first_max = max(magnitudes[:quarter])
    last_max = max(magnitudes[-quarter:])
    slack = Fraction(growth_slack)
    bounded = last_max <= slack * first_max
    return AlphaDiagnostic(
        suppressed=False,
        x_in_orbit=False,
        growth_slack=slack,
        first_quarter_max=first_max,
        last_quarter_max=last_max,
        bounded_trend=bounded,
        flag=FLAG_BOUNDED if bounded else FLAG_UNBOUNDED,
    )


@dataclass(frozen=True)
class QuasistabilityScan:
    horizon: int
    window_start: int
    rows: tuple[FunctionalEvidence, ...]
    all_tail_minima_zero: bool
    note: str = HORIZON_EVIDENCE_NOTE


def quasistability_scan(
    operator: OperatorExpr,
    y: Vector,
    family: Sequence[Vector],
    horizon: int,
    *,
    window_start: int = 0,
) -> QuasistabilityScan:
    """Tail minima of |<A^n y; z>| per functional: the necessary condition
    for a supercyclic candidate under power boundedness is that every tail
    minimum is zero."""
    rows = []
    for index, series in enumerate(series_family(operator, y, family, horizon)):
        ext = tail_extrema(series, window_start)
        rows.append(
            FunctionalEvidence(index, ext.min_abs, ext.max_abs, ext.argmin, ext.argmax)
        )
    return QuasistabilityScan(
        horizon=horizon,
        window_start=window_start,
        rows=tuple(rows),
        all_tail_minima_zero=all(r.tail_min == 0 for r in rows),
    )


def has_spanning_bounded_gap_walk(
    candidates: Sequence[int], horizon: int, gap_bound: int, span_fraction: Fraction = Fraction(1, 4)
) -> bool:
    """Does the candidate set contain a gap-bounded walk that starts by the
    first quarter of the horizon and reaches into the final quarter?"""
    if not candidates:
        return False
    span_len = int(horizon * span_fraction)
    lo, hi = span_len, horizon - span_len
    return any(
        c[0] <= lo and c[-1] >= hi for c in zero_walk_clusters(list(candidates), gap_bound)
    )


def classify_dichotomy_cell(
    candidates: Sequence[int],
    horizon: int,
    gap_bound: int,
    bounded_trend: bool,
    span_fraction: Fraction = Fraction(1, 4),
) -> str:
    """One cell of the dichotomy table: either no bounded-gap candidate walk
    persists (alternative a), or the scalars trend unbounded (alternative b);
    bounded scalars along a persisting walk is the anomalous third case."""
    if not has_spanning_bounded_gap_walk(candidates, horizon, gap_bound, span_fraction):
        return ALT_A
    return ANOMALY if bounded_trend else ALT_B


@dataclass(frozen=True)
class TargetSummary:
    target_index: int
    in_orbit: bool
    membership: tuple[Rational, int] | None
    candidate_count: int
    alpha_flag: str | None


@dataclass(frozen=True)
class DichotomyRow:
    target_index: int
    gap_bound: int
    classification: str


@dataclass(frozen=True)
class DichotomyReport:
    horizon: int
    gap_bounds: tuple[int, ...]
    power_bound_ok: bool
    targets: tuple[TargetSummary, ...]
    rows: tuple[DichotomyRow, ...]
    note: str = HORIZON_EVIDENCE_NOTE


def dichotomy_report(
    operator: OperatorExpr,
    y: Vector,
    targets: Sequence[Vector],
    family: Sequence[Vector],
    horizon: int,
    gap_bounds: Sequence[int],
    *,
    anchor: int = 0,
    fallback_anchors: Sequence[int] | None = None,
    threshold: Rational = Fraction(0),
    growth_slack: Rational = Fraction(2),
    span_fraction: Fraction = Fraction(1, 4),
) -> DichotomyReport:
    """Cross-tabulate bounded-gap candidate subsequences with scalar trends.

    For each target outside the projective orbit and each gap bound, the
    possible outcomes at horizon mirror the two alternatives: either no
    bounded-gap candidate subsequence persists, or the fitted scalars trend
    unbounded.  Both holding at once is reported as an anomaly worth eyes.
    """
    if fallback_anchors is None:
        fallback_anchors = [i for i in range(len(family)) if i != anchor]
    power = power_bounded_probe(operator, [y, *targets], horizon)
    summaries = []
    rows = []
    for index, x in enumerate(targets):
        membership = orbit_membership(operator, y, x, horizon)
        if membership is not None:
            summaries.append(TargetSummary(index, True, membership, 0, None))
            for bound in gap_bounds:
                rows.append(DichotomyRow(index, bound, IN_ORBIT))
            continue
        fit = projective_fit(
            operator, y, x, family, horizon, anchor,
            fallback_anchors=fallback_anchors, threshold=threshold,
        )
        candidates = fit.candidate_subsequence
        if not candidates:
            summaries.append(TargetSummary(index, False, None, 0, None))
            for bound in gap_bounds:
                rows.append(DichotomyRow(index, bound, NO_CANDIDATES))
            continue
        diagnostic = alpha_boundedness_report(fit, False, growth_slack=growth_slack)
        summaries.append(
            TargetSummary(index, False, None, len(candidates), diagnostic.flag)
        )
        for bound in gap_bounds:
            rows.append(
                DichotomyRow(
                    index,
                    bound,
                    classify_dichotomy_cell(
                        candidates, horizon, bound, diagnostic.bounded_trend, span_fraction
                    ),
                )
            )
    return DichotomyReport(
        horizon=horizon,
        gap_bounds=tuple(gap_bounds),
        power_bound_ok=not power.any_growth,
        targets=tuple(summaries),
        rows=tuple(rows),
    )
