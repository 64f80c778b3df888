"""Orbit pairing series and finite-horizon stability classifiers.

All pairings are exact rationals, so "this coefficient is zero" is decided
structurally, never by rounding.  Finite horizons cannot certify limits:
verdicts are worded as "-consistent" / "-witnessed" / "inconclusive" and
every report is horizon evidence, not proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .core import Rational, Vector, norm_sq, pairing
from .operators import (
    DomainKindError,
    FiniteMatrix,
    MatrixOp,
    OperatorExpr,
    iterate_orbit,
    matrix_power_norm,
)

VERDICT_STABLE = "stable-consistent"
VERDICT_QUASISTABLE = "quasistable-witnessed"
VERDICT_INSTABILITY = "instability-witnessed"
VERDICT_INCONCLUSIVE = "inconclusive"

DEFAULT_MIN_ZERO_HITS = 5
DEFAULT_EPSILON = Fraction(1, 10**9)


@dataclass(frozen=True)
class PairingSeries:
    """a_n = <A^n x; z> for n = 0..horizon, computed exactly."""

    operator: OperatorExpr
    x: Vector
    z: Vector
    values: tuple[Rational, ...]

    @property
    def horizon(self) -> int:
        return len(self.values) - 1


def pairing_series(operator: OperatorExpr, x: Vector, z: Vector, horizon: int) -> PairingSeries:
    """Exact pairing series over the orbit, one application per step."""
    if type(x) is not type(z):
        raise DomainKindError("probe vector and functional vector live in different spaces")
    values = tuple(pairing(v, z) for v in iterate_orbit(operator, x, horizon))
    return PairingSeries(operator, x, z, values)


def series_family(
    operator: OperatorExpr, x: Vector, family: Sequence[Vector], horizon: int
) -> list[PairingSeries]:
    """Pairing series against every functional, sharing one orbit pass."""
    if not family:
        raise ValueError("functional family must be nonempty")
    for z in family:
        if type(z) is not type(x):
            raise DomainKindError("every functional must live in the probe's space")
    columns: list[list[Rational]] = [[] for _ in family]
    for v in iterate_orbit(operator, x, horizon):
        for column, z in zip(columns, family):
            column.append(pairing(v, z))
    return [
        PairingSeries(operator, x, z, tuple(column)) for column, z in zip(columns, family)
    ]


@dataclass(frozen=True)
class TailExtrema:
    window_start: int
    min_abs: Rational
    max_abs: Rational
    argmin: tuple[int, ...]
    argmax: tuple[int, ...]


def tail_extrema(series: PairingSeries, window_start: int) -> TailExtrema:
    """Exact extrema of |a_n| on n >= window_start, with attaining indices."""
    if not 0 <= window_start <= series.horizon:
        raise ValueError("window_start must lie within the horizon")
    tail = [abs(v) for v in series.values[window_start:]]
    lo, hi = min(tail), max(tail)
    argmin = tuple(window_start + i for i, v in enumerate(tail) if v == lo)
    argmax = tuple(window_start + i for i, v in enumerate(tail) if v == hi)
    return TailExtrema(window_start, lo, hi, argmin, argmax)


@dataclass(frozen=True)
class FunctionalEvidence:
    functional_index: int
    tail_min: Rational
    tail_max: Rational
    min_indices: tuple[int, ...]
    max_indices: tuple[int, ...]


@dataclass(frozen=True)
class StabilityVerdict:
    mode: str
    verdict: str
    horizon: int
    window_start: int
    zero_mode: str
    epsilon: Rational | None
    min_zero_hits: int
    simultaneous_zero_indices: tuple[int, ...]
    evidence: tuple[FunctionalEvidence, ...]
    instability_functional: int | None = None
    instability_floor: Rational | None = None


def classify_weak(
    operator: OperatorExpr,
    x: Vector,
    family: Sequence[Vector],
    horizon: int,
    zero_mode: str = "exact",
    *,
    epsilon: Rational | None = None,
    window_start: int | None = None,
    min_zero_hits: int = DEFAULT_MIN_ZERO_HITS,
) -> StabilityVerdict:
    """Weak stability/quasistability verdict at finite horizon.

    Quasistability is witnessed only by indices at which *all* family
    pairings vanish simultaneously: one subsequence for every functional,
    as the definition requires.  Instability is witnessed by a functional
    whose tail never drops to zero (its whole tail is the structured
    subsequence bounded away from zero).
    """
    if zero_mode not in ("exact", "epsilon"):
        raise ValueError(f"unknown zero_mode {zero_mode!r}")
    eps = None
    if zero_mode == "epsilon":
        eps = Fraction(epsilon) if epsilon is not None else DEFAULT_EPSILON
        if eps < 0:
            raise ValueError("epsilon must be nonnegative")
    if window_start is None:
        window_start = horizon // 2
    if not 0 <= window_start <= horizon:
        raise ValueError("window_start must lie within the horizon")

    family_series = series_family(operator, x, family, horizon)
    threshold = eps if eps is not None else Fraction(0)

    evidence = []
    for index, series in enumerate(family_series):
        ext = tail_extrema(series, window_start)
        evidence.append(
            FunctionalEvidence(index, ext.min_abs, ext.max_abs, ext.argmin, ext.argmax)
        )

    simultaneous = tuple(
        n
        for n in range(window_start, horizon + 1)
        if all(abs(s.values[n]) <= threshold for s in family_series)
    )

    all_tail_zero = all(ev.tail_max <= threshold for ev in evidence)
    if all_tail_zero:
        verdict = VERDICT_STABLE
        bad_index = bad_floor = None
    elif len(simultaneous) >= min_zero_hits:
        verdict = VERDICT_QUASISTABLE
        bad_index = bad_floor = None
    else:
        never_zero = [ev for ev in evidence if ev.tail_min > threshold]
        if never_zero:
            worst = max(never_zero, key=lambda ev: ev.tail_min)
            verdict = VERDICT_INSTABILITY
            bad_index, bad_floor = worst.functional_index, worst.tail_min
        else:
            verdict = VERDICT_INCONCLUSIVE
            bad_index = bad_floor = None

    return StabilityVerdict(
        mode="weak",
        verdict=verdict,
        horizon=horizon,
        window_start=window_start,
        zero_mode=zero_mode,
        epsilon=eps,
        min_zero_hits=min_zero_hits,
        simultaneous_zero_indices=simultaneous,
        evidence=tuple(evidence),
        instability_functional=bad_index,
        instability_floor=bad_floor,
    )


# --- finite-matrix harnesses ---


@dataclass(frozen=True)
class EnvelopeCheck:
    multiple: int
    norm: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class UniformStabilityReport:
    horizon: int
    tol: float
    norms: tuple[float, ...]  # norms[i] = norm of M^(i+1)
    min_norm: float
    min_index: int
    first_below_one: int | None
    quasistability_detected: bool
    envelope: tuple[EnvelopeCheck, ...]
    envelope_ok: bool | None
    gelfand: float
    gelfand_below_one: bool
    verdict: str
    passed: bool


def uniform_equivalence_check(
    matrix: FiniteMatrix, horizon: int, tol: float
) -> UniformStabilityReport:
    """Check that one power-norm dip below 1 forces geometric decay.

    Scans norm(M^n) for n <= horizon.  If some norm drops below 1 at n0,
    asserts the envelope norm(M^(c*n0)) <= norm(M^n0)^c (up to tol slack)
    for every multiple within the horizon, and that the finite-step
    spectral-radius estimate is below 1.  An isometry never dips below 1,
    so the predicate is vacuous and reported as such.
    """
    if horizon < 4:
        raise ValueError("horizon must be at least 4")
    if tol <= 0:
        raise ValueError("tol must be positive")

    norms = [matrix_power_norm(matrix, n, tol) for n in range(1, horizon + 1)]
    min_norm = min(norms)
    min_index = norms.index(min_norm) + 1
    first_below = next((i + 1 for i, v in enumerate(norms) if v < 1.0), None)

    envelope: list[EnvelopeCheck] = []
    envelope_ok: bool | None = None
    if first_below is not None:
        base = norms[first_below - 1]
        envelope_ok = True
        c = 2
        while c * first_below <= horizon:
            value = norms[c * first_below - 1]
            bound = base**c * (1.0 + tol) ** (c + 1) + 1e-300
            ok = value <= bound
            envelope.append(EnvelopeCheck(c, value, bound, ok))
            envelope_ok = envelope_ok and ok
            c += 1

    gelfand = norms[-1] ** (1.0 / horizon)
    gelfand_below_one = gelfand < 1.0

    if first_below is None:
        verdict = "no-uniform-quasistability"
        passed = True
    elif envelope_ok and gelfand_below_one:
        verdict = "uniform-stability-consistent"
        passed = True
    else:
        verdict = "envelope-violation"
        passed = False

    return UniformStabilityReport(
        horizon=horizon,
        tol=tol,
        norms=tuple(norms),
        min_norm=min_norm,
        min_index=min_index,
        first_below_one=first_below,
        quasistability_detected=first_below is not None,
        envelope=tuple(envelope),
        envelope_ok=envelope_ok,
        gelfand=gelfand,
        gelfand_below_one=gelfand_below_one,
        verdict=verdict,
        passed=passed,
    )


@dataclass(frozen=True)
class ProbeDecayRecord:
    probe_index: int
    sup_norm_sq: Rational
    bound_factor_sq: Rational  # observed sup of norm_sq(A^n x) / norm_sq(x)
    growth_flagged: bool
    precondition_ok: bool
    tail_argmin: int
    tail_min_sq: Rational
    max_after_sq: Rational
    bound_sq: Rational
    inequality_holds: bool
    margin_sq: Rational
    quasistability_hint: bool
    decayed_to_zero: bool


@dataclass(frozen=True)
class StrongStabilityReport:
    horizon: int
    window_start: int
    records: tuple[ProbeDecayRecord, ...]
    all_hold: bool


def strong_equivalence_check(
    operator: Union[FiniteMatrix, OperatorExpr],
    probes: Sequence[Vector],
    horizon: int,
    *,
    window_start: int | None = None,
    growth_slack: Rational = Fraction(2),
    assume_power_bounded: bool = False,
) -> StrongStabilityReport:
    """Per-probe check that a norm dip along the orbit caps the later norms.

    For each probe, locates the tail index with minimal orbit norm and
    verifies (exactly, on squared norms) that every later norm stays within
    the observed power bound times that minimum.
    """
    expr = MatrixOp(operator) if isinstance(operator, FiniteMatrix) else operator
    if window_start is None:
        window_start = horizon // 2
    if not 0 <= window_start <= horizon:
        raise ValueError("window_start must lie within the horizon")

    records = []
    for index, probe in enumerate(probes):
        traj = [norm_sq(v) for v in iterate_orbit(expr, probe, horizon)]
        sup_sq = max(traj)
        growth = _growth_flagged(traj, growth_slack)
        base = traj[0]
        bound_factor_sq = (
            max(v / base for v in traj) if base != 0 else Fraction(1)
        )
        tail = traj[window_start:]
        tail_min = min(tail)
        argmin = window_start + tail.index(tail_min)
        max_after = max(traj[argmin:])
        bound_sq = bound_factor_sq * tail_min
        holds = max_after <= bound_sq
        records.append(
            ProbeDecayRecord(
                probe_index=index,
                sup_norm_sq=sup_sq,
                bound_factor_sq=bound_factor_sq,
                growth_flagged=growth,
                precondition_ok=assume_power_bounded or not growth,
                tail_argmin=argmin,
                tail_min_sq=tail_min,
                max_after_sq=max_after,
                bound_sq=bound_sq,
                inequality_holds=holds,
                margin_sq=bound_sq - max_after,
                quasistability_hint=tail_min < sup_sq,
                decayed_to_zero=tail_min == 0 and max_after == 0,
            )
        )
    return StrongStabilityReport(
        horizon=horizon,
        window_start=window_start,
        records=tuple(records),
        all_hold=all(r.inequality_holds for r in records),
    )


def _growth_flagged(traj: Sequence[Rational], slack: Rational) -> bool:
    horizon = len(traj) - 1
    quarter = horizon // 4
    first_max = max(traj[: quarter + 1])
    last_max = max(traj[horizon - quarter :])
    return last_max > slack * first_max


@dataclass(frozen=True)
class PowerBoundRecord:
    probe_index: int
    trajectory_sq: tuple[Rational, ...]
    sup_sq: Rational
    sup_index: int
    first_quarter_max: Rational
    last_quarter_max: Rational
    growth_flagged: bool


@dataclass(frozen=True)
class PowerBoundReport:
    horizon: int
    growth_slack: Rational
    records: tuple[PowerBoundRecord, ...]
    any_growth: bool


def power_bounded_probe(
    operator: Union[FiniteMatrix, OperatorExpr],
    probes: Sequence[Vector],
    horizon: int,
    *,
    growth_slack: Rational = Fraction(2),
) -> PowerBoundReport:
    """Exact squared-norm trajectories with a crude growth-trend flag.

    Flags a probe when the last-quarter max exceeds the first-quarter max
    by more than the slack factor.  A flag is evidence of unbounded powers,
    not proof; boundedness over an infinite index set is out of reach here.
    """
    expr = MatrixOp(operator) if isinstance(operator, FiniteMatrix) else operator
    quarter = horizon // 4
    records = []
    for index, probe in enumerate(probes):
        traj = tuple(norm_sq(v) for v in iterate_orbit(expr, probe, horizon))
        sup_sq = max(traj)
        first_max = max(traj[: quarter + 1])
        last_max = max(traj[horizon - quarter :])
        records.append(
            PowerBoundRecord(
                probe_index=index,
                trajectory_sq=traj,
                sup_sq=sup_sq,
                sup_index=traj.index(sup_sq),
                first_quarter_max=first_max,
                last_quarter_max=last_max,
                growth_flagged=last_max > growth_slack * first_max,
            )
        )
    return PowerBoundReport(
        horizon=horizon,
        growth_slack=growth_slack,
        records=tuple(records),
        any_growth=any(r.growth_flagged for r in records),
    )
