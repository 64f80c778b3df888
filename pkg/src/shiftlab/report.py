"""Report serialization: lossless rationals, canonical JSON, versioned CSV.

Rationals serialize as ``"p/q"`` strings plus a display-only decimal;
decimals are never parsed back.  JSON output is canonical (sorted keys,
fixed separators) so identical runs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .core import PairVec, Rational, Vector
from .gaps import GapStats, SubseqCertificate, TransferReport, TranslateIdentityReport
from .stability import (
    PairingSeries,
    PowerBoundReport,
    StabilityVerdict,
    StrongStabilityReport,
    UniformStabilityReport,
)
from .supercyclicity import (
    AlphaDiagnostic,
    DichotomyReport,
    ProbeReport,
    QuasistabilityScan,
)

SERIES_CSV_HEADER = "# shiftlab-series-csv v1"
PROBE_CSV_HEADER = "# shiftlab-probe-csv v1"

INDEX_LIST_CAP = 64


def rational_str(value: Rational) -> str:
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def rational_obj(value: Rational | None) -> dict | None:
    if value is None:
        return None
    q = Fraction(value)
    return {"ratio": rational_str(q), "decimal": float(q)}


def vector_obj(vector: Vector) -> dict:
    if isinstance(vector, PairVec):
        return {"top": vector_obj(vector.top), "bottom": vector_obj(vector.bottom)}
    return {str(k): rational_str(v) for k, v in vector}


def index_list_obj(indices: Sequence[int]) -> dict:
    head = list(indices[:INDEX_LIST_CAP])
    return {"count": len(indices), "indices": head, "truncated": len(indices) > len(head)}


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(canonical_json(obj))


def series_csv_text(values: Sequence[Rational]) -> str:
    lines = [SERIES_CSV_HEADER, "n,numerator,denominator,decimal"]
    for n, value in enumerate(values):
        q = Fraction(value)
        lines.append(f"{n},{q.numerator},{q.denominator},{float(q)!r}")
    return "\n".join(lines) + "\n"


def write_series_csv(path: str | Path, values: Sequence[Rational]) -> None:
    Path(path).write_text(series_csv_text(values))


def probe_rows_csv_text(report: ProbeReport) -> str:
    lines = [PROBE_CSV_HEADER, "n,alpha_num,alpha_den,rho_num,rho_den"]
    for row in report.rows:
        if row.alpha is None:
            lines.append(f"{row.n},,,,")
        else:
            lines.append(
                f"{row.n},{row.alpha.numerator},{row.alpha.denominator},"
                f"{row.residual.numerator},{row.residual.denominator}"
            )
    return "\n".join(lines) + "\n"


def write_probe_rows_csv(path: str | Path, report: ProbeReport) -> None:
    Path(path).write_text(probe_rows_csv_text(report))


# --- report objects ---


def series_obj(series: PairingSeries, *, include_values: bool = True) -> dict:
    nonzero = [n for n, v in enumerate(series.values) if v != 0]
    out = {
        "horizon": series.horizon,
        "nonzero": index_list_obj(nonzero),
    }
    if include_values:
        out["values"] = [rational_str(v) for v in series.values]
    return out


def gap_stats_obj(stats: GapStats | None) -> dict | None:
    if stats is None:
        return None
    return {
        "max_gap": stats.max_gap,
        "gaps": list(stats.gaps[:INDEX_LIST_CAP]),
        "histogram": {str(g): c for g, c in stats.histogram},
    }


def verdict_obj(verdict: StabilityVerdict) -> dict:
    return {
        "mode": verdict.mode,
        "verdict": verdict.verdict,
        "horizon": verdict.horizon,
        "window_start": verdict.window_start,
        "zero_mode": verdict.zero_mode,
        "epsilon": rational_obj(verdict.epsilon),
        "min_zero_hits": verdict.min_zero_hits,
        "simultaneous_zeros": index_list_obj(verdict.simultaneous_zero_indices),
        "instability_functional": verdict.instability_functional,
        "instability_floor": rational_obj(verdict.instability_floor),
        "per_functional": [
            {
                "functional": ev.functional_index,
                "tail_min": rational_obj(ev.tail_min),
                "tail_max": rational_obj(ev.tail_max),
                "min_indices": index_list_obj(ev.min_indices),
                "max_indices": index_list_obj(ev.max_indices),
            }
            for ev in verdict.evidence
        ],
        "note": "horizon evidence, not proof",
    }


def certificate_obj(cert: SubseqCertificate) -> dict:
    out = {
        "kind": cert.kind,
        "horizon": cert.horizon,
        "gap_bound": cert.gap_bound,
        "burn_in": cert.burn_in,
        "zero_mode": cert.zero_mode,
        "epsilon": rational_obj(cert.epsilon),
        "span_lo": cert.span_lo,
        "span_hi": cert.span_hi,
        "clusters": [
            {"first": c.first, "last": c.last, "size": c.size} for c in cert.clusters
        ],
        "note": "horizon evidence, not proof",
    }
    if cert.subsequence is not None:
        # the certificate is the artifact: keep its full index list re-checkable
        out["certificate"] = {
            "count": len(cert.subsequence.indices),
            "indices": list(cert.subsequence.indices),
        }
    if cert.witness is not None:
        out["witness"] = {
            "functional": cert.witness.functional_index,
            "windows": [
                {"start": w.start, "end": w.end, "hit": w.anchor_hit}
                for w in cert.witness.windows
            ],
        }
    return out


def transfer_obj(report: TransferReport) -> dict:
    violation = None
    if report.hypothesis_violation is not None:
        member, j, n, value = report.hypothesis_violation
        violation = {"member": member, "translate": j, "n": n, "value": rational_str(value)}
    return {
        "alpha": rational_obj(report.alpha),
        "epsilon": rational_obj(report.epsilon),
        "burn_in": report.burn_in,
        "gap_bound": report.gap_bound,
        "members_used": index_list_obj(report.members_used),
        "hypothesis_holds": report.hypothesis_holds,
        "hypothesis_violation": violation,
        "conclusion_start": report.conclusion_start,
        "first_violation": report.first_violation,
        "transfer_holds": report.transfer_holds,
    }


def translate_identity_obj(report: TranslateIdentityReport) -> dict:
    return {
        "gap_bound": report.gap_bound,
        "members": index_list_obj(report.members),
        "identity_holds": report.identity_holds,
        "identity_violation": list(report.identity_violation)
        if report.identity_violation
        else None,
        "translates_zero_from": report.translates_zero_from,
        "covered_zero_range": list(report.covered_zero_range)
        if report.covered_zero_range
        else None,
        "full_series_zero_on_cover": report.full_series_zero_on_cover,
        "consistent": report.consistent,
    }


def uniform_obj(report: UniformStabilityReport) -> dict:
    return {
        "horizon": report.horizon,
        "tol": report.tol,
        "norms": list(report.norms),
        "min_norm": report.min_norm,
        "min_index": report.min_index,
        "first_below_one": report.first_below_one,
        "quasistability_detected": report.quasistability_detected,
        "envelope_ok": report.envelope_ok,
        "envelope": [
            {"multiple": e.multiple, "norm": e.norm, "bound": e.bound, "ok": e.ok}
            for e in report.envelope
        ],
        "gelfand": report.gelfand,
        "gelfand_below_one": report.gelfand_below_one,
        "verdict": report.verdict,
        "passed": report.passed,
    }


def strong_obj(report: StrongStabilityReport) -> dict:
    return {
        "horizon": report.horizon,
        "window_start": report.window_start,
        "all_hold": report.all_hold,
        "probes": [
            {
                "probe": r.probe_index,
                "sup_norm_sq": rational_obj(r.sup_norm_sq),
                "bound_factor_sq": rational_obj(r.bound_factor_sq),
                "growth_flagged": r.growth_flagged,
                "precondition_ok": r.precondition_ok,
                "tail_argmin": r.tail_argmin,
                "tail_min_sq": rational_obj(r.tail_min_sq),
                "max_after_sq": rational_obj(r.max_after_sq),
                "bound_sq": rational_obj(r.bound_sq),
                "inequality_holds": r.inequality_holds,
                "margin_sq": rational_obj(r.margin_sq),
                "quasistability_hint": r.quasistability_hint,
                "decayed_to_zero": r.decayed_to_zero,
            }
            for r in report.records
        ],
    }


def power_bound_obj(report: PowerBoundReport, *, include_trajectories: bool = False) -> dict:
    probes = []
    for r in report.records:
        entry = {
            "probe": r.probe_index,
            "sup_sq": rational_obj(r.sup_sq),
            "sup_index": r.sup_index,
            "first_quarter_max": rational_obj(r.first_quarter_max),
            "last_quarter_max": rational_obj(r.last_quarter_max),
            "growth_flagged": r.growth_flagged,
        }
        if include_trajectories:
            entry["trajectory_sq"] = [rational_str(v) for v in r.trajectory_sq]
        probes.append(entry)
    return {
        "horizon": report.horizon,
        "growth_slack": rational_obj(report.growth_slack),
        "any_growth": report.any_growth,
        "probes": probes,
        "power_boundedness_citation": (
            "power boundedness of the block construction is known from the "
            "literature; probed here, not proven"
        ),
    }


def probe_report_obj(report: ProbeReport, *, include_rows: bool = False) -> dict:
    out = {
        "horizon": report.horizon,
        "anchor": report.anchor,
        "fallback_anchors": list(report.fallback_anchors),
        "threshold": rational_obj(report.threshold),
        "anchor_degenerate": report.anchor_degenerate,
        "defined_rows": sum(1 for r in report.rows if r.alpha is not None),
        "candidates": index_list_obj(report.candidate_subsequence),
        "alpha_sup": rational_obj(report.alpha_sup),
        "candidate_gaps": gap_stats_obj(report.candidate_gaps),
        "note": report.note,
    }
    if include_rows:
        out["rows"] = [
            {
                "n": r.n,
                "alpha": rational_obj(r.alpha),
                "rho": rational_obj(r.residual),
                "anchor_used": r.anchor_used,
            }
            for r in report.rows
        ]
    return out


def alpha_obj(diag: AlphaDiagnostic) -> dict:
    return {
        "suppressed": diag.suppressed,
        "x_in_orbit": diag.x_in_orbit,
        "growth_slack": rational_obj(diag.growth_slack),
        "first_quarter_max": rational_obj(diag.first_quarter_max),
        "last_quarter_max": rational_obj(diag.last_quarter_max),
        "bounded_trend": diag.bounded_trend,
        "flag": diag.flag,
        "note": diag.note,
    }


def scan_obj(scan: QuasistabilityScan) -> dict:
    return {
        "horizon": scan.horizon,
        "window_start": scan.window_start,
        "all_tail_minima_zero": scan.all_tail_minima_zero,
        "rows": [
            {
                "functional": r.functional_index,
                "tail_min": rational_obj(r.tail_min),
                "tail_max": rational_obj(r.tail_max),
                "min_indices": index_list_obj(r.min_indices),
                "max_indices": index_list_obj(r.max_indices),
            }
            for r in scan.rows
        ],
        "note": scan.note,
    }


def dichotomy_obj(report: DichotomyReport) -> dict:
    return {
        "horizon": report.horizon,
        "gap_bounds": list(report.gap_bounds),
        "power_bound_ok": report.power_bound_ok,
        "targets": [
            {
                "target": t.target_index,
                "in_orbit": t.in_orbit,
                "membership": None
                if t.membership is None
                else {"alpha": rational_obj(t.membership[0]), "n": t.membership[1]},
                "candidate_count": t.candidate_count,
                "alpha_flag": t.alpha_flag,
            }
            for t in report.targets
        ],
        "rows": [
            {"target": r.target_index, "gap_bound": r.gap_bound, "classification": r.classification}
            for r in report.rows
        ],
        "note": report.note,
    }
