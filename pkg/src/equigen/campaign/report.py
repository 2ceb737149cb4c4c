"""Campaign reporting: objective tables, front counts, hypervolume, stats.

Reports are regenerated from the run logs alone, so ``report`` can be run
long after a campaign finished. All emitted files have deterministic bytes
for a given logs directory: ordering is fixed, floats use repr/%.12g, and
writes are atomic.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
from pathlib import Path
from typing import Optional, Sequence

from ..analysis import (
    ReferencePoint,
    TestResult,
    count_optimal_by_strategy,
    dunn_posthoc,
    hypervolume,
    hypervolume_oriented,
    kruskal_wallis,
    normalize_fronts,
    reference_point,
    spearman,
    vargha_delaney_a12,
    wilcoxon_signed_rank,
)
from ..objectives import (
    Direction,
    ObjectiveSpec,
    TRACKED_OBJECTIVE_NAMES,
    canonical_objective,
)
from ..search import RunLog, load_runlog
from .config import AnalysisOptions, CampaignConfigError

__all__ = [
    "load_campaign_logs",
    "generate_report",
    "run_statistical_analysis",
]

# Six pairwise comparisons per report family share one alpha budget.
REPORT_ALPHA = 0.05
_OBJECTIVE_FAMILY = len(TRACKED_OBJECTIVE_NAMES)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_campaign_logs(output_dir: str | Path) -> dict[str, list[RunLog]]:
    """All parseable run logs under ``output_dir/logs``, keyed by label."""
    logs_dir = Path(output_dir) / "logs"
    if not logs_dir.is_dir():
        raise CampaignConfigError(f"no logs directory under {output_dir}")
    logs: dict[str, list[RunLog]] = {}
    for label_dir in sorted(p for p in logs_dir.iterdir() if p.is_dir()):
        runs = [load_runlog(p) for p in sorted(label_dir.glob("rep*.jsonl"))]
        if runs:
            logs[label_dir.name] = runs
    if not logs:
        raise CampaignConfigError(f"no run logs found under {logs_dir}")
    return logs


def _manifest(output_dir: Path) -> Optional[dict]:
    path = output_dir / "campaign.json"
    if not path.is_file():
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError):
        return None


def _analysis_options(output_dir: Path, manifest: Optional[dict]) -> AnalysisOptions:
    if manifest and isinstance(manifest.get("analysis"), dict):
        entry = manifest["analysis"]
        return AnalysisOptions(
            objectives=tuple(entry.get("objectives", AnalysisOptions.objectives)),
            hv_normalize=bool(entry.get("hv_normalize", False)),
            epsilon=float(entry.get("epsilon", 0.5)),
            tie_rule=entry.get("tie_rule", "strict"),
            flagship=entry.get("flagship", "nsga2"),
        )
    return AnalysisOptions()


def _label_order(logs: dict[str, list[RunLog]], manifest: Optional[dict]) -> list[str]:
    if manifest and isinstance(manifest.get("strategies"), list):
        declared = [s.get("label") for s in manifest["strategies"] if isinstance(s, dict)]
        ordered = [label for label in declared if label in logs]
        leftover = sorted(set(logs) - set(ordered))
        return ordered + leftover
    return sorted(logs)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _front_measured(log: RunLog, names: Sequence[str]) -> list[tuple[float, ...]]:
    return [tuple(fv.measured.get(n) for n in names) for _ind, fv in log.final_front]


def _per_rep_means(runs: Sequence[RunLog], objective: str) -> list[float]:
    means: list[float] = []
    for log in runs:
        values = [fv.measured.get(objective) for _ind, fv in log.final_front]
        means.append(statistics.fmean(values))
    return means


def _sign_for(objective: str) -> float:
    return 1.0 if canonical_objective(objective).direction is Direction.MAXIMIZE else -1.0


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) >= 2 else 0.0
    return mean, std


def _test_to_dict(result: TestResult) -> dict:
    payload: dict = {
        "statistic": _json_safe(result.statistic),
        "p_value": _json_safe(result.p_value),
        "significant": result.significant,
    }
    if result.p_uncorrected is not None:
        payload["p_uncorrected"] = _json_safe(result.p_uncorrected)
    if result.effect_size is not None:
        payload["effect_size"] = {
            "value": _json_safe(result.effect_size.value),
            "magnitude": result.effect_size.magnitude,
        }
    if result.note:
        payload["note"] = result.note
    return payload


def _json_safe(value: float):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _num(value: float) -> str:
    return format(value, ".12g")


def _write_atomic_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    os.replace(tmp, path)


def _flagship_comparison(
    flagship_values: Sequence[float],
    other_values: Sequence[float],
    alpha: float,
) -> tuple[Optional[dict], dict]:
    """One-sided test that the flagship sample is larger, plus A12.

    Returns (csv_cells, json_payload). Cells are None when too few pairs.
    """
    pairs = min(len(flagship_values), len(other_values))
    a = list(flagship_values[:pairs])
    b = list(other_values[:pairs])
    try:
        test = wilcoxon_signed_rank(a, b, alternative="greater", alpha=alpha)
    except ValueError as exc:
        return None, {"skipped": str(exc)}
    effect = vargha_delaney_a12(a, b)
    payload = _test_to_dict(test)
    payload["a12"] = {"value": _json_safe(effect.value), "magnitude": effect.magnitude}
    cells = {
        "p_value": _num(test.p_value),
        "significant": str(test.significant).lower(),
        "a12": _num(effect.value) if test.significant else "",
        "magnitude": effect.magnitude if test.significant else "",
    }
    return cells, payload


# ---------------------------------------------------------------------------
# Report generation
# ---------------------------------------------------------------------------

def generate_report(
    output_dir: str | Path, analysis: Optional[AnalysisOptions] = None
) -> Path:
    """Write reports/ (CSV tables plus report.json) from the run logs."""
    output_dir = Path(output_dir)
    manifest = _manifest(output_dir)
    options = analysis or _analysis_options(output_dir, manifest)
    logs = load_campaign_logs(output_dir)
    labels = _label_order(logs, manifest)
    reports_dir = output_dir / "reports"
    alpha = REPORT_ALPHA / _OBJECTIVE_FAMILY
    flagship = options.flagship

    # Per-objective summary table with flagship comparisons.
    table_rows: list[dict] = []
    objective_json: dict[str, dict] = {}
    for objective in TRACKED_OBJECTIVE_NAMES:
        sign = _sign_for(objective)
        per_label_means = {
            label: _per_rep_means(logs[label], objective) for label in labels
        }
        objective_json[objective] = {}
        flagship_oriented = (
            [sign * v for v in per_label_means[flagship]] if flagship in per_label_means else None
        )
        for label in labels:
            means = per_label_means[label]
            mean, std = _mean_std(means)
            row = {
                "objective": objective,
                "label": label,
                "mean": _num(mean),
                "std": _num(std),
                "p_value": "",
                "significant": "",
                "a12": "",
                "magnitude": "",
            }
            entry: dict = {"per_rep_mean": means, "mean": mean, "std": std}
            if flagship_oriented is not None and label != flagship:
                cells, payload = _flagship_comparison(
                    flagship_oriented, [sign * v for v in means], alpha
                )
                entry["flagship_comparison"] = payload
                if cells is not None:
                    row.update(cells)
            table_rows.append(row)
            objective_json[objective][label] = entry
    _write_csv(
        reports_dir / "stats_table.csv",
        ("objective", "label", "mean", "std", "p_value", "significant", "a12", "magnitude"),
        table_rows,
    )

    # Pooled Pareto membership over the analysis objective subset.
    subset = ObjectiveSpec.from_names(options.objectives)
    entries: list[tuple[str, tuple[float, ...]]] = []
    for label in labels:
        for log in logs[label]:
            for point in _front_measured(log, subset.names):
                entries.append((label, point))
    counts = count_optimal_by_strategy(entries, subset)
    front_size = sum(counts.values())
    _write_csv(
        reports_dir / "pareto_counts.csv",
        ("label", "front_members", "share"),
        [
            {
                "label": label,
                "front_members": counts[label],
                "share": _num(counts[label] / front_size) if front_size else _num(0.0),
            }
            for label in labels
        ],
    )

    # Hypervolume per run against a shared reference.
    fronts: list[tuple[str, int, list[tuple[float, ...]]]] = []
    for label in labels:
        for rep, log in enumerate(logs[label]):
            fronts.append((label, rep, _front_measured(log, subset.names)))
    hv_values: dict[str, list[float]] = {label: [] for label in labels}
    if options.hv_normalize:
        scaled, ref = normalize_fronts([f for _, _, f in fronts], subset, options.epsilon)
        for (label, _rep, _front), oriented in zip(fronts, scaled):
            hv_values[label].append(hypervolume_oriented(oriented, ref))
    else:
        ref = reference_point([f for _, _, f in fronts], subset, options.epsilon)
        for label, _rep, front in fronts:
            hv_values[label].append(hypervolume(front, ref, subset))
    hv_rows = []
    for label in labels:
        for rep, value in enumerate(hv_values[label]):
            hv_rows.append({"label": label, "rep": rep, "hypervolume": _num(value)})
    _write_csv(reports_dir / "hypervolume_runs.csv", ("label", "rep", "hypervolume"), hv_rows)

    hv_json: dict = {
        "mode": "normalized" if options.hv_normalize else "raw",
        "epsilon": options.epsilon,
        "objectives": list(subset.names),
        "reference": [_json_safe(v) for v in ref.values],
        "per_label": {},
        "comparisons": {},
    }
    for label in labels:
        mean, std = _mean_std(hv_values[label])
        hv_json["per_label"][label] = {"values": hv_values[label], "mean": mean, "std": std}
    if flagship in hv_values:
        for label in labels:
            if label == flagship:
                continue
            _cells, payload = _flagship_comparison(
                hv_values[flagship], hv_values[label], REPORT_ALPHA
            )
            hv_json["comparisons"][label] = payload

    # Generalisation buckets, when the campaign produced them.
    wtl_payload = None
    wtl_path = output_dir / "generalisation" / "win_tie_loss.json"
    if wtl_path.is_file():
        wtl_payload = json.loads(wtl_path.read_text(encoding="utf-8"))
        rows = []
        for baseline in sorted(k for k in wtl_payload if isinstance(wtl_payload[k], dict)):
            for variant in sorted(wtl_payload[baseline]):
                bucket = wtl_payload[baseline][variant]
                rows.append(
                    {
                        "baseline": baseline,
                        "objectives": variant,
                        "wins": bucket["wins"],
                        "ties": bucket["ties"],
                        "losses": bucket["losses"],
                    }
                )
        _write_csv(
            reports_dir / "win_tie_loss.csv",
            ("baseline", "objectives", "wins", "ties", "losses"),
            rows,
        )

    provenance = [
        (Path("logs") / label / f"rep{rep:02d}.jsonl").as_posix()
        for label in labels
        for rep in range(len(logs[label]))
    ]
    report = {
        "labels": labels,
        "flagship": flagship,
        "alpha": REPORT_ALPHA,
        "alpha_per_objective": alpha,
        "tracked_objectives": list(TRACKED_OBJECTIVE_NAMES),
        "analysis_objectives": list(subset.names),
        "objective_table": objective_json,
        "pareto_counts": {label: counts[label] for label in labels},
        "hypervolume": hv_json,
        "win_tie_loss": wtl_payload,
        "provenance": {"logs": provenance},
    }
    _write_atomic_text(
        reports_dir / "report.json", json.dumps(report, sort_keys=True, indent=2) + "\n"
    )
    return reports_dir


# ---------------------------------------------------------------------------
# Statistical deep dive
# ---------------------------------------------------------------------------

def run_statistical_analysis(
    output_dir: str | Path, analysis: Optional[AnalysisOptions] = None
) -> Path:
    """Write reports/analysis.json: stability, correlations, pairwise tests."""
    output_dir = Path(output_dir)
    manifest = _manifest(output_dir)
    options = analysis or _analysis_options(output_dir, manifest)
    logs = load_campaign_logs(output_dir)
    labels = _label_order(logs, manifest)
    flagship = options.flagship
    if flagship not in logs:
        raise CampaignConfigError(f"flagship label {flagship!r} has no logs")
    alpha = REPORT_ALPHA / _OBJECTIVE_FAMILY

    # Across-repetition stability: do flagship front distributions differ by rep?
    stability: dict[str, dict] = {}
    flagship_runs = logs[flagship]
    for objective in TRACKED_OBJECTIVE_NAMES:
        groups = [
            [fv.measured.get(objective) for _ind, fv in log.final_front]
            for log in flagship_runs
        ]
        groups = [g for g in groups if g]
        entry: dict = {"groups": len(groups)}
        if len(groups) < 2:
            entry["skipped"] = "needs at least two repetitions with front members"
            stability[objective] = entry
            continue
        kw = kruskal_wallis(groups, alpha=REPORT_ALPHA)
        entry["kruskal_wallis"] = _test_to_dict(kw)
        if kw.significant:
            matrix = dunn_posthoc(groups, alpha=REPORT_ALPHA)
            pairs = []
            significant_pairs = 0
            for i in range(len(groups)):
                for j in range(i + 1, len(groups)):
                    result = matrix[i][j]
                    pairs.append(
                        {"groups": [i, j], **_test_to_dict(result)}
                    )
                    if result.significant:
                        significant_pairs += 1
            entry["dunn"] = {
                "pairs": pairs,
                "significant_fraction": significant_pairs / len(pairs),
            }
        stability[objective] = entry

    # Objective correlations over the pooled flagship front members.
    pooled = [
        [fv.measured.get(name) for name in TRACKED_OBJECTIVE_NAMES]
        for log in flagship_runs
        for _ind, fv in log.final_front
    ]
    correlations: list[dict] = []
    if len(pooled) >= 3:
        columns = list(zip(*pooled))
        for i in range(len(TRACKED_OBJECTIVE_NAMES)):
            for j in range(i + 1, len(TRACKED_OBJECTIVE_NAMES)):
                rho = spearman(columns[i], columns[j])
                correlations.append(
                    {
                        "objectives": [TRACKED_OBJECTIVE_NAMES[i], TRACKED_OBJECTIVE_NAMES[j]],
                        "spearman": _json_safe(rho),
                    }
                )

    # Pairwise flagship-versus-baseline battery on per-rep front means.
    battery: dict[str, dict] = {}
    for label in labels:
        if label == flagship:
            continue
        battery[label] = {}
        for objective in TRACKED_OBJECTIVE_NAMES:
            sign = _sign_for(objective)
            flagship_sample = [sign * v for v in _per_rep_means(flagship_runs, objective)]
            other_sample = [sign * v for v in _per_rep_means(logs[label], objective)]
            _cells, payload = _flagship_comparison(flagship_sample, other_sample, alpha)
            battery[label][objective] = payload

    payload = {
        "flagship": flagship,
        "labels": labels,
        "alpha": REPORT_ALPHA,
        "alpha_per_objective": alpha,
        "front_member_count": len(pooled),
        "stability": stability,
        "correlations": correlations,
        "pairwise": battery,
    }
    reports_dir = output_dir / "reports"
    _write_atomic_text(
        reports_dir / "analysis.json", json.dumps(payload, sort_keys=True, indent=2) + "\n"
    )
    return reports_dir
