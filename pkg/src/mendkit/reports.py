"""Aggregation of per-bug repair reports into summary statistics."""
from __future__ import annotations

import json
import statistics
from pathlib import Path

TOP_THRESHOLDS = (1, 5, 10, 50, 100, 200, 500)


def collect_reports(reports_dir: str | Path) -> list[dict]:
    """All per-bug report payloads in a directory, sorted by bug id."""
    reports = []
    for path in sorted(Path(reports_dir).glob("*.json")):
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(payload, dict) and "bug_id" in payload:
            reports.append(payload)
    return reports


def _spread(values: list[int]) -> dict:
    if not values:
        return {"count": 0, "min": None, "max": None, "median": None, "mean": None}
    return {
        "count": len(values),
        "min": min(values),
        "max": max(values),
        "median": statistics.median(values),
        "mean": round(statistics.fmean(values), 4),
    }


def summarize(reports: list[dict]) -> dict:
    """NPC and first-plausible-rank spreads plus top-k rank counts."""
    statuses = [r.get("status") for r in reports]
    npc = [r["npc"] for r in reports if r.get("status") == "plausible"]
    ranks = [
        r["first_plausible_rank"]
        for r in reports
        if r.get("status") == "plausible" and r.get("first_plausible_rank") is not None
    ]
    return {
        "bugs": len(reports),
        "plausible": statuses.count("plausible"),
        "exhausted": statuses.count("exhausted"),
        "error": statuses.count("error"),
        "npc_until_plausible": _spread(npc),
        "first_plausible_rank": _spread(ranks),
        "top_counts": {str(k): sum(1 for r in ranks if r <= k) for k in TOP_THRESHOLDS},
    }


def format_summary(summary: dict) -> str:
    lines = [
        "bugs: {bugs}  plausible: {plausible}  exhausted: {exhausted}  error: {error}".format(**summary),
        "",
        f"{'metric':<24}{'n':>5}{'min':>8}{'max':>8}{'median':>9}{'mean':>10}",
    ]
    for label, key in (("npc until plausible", "npc_until_plausible"), ("first plausible rank", "first_plausible_rank")):
        s = summary[key]
        if s["count"] == 0:
            lines.append(f"{label:<24}{0:>5}{'-':>8}{'-':>8}{'-':>9}{'-':>10}")
        else:
            lines.append(
                f"{label:<24}{s['count']:>5}{s['min']:>8}{s['max']:>8}{s['median']:>9}{s['mean']:>10}"
            )
    tops = summary["top_counts"]
    lines.append("")
    lines.append("fixed within rank: " + "  ".join(f"top-{k}={tops[str(k)]}" for k in TOP_THRESHOLDS))
    return "\n".join(lines)
