"""Command line interface: mine, repair, retrieve, stats."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .corpus import TrainingInstance, extract_instances, preprocess_with_counts, write_instances
from .difftext import parse_unified_diff, reconstruct_pair
from .languages import LANGUAGES, language_for_path
from .manifest import ManifestError, load_manifest
from .pipeline import repair_all, retrieval_dump
from .reports import collect_reports, format_summary, summarize

log = logging.getLogger(__name__)

RULE_ORDER = ("extracted", "duplicate", "identical", "empty_fixed", "over_budget", "kept")


def mine_directory(
    input_dir: str | Path, language: str | None = None
) -> tuple[list[TrainingInstance], dict[str, int], list[TrainingInstance]]:
    """Extract and preprocess instances from paired files or diffs.

    Returns (kept instances, per-rule counts, raw extracted instances).
    Pairs are `<id>.buggy`/`<id>.fixed` files; `.diff`/`.patch` files are
    mined from their reconstructed hunk fragments.
    """
    input_dir = Path(input_dir)
    raw: list[TrainingInstance] = []
    for path in sorted(input_dir.iterdir()):
        if path.suffix == ".buggy":
            fixed = path.with_suffix(".fixed")
            if not fixed.is_file():
                log.warning("skipping %s: no matching .fixed file", path.name)
                continue
            lang = language or language_for_path(path.stem)
            if lang not in LANGUAGES:
                log.warning("skipping %s: cannot determine language", path.name)
                continue
            raw.extend(
                extract_instances(
                    path.read_text(encoding="utf-8"),
                    fixed.read_text(encoding="utf-8"),
                    lang,
                    source_id=path.stem,
                )
            )
        elif path.suffix in (".diff", ".patch"):
            for file_diff in parse_unified_diff(path.read_text(encoding="utf-8")):
                lang = language or language_for_path(file_diff.old_path) or language_for_path(file_diff.new_path)
                if lang not in LANGUAGES:
                    log.warning("skipping %s (%s): cannot determine language", path.name, file_diff.old_path)
                    continue
                old_text, new_text = reconstruct_pair(file_diff)
                raw.extend(
                    extract_instances(old_text, new_text, lang, source_id=f"{path.name}:{file_diff.old_path}")
                )
    kept, counts = preprocess_with_counts(raw)
    return kept, counts, raw


def cmd_mine(args: argparse.Namespace) -> int:
    try:
        kept, counts, raw = mine_directory(args.input_dir, language=args.language)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_path = Path(args.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        write_instances(kept, fh)
    if args.raw_dump:
        with open(args.raw_dump, "w", encoding="utf-8") as fh:
            write_instances(raw, fh)
    for key in RULE_ORDER:
        label = key if key in ("extracted", "kept") else f"removed {key}"
        print(f"{label} {counts[key]}")
    return 0


def cmd_repair(args: argparse.Namespace) -> int:
    overrides = {
        "r": args.r,
        "threshold": args.threshold,
        "t": args.beam,
        "k": args.checkpoints,
        "timeout": args.timeout,
    }
    try:
        manifest = load_manifest(args.manifest, overrides=overrides)
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    reports = repair_all(manifest, out_dir, jobs=args.jobs)
    for report in reports:
        rank = report["first_plausible_rank"]
        print(
            f"{report['bug_id']}: {report['status']}"
            f" npc={report['npc']}"
            + (f" rank={rank}" if rank is not None else "")
            + (f" ({report['error']})" if report.get("error") else "")
        )
    failed = sum(1 for r in reports if r["status"] == "error")
    print(f"processed {len(reports)} bugs -> {out_dir}")
    return 1 if failed else 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    try:
        manifest = load_manifest(args.manifest)
        bug = manifest.bug(args.bug_id)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for hunk_id, lines in retrieval_dump(bug).items():
        print(f"hunk {hunk_id}: {len(lines)} retrieved")
        for line in lines:
            print(f"  {line.similarity:.6f} line {line.line_no}: {line.text}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    reports_dir = Path(args.reports_dir)
    reports = collect_reports(reports_dir) if reports_dir.is_dir() else []
    summary = summarize(reports)
    print(format_summary(summary))
    if reports_dir.is_dir():
        (reports_dir / "stats.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mendkit", description="Test-suite-driven program repair engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mine = sub.add_parser("mine", help="extract and preprocess training instances")
    p_mine.add_argument("input_dir")
    p_mine.add_argument("output")
    p_mine.add_argument("--language", choices=LANGUAGES, default=None, help="override language detection")
    p_mine.add_argument("--raw-dump", default=None, help="also write pre-preprocessing instances here")
    p_mine.set_defaults(func=cmd_mine)

    p_repair = sub.add_parser("repair", help="repair every bug in a manifest")
    p_repair.add_argument("manifest")
    p_repair.add_argument("--out", required=True, help="report output directory")
    p_repair.add_argument("--jobs", type=int, default=1)
    p_repair.add_argument("--r", type=int, default=None, help="retrieved lines per hunk")
    p_repair.add_argument("--threshold", type=float, default=None, help="retrieval similarity threshold")
    p_repair.add_argument("--beam", type=int, default=None, help="beam size t")
    p_repair.add_argument("--checkpoints", type=int, default=None, help="ensemble size k")
    p_repair.add_argument("--timeout", type=float, default=None, help="per-candidate suite timeout (s)")
    p_repair.set_defaults(func=cmd_repair)

    p_retrieve = sub.add_parser("retrieve", help="show retrieved lines for one bug")
    p_retrieve.add_argument("manifest")
    p_retrieve.add_argument("bug_id")
    p_retrieve.set_defaults(func=cmd_retrieve)

    p_stats = sub.add_parser("stats", help="aggregate repair reports")
    p_stats.add_argument("reports_dir")
    p_stats.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
