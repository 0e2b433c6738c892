"""End-to-end per-bug orchestration: context, retrieval, prompt encoding,
ensemble generation, merging, validation, and report emission."""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .context import ContextSpan, context_for_hunk
from .difftext import PatchConflictError, apply_patches, render_unified_diff
from .encode import HunkExceedsBudgetError, Prompt, TokenBudget, build_prompt, fit_to_budget
from .generate import (
    EnsembleConfig,
    EnsembleWarning,
    GeneratorBackend,
    RemoteBackend,
    ReplayBackend,
    ensemble_generate,
)
from .languages import prefix_for
from .manifest import BugSpec, HunkSpec, Manifest
from .rank import MergedCandidate, merge_candidates, normalize_ws
from .retrieval import RetrievedLine, build_line_index, retrieve
from .tokenizers import DEFAULT_TOKENIZER
from .validate import (
    BaselineError,
    SandboxError,
    SubprocessHarness,
    detect_flaky,
    measure_baseline,
    validate_multi,
    validate_single,
)

log = logging.getLogger(__name__)

REPORT_VERSION = 1


@dataclass
class HunkWork:
    spec: HunkSpec
    source_text: str
    hunk_text: str
    context: ContextSpan
    retrieved: list[RetrievedLine]
    prompt: Prompt
    merged: list[MergedCandidate] = field(default_factory=list)


def make_backends(bug: BugSpec) -> list[GeneratorBackend]:
    if bug.generator.kind == "replay":
        with open(bug.generator.location, encoding="utf-8") as fh:
            beams = json.load(fh)
        return [ReplayBackend(beams_by_hunk=beams, checkpoint=cp) for cp in range(1, bug.params.k + 1)]
    return [RemoteBackend(endpoint=bug.generator.location, checkpoint=cp) for cp in range(1, bug.params.k + 1)]


def _hunk_text(source: str, spec: HunkSpec) -> str:
    lines = source.splitlines()
    start = spec.range.start - 1
    return "\n".join(lines[start : start + spec.range.length])


def prepare_hunk(bug: BugSpec, spec: HunkSpec) -> HunkWork:
    source = (bug.source_root / spec.file).read_text(encoding="utf-8")
    span = context_for_hunk(source, spec.range, bug.language)
    hunk_text = _hunk_text(source, spec)
    index = build_line_index(source, span, hunk_text, file_id=spec.file)
    retrieved = retrieve(hunk_text, index, r=bug.params.r, threshold=bug.params.threshold)
    prompt = build_prompt(prefix_for(bug.language), hunk_text, retrieved, span)
    budget = TokenBudget(bug.params.input_budget, bug.params.output_budget)
    prompt = fit_to_budget(prompt, budget, DEFAULT_TOKENIZER)
    return HunkWork(
        spec=spec,
        source_text=source,
        hunk_text=hunk_text,
        context=span,
        retrieved=retrieved,
        prompt=prompt,
    )


def make_harness(bug: BugSpec, sandbox_root: Path | None = None) -> SubprocessHarness:
    return SubprocessHarness(
        project_dir=bug.source_root,
        hunks={h.id: (h.file, h.range) for h in bug.hunks},
        test_cmd=list(bug.test_cmd),
        build_cmd=list(bug.build_cmd) if bug.build_cmd else None,
        env=dict(bug.env),
        timeout=bug.timeout,
        sandbox_root=sandbox_root,
    )


def render_patchset_diff(works: list[HunkWork], patchset: dict[str, str]) -> str:
    """Unified diff of the patchset against the pristine buggy sources."""
    by_file: dict[str, list[tuple]] = {}
    sources: dict[str, str] = {}
    for work in works:
        sources[work.spec.file] = work.source_text
        if work.spec.id in patchset:
            by_file.setdefault(work.spec.file, []).append((work.spec.range, patchset[work.spec.id]))
    chunks = []
    for path in sorted(by_file):
        lines = sources[path].splitlines()
        patched = apply_patches(lines, by_file[path])
        chunks.append(render_unified_diff("\n".join(lines) + "\n", "\n".join(patched) + "\n", path))
    return "".join(chunks)


def _exact_match(bug: BugSpec, works: list[HunkWork], patchset: dict[str, str]) -> bool | None:
    """Whitespace-normalized equality against the manifest's reference patch."""
    if bug.reference_patch is None:
        return None
    for work in works:
        ours = patchset.get(work.spec.id, work.hunk_text)
        reference = bug.reference_patch.get(work.spec.id, work.hunk_text)
        if normalize_ws(ours) != normalize_ws(reference):
            return False
    return True


def repair_bug(bug: BugSpec, sandbox_root: Path | None = None) -> dict:
    """Run the whole pipeline for one bug and return its report payload."""
    started = time.monotonic()
    warnings: list[EnsembleWarning] = []
    report: dict = {
        "schema_version": REPORT_VERSION,
        "bug_id": bug.id,
        "language": bug.language,
        "status": "error",
        "phase": None,
        "npc": 0,
        "first_plausible_rank": None,
        "patchset": {},
        "diff": "",
        "exact_match": None,
        "flaky_tests": [],
        "retrieved": {},
        "warnings": [],
        "error": None,
        "timing": {},
    }
    try:
        backends = make_backends(bug)
        cfg = EnsembleConfig(k=bug.params.k, t=bug.params.t)
        works = [prepare_hunk(bug, spec) for spec in bug.hunk_order]
        for work in works:
            per_checkpoint = ensemble_generate(
                backends, work.prompt, cfg, hunk_id=work.spec.id, warnings=warnings
            )
            work.merged = merge_candidates(per_checkpoint, work.hunk_text)
        report["retrieved"] = {
            work.spec.id: [
                {"line_no": r.line_no, "similarity": round(r.similarity, 6), "text": r.text}
                for r in work.retrieved
            ]
            for work in works
        }

        harness = make_harness(bug, sandbox_root)
        flaky = detect_flaky(harness, repeats=bug.flaky_repeats)
        harness.excluded = frozenset(flaky)
        baseline, _ = measure_baseline(harness)
        harness.expected_tests = baseline.tests
        report["flaky_tests"] = sorted(flaky)

        if len(works) == 1:
            result = validate_single(works[0].spec.id, works[0].merged, harness, baseline)
        else:
            result = validate_multi(
                [w.spec.id for w in works],
                {w.spec.id: w.merged for w in works},
                harness,
                baseline,
            )
        report.update(
            status=result.status,
            phase=result.phase,
            npc=result.npc,
            first_plausible_rank=result.first_plausible_rank,
            patchset=dict(result.patchset),
            diff=render_patchset_diff(works, result.patchset),
        )
        if result.status == "plausible":
            report["exact_match"] = _exact_match(bug, works, result.patchset)
        report["timing"] = {
            "total_s": round(time.monotonic() - started, 3),
            "validate_s": round(result.timings.get("validate_s", 0.0), 3),
        }
    except (
        BaselineError,
        SandboxError,
        PatchConflictError,
        HunkExceedsBudgetError,
        OSError,
        json.JSONDecodeError,
        UnicodeDecodeError,
    ) as exc:
        log.error("bug %s failed: %s", bug.id, exc)
        report["status"] = "error"
        report["error"] = f"{type(exc).__name__}: {exc}"
        report["timing"] = {"total_s": round(time.monotonic() - started, 3)}
    report["warnings"] = [{"checkpoint": w.checkpoint, "message": w.message} for w in warnings]
    return report


def write_report(report: dict, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{report['bug_id']}.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if report.get("diff"):
        (out_dir / f"{report['bug_id']}.diff").write_text(report["diff"], encoding="utf-8")
    return path


def repair_all(
    manifest: Manifest, out_dir: Path, jobs: int = 1, sandbox_root: Path | None = None
) -> list[dict]:
    """Repair every bug in the manifest; bug-level parallelism only."""
    if jobs <= 1:
        reports = [repair_bug(bug, sandbox_root) for bug in manifest.bugs]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda b: repair_bug(b, sandbox_root), manifest.bugs))
    for report in reports:
        write_report(report, out_dir)
    return reports


def retrieval_dump(bug: BugSpec) -> dict[str, list[RetrievedLine]]:
    """Per-hunk retrieved lines, for the debug view."""
    return {work.spec.id: work.retrieved for work in (prepare_hunk(bug, s) for s in bug.hunk_order)}
