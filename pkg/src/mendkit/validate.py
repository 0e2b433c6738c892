"""Patch validation against project test suites.

Covers flaky-test screening, baseline measurement, single-hunk
validation, and the two-phase multi-hunk procedure: first uniform
("starred") patches applied identically to every hunk, then sequential
per-hunk search that accepts partial patches and keeps the source content
for hunks no candidate improves. NPC counts one per candidate suite
execution.
"""
from __future__ import annotations

import logging
import os
import re
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Protocol

from .context import LineRange
from .difftext import apply_patches
from .rank import MergedCandidate, uniform_candidates

log = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
ERROR = "error"
TIMEOUT = "timeout"

SANDBOX_ENV_VAR = "MENDKIT_SANDBOX_DIR"
SKIP_ENV_VAR = "MENDKIT_SKIP_TESTS"


class SandboxError(Exception):
    """The isolated working copy could not be prepared or executed."""


class BaselineError(Exception):
    """The unpatched project cannot anchor a repair (bad manifest)."""


@dataclass(frozen=True)
class SuiteReport:
    compiled: bool
    outcomes: dict[str, str] = field(default_factory=dict)  # test id -> outcome
    wall_time: float = 0.0


@dataclass(frozen=True)
class Baseline:
    passing: frozenset[str]
    failing: frozenset[str]  # trigger tests
    flaky: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.passing & self.failing or self.flaky & (self.passing | self.failing):
            raise ValueError("baseline test sets must be disjoint")

    @property
    def tests(self) -> frozenset[str]:
        return self.passing | self.failing


@dataclass
class MultiHunkState:
    hunk_order: list[str]
    chosen: dict[str, str]  # hunk id -> patch text; absent = source content
    baseline: Baseline  # current baseline; shrinks as partials land
    npc: int = 0
    phase: str = "uniform"  # uniform | sequential | done


@dataclass(frozen=True)
class RepairResult:
    status: str  # plausible | exhausted | error
    patchset: dict[str, str]  # hunk id -> patch text (source-kept hunks absent)
    npc: int
    # 1-based position of the winning candidate within the list being
    # walked when it validated: the merged list for single-hunk bugs, the
    # uniform list in phase 1, the fixing hunk's merged list in phase 2
    first_plausible_rank: int | None = None
    timings: dict[str, float] = field(default_factory=dict)
    phase: str | None = None  # single | uniform | sequential


class TestHarness(Protocol):
    """Executes the suite with a patchset applied; (), i.e. no patches,
    runs the pristine buggy project."""

    excluded: frozenset[str]

    def run(self, patchset: Mapping[str, str]) -> SuiteReport: ...


_RESULT_LINE = re.compile(r"^(\S+)\s+(pass|fail|error)\s*$")


@dataclass
class SubprocessHarness:
    """Runs a per-bug command set in a throwaway copy of the project.

    The test command must print one `<test-id> <pass|fail|error>` line per
    test; a nonzero exit with no parseable output counts as a compile/run
    error. Excluded (flaky) tests are announced to the suite through the
    MENDKIT_SKIP_TESTS environment variable and are always dropped from
    reports, so they can never influence validation.
    """

    project_dir: Path
    hunks: dict[str, tuple[str, LineRange]]  # hunk id -> (relative file, range)
    test_cmd: list[str]
    build_cmd: list[str] | None = None
    env: dict[str, str] = field(default_factory=dict)
    timeout: float = 60.0
    sandbox_root: Path | None = None
    excluded: frozenset[str] = frozenset()
    expected_tests: frozenset[str] | None = None

    def run(self, patchset: Mapping[str, str]) -> SuiteReport:
        started = time.monotonic()
        root = self.sandbox_root or os.environ.get(SANDBOX_ENV_VAR)
        workdir = Path(tempfile.mkdtemp(prefix="mendkit-", dir=root))
        try:
            target = workdir / "project"
            try:
                shutil.copytree(self.project_dir, target)
            except OSError as exc:
                raise SandboxError(f"cannot stage working copy: {exc}") from exc
            self._apply(target, patchset)

            env = dict(os.environ)
            env.update(self.env)
            env[SKIP_ENV_VAR] = ",".join(sorted(self.excluded))

            if self.build_cmd:
                build = self._exec(self.build_cmd, target, env)
                if build is None or build.returncode != 0:
                    return SuiteReport(compiled=False, wall_time=time.monotonic() - started)

            timed_out = False
            try:
                proc = subprocess.run(
                    self.test_cmd,
                    cwd=target,
                    env=env,
                    capture_output=True,
                    timeout=self.timeout,
                )
                stdout = proc.stdout.decode("utf-8", errors="replace")
                returncode = proc.returncode
            except subprocess.TimeoutExpired as exc:
                stdout = (exc.stdout or b"").decode("utf-8", errors="replace")
                returncode = 0
                timed_out = True
            except OSError as exc:
                raise SandboxError(f"cannot launch test command: {exc}") from exc

            outcomes = self._parse(stdout)
            if timed_out:
                pending = (self.expected_tests or frozenset()) - outcomes.keys()
                for test_id in pending:
                    outcomes[test_id] = TIMEOUT
                if not outcomes:
                    outcomes = {"<suite>": TIMEOUT}
            elif returncode != 0 and not outcomes:
                return SuiteReport(compiled=False, wall_time=time.monotonic() - started)

            outcomes = {t: o for t, o in outcomes.items() if t not in self.excluded}
            return SuiteReport(compiled=True, outcomes=outcomes, wall_time=time.monotonic() - started)
        finally:
            shutil.rmtree(workdir, ignore_errors=True)

    def _apply(self, target: Path, patchset: Mapping[str, str]) -> None:
        by_file: dict[str, list[tuple[LineRange, str]]] = {}
        for hunk_id, text in patchset.items():
            if hunk_id not in self.hunks:
                raise SandboxError(f"patchset names unknown hunk {hunk_id!r}")
            rel_path, rng = self.hunks[hunk_id]
            by_file.setdefault(rel_path, []).append((rng, text))
        for rel_path, patches in by_file.items():
            path = target / rel_path
            lines = path.read_text(encoding="utf-8").splitlines()
            path.write_text("\n".join(apply_patches(lines, patches)) + "\n", encoding="utf-8")

    def _exec(self, cmd: list[str], cwd: Path, env: dict[str, str]):
        try:
            return subprocess.run(cmd, cwd=cwd, env=env, capture_output=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            return None
        except OSError as exc:
            raise SandboxError(f"cannot launch build command: {exc}") from exc

    @staticmethod
    def _parse(stdout: str) -> dict[str, str]:
        outcomes: dict[str, str] = {}
        for line in stdout.splitlines():
            m = _RESULT_LINE.match(line.strip())
            if m:
                outcomes[m.group(1)] = m.group(2)
        return outcomes


def detect_flaky(harness: TestHarness, tests: set[str] | None = None, repeats: int = 5) -> set[str]:
    """Tests whose outcome is not stable across repeated unpatched runs.

    A test missing from some runs but not others also counts as flaky.
    """
    if repeats < 2:
        raise ValueError("flaky screening needs at least 2 repeats")
    runs = [harness.run({}) for _ in range(repeats)]
    candidates = set(tests) if tests is not None else {t for r in runs for t in r.outcomes}
    return {t for t in candidates if len({r.outcomes.get(t) for r in runs}) > 1}


def measure_baseline(harness: TestHarness) -> tuple[Baseline, SuiteReport]:
    """One unpatched run after screening; splits tests into passing/failing.

    A buggy project with no failing non-flaky test has nothing to repair
    and is rejected as a manifest error.
    """
    report = harness.run({})
    if not report.compiled:
        raise BaselineError("unpatched project does not build/run")
    passing = frozenset(t for t, o in report.outcomes.items() if o == PASS)
    failing = frozenset(report.outcomes) - passing
    if not failing:
        raise BaselineError("unpatched suite has no failing non-flaky test")
    return Baseline(passing=passing, failing=failing, flaky=harness.excluded), report


def is_plausible(report: SuiteReport, baseline: Baseline) -> bool:
    """All originally passing tests still pass and every trigger passes."""
    return report.compiled and all(report.outcomes.get(t) == PASS for t in baseline.tests)


def is_partial(report: SuiteReport, baseline: Baseline) -> bool:
    """No regression, at least one trigger newly passes, but not all."""
    if not report.compiled:
        return False
    if not all(report.outcomes.get(t) == PASS for t in baseline.passing):
        return False
    fixed = sum(1 for t in baseline.failing if report.outcomes.get(t) == PASS)
    return 0 < fixed < len(baseline.failing)


def validate_single(
    hunk_id: str,
    merged: list[MergedCandidate],
    harness: TestHarness,
    baseline: Baseline,
) -> RepairResult:
    """Walk the ranked list top-down until the first plausible candidate."""
    started = time.monotonic()
    npc = 0
    for position, cand in enumerate(merged, start=1):
        report = harness.run({hunk_id: cand.display})
        npc += 1
        if is_plausible(report, baseline):
            return RepairResult(
                status="plausible",
                patchset={hunk_id: cand.display},
                npc=npc,
                first_plausible_rank=position,
                timings={"validate_s": time.monotonic() - started},
                phase="single",
            )
    return RepairResult(
        status="exhausted",
        patchset={},
        npc=npc,
        timings={"validate_s": time.monotonic() - started},
        phase="single",
    )


def validate_multi(
    hunk_order: list[str],
    per_hunk_merged: Mapping[str, list[MergedCandidate]],
    harness: TestHarness,
    baseline: Baseline,
) -> RepairResult:
    """Two-phase multi-hunk validation.

    Phase 1 tries every uniform candidate (same normalized text in all
    hunks, applied with each hunk's own spelling). Phase 2 walks hunks in
    order, validating each hunk's candidates against the patchset built so
    far: a plausible run ends the search, a partial one is locked in and
    shrinks the failing set, and a hunk with no improving candidate keeps
    its source content.
    """
    started = time.monotonic()
    if len(hunk_order) < 2:
        raise ValueError("multi-hunk validation needs at least 2 hunks")
    lists = [per_hunk_merged[h] for h in hunk_order]
    display_maps = [{m.normalized: m.display for m in lst} for lst in lists]
    state = MultiHunkState(hunk_order=list(hunk_order), chosen={}, baseline=baseline)

    def finish(status: str, patchset: dict[str, str], rank: int | None, phase: str) -> RepairResult:
        state.phase = "done"
        return RepairResult(
            status=status,
            patchset=patchset,
            npc=state.npc,
            first_plausible_rank=rank,
            timings={"validate_s": time.monotonic() - started},
            phase=phase,
        )

    # Phase 1: uniform ("starred") patches across all hunks.
    for position, uniform in enumerate(uniform_candidates(lists), start=1):
        patchset = {
            hunk_id: display_maps[i][uniform.normalized] for i, hunk_id in enumerate(hunk_order)
        }
        report = harness.run(patchset)
        state.npc += 1
        if is_plausible(report, baseline):
            return finish("plausible", patchset, position, "uniform")

    # Phase 2: per-hunk sequential search with partial retention.
    state.phase = "sequential"
    for hunk_id in hunk_order:
        for position, cand in enumerate(per_hunk_merged[hunk_id], start=1):
            patchset = dict(state.chosen)
            patchset[hunk_id] = cand.display
            report = harness.run(patchset)
            state.npc += 1
            if is_plausible(report, baseline):
                return finish("plausible", patchset, position, "sequential")
            if is_partial(report, state.baseline):
                newly_fixed = frozenset(
                    t for t in state.baseline.failing if report.outcomes.get(t) == PASS
                )
                state.chosen[hunk_id] = cand.display
                state.baseline = replace(
                    state.baseline,
                    passing=state.baseline.passing | newly_fixed,
                    failing=state.baseline.failing - newly_fixed,
                )
                break
        # no improving candidate: hunk keeps its source content

    return finish("exhausted", dict(state.chosen), None, "sequential")
