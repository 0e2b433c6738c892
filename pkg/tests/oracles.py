"""Independent reference implementations used as test oracles.

Nothing here may delegate to the code under test: normalization, cosine,
merging, and plausibility are all recomputed from first principles so the
suites can cross-check the real implementations against them.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping

from mendkit.validate import SuiteReport


def naive_normalize(text: str) -> str:
    """str.split-based whitespace collapse (no regex)."""
    return " ".join(text.split())


def naive_cosine(a: str, b: str) -> float:
    """TF cosine over lowercased alphanumeric tokens, from raw counts."""

    def toks(s: str) -> Counter:
        out: list[str] = []
        cur = []
        for ch in s.lower():
            if ch.isalnum():
                cur.append(ch)
            elif cur:
                out.append("".join(cur))
                cur = []
        if cur:
            out.append("".join(cur))
        return Counter(out)

    ca, cb = toks(a), toks(b)
    dot = sum(ca[t] * cb[t] for t in ca)
    if not ca or not cb:
        return 0.0
    return dot / math.sqrt(sum(v * v for v in ca.values()) * sum(v * v for v in cb.values()))


def reference_merge(per_checkpoint, source_hunk: str):
    """Brute-force candidate merger mirroring the documented rules.

    Returns a list of (normalized, display, best_rank, best_score,
    provenance) tuples for field-by-field comparison.
    """
    rows = []
    for beam in per_checkpoint:
        for cand in beam:
            rows.append((cand.rank, -cand.score, cand.checkpoint, cand))
    rows.sort(key=lambda r: r[:3])

    source_norm = naive_normalize(source_hunk)
    order: list[str] = []
    first: dict[str, tuple] = {}
    prov: dict[str, list] = {}
    for _, _, _, cand in rows:
        norm = naive_normalize(cand.text)
        if norm == source_norm:
            continue
        if norm not in first:
            first[norm] = (cand.text, cand.rank, cand.score)
            prov[norm] = []
            order.append(norm)
        prov[norm].append((cand.checkpoint, cand.rank, cand.score))

    result = [
        (norm, first[norm][0], first[norm][1], first[norm][2], tuple(prov[norm]))
        for norm in order
    ]
    if source_norm:
        deletion = next((row for row in result if row[0] == ""), None)
        if deletion is None:
            deletion = ("", "", 0, 0.0, ())
        result = [deletion] + [row for row in result if row[0] != ""]
    return result


@dataclass
class TableHarness:
    """Deterministic in-process harness driven by truth tables.

    Each test maps a full hunk assignment (normalized patch text per hunk,
    source text where unpatched) to pass/fail. Tracks every executed
    patchset so validation traces can be audited.
    """

    hunk_sources: dict[str, str]  # hunk id -> source hunk text
    tests: dict[str, Callable[[dict[str, str]], bool]]
    compiles: Callable[[dict[str, str]], bool] | None = None
    excluded: frozenset[str] = frozenset()
    expected_tests: frozenset[str] | None = None
    runs: list[dict[str, str]] = field(default_factory=list)
    reports: list[SuiteReport] = field(default_factory=list)

    def assignment(self, patchset: Mapping[str, str]) -> dict[str, str]:
        return {
            hunk: naive_normalize(patchset.get(hunk, source))
            for hunk, source in self.hunk_sources.items()
        }

    def run(self, patchset: Mapping[str, str]) -> SuiteReport:
        assign = self.assignment(patchset)
        self.runs.append(dict(patchset))
        if self.compiles is not None and not self.compiles(assign):
            report = SuiteReport(compiled=False)
        else:
            outcomes = {
                test_id: ("pass" if fn(assign) else "fail")
                for test_id, fn in self.tests.items()
                if test_id not in self.excluded
            }
            report = SuiteReport(compiled=True, outcomes=outcomes)
        self.reports.append(report)
        return report


def random_multihunk_instance(rng: random.Random, max_hunks: int = 3, max_candidates: int = 5):
    """Random truth-table repair instance.

    Returns (hunk_order, sources, candidate texts per hunk, harness).
    Guarantees at least one trigger test fails on the all-source program.
    """
    h = rng.randint(1, max_hunks)
    hunk_order = [f"f.py:{10 * (i + 1)}" for i in range(h)]
    sources = {hid: f"src_{i}" for i, hid in enumerate(hunk_order)}

    pool = [f"p{j}" for j in range(max_candidates + 3)]
    candidates = {
        hid: rng.sample(pool, rng.randint(0, max_candidates)) for hid in hunk_order
    }

    options = {hid: [sources[hid]] + candidates[hid] for hid in hunk_order}
    combos = [dict(zip(hunk_order, vals)) for vals in product(*(options[h] for h in hunk_order))]
    all_source = tuple(sources[hid] for hid in hunk_order)

    n_tests = rng.randint(1, 4)
    tests: dict[str, Callable] = {}
    for t in range(n_tests):
        passing = {
            tuple(c[hid] for hid in hunk_order)
            for c in combos
            if rng.random() < rng.uniform(0.2, 0.8)
        }
        if t == 0:
            passing.discard(all_source)  # force a trigger test

        def fn(assign, _passing=frozenset(passing), _order=tuple(hunk_order)):
            return tuple(assign[hid] for hid in _order) in _passing

        tests[f"t{t}"] = fn

    harness = TableHarness(hunk_sources=sources, tests=tests)
    return hunk_order, sources, candidates, harness


def oracle_plausible_combos(hunk_order, options, harness: TableHarness):
    """Exhaustive product-space search for plausible assignments.

    Returns (baseline_passing, baseline_failing, plausible set of combo
    tuples). Plausibility: every baseline test (passing and failing)
    passes under the combo.
    """
    all_source = {hid: harness.hunk_sources[hid] for hid in hunk_order}
    base = {t: fn(harness.assignment(all_source)) for t, fn in harness.tests.items()}
    baseline_passing = {t for t, ok in base.items() if ok}
    baseline_failing = {t for t, ok in base.items() if not ok}

    plausible = set()
    for vals in product(*(options[h] for h in hunk_order)):
        assign = {hid: naive_normalize(v) for hid, v in zip(hunk_order, vals)}
        if all(fn(assign) for fn in harness.tests.values()):
            plausible.add(vals)
    return baseline_passing, baseline_failing, plausible
