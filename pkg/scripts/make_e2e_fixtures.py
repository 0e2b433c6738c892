#!/usr/bin/env python3
"""Generate the bundled end-to-end fixture: 10 toy buggy programs with
scripted test suites, per-bug replay candidates, and one manifest.

Output is committed under tests/fixtures/e2e/; re-running overwrites it.
Candidate lists are crafted so the expected merged lists, validation
order, and NPC per bug can be traced by hand (the traces live in
tests/test_acceptance.py next to the frozen expectations).
"""
from __future__ import annotations

import json
import shutil
import textwrap
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "e2e"

RUNNER_PREAMBLE = """\
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
skip = set(filter(None, os.environ.get("MENDKIT_SKIP_TESTS", "").split(",")))


def check(name, fn):
    if name in skip:
        return
    try:
        print(name, "pass" if fn() else "fail")
    except Exception:
        print(name, "error")


import program
"""


def runner(checks: str) -> str:
    return RUNNER_PREAMBLE + textwrap.dedent(checks)


def beam(*cands: tuple[str, float]) -> list[dict]:
    return [{"text": text, "score": score} for text, score in cands]


BUGS: list[dict] = [
    {
        # merged: ["", "+2 variant", fix]; deletion and the higher-ranked
        # wrong candidate fail first -> npc 3
        "id": "b01-scale",
        "program": """\
def scale(values, factor):
    out = []
    for v in values:
        out.append(v * factor + 1)
    return out
""",
        "checks": """
            check("t_scale", lambda: program.scale([1, 2], 3) == [3, 6])
            check("t_empty", lambda: program.scale([], 5) == [])
            check("t_len", lambda: len(program.scale([1], 2)) == 1)
            """,
        "hunks": [{"file": "program.py", "start": 4, "length": 1}],
        "replay": {
            "program.py:4": [
                beam(("        out.append(v * factor + 2)", -0.1), ("        out.append(v * factor)", -0.3)),
                beam(("        out.append(v * factor + 2)", -0.2)),
            ]
        },
    },
    {
        # the deletion patch itself is the fix -> npc 1
        "id": "b02-deletion",
        "program": """\
def total(xs):
    s = 0
    for x in xs:
        s += x
    s += 1
    return s
""",
        "checks": """
            check("t_total", lambda: program.total([1, 2, 3]) == 6)
            check("t_zero", lambda: program.total([]) == 0)
            check("t_int", lambda: isinstance(program.total([1]), int))
            """,
        "hunks": [{"file": "program.py", "start": 5, "length": 1}],
        "replay": {
            "program.py:5": [
                beam(("    s += 2", -0.2)),
                beam(("    s -= 1", -0.4)),
            ]
        },
    },
    {
        # four-line hunk replaced as one candidate; deletion fails -> npc 2
        "id": "b03-multiline",
        "program": """\
def clamp(v, lo, hi):
    if v < lo:
        return hi
    if v > hi:
        return lo
    return v
""",
        "checks": """
            check("t_low", lambda: program.clamp(-5, 0, 10) == 0)
            check("t_high", lambda: program.clamp(15, 0, 10) == 10)
            check("t_mid", lambda: program.clamp(5, 0, 10) == 5)
            """,
        "hunks": [{"file": "program.py", "start": 2, "length": 4}],
        "replay": {
            "program.py:2": [
                beam(("    if v < lo:\n        return lo\n    if v > hi:\n        return hi", -0.5)),
                beam(),
            ]
        },
    },
    {
        # insertion point (length 0): no deletion patch, retrieval skipped;
        # wrong insert then the sort -> npc 2
        "id": "b04-insertion",
        "program": """\
def ordered(xs):
    items = list(xs)
    return items
""",
        "checks": """
            check("t_sorted", lambda: program.ordered([3, 1, 2]) == [1, 2, 3])
            check("t_empty", lambda: program.ordered([]) == [])
            check("t_copy", lambda: (lambda src: (program.ordered(src), src == [3, 1])[1])([3, 1]))
            """,
        "hunks": [{"file": "program.py", "start": 3, "length": 0}],
        "replay": {
            "program.py:3": [
                beam(("    items.reverse()", -0.3), ("    items.sort()", -0.6)),
                beam(("    items.reverse()", -0.2)),
            ]
        },
    },
    {
        # no replay entry: merged list is the deletion patch alone -> npc 1,
        # exhausted
        "id": "b05-exhausted",
        "program": """\
def greet(name):
    return "Hi " + name + "!!"
""",
        "checks": """
            check("t_greet", lambda: program.greet("Bo") == "Hello Bo")
            check("t_str", lambda: isinstance(program.greet("x"), str))
            """,
        "hunks": [{"file": "program.py", "start": 2, "length": 1}],
        "replay": {},
    },
    {
        # suite carries a cyclically flaky test (fails every third run via a
        # counter outside the sandbox); screening must exclude it -> npc 2
        "id": "b06-flaky",
        "program": """\
def parity(n):
    return n % 2 == 1
""",
        "checks": """
            def cycle_flaky():
                path = os.path.join(tempfile.gettempdir(), "mendkit-e2e-b06.counter")
                n = int(open(path).read()) if os.path.exists(path) else 0
                open(path, "w").write(str(n + 1))
                return n % 3 != 2

            check("t_even", lambda: program.parity(2) is True)
            check("t_odd", lambda: program.parity(3) is False)
            check("t_cycle", cycle_flaky)
            """,
        "hunks": [{"file": "program.py", "start": 2, "length": 1}],
        "replay": {
            "program.py:2": [
                beam(("    return n % 2 == 0", -0.1)),
                beam(),
            ]
        },
        "flaky_repeats": 5,
    },
    {
        # the repair ingredient (DEFAULT_LIMIT) lives outside the enclosing
        # function; retrieval surfaces it -> npc 2
        "id": "b07-retrieval",
        "program": """\
DEFAULT_LIMIT = 50

def capped(values):
    limit = 10
    return [min(v, limit) for v in values]

def fallback():
    limit = DEFAULT_LIMIT
    return limit
""",
        "checks": """
            check("t_cap", lambda: program.capped([100]) == [50])
            check("t_small", lambda: program.capped([3]) == [3])
            """,
        "hunks": [{"file": "program.py", "start": 4, "length": 1}],
        "replay": {
            "program.py:4": [
                beam(("    limit = DEFAULT_LIMIT", -0.2)),
                beam(("    limit = 99", -0.5)),
            ]
        },
    },
    {
        # Phase 1 multi-hunk: the same starred patch fixes both hunks;
        # uniform list ["", scale=2, scale=1] -> npc 3
        "id": "b08-uniform",
        "program": """\
def area(w, h):
    scale = 3
    return w * h * scale

def perimeter(w, h):
    scale = 3
    return 2 * (w + h) * scale
""",
        "checks": """
            check("t_area", lambda: program.area(2, 3) == 6)
            check("t_perim", lambda: program.perimeter(1, 2) == 6)
            check("t_zero", lambda: program.area(0, 5) == 0)
            """,
        "hunks": [
            {"file": "program.py", "start": 2, "length": 1},
            {"file": "program.py", "start": 6, "length": 1},
        ],
        "replay": {
            "program.py:2": [
                beam(("    scale = 2", -0.1), ("    scale = 1", -0.4)),
                beam(("    scale = 1", -0.3)),
            ],
            "program.py:6": [
                beam(("    scale = 2", -0.1), ("    scale = 1", -0.4)),
                beam(("    scale = 1", -0.3)),
            ],
        },
    },
    {
        # Phase 2 multi-hunk: hunk 1 keeps source (no improving candidate),
        # hunk 2 lands a partial, hunk 3 completes the fix -> npc 7
        "id": "b09-sequential",
        "program": """\
def stats(xs):
    total = 0
    for x in xs:
        total += x
    count = len(xs) + 1
    mean = total / count if count else 0
    top = max(xs) if xs else -1
    return total, mean, top
""",
        "checks": """
            check("t_sum", lambda: program.stats([1, 2, 3])[0] == 6)
            check("t_mean", lambda: program.stats([2, 4])[1] == 3)
            check("t_top", lambda: program.stats([])[2] == 0)
            """,
        "hunks": [
            {"file": "program.py", "start": 2, "length": 1},
            {"file": "program.py", "start": 5, "length": 1},
            {"file": "program.py", "start": 7, "length": 1},
        ],
        "replay": {
            "program.py:2": [
                beam(("    total = 1", -0.2)),
                beam(),
            ],
            "program.py:5": [
                beam(("    count = len(xs)", -0.3)),
                beam(("    count = len(xs) - 1", -0.6)),
            ],
            "program.py:7": [
                beam(("    top = max(xs) if xs else 0", -0.4)),
                beam(),
            ],
        },
    },
    {
        # an infinite-loop candidate hits the per-candidate timeout before
        # the real fix; reference patch checks the exact-match flag -> npc 3
        "id": "b10-timeout",
        "program": """\
def repeat(s, n):
    return s * (n + 1)
""",
        "checks": """
            check("t_rep", lambda: program.repeat("ab", 2) == "abab")
            check("t_zero", lambda: program.repeat("x", 0) == "")
            check("t_str", lambda: isinstance(program.repeat("a", 1), str))
            """,
        "hunks": [{"file": "program.py", "start": 2, "length": 1}],
        "replay": {
            "program.py:2": [
                beam(("    while True:\n        pass\n    return s * n", -0.1), ("    return s * n", -0.5)),
                beam(),
            ]
        },
        "timeout": 3,
        "reference_patch": {"program.py:2": "    return s * n"},
    },
]


def main() -> None:
    if OUT.exists():
        shutil.rmtree(OUT)
    bugs_dir = OUT / "bugs"
    bugs_dir.mkdir(parents=True)

    manifest_bugs = []
    for bug in BUGS:
        short = bug["id"].split("-")[0]
        bug_dir = bugs_dir / short
        bug_dir.mkdir()
        (bug_dir / "program.py").write_text(bug["program"])
        (bug_dir / "run_tests.py").write_text(runner(bug["checks"]))
        (bug_dir / "replay.json").write_text(json.dumps(bug["replay"], indent=2) + "\n")
        manifest_bugs.append(
            {
                "id": bug["id"],
                "language": "python",
                "source_root": f"bugs/{short}",
                "hunks": bug["hunks"],
                "test_cmd": ["python3", "run_tests.py"],
                "timeout": bug.get("timeout", 10),
                "flaky_repeats": bug.get("flaky_repeats", 2),
                "generator": {"type": "replay", "path": f"bugs/{short}/replay.json"},
                "params": {"k": 2, "t": 5},
                **({"reference_patch": bug["reference_patch"]} if "reference_patch" in bug else {}),
            }
        )

    manifest = {"version": 1, "bugs": manifest_bugs}
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(BUGS)} bugs under {OUT}")


if __name__ == "__main__":
    main()
