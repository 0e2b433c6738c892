#!/usr/bin/env python3
"""Generate the bundled 50-pair mini-corpus under tests/fixtures/minicorpus/.

Pair composition (one extracted instance per change hunk):
  36 ordinary fix pairs across java/python/c/javascript, four of which
     change two separated regions (two hunks each) -> 40 instances
   4 comment-only changes (identical hunks once comments are stripped)
   3 byte-identical pairs (a duplicate trio; two fall to deduplication)
   3 pure deletions (empty fixed hunk)
   2 whitespace-only changes
   2 over-budget hunks (one buggy side > 512 tokens, one fixed > 256)

Re-running overwrites the directory. The per-rule removal counts frozen in
the acceptance suite come from scripts/naive_preprocess_counts.py, not
from the mendkit implementation.
"""
from __future__ import annotations

import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures" / "minicorpus"

LANGS = ["java", "python", "c", "javascript"]
EXT = {"java": "java", "python": "py", "c": "c", "javascript": "js"}


def clean_pair(lang: str, n: int, two_hunks: bool) -> tuple[str, str]:
    if lang == "python":
        buggy = [
            f"def calc_{n}(a, b):",
            f"    left = a * {n}",
            "    right = b + 2",
            "    mid = left - right",
            "    return mid + 1",
        ]
        fixed = list(buggy)
        fixed[1] = f"    left = a * {n + 1}"
        if two_hunks:
            fixed[4] = "    return mid"
    elif lang == "java":
        buggy = [
            f"public class Calc{n} {{",
            f"    public int calc(int a, int b) {{",
            f"        int left = a * {n};",
            "        int right = b + 2;",
            "        int mid = left - right;",
            "        return mid + 1;",
            "    }",
            "}",
        ]
        fixed = list(buggy)
        fixed[2] = f"        int left = a * {n + 1};"
        if two_hunks:
            fixed[5] = "        return mid;"
    elif lang == "c":
        buggy = [
            f"int calc_{n}(int a, int b) {{",
            f"    int left = a * {n};",
            "    int right = b + 2;",
            "    int mid = left - right;",
            "    return mid + 1;",
            "}",
        ]
        fixed = list(buggy)
        fixed[1] = f"    int left = a * {n + 1};"
        if two_hunks:
            fixed[4] = "    return mid;"
    else:
        buggy = [
            f"function calc{n}(a, b) {{",
            f"  let left = a * {n};",
            "  let right = b + 2;",
            "  let mid = left - right;",
            "  return mid + 1;",
            "}",
        ]
        fixed = list(buggy)
        fixed[1] = f"  let left = a * {n + 1};"
        if two_hunks:
            fixed[4] = "  return mid;"
    return "\n".join(buggy) + "\n", "\n".join(fixed) + "\n"


def comment_pair(lang: str, n: int) -> tuple[str, str]:
    if lang == "python":
        buggy = [f"def noted_{n}():", "    # alpha note", "    return 1"]
        fixed = [f"def noted_{n}():", "    # beta note", "    return 1"]
    elif lang == "java":
        buggy = [f"class Note{n} {{", "    int f() {", "        // alpha note", "        return 1;", "    }", "}"]
        fixed = [f"class Note{n} {{", "    int f() {", "        // beta note", "        return 1;", "    }", "}"]
    elif lang == "c":
        buggy = [f"int noted_{n}(void) {{", "    /* alpha note */", "    return 1;", "}"]
        fixed = [f"int noted_{n}(void) {{", "    /* beta note */", "    return 1;", "}"]
    else:
        buggy = [f"function noted{n}() {{", "  // alpha note", "  return 1;", "}"]
        fixed = [f"function noted{n}() {{", "  // beta note", "  return 1;", "}"]
    return "\n".join(buggy) + "\n", "\n".join(fixed) + "\n"


def deletion_pair(lang: str, n: int) -> tuple[str, str]:
    if lang == "python":
        buggy = [f"def drop_{n}(xs):", "    s = sum(xs)", "    s += 1", "    return s"]
        fixed = [f"def drop_{n}(xs):", "    s = sum(xs)", "    return s"]
    else:
        buggy = [f"int drop_{n}(int s) {{", "    s += 1;", "    return s;", "}"]
        fixed = [f"int drop_{n}(int s) {{", "    return s;", "}"]
    return "\n".join(buggy) + "\n", "\n".join(fixed) + "\n"


def whitespace_pair(lang: str, n: int) -> tuple[str, str]:
    if lang == "c":
        buggy = [f"int ws_{n}(void) {{", "    int x = 1 ;", "    return x;", "}"]
        fixed = [f"int ws_{n}(void) {{", "    int x = 1;", "    return x;", "}"]
    else:
        buggy = [f"def ws_{n}():", "    x = ( 1 , 2 )", "    return x"]
        fixed = [f"def ws_{n}():", "    x = (1, 2)", "    return x"]
    return "\n".join(buggy) + "\n", "\n".join(fixed) + "\n"


def over_budget_pair(side: str, n: int) -> tuple[str, str]:
    big = " + ".join(f"v{i}" for i in range(400))  # ~1200 tokens
    if side == "buggy":
        buggy = [f"def big_{n}():", f"    return {big}", ""]
        fixed = [f"def big_{n}():", "    return 0", ""]
    else:
        buggy = [f"def big_{n}():", "    return 0", ""]
        fixed = [f"def big_{n}():", f"    return {big}", ""]
    return "\n".join(buggy), "\n".join(fixed)


def main() -> None:
    if OUT.exists():
        shutil.rmtree(OUT)
    OUT.mkdir(parents=True)

    pairs: list[tuple[str, str, str]] = []  # (name stem incl. ext, buggy, fixed)
    serial = 0

    def add(lang: str, buggy: str, fixed: str) -> None:
        nonlocal serial
        serial += 1
        pairs.append((f"p{serial:03d}.{EXT[lang]}", buggy, fixed))

    for i in range(36):
        lang = LANGS[i % 4]
        add(lang, *clean_pair(lang, i, two_hunks=(i < 4)))
    for i, lang in enumerate(LANGS):
        add(lang, *comment_pair(lang, i))
    dup = clean_pair("python", 900, two_hunks=False)
    for _ in range(3):
        add("python", *dup)
    for i, lang in enumerate(["python", "c", "c"]):
        add(lang, *deletion_pair(lang, i))
    for i, lang in enumerate(["c", "python"]):
        add(lang, *whitespace_pair(lang, i))
    add("python", *over_budget_pair("buggy", 0))
    add("python", *over_budget_pair("fixed", 1))

    assert len(pairs) == 50, len(pairs)
    for stem, buggy, fixed in pairs:
        (OUT / f"{stem}.buggy").write_text(buggy)
        (OUT / f"{stem}.fixed").write_text(fixed)
    print(f"wrote {len(pairs)} pairs under {OUT}")


if __name__ == "__main__":
    main()
