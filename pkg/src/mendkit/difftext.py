"""Line-level diff hunking, unified-diff rendering/parsing, and patch
application at declared line ranges."""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field

from .context import LineRange


class PatchConflictError(Exception):
    """Patch ranges overlap or fall outside the file."""


@dataclass(frozen=True)
class DiffHunk:
    """One contiguous change between two line sequences, zero context.

    `a_start`/`b_start` are 1-based; a zero-length side marks the insertion
    point before that line, matching LineRange semantics.
    """

    a_start: int
    a_length: int
    b_start: int
    b_length: int
    a_lines: tuple[str, ...]
    b_lines: tuple[str, ...]

    @property
    def a_range(self) -> LineRange:
        return LineRange(self.a_start, self.a_length)


def line_hunks(a_lines: list[str], b_lines: list[str]) -> list[DiffHunk]:
    """Contiguous changed regions between two line lists, in file order.

    Uses longest-matching-block alignment; adjacent non-equal opcodes are
    coalesced so each hunk is one maximal changed region.
    """
    matcher = difflib.SequenceMatcher(None, a_lines, b_lines, autojunk=False)
    hunks: list[DiffHunk] = []
    pending: list[tuple[int, int, int, int]] = []

    def flush() -> None:
        if not pending:
            return
        i1, j1 = pending[0][0], pending[0][2]
        i2, j2 = pending[-1][1], pending[-1][3]
        hunks.append(
            DiffHunk(
                a_start=i1 + 1,
                a_length=i2 - i1,
                b_start=j1 + 1,
                b_length=j2 - j1,
                a_lines=tuple(a_lines[i1:i2]),
                b_lines=tuple(b_lines[j1:j2]),
            )
        )
        pending.clear()

    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            flush()
        else:
            pending.append((i1, i2, j1, j2))
    flush()
    return hunks


def apply_patches(lines: list[str], patches: list[tuple[LineRange, str]]) -> list[str]:
    """Replace each range with the patch text's lines (empty text deletes;
    a zero-length range inserts before its start line).

    Ranges refer to the *original* line numbering; overlapping ranges are a
    conflict.
    """
    n = len(lines)
    ordered = sorted(patches, key=lambda p: (p[0].start, p[0].length))
    for (r1, _), (r2, _) in zip(ordered, ordered[1:]):
        if r1.start + r1.length > r2.start or r1.start == r2.start:
            raise PatchConflictError(f"overlapping ranges {r1} and {r2}")
    out = list(lines)
    for rng, text in reversed(ordered):
        limit = n + 1 if rng.length == 0 else n
        if rng.start > limit or rng.end > n:
            raise PatchConflictError(f"range {rng} outside {n}-line file")
        new_lines = [] if text == "" else text.rstrip("\n").split("\n")
        out[rng.start - 1 : rng.start - 1 + rng.length] = new_lines
    return out


def render_unified_diff(old_text: str, new_text: str, path: str) -> str:
    """Unified diff between two file texts, stable headers, no timestamps."""
    old_lines = old_text.splitlines(keepends=True)
    new_lines = new_text.splitlines(keepends=True)
    for lines in (old_lines, new_lines):
        if lines and not lines[-1].endswith("\n"):
            lines[-1] += "\n"
    diff = difflib.unified_diff(old_lines, new_lines, fromfile=f"a/{path}", tofile=f"b/{path}")
    return "".join(diff)


@dataclass
class FileDiff:
    old_path: str
    new_path: str
    hunks: list[tuple[int, int, int, int, list[str]]] = field(default_factory=list)
    # (old_start, old_len, new_start, new_len, body lines incl. +/-/space prefix)


_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse a unified diff into per-file hunk lists.

    Body lines are consumed by the counts declared in the @@ header, so
    content that merely looks like a file header cannot derail the parse.
    Tolerates missing file headers (an unnamed FileDiff is produced).
    """
    diffs: list[FileDiff] = []
    current: FileDiff | None = None
    old_path = new_path = ""
    want_old = want_new = 0
    for line in text.splitlines():
        if want_old > 0 or want_new > 0:
            if line.startswith("\\"):  # "\ No newline at end of file"
                continue
            tag = line[:1]
            if tag == "-":
                want_old -= 1
            elif tag == "+":
                want_new -= 1
            else:
                line = line if line else " "
                want_old -= 1
                want_new -= 1
            assert current is not None
            current.hunks[-1][4].append(line)
            continue
        if line.startswith("--- "):
            old_path = line[4:].split("\t")[0].strip()
            current = None
        elif line.startswith("+++ "):
            new_path = line[4:].split("\t")[0].strip()
            current = None
        elif line.startswith("@@"):
            m = _HEADER.match(line)
            if not m:
                continue
            if current is None:
                current = FileDiff(old_path=old_path, new_path=new_path)
                diffs.append(current)
            o_start = int(m.group(1))
            o_len = int(m.group(2)) if m.group(2) is not None else 1
            n_start = int(m.group(3))
            n_len = int(m.group(4)) if m.group(4) is not None else 1
            current.hunks.append((o_start, o_len, n_start, n_len, []))
            want_old, want_new = o_len, n_len
    return diffs


def reconstruct_pair(diff: FileDiff) -> tuple[str, str]:
    """Rebuild the old/new text fragments covered by a file diff.

    Only the hunk bodies (context plus changed lines) are recoverable from
    a diff, so the fragments are partial files; hunks are separated in
    source order.
    """
    old_parts: list[str] = []
    new_parts: list[str] = []
    for _, _, _, _, body in diff.hunks:
        for line in body:
            tag, rest = line[0], line[1:]
            if tag in (" ", "-"):
                old_parts.append(rest)
            if tag in (" ", "+"):
                new_parts.append(rest)
    return "\n".join(old_parts), "\n".join(new_parts)


def apply_unified_diff(old_text: str, diff_text: str) -> str:
    """Apply a single-file unified diff to *old_text*."""
    lines = old_text.splitlines()
    out: list[str] = []
    cursor = 0  # index into lines
    for file_diff in parse_unified_diff(diff_text):
        for o_start, o_len, _, _, body in file_diff.hunks:
            anchor = o_start - 1 if o_len > 0 else o_start
            out.extend(lines[cursor:anchor])
            cursor = anchor
            for line in body:
                tag, rest = line[0], line[1:]
                if tag == " ":
                    if cursor >= len(lines) or lines[cursor] != rest:
                        raise PatchConflictError(f"context mismatch at line {cursor + 1}")
                    out.append(rest)
                    cursor += 1
                elif tag == "-":
                    if cursor >= len(lines) or lines[cursor] != rest:
                        raise PatchConflictError(f"delete mismatch at line {cursor + 1}")
                    cursor += 1
                elif tag == "+":
                    out.append(rest)
    out.extend(lines[cursor:])
    return "\n".join(out)
