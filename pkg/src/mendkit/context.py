"""Surrounding-context computation for buggy hunks.

A hunk inside a function gets the whole (outermost) enclosing function as
context; a hunk outside any function gets a window of three lines on each
side. Function extents come from lightweight per-language scanners:
indentation blocks for Python, signature + brace matching for C, Java, and
JavaScript. Scanners are registered per language so a full parser can be
swapped in.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Callable

from .languages import check_language, mask_non_code

log = logging.getLogger(__name__)

WINDOW_RADIUS = 3


@dataclass(frozen=True)
class LineRange:
    """1-based inclusive line range; length 0 marks an insertion point
    sitting immediately before line `start`."""

    start: int
    length: int

    def __post_init__(self) -> None:
        if self.start < 1 or self.length < 0:
            raise ValueError(f"invalid line range {self.start},{self.length}")

    @property
    def end(self) -> int:
        """Last covered line (start - 1 for insertion points)."""
        return self.start + self.length - 1


@dataclass(frozen=True)
class ContextSpan:
    kind: str  # "enclosing_function" | "window"
    range: LineRange
    text: str


# A scanner maps source text to (start_line, end_line) inclusive 1-based
# spans, one per function definition, decorators/annotations included.
Scanner = Callable[[str], list[tuple[int, int]]]


def _indent_width(line: str) -> int:
    return len(line) - len(line.lstrip())


_PY_DEF = re.compile(r"^(\s*)(?:async\s+)?def\s+\w+")


def scan_python(source: str) -> list[tuple[int, int]]:
    lines = source.splitlines()
    n = len(lines)
    spans: list[tuple[int, int]] = []
    for i, line in enumerate(lines):
        m = _PY_DEF.match(line)
        if not m:
            continue
        indent = len(m.group(1))
        start = i
        # pull in decorators stacked directly above at the same indent
        j = i - 1
        while j >= 0 and lines[j].lstrip().startswith("@") and _indent_width(lines[j]) == indent:
            start = j
            j -= 1
        # body: every following line that is blank or indented deeper
        end = i
        k = i + 1
        while k < n:
            if not lines[k].strip():
                k += 1
                continue
            if _indent_width(lines[k]) > indent:
                end = k
                k += 1
                continue
            break
        spans.append((start + 1, end + 1))
    return spans


# Words that can directly precede "(...)" + "{" without opening a function.
_CONTROL_WORDS = {
    "if", "for", "while", "switch", "catch", "return", "do", "else",
    "new", "throw", "assert", "synchronized", "case", "sizeof",
}
_TYPE_HEADERS = re.compile(r"^\s*(?:@[\w.$]+(?:\([^)]*\))?\s+)*(?:[\w$]+\s+)*(?:class|interface|enum|struct|union)\b")
_CALL_TAIL = re.compile(r"([A-Za-z_$][\w$]*)\s*\((?:[^()]|\([^()]*\))*\)\s*(?:throws\s+[\w$.,\s<>\[\]]+)?$")


def _header_opens_function(header: str, language: str) -> bool:
    stripped = header.strip()
    if not stripped:
        return False
    if _TYPE_HEADERS.match(stripped):
        return False
    if language == "javascript":
        if re.search(r"\bfunction\b", stripped):
            return True
        if stripped.endswith("=>"):
            return True
    if language == "java" and stripped.endswith("->"):
        return True
    if stripped.endswith(("=", ",", "[")):
        return False  # initializer / literal member, not a body
    m = _CALL_TAIL.search(stripped)
    if not m:
        return False
    return m.group(1) not in _CONTROL_WORDS


def _make_brace_scanner(language: str) -> Scanner:
    def scan(source: str) -> list[tuple[int, int]]:
        masked = mask_non_code(source, language)
        line_of = _line_index(masked)
        spans: list[tuple[int, int]] = []
        for brace in _top_braces(masked):
            header_start = _header_start(masked, brace)
            header = masked[header_start:brace]
            if not _header_opens_function(header, language):
                continue
            close = _matching_brace(masked, brace)
            start_line = _first_content_line(masked, header_start, line_of)
            spans.append((start_line, line_of[close]))
        return spans

    return scan


def _line_index(text: str) -> list[int]:
    """line_of[i] = 1-based line number of character i (index len(text) ok)."""
    out = [1] * (len(text) + 1)
    line = 1
    for i, ch in enumerate(text):
        out[i] = line
        if ch == "\n":
            line += 1
    out[len(text)] = line
    return out


def _top_braces(masked: str):
    for i, ch in enumerate(masked):
        if ch == "{":
            yield i


_DIRECTIVE_LINE = re.compile(r"^[ \t]*#[^\n]*\n", re.MULTILINE)


def _header_start(masked: str, brace: int) -> int:
    """Walk back from the brace to the previous statement boundary,
    skipping over balanced parentheses (for-loop semicolons)."""
    depth = 0
    i = brace - 1
    start = 0
    while i >= 0:
        ch = masked[i]
        if ch == ")":
            depth += 1
        elif ch == "(":
            depth -= 1
        elif depth == 0 and ch in ";{}":
            start = i + 1
            break
        i -= 1
    # preprocessor directives terminate at end of line, not at ';'
    last_directive = None
    for m in _DIRECTIVE_LINE.finditer(masked, start, brace):
        last_directive = m
    return last_directive.end() if last_directive else start


def _first_content_line(masked: str, header_start: int, line_of: list[int]) -> int:
    i = header_start
    while i < len(masked) and masked[i] in " \t\n":
        i += 1
    return line_of[min(i, len(masked) - 1)] if masked else 1


def _matching_brace(masked: str, open_idx: int) -> int:
    depth = 0
    for i in range(open_idx, len(masked)):
        ch = masked[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i
    return len(masked) - 1  # unbalanced: clamp to EOF


SCANNERS: dict[str, Scanner] = {
    "python": scan_python,
    "java": _make_brace_scanner("java"),
    "c": _make_brace_scanner("c"),
    "javascript": _make_brace_scanner("javascript"),
}


def register_scanner(language: str, scanner: Scanner) -> None:
    """Replace the function scanner for *language* (e.g. with a real parser)."""
    SCANNERS[check_language(language)] = scanner


def _contains(span: tuple[int, int], hunk: LineRange) -> bool:
    lo, hi = span
    if hunk.length == 0:
        # insertion point sits between hunk.start - 1 and hunk.start
        return lo <= hunk.start - 1 and hunk.start <= hi
    return lo <= hunk.start and hunk.end <= hi


def _check_bounds(n_lines: int, hunk: LineRange) -> None:
    limit = n_lines + 1 if hunk.length == 0 else n_lines
    if hunk.start > limit or (hunk.length > 0 and hunk.end > n_lines):
        raise ValueError(f"hunk {hunk} outside file of {n_lines} lines")


def enclosing_function(source: str, hunk: LineRange, language: str) -> ContextSpan | None:
    """Span of the outermost function containing *hunk*, or None.

    Inner functions of nested definitions are never returned; the widest
    containing span wins so closures keep their outer variables in view.
    """
    check_language(language)
    lines = source.splitlines()
    _check_bounds(len(lines), hunk)
    spans = [s for s in SCANNERS[language](source) if _contains(s, hunk)]
    if not spans:
        return None
    lo, hi = min(spans, key=lambda s: (s[0], -s[1]))
    rng = LineRange(lo, hi - lo + 1)
    return ContextSpan("enclosing_function", rng, "\n".join(lines[lo - 1 : hi]))


def window_context(source: str, hunk: LineRange) -> ContextSpan:
    """Three lines before + hunk + three lines after, clamped to the file."""
    lines = source.splitlines()
    _check_bounds(len(lines), hunk)
    lo = max(1, hunk.start - WINDOW_RADIUS)
    hi = min(len(lines), hunk.start + hunk.length + WINDOW_RADIUS - 1)
    hi = max(hi, lo - 1)  # empty file edge
    rng = LineRange(lo, hi - lo + 1)
    return ContextSpan("window", rng, "\n".join(lines[lo - 1 : hi]))


def context_for_hunk(source: str, hunk: LineRange, language: str) -> ContextSpan:
    """Enclosing-function context when one exists, else the line window.

    Scanner crashes on malformed sources degrade to window context with a
    logged warning instead of aborting the pipeline.
    """
    try:
        span = enclosing_function(source, hunk, language)
    except ValueError:
        raise
    except Exception:  # scanner blew up on ugly input
        log.warning("function scan failed for %s hunk %s; using window", language, hunk)
        span = None
    return span if span is not None else window_context(source, hunk)
