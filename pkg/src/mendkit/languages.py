"""Language tags, model prefixes, and lexical syntax shared by the pipeline."""
from __future__ import annotations

LANGUAGES = ("java", "python", "c", "javascript")

# Prefix prepended to every encoded input to mark the programming language.
PREFIXES = {
    "java": "Java",
    "python": "Python",
    "c": "C",
    "javascript": "JavaScript",
}

# File extensions accepted by the miner, mapped to language tags.
EXTENSIONS = {
    ".java": "java",
    ".py": "python",
    ".c": "c",
    ".h": "c",
    ".js": "javascript",
}


class UnsupportedLanguageError(ValueError):
    """Raised when a language tag is not one of LANGUAGES."""


def check_language(language: str) -> str:
    if language not in LANGUAGES:
        raise UnsupportedLanguageError(f"unsupported language: {language!r}")
    return language


def prefix_for(language: str) -> str:
    return PREFIXES[check_language(language)]


def language_for_path(path: str) -> str | None:
    """Guess the language tag from a file path extension, or None."""
    for ext, tag in EXTENSIONS.items():
        if path.endswith(ext):
            return tag
    return None


def lex_spans(source: str, language: str) -> list[tuple[str, int, int]]:
    """Split *source* into (kind, start, end) spans, end exclusive.

    Kinds are "code", "comment", and "string". The scan is a lightweight
    lexer, not a parser: it tracks line/block comments and string literals
    (so comment markers inside strings are protected) and nothing else.
    """
    check_language(language)
    if language == "python":
        return _lex_python(source)
    return _lex_c_like(source, template_strings=(language == "javascript"))


def _emit(spans: list, kind: str, start: int, end: int) -> None:
    if end > start:
        spans.append((kind, start, end))


def _lex_c_like(source: str, template_strings: bool) -> list[tuple[str, int, int]]:
    spans: list[tuple[str, int, int]] = []
    i = 0
    n = len(source)
    code_start = 0
    while i < n:
        ch = source[i]
        nxt = source[i + 1] if i + 1 < n else ""
        if ch == "/" and nxt == "/":
            _emit(spans, "code", code_start, i)
            j = source.find("\n", i)
            j = n if j == -1 else j  # newline stays code
            _emit(spans, "comment", i, j)
            code_start = i = j
        elif ch == "/" and nxt == "*":
            _emit(spans, "code", code_start, i)
            j = source.find("*/", i + 2)
            j = n if j == -1 else j + 2
            _emit(spans, "comment", i, j)
            code_start = i = j
        elif ch in "\"'" or (template_strings and ch == "`"):
            _emit(spans, "code", code_start, i)
            j = _scan_string(source, i, ch)
            _emit(spans, "string", i, j)
            code_start = i = j
        else:
            i += 1
    _emit(spans, "code", code_start, n)
    return spans


def _lex_python(source: str) -> list[tuple[str, int, int]]:
    spans: list[tuple[str, int, int]] = []
    i = 0
    n = len(source)
    code_start = 0
    while i < n:
        ch = source[i]
        if ch == "#":
            _emit(spans, "code", code_start, i)
            j = source.find("\n", i)
            j = n if j == -1 else j
            _emit(spans, "comment", i, j)
            code_start = i = j
        elif ch in "\"'":
            _emit(spans, "code", code_start, i)
            if source.startswith(ch * 3, i):
                j = _scan_triple(source, i, ch)
            else:
                j = _scan_string(source, i, ch)
            _emit(spans, "string", i, j)
            code_start = i = j
        else:
            i += 1
    _emit(spans, "code", code_start, n)
    return spans


def _scan_string(source: str, start: int, quote: str) -> int:
    """Return the index one past the closing quote (tolerant of EOL/EOF)."""
    i = start + 1
    n = len(source)
    multiline = quote == "`"
    while i < n:
        ch = source[i]
        if ch == "\\":
            i += 2
            continue
        if ch == quote:
            return i + 1
        if ch == "\n" and not multiline:
            return i  # unterminated: newline stays code
        i += 1
    return n


def _scan_triple(source: str, start: int, quote: str) -> int:
    i = start + 3
    n = len(source)
    closer = quote * 3
    while i < n:
        if source[i] == "\\":
            i += 2
            continue
        if source.startswith(closer, i):
            return i + 3
        i += 1
    return n


def strip_comments(source: str, language: str) -> str:
    """Remove comment spans from *source*, keeping newlines they covered.

    String literals are protected; code and strings pass through unchanged.
    """
    parts: list[str] = []
    for kind, start, end in lex_spans(source, language):
        chunk = source[start:end]
        if kind == "comment":
            parts.append("\n" * chunk.count("\n"))
        else:
            parts.append(chunk)
    return "".join(parts)


def mask_non_code(source: str, language: str) -> str:
    """Blank out comments and string contents, preserving length and newlines.

    Brace matching and signature detection run on the masked text so that
    braces or keywords inside literals cannot confuse them.
    """
    parts: list[str] = []
    for kind, start, end in lex_spans(source, language):
        chunk = source[start:end]
        if kind == "code":
            parts.append(chunk)
        else:
            parts.append("".join(c if c == "\n" else " " for c in chunk))
    return "".join(parts)
