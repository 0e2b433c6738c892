"""Line embedding and dense retrieval over the buggy source file.

Every line outside the surrounding context is embedded and the lines most
similar to the buggy hunk are retrieved by cosine similarity. The
reference embedding is an L2-normalized term-frequency vector over
lowercased alphanumeric tokens; a neural sentence embedder can replace it
behind the same embed() contract.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .context import ContextSpan
from .rank import normalize_ws

CACHE_VERSION = 1

# Cosines of unit vectors carry float rounding (e.g. an exact 1/2 computes
# as 0.4999...); the threshold comparison absorbs that.
THRESHOLD_EPS = 1e-9

_WORD = re.compile(r"[a-z0-9]+")
_ALNUM = re.compile(r"[A-Za-z0-9]")


class EmptyInputError(ValueError):
    """Text yields no tokens, so no vector can be built."""


LineVector = dict[str, float]


@dataclass(frozen=True)
class RetrievedLine:
    text: str
    similarity: float
    line_no: int


@dataclass
class LineIndex:
    file_id: str
    entries: list[tuple[str, LineVector, int]] = field(default_factory=list)
    # (normalized text, vector, first line number)


Embedder = Callable[[str], LineVector]


def embed(text: str) -> LineVector:
    """Term-frequency vector of lowercased alphanumeric tokens, unit L2 norm."""
    tokens = _WORD.findall(text.lower())
    if not tokens:
        raise EmptyInputError("no tokens to embed")
    vec: dict[str, float] = {}
    for tok in tokens:
        vec[tok] = vec.get(tok, 0.0) + 1.0
    norm = math.sqrt(sum(w * w for w in vec.values()))
    return {tok: w / norm for tok, w in vec.items()}


def cosine(a: LineVector, b: LineVector) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(w * b[tok] for tok, w in a.items() if tok in b)


def build_line_index(
    source: str,
    excluded: ContextSpan | None,
    hunk_text: str,
    file_id: str = "",
    embedder: Embedder = embed,
) -> LineIndex:
    """Index the file's lines outside *excluded*.

    Empty and punctuation-only lines are dropped, whitespace-normalized
    duplicates keep their first occurrence, and any line identical to the
    buggy hunk is excluded so retrieval cannot hand the bug back.
    """
    hunk_norm = normalize_ws(hunk_text)
    skip_lo = skip_hi = 0
    if excluded is not None:
        skip_lo, skip_hi = excluded.range.start, excluded.range.end
    index = LineIndex(file_id=file_id)
    seen: set[str] = set()
    for line_no, line in enumerate(source.splitlines(), start=1):
        if skip_lo <= line_no <= skip_hi:
            continue
        norm = normalize_ws(line)
        if not norm or not _ALNUM.search(norm):
            continue
        if norm in seen:
            continue
        seen.add(norm)
        if norm == hunk_norm:
            continue
        index.entries.append((norm, embedder(norm), line_no))
    return index


def retrieve(
    hunk_text: str,
    index: LineIndex,
    r: int = 5,
    threshold: float = 0.5,
    embedder: Embedder = embed,
) -> list[RetrievedLine]:
    """Up to *r* most similar index lines with cosine >= *threshold*.

    Empty (or token-less) hunks retrieve nothing. Results are ordered by
    descending similarity, ties broken by ascending line number.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    if not hunk_text.strip() or not _WORD.search(hunk_text.lower()):
        return []
    query = embedder(hunk_text)
    scored = [
        RetrievedLine(text=text, similarity=cosine(query, vec), line_no=line_no)
        for text, vec, line_no in index.entries
    ]
    scored = [s for s in scored if s.similarity >= threshold - THRESHOLD_EPS]
    scored.sort(key=lambda s: (-s.similarity, s.line_no))
    return scored[:r]


def save_index(index: LineIndex, path: str | Path) -> None:
    """Persist an index as versioned JSON lines (purely an optimization)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"version": CACHE_VERSION, "file_id": index.file_id}) + "\n")
        for text, vec, line_no in index.entries:
            fh.write(json.dumps({"line_no": line_no, "text": text, "weights": vec}) + "\n")


def load_index(path: str | Path) -> LineIndex:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("version") != CACHE_VERSION:
            raise ValueError(f"unsupported index cache version: {header.get('version')!r}")
        index = LineIndex(file_id=header.get("file_id", ""))
        for line in fh:
            rec = json.loads(line)
            index.entries.append((rec["text"], {k: float(v) for k, v in rec["weights"].items()}, rec["line_no"]))
    return index
