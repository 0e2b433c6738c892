"""Token counting and truncation behind a pluggable interface.

The reference tokenizer splits on whitespace and punctuation boundaries:
a token is either a run of word characters or a single non-space symbol.
A model-specific subword tokenizer can be dropped in behind the same
two-method surface without touching budget logic.
"""
from __future__ import annotations

import re
from typing import Protocol


class Tokenizer(Protocol):
    def count(self, text: str) -> int: ...

    def truncate(self, text: str, max_tokens: int) -> str: ...


_TOKEN = re.compile(r"\w+|[^\w\s]")


class ReferenceTokenizer:
    """Whitespace/punctuation tokenizer with exact prefix truncation."""

    def count(self, text: str) -> int:
        return len(_TOKEN.findall(text))

    def truncate(self, text: str, max_tokens: int) -> str:
        """Keep at most *max_tokens* leading tokens of *text*."""
        if max_tokens <= 0:
            return ""
        last_end = 0
        for i, match in enumerate(_TOKEN.finditer(text)):
            if i >= max_tokens:
                break
            last_end = match.end()
        return text[:last_end].rstrip()


DEFAULT_TOKENIZER = ReferenceTokenizer()
