#!/usr/bin/env python3
"""Independent oracle: apply the five preprocessing rules naively to a raw
instance dump and print the per-rule removal counts as JSON.

Consumes the JSON-lines file written by `mendkit mine --raw-dump` (fields
language / buggy_hunk / context / fixed_hunk). Deliberately shares no code
with the mendkit implementation: comment stripping is a hand-written
character walk, normalization uses str.split, token counting is an
explicit character-class scan. Rule contract implemented here:

  1. strip comments from both hunks (strings protected; lines that end up
     blank are dropped, remaining lines lose trailing whitespace)
  2. drop exact duplicates of (buggy, context, fixed), first kept
  3. drop instances whose hunks are identical ignoring all whitespace
  4. drop instances with an empty fixed hunk
  5. drop instances whose buggy hunk exceeds 512 tokens or fixed hunk
     exceeds 256 (a token is a word-character run or one symbol)

Usage: naive_preprocess_counts.py <raw-instances.jsonl>
"""
from __future__ import annotations

import json
import sys


def strip_comments_naive(text: str, language: str) -> str:
    out: list[str] = []
    i = 0
    n = len(text)
    if language == "python":
        quote = ""
        while i < n:
            ch = text[i]
            if quote:
                out.append(ch)
                if ch == "\\" and i + 1 < n:
                    out.append(text[i + 1])
                    i += 2
                    continue
                if text.startswith(quote, i):
                    out.extend(quote[1:])
                    i += len(quote)
                    quote = ""
                    continue
                i += 1
            elif ch in "'\"":
                quote = ch * 3 if text.startswith(ch * 3, i) else ch
                out.extend(quote)
                i += len(quote)
            elif ch == "#":
                while i < n and text[i] != "\n":
                    i += 1
            else:
                out.append(ch)
                i += 1
    else:
        quote = ""
        while i < n:
            ch = text[i]
            if quote:
                out.append(ch)
                if ch == "\\" and i + 1 < n:
                    out.append(text[i + 1])
                    i += 2
                    continue
                if ch == quote:
                    quote = ""
                elif ch == "\n" and quote != "`":
                    quote = ""
                i += 1
            elif ch in "'\"" or (language == "javascript" and ch == "`"):
                quote = ch
                out.append(ch)
                i += 1
            elif text.startswith("//", i):
                while i < n and text[i] != "\n":
                    i += 1
            elif text.startswith("/*", i):
                end = text.find("*/", i + 2)
                end = n if end == -1 else end + 2
                out.extend(c for c in text[i:end] if c == "\n")
                i = end
            else:
                out.append(ch)
                i += 1

    lines = []
    for line in "".join(out).split("\n"):
        line = line.rstrip()
        if line:
            lines.append(line)
    return "\n".join(lines)


def no_ws(text: str) -> str:
    return "".join(text.split())


def count_tokens(text: str) -> int:
    count = 0
    in_word = False
    for ch in text:
        if ch.isalnum() or ch == "_":
            if not in_word:
                count += 1
                in_word = True
        else:
            in_word = False
            if not ch.isspace():
                count += 1
    return count


def main(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = [json.loads(line) for line in fh if line.strip()]

    counts = {
        "extracted": len(raw),
        "duplicate": 0,
        "identical": 0,
        "empty_fixed": 0,
        "over_budget": 0,
        "kept": 0,
    }
    seen = []
    for rec in raw:
        buggy = strip_comments_naive(rec["buggy_hunk"], rec["language"])
        fixed = strip_comments_naive(rec["fixed_hunk"], rec["language"])
        key = (buggy, rec["context"], fixed)
        if key in seen:
            counts["duplicate"] += 1
            continue
        seen.append(key)
        if no_ws(buggy) == no_ws(fixed):
            counts["identical"] += 1
            continue
        if fixed.strip() == "":
            counts["empty_fixed"] += 1
            continue
        if count_tokens(buggy) > 512 or count_tokens(fixed) > 256:
            counts["over_budget"] += 1
            continue
        counts["kept"] += 1
    return counts


if __name__ == "__main__":
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    print(json.dumps(main(sys.argv[1]), indent=2, sort_keys=True))
