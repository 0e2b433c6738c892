"""Mining of buggy/fixed hunk pairs and training-instance preprocessing.

Instances are extracted from file pairs (or unified diffs) as zero-context
change hunks with their surrounding buggy context, then pushed through
five cleanup rules: comment stripping, exact deduplication, removal of
whitespace-identical pairs, removal of empty fixes, and token-budget
filtering.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, TextIO

from .context import context_for_hunk
from .difftext import line_hunks
from .languages import check_language, language_for_path, prefix_for, strip_comments
from .rank import normalize_ws
from .tokenizers import DEFAULT_TOKENIZER, Tokenizer


@dataclass(frozen=True)
class Origin:
    source_id: str
    hunk_index: int


@dataclass(frozen=True)
class TrainingInstance:
    language: str
    buggy_hunk: str
    context: str
    fixed_hunk: str
    origin: Origin


@dataclass(frozen=True)
class CommitRecord:
    message: str
    file_pairs: list[tuple[str, str, str]] = field(default_factory=list)
    # (buggy file text, fixed file text, path)


BUGFIX_KEYWORDS = ("bug", "fix", "patch")


def is_bugfix_commit(message: str) -> bool:
    """Keyword screen for bug-fixing commits.

    Case-insensitive raw substring match, so "debug" and "prefix" count;
    corpora built with this filter are comparable only under the same rule.
    """
    lowered = message.lower()
    return any(word in lowered for word in BUGFIX_KEYWORDS)


def extract_instances(
    buggy_file: str, fixed_file: str, language: str, source_id: str = ""
) -> list[TrainingInstance]:
    """One instance per change hunk between the two file versions."""
    check_language(language)
    a_lines = buggy_file.splitlines()
    b_lines = fixed_file.splitlines()
    instances = []
    for idx, hunk in enumerate(line_hunks(a_lines, b_lines)):
        span = context_for_hunk(buggy_file, hunk.a_range, language)
        instances.append(
            TrainingInstance(
                language=language,
                buggy_hunk="\n".join(hunk.a_lines),
                context=span.text,
                fixed_hunk="\n".join(hunk.b_lines),
                origin=Origin(source_id, idx),
            )
        )
    return instances


def instances_from_commit(record: CommitRecord, source_id: str = "") -> list[TrainingInstance]:
    """Mine a commit record: nothing unless the message passes the keyword
    screen, else every file pair's hunks (language guessed from the path)."""
    if not is_bugfix_commit(record.message):
        return []
    out: list[TrainingInstance] = []
    for buggy, fixed, path in record.file_pairs:
        language = language_for_path(path)
        if language is None:
            continue
        out.extend(extract_instances(buggy, fixed, language, source_id=f"{source_id}:{path}"))
    return out


def _tidy_hunk(text: str) -> str:
    """Drop lines left blank by comment removal and trailing blank lines."""
    lines = [line.rstrip() for line in text.splitlines()]
    return "\n".join(line for line in lines if line)


def _squeeze_ws(text: str) -> str:
    """Remove all whitespace: two hunks are "identical after normalizing
    whitespace" when they agree char-for-char once whitespace is ignored."""
    return "".join(text.split())


def _strip_instance_comments(inst: TrainingInstance) -> TrainingInstance:
    # context is deliberately untouched to preserve its semantics
    return replace(
        inst,
        buggy_hunk=_tidy_hunk(strip_comments(inst.buggy_hunk, inst.language)),
        fixed_hunk=_tidy_hunk(strip_comments(inst.fixed_hunk, inst.language)),
    )


def preprocess_with_counts(
    instances: Iterable[TrainingInstance],
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    input_budget: int = 512,
    output_budget: int = 256,
) -> tuple[list[TrainingInstance], dict[str, int]]:
    """Apply the five cleanup rules in order; also report per-rule removals.

    Rule order: (1) strip comments from both hunks, (2) drop exact
    duplicates of (buggy, context, fixed) keeping the first, (3) drop
    instances whose hunks are whitespace-identical, (4) drop empty fixes,
    (5) drop instances whose buggy/fixed hunk overruns its token budget.
    """
    if input_budget <= 0 or output_budget <= 0:
        raise ValueError("token budgets must be positive")

    stripped = [_strip_instance_comments(inst) for inst in instances]
    counts = {"extracted": len(stripped), "duplicate": 0, "identical": 0, "empty_fixed": 0, "over_budget": 0}

    seen: set[tuple[str, str, str]] = set()
    kept: list[TrainingInstance] = []
    for inst in stripped:
        key = (inst.buggy_hunk, inst.context, inst.fixed_hunk)
        if key in seen:
            counts["duplicate"] += 1
            continue
        seen.add(key)
        if _squeeze_ws(inst.buggy_hunk) == _squeeze_ws(inst.fixed_hunk):
            counts["identical"] += 1
            continue
        if not inst.fixed_hunk.strip():
            counts["empty_fixed"] += 1
            continue
        if tokenizer.count(inst.buggy_hunk) > input_budget or tokenizer.count(inst.fixed_hunk) > output_budget:
            counts["over_budget"] += 1
            continue
        kept.append(inst)
    counts["kept"] = len(kept)
    return kept, counts


def preprocess(
    instances: Iterable[TrainingInstance],
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
    input_budget: int = 512,
    output_budget: int = 256,
) -> list[TrainingInstance]:
    kept, _ = preprocess_with_counts(instances, tokenizer, input_budget, output_budget)
    return kept


def encode_training(instance: TrainingInstance) -> tuple[str, str]:
    """Flatten an instance to the one-line (input, label) encoding:
    `<prefix> <buggy hunk> : <context>` and the fixed hunk."""
    prefix = prefix_for(instance.language)
    model_input = " ".join(
        [prefix, normalize_ws(instance.buggy_hunk), ":", normalize_ws(instance.context)]
    ).rstrip()
    label = normalize_ws(instance.fixed_hunk)
    return model_input, label


def instance_to_record(instance: TrainingInstance) -> dict:
    model_input, label = encode_training(instance)
    return {
        "language": instance.language,
        "buggy_hunk": instance.buggy_hunk,
        "context": instance.context,
        "fixed_hunk": instance.fixed_hunk,
        "origin": {"source_id": instance.origin.source_id, "hunk_index": instance.origin.hunk_index},
        "input": model_input,
        "label": label,
    }


def write_instances(instances: Iterable[TrainingInstance], out: TextIO) -> int:
    """Write instances as UTF-8 JSON lines; returns the record count."""
    n = 0
    for inst in instances:
        out.write(json.dumps(instance_to_record(inst), ensure_ascii=False) + "\n")
        n += 1
    return n
