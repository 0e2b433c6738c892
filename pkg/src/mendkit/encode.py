"""Inference prompt assembly and token-budget fitting.

A prompt renders as one line: language prefix, buggy hunk, the ":"
separator, retrieved lines (most similar first), then the surrounding
context. Overflow is trimmed from the end, so the context tail goes
first and retrieved lines are sacrificed least-similar-first; the
prefix/hunk/separator head is never touched.
"""
from __future__ import annotations

from dataclasses import dataclass

from .context import ContextSpan
from .rank import normalize_ws
from .retrieval import RetrievedLine
from .tokenizers import DEFAULT_TOKENIZER, Tokenizer


class HunkExceedsBudgetError(ValueError):
    """The untouchable prefix/hunk/separator head alone overruns the budget."""


@dataclass(frozen=True)
class TokenBudget:
    input_limit: int = 512
    output_limit: int = 256


@dataclass(frozen=True)
class Prompt:
    language_prefix: str
    hunk_text: str  # flattened
    retrieved: tuple[str, ...]  # flattened, similarity order
    context_text: str  # flattened
    rendered: str
    token_count: int

    @property
    def head(self) -> str:
        """The segment truncation may never touch."""
        return " ".join([self.language_prefix, self.hunk_text, ":"])


def _render(prefix: str, hunk: str, retrieved: tuple[str, ...], context: str) -> str:
    segments = [prefix, hunk, ":"]
    segments.extend(seg for seg in retrieved if seg)
    if context:
        segments.append(context)
    return " ".join(segments)


def build_prompt(
    prefix: str,
    hunk: str,
    retrieved: list[RetrievedLine],
    context: ContextSpan | None,
    tokenizer: Tokenizer = DEFAULT_TOKENIZER,
) -> Prompt:
    """Assemble the single-line generator input.

    *retrieved* must already be in descending-similarity order (the
    retriever's output order); an empty hunk keeps its empty segment so
    the separator stays put.
    """
    flat_hunk = normalize_ws(hunk)
    flat_retrieved = tuple(normalize_ws(r.text) for r in retrieved)
    flat_context = normalize_ws(context.text) if context is not None else ""
    rendered = _render(prefix, flat_hunk, flat_retrieved, flat_context)
    return Prompt(
        language_prefix=prefix,
        hunk_text=flat_hunk,
        retrieved=flat_retrieved,
        context_text=flat_context,
        rendered=rendered,
        token_count=tokenizer.count(rendered),
    )


def fit_to_budget(
    prompt: Prompt, budget: TokenBudget, tokenizer: Tokenizer = DEFAULT_TOKENIZER
) -> Prompt:
    """Trim the prompt tail until it fits the input limit.

    Context is consumed from its end first; once it is gone, retrieved
    lines are dropped starting from the least similar. Raises
    HunkExceedsBudgetError when the head alone does not fit.
    """
    head_count = tokenizer.count(prompt.head)
    if head_count > budget.input_limit:
        raise HunkExceedsBudgetError(
            f"prefix+hunk+separator needs {head_count} tokens, limit {budget.input_limit}"
        )
    total = tokenizer.count(prompt.rendered)
    if total <= budget.input_limit:
        return prompt if total == prompt.token_count else _rebuild(
            prompt, prompt.retrieved, prompt.context_text, tokenizer
        )

    remaining = budget.input_limit - head_count
    kept_retrieved: list[str] = []
    for seg in prompt.retrieved:
        seg_count = tokenizer.count(seg)
        if seg_count <= remaining:
            kept_retrieved.append(seg)
            remaining -= seg_count
        else:
            cut = tokenizer.truncate(seg, remaining)
            if cut:
                kept_retrieved.append(cut)
            remaining = 0
            break
    context = tokenizer.truncate(prompt.context_text, remaining) if remaining > 0 else ""
    return _rebuild(prompt, tuple(kept_retrieved), context, tokenizer)


def _rebuild(prompt: Prompt, retrieved: tuple[str, ...], context: str, tokenizer: Tokenizer) -> Prompt:
    rendered = _render(prompt.language_prefix, prompt.hunk_text, retrieved, context)
    return Prompt(
        language_prefix=prompt.language_prefix,
        hunk_text=prompt.hunk_text,
        retrieved=retrieved,
        context_text=context,
        rendered=rendered,
        token_count=tokenizer.count(rendered),
    )
