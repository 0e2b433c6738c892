"""Candidate merging and ranking.

Per-checkpoint beams are flattened into one deduplicated list per hunk:
sort by within-beam rank, break ties by sequence score then checkpoint
index, drop source-identical candidates, keep the first spelling of each
whitespace-normalized duplicate group, and put the deletion patch first
whenever the source hunk is non-empty. For multi-hunk bugs the cross-hunk
uniform ("starred") list is the intersection of all per-hunk lists ordered
by summed list positions.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .generate import CandidatePatch

_WS_RUN = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    """Trim the ends and collapse every internal whitespace run to one space."""
    return _WS_RUN.sub(" ", text).strip()


@dataclass(frozen=True)
class MergedCandidate:
    normalized: str
    display: str  # highest-ranked original spelling
    best_rank: int  # 0 for the synthesized deletion patch
    best_score: float
    provenance: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)
    # (checkpoint, rank, score) for every beam occurrence, best first


@dataclass(frozen=True)
class UniformCandidate:
    normalized: str
    rank_sum: int  # sum over hunks of the 1-based merged-list position
    max_score: float  # best sequence score seen for it across hunks


def merge_candidates(
    per_checkpoint: list[list[CandidatePatch]], source_hunk: str
) -> list[MergedCandidate]:
    """Merge k per-checkpoint beams into one ranked candidate list."""
    source_norm = normalize_ws(source_hunk)

    flat = [c for beam in per_checkpoint for c in beam]
    flat.sort(key=lambda c: (c.rank, -c.score, c.checkpoint))

    merged: list[MergedCandidate] = []
    by_norm: dict[str, int] = {}
    extra_prov: dict[str, list[tuple[int, int, float]]] = {}
    for cand in flat:
        if cand.normalized == source_norm:
            continue
        if cand.normalized in by_norm:
            extra_prov[cand.normalized].append((cand.checkpoint, cand.rank, cand.score))
            continue
        by_norm[cand.normalized] = len(merged)
        extra_prov[cand.normalized] = [(cand.checkpoint, cand.rank, cand.score)]
        merged.append(
            MergedCandidate(
                normalized=cand.normalized,
                display=cand.text,
                best_rank=cand.rank,
                best_score=cand.score,
            )
        )
    merged = [
        MergedCandidate(
            normalized=m.normalized,
            display=m.display,
            best_rank=m.best_rank,
            best_score=m.best_score,
            provenance=tuple(extra_prov[m.normalized]),
        )
        for m in merged
    ]

    if source_norm:
        deletion = next((m for m in merged if m.normalized == ""), None)
        if deletion is None:
            deletion = MergedCandidate(normalized="", display="", best_rank=0, best_score=0.0)
        merged = [deletion] + [m for m in merged if m.normalized != ""]
    return merged


def uniform_candidates(per_hunk: list[list[MergedCandidate]]) -> list[UniformCandidate]:
    """Candidates present in every hunk's merged list, for uniform application.

    Ordered by ascending rank sum, then descending max score, then text.
    """
    if len(per_hunk) < 2:
        raise ValueError("uniform candidates need at least two hunks")
    if any(not lst for lst in per_hunk):
        return []

    position_maps = []
    for lst in per_hunk:
        position_maps.append({m.normalized: (pos, m.best_score) for pos, m in enumerate(lst, start=1)})

    common = set(position_maps[0])
    for pm in position_maps[1:]:
        common &= set(pm)

    out = [
        UniformCandidate(
            normalized=norm,
            rank_sum=sum(pm[norm][0] for pm in position_maps),
            max_score=max(pm[norm][1] for pm in position_maps),
        )
        for norm in common
    ]
    out.sort(key=lambda u: (u.rank_sum, -u.max_score, u.normalized))
    return out
