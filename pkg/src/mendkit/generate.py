"""Candidate generators: the backend contract, replay and remote backends,
and ensemble fan-out over k checkpoints.

A backend turns one prompt into at most t beam-ordered candidates with
sequence scores. Real model checkpoints sit behind the remote HTTP
protocol; replay files make runs fully deterministic for testing and
offline experiments.
"""
from __future__ import annotations

import json
import logging
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .encode import Prompt
from .rank import normalize_ws

log = logging.getLogger(__name__)


class BackendUnavailableError(Exception):
    """The generator backend could not be reached or refused the call."""


class MalformedResponseError(Exception):
    """The backend answered with something outside the protocol."""


@dataclass(frozen=True)
class RawCandidate:
    text: str  # empty text is a deletion
    score: float  # sequence log-probability; higher is better


@dataclass(frozen=True)
class CandidatePatch:
    text: str
    normalized: str
    checkpoint: int  # 1..k
    rank: int  # 1..t beam position within its checkpoint
    score: float


@dataclass(frozen=True)
class EnsembleConfig:
    k: int = 5
    t: int = 100

    def __post_init__(self) -> None:
        if self.k < 1 or self.t < 1:
            raise ValueError("k and t must be >= 1")


class GeneratorBackend(Protocol):
    def propose(self, prompt: Prompt, beam_size: int, hunk_id: str | None = None) -> list[RawCandidate]: ...


@dataclass
class ReplayBackend:
    """Closed-world backend replaying candidates recorded per hunk id.

    Replay file layout: {hunk_id: [checkpoint_1_beam, ..., checkpoint_k_beam]}
    where each beam is a list of {"text", "score"} objects in beam order.
    Unknown hunk ids replay as empty beams.
    """

    beams_by_hunk: dict[str, list[list[dict]]]
    checkpoint: int = 1

    @classmethod
    def load(cls, path: str | Path, checkpoint: int = 1) -> "ReplayBackend":
        with open(path, encoding="utf-8") as fh:
            return cls(beams_by_hunk=json.load(fh), checkpoint=checkpoint)

    def propose(self, prompt: Prompt, beam_size: int, hunk_id: str | None = None) -> list[RawCandidate]:
        beams = self.beams_by_hunk.get(hunk_id or "", [])
        beam = beams[self.checkpoint - 1] if len(beams) >= self.checkpoint else []
        return [RawCandidate(text=c["text"], score=float(c["score"])) for c in beam[:beam_size]]


@dataclass
class RemoteBackend:
    """HTTP backend: POST {endpoint}/generate with prompt/beam_size/checkpoint,
    expecting {"candidates": [{"text", "score"}, ...]} in beam order."""

    endpoint: str
    checkpoint: int = 1
    timeout: float = 30.0

    def propose(self, prompt: Prompt, beam_size: int, hunk_id: str | None = None) -> list[RawCandidate]:
        body = json.dumps(
            {"prompt": prompt.rendered, "beam_size": beam_size, "checkpoint": self.checkpoint}
        ).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint.rstrip("/") + "/generate",
            data=body,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = resp.read()
        except urllib.error.HTTPError as exc:
            raise BackendUnavailableError(f"generator returned HTTP {exc.code}") from exc
        except (urllib.error.URLError, OSError) as exc:
            raise BackendUnavailableError(f"generator unreachable: {exc}") from exc
        try:
            decoded = json.loads(payload)
            candidates = decoded["candidates"]
            raw = [RawCandidate(text=c["text"], score=float(c["score"])) for c in candidates]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponseError(f"bad generator response: {exc}") from exc
        if len(raw) > beam_size:
            raise MalformedResponseError(f"{len(raw)} candidates for beam size {beam_size}")
        return raw


@dataclass
class EnsembleWarning:
    checkpoint: int
    message: str


def ensemble_generate(
    backends: list[GeneratorBackend],
    prompt: Prompt,
    cfg: EnsembleConfig,
    hunk_id: str | None = None,
    warnings: list[EnsembleWarning] | None = None,
) -> list[list[CandidatePatch]]:
    """Fan one prompt out to k checkpoint backends.

    Checkpoint i's candidates get checkpoint=i and rank = beam position;
    per-checkpoint order is preserved. A failing backend contributes an
    empty list and a recorded warning rather than aborting the ensemble.
    """
    if len(backends) != cfg.k:
        raise ValueError(f"expected {cfg.k} backends, got {len(backends)}")
    out: list[list[CandidatePatch]] = []
    for i, backend in enumerate(backends, start=1):
        try:
            raw = backend.propose(prompt, cfg.t, hunk_id=hunk_id)
        except (BackendUnavailableError, MalformedResponseError) as exc:
            log.warning("checkpoint %d failed: %s", i, exc)
            if warnings is not None:
                warnings.append(EnsembleWarning(checkpoint=i, message=str(exc)))
            raw = []
        out.append(
            [
                CandidatePatch(
                    text=c.text,
                    normalized=normalize_ws(c.text),
                    checkpoint=i,
                    rank=pos,
                    score=c.score,
                )
                for pos, c in enumerate(raw[: cfg.t], start=1)
            ]
        )
    return out
