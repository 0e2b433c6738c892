"""Bug manifest schema: where the bugs are, how to test them, and which
generator and parameters to use. Perfect localization is assumed, so hunk
line ranges arrive here rather than from a fault localizer."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .context import LineRange
from .languages import LANGUAGES

MANIFEST_VERSION = 1

PARAM_DEFAULTS = {
    "r": 5,
    "threshold": 0.5,
    "k": 5,
    "t": 100,
    "input_budget": 512,
    "output_budget": 256,
}


class ManifestError(Exception):
    """The manifest violates its schema."""


@dataclass(frozen=True)
class HunkSpec:
    file: str  # path relative to the bug's source root
    range: LineRange

    @property
    def id(self) -> str:
        return f"{self.file}:{self.range.start}"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str  # "replay" | "remote"
    location: str  # replay file path or remote endpoint URL


@dataclass(frozen=True)
class Params:
    r: int = 5
    threshold: float = 0.5
    k: int = 5
    t: int = 100
    input_budget: int = 512
    output_budget: int = 256


@dataclass(frozen=True)
class BugSpec:
    id: str
    language: str
    source_root: Path
    hunks: tuple[HunkSpec, ...]
    test_cmd: tuple[str, ...]
    build_cmd: tuple[str, ...] | None
    env: dict[str, str]
    timeout: float
    flaky_repeats: int
    generator: GeneratorSpec
    params: Params
    reference_patch: dict[str, str] | None = None  # hunk id -> expected text

    @property
    def hunk_order(self) -> list[HunkSpec]:
        return sorted(self.hunks, key=lambda h: (h.file, h.range.start))


@dataclass(frozen=True)
class Manifest:
    version: int
    bugs: tuple[BugSpec, ...]
    base_dir: Path

    def bug(self, bug_id: str) -> BugSpec:
        for bug in self.bugs:
            if bug.id == bug_id:
                return bug
        raise ManifestError(f"unknown bug id {bug_id!r}")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ManifestError(message)


def _parse_hunk(raw: dict, source_root: Path) -> HunkSpec:
    _require(isinstance(raw.get("file"), str) and raw["file"], "hunk needs a file")
    try:
        rng = LineRange(int(raw["start"]), int(raw.get("length", 1)))
    except (KeyError, ValueError, TypeError) as exc:
        raise ManifestError(f"bad hunk range: {exc}") from exc
    _require((source_root / raw["file"]).is_file(), f"missing source file {raw['file']!r}")
    return HunkSpec(file=raw["file"], range=rng)


def _parse_bug(raw: dict, base_dir: Path, overrides: dict | None) -> BugSpec:
    _require(isinstance(raw.get("id"), str) and raw["id"], "bug needs an id")
    bug_id = raw["id"]
    _require(raw.get("language") in LANGUAGES, f"{bug_id}: unsupported language {raw.get('language')!r}")
    source_root = (base_dir / raw.get("source_root", ".")).resolve()
    _require(source_root.is_dir(), f"{bug_id}: source root {source_root} not found")

    hunks_raw = raw.get("hunks", [])
    _require(isinstance(hunks_raw, list) and len(hunks_raw) >= 1, f"{bug_id}: needs at least one hunk")
    hunks = tuple(_parse_hunk(h, source_root) for h in hunks_raw)
    ids = [h.id for h in hunks]
    _require(len(set(ids)) == len(ids), f"{bug_id}: duplicate hunk ids")

    test_cmd = raw.get("test_cmd")
    _require(isinstance(test_cmd, list) and test_cmd, f"{bug_id}: needs a test_cmd list")
    build_cmd = raw.get("build_cmd")
    _require(build_cmd is None or (isinstance(build_cmd, list) and build_cmd), f"{bug_id}: bad build_cmd")

    gen_raw = raw.get("generator", {})
    kind = gen_raw.get("type")
    _require(kind in ("replay", "remote"), f"{bug_id}: generator type must be replay or remote")
    if kind == "replay":
        location = str((base_dir / gen_raw.get("path", "")).resolve())
        _require(Path(location).is_file(), f"{bug_id}: replay file {location} not found")
    else:
        location = gen_raw.get("endpoint", "")
        _require(bool(location), f"{bug_id}: remote generator needs an endpoint")

    merged_params = dict(PARAM_DEFAULTS)
    merged_params.update(raw.get("params", {}))
    if overrides:
        merged_params.update({k: v for k, v in overrides.items() if v is not None and k in merged_params})
    try:
        params = Params(**{k: type(PARAM_DEFAULTS[k])(v) for k, v in merged_params.items()})
    except TypeError as exc:
        raise ManifestError(f"{bug_id}: bad params: {exc}") from exc
    _require(params.r >= 0, f"{bug_id}: r must be >= 0")
    _require(0.0 <= params.threshold <= 1.0, f"{bug_id}: threshold must be in [0, 1]")
    _require(params.k >= 1 and params.t >= 1, f"{bug_id}: k and t must be >= 1")

    timeout = float(raw.get("timeout", 60.0))
    if overrides and overrides.get("timeout") is not None:
        timeout = float(overrides["timeout"])
    flaky_repeats = int(raw.get("flaky_repeats", 5))
    _require(flaky_repeats >= 2, f"{bug_id}: flaky_repeats must be >= 2")

    reference = raw.get("reference_patch")
    _require(reference is None or isinstance(reference, dict), f"{bug_id}: bad reference_patch")

    return BugSpec(
        id=bug_id,
        language=raw["language"],
        source_root=source_root,
        hunks=hunks,
        test_cmd=tuple(test_cmd),
        build_cmd=tuple(build_cmd) if build_cmd else None,
        env={str(k): str(v) for k, v in raw.get("env", {}).items()},
        timeout=timeout,
        flaky_repeats=flaky_repeats,
        generator=GeneratorSpec(kind=kind, location=location),
        params=params,
        reference_patch=reference,
    )


def load_manifest(path: str | Path, overrides: dict | None = None) -> Manifest:
    """Load and validate a manifest; relative paths resolve against it.

    *overrides* (r/threshold/k/t/timeout, from the command line) replace
    the corresponding per-bug values when not None.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc

    _require(isinstance(raw, dict), "manifest must be a JSON object")
    version = raw.get("version", MANIFEST_VERSION)
    _require(version == MANIFEST_VERSION, f"unsupported manifest version {version!r}")
    bugs_raw = raw.get("bugs")
    _require(isinstance(bugs_raw, list) and bugs_raw, "manifest needs a non-empty bugs list")

    base_dir = path.parent.resolve()
    bugs = tuple(_parse_bug(b, base_dir, overrides) for b in bugs_raw)
    ids = [b.id for b in bugs]
    _require(len(set(ids)) == len(ids), "duplicate bug ids in manifest")
    return Manifest(version=version, bugs=bugs, base_dir=base_dir)
