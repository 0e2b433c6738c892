from __future__ import annotations

import json
from pathlib import Path

import pytest

from mendkit.manifest import ManifestError, load_manifest

FIXTURE_MANIFEST = Path(__file__).parent / "fixtures" / "e2e" / "manifest.json"


def write_manifest(tmp_path: Path, bugs: list[dict]) -> Path:
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"version": 1, "bugs": bugs}))
    return path


def minimal_bug(tmp_path: Path, **overrides) -> dict:
    proj = tmp_path / "proj"
    proj.mkdir(exist_ok=True)
    (proj / "prog.py").write_text("x = 1\n")
    replay = tmp_path / "replay.json"
    replay.write_text("{}")
    bug = {
        "id": "bug-1",
        "language": "python",
        "source_root": "proj",
        "hunks": [{"file": "prog.py", "start": 1, "length": 1}],
        "test_cmd": ["python3", "run.py"],
        "generator": {"type": "replay", "path": "replay.json"},
    }
    bug.update(overrides)
    return bug


def test_fixture_manifest_loads():
    manifest = load_manifest(FIXTURE_MANIFEST)
    assert len(manifest.bugs) == 10
    bug = manifest.bug("b01-scale")
    assert bug.language == "python"
    assert bug.params.k == 2 and bug.params.t == 5
    assert bug.params.r == 5 and bug.params.threshold == 0.5
    assert bug.hunks[0].id == "program.py:4"


def test_defaults_applied(tmp_path):
    path = write_manifest(tmp_path, [minimal_bug(tmp_path)])
    bug = load_manifest(path).bugs[0]
    assert (bug.params.r, bug.params.threshold) == (5, 0.5)
    assert (bug.params.k, bug.params.t) == (5, 100)
    assert (bug.params.input_budget, bug.params.output_budget) == (512, 256)
    assert bug.timeout == 60.0
    assert bug.flaky_repeats == 5


def test_overrides_win(tmp_path):
    path = write_manifest(tmp_path, [minimal_bug(tmp_path)])
    bug = load_manifest(path, overrides={"r": 2, "t": 7, "timeout": 5.0, "k": None}).bugs[0]
    assert bug.params.r == 2
    assert bug.params.t == 7
    assert bug.params.k == 5  # None override ignored
    assert bug.timeout == 5.0


def test_zero_hunks_rejected(tmp_path):
    path = write_manifest(tmp_path, [minimal_bug(tmp_path, hunks=[])])
    with pytest.raises(ManifestError, match="at least one hunk"):
        load_manifest(path)


def test_missing_source_file_rejected(tmp_path):
    bug = minimal_bug(tmp_path, hunks=[{"file": "ghost.py", "start": 1, "length": 1}])
    path = write_manifest(tmp_path, [bug])
    with pytest.raises(ManifestError, match="missing source file"):
        load_manifest(path)


def test_missing_replay_file_rejected(tmp_path):
    bug = minimal_bug(tmp_path, generator={"type": "replay", "path": "ghost.json"})
    path = write_manifest(tmp_path, [bug])
    with pytest.raises(ManifestError, match="replay file"):
        load_manifest(path)


def test_unknown_language_rejected(tmp_path):
    path = write_manifest(tmp_path, [minimal_bug(tmp_path, language="ruby")])
    with pytest.raises(ManifestError, match="unsupported language"):
        load_manifest(path)


def test_duplicate_bug_ids_rejected(tmp_path):
    path = write_manifest(tmp_path, [minimal_bug(tmp_path), minimal_bug(tmp_path)])
    with pytest.raises(ManifestError, match="duplicate bug ids"):
        load_manifest(path)


def test_unknown_bug_lookup():
    manifest = load_manifest(FIXTURE_MANIFEST)
    with pytest.raises(ManifestError, match="unknown bug id"):
        manifest.bug("nope")


def test_remote_generator_accepted(tmp_path):
    bug = minimal_bug(tmp_path, generator={"type": "remote", "endpoint": "http://localhost:9"})
    path = write_manifest(tmp_path, [bug])
    loaded = load_manifest(path).bugs[0]
    assert loaded.generator.kind == "remote"
    assert loaded.generator.location == "http://localhost:9"


def test_bad_json_rejected(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{nope")
    with pytest.raises(ManifestError, match="not valid JSON"):
        load_manifest(path)


def test_hunk_order_sorted_by_file_then_line(tmp_path):
    proj = tmp_path / "proj"
    proj.mkdir()
    (proj / "a.py").write_text("x\n" * 30)
    (proj / "b.py").write_text("y\n" * 30)
    (tmp_path / "replay.json").write_text("{}")
    bug = {
        "id": "bug-1",
        "language": "python",
        "source_root": "proj",
        "hunks": [
            {"file": "b.py", "start": 5, "length": 1},
            {"file": "a.py", "start": 20, "length": 1},
            {"file": "a.py", "start": 3, "length": 1},
        ],
        "test_cmd": ["true"],
        "generator": {"type": "replay", "path": "replay.json"},
    }
    path = write_manifest(tmp_path, [bug])
    loaded = load_manifest(path).bugs[0]
    assert [h.id for h in loaded.hunk_order] == ["a.py:3", "a.py:20", "b.py:5"]
