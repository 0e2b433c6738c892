from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from mendkit.encode import build_prompt
from mendkit.generate import (
    BackendUnavailableError,
    EnsembleConfig,
    MalformedResponseError,
    RawCandidate,
    RemoteBackend,
    ReplayBackend,
    ensemble_generate,
)

PROMPT = build_prompt("Java", "a=1;", [], None)


def replay_backend(beams, checkpoint=1):
    return ReplayBackend(beams_by_hunk=beams, checkpoint=checkpoint)


class TestReplayBackend:
    def test_truncates_to_beam_size(self):
        beams = {"h1": [[{"text": "x", "score": -0.1}, {"text": "y", "score": -0.2}, {"text": "z", "score": -0.3}]]}
        got = replay_backend(beams).propose(PROMPT, 2, hunk_id="h1")
        assert got == [RawCandidate("x", -0.1), RawCandidate("y", -0.2)]

    def test_missing_hunk_id_replays_empty(self):
        assert replay_backend({}).propose(PROMPT, 5, hunk_id="nope") == []

    def test_checkpoint_selection(self):
        beams = {"h": [[{"text": "cp1", "score": -1}], [{"text": "cp2", "score": -2}]]}
        assert replay_backend(beams, checkpoint=2).propose(PROMPT, 5, hunk_id="h")[0].text == "cp2"

    def test_missing_checkpoint_is_empty(self):
        beams = {"h": [[{"text": "cp1", "score": -1}]]}
        assert replay_backend(beams, checkpoint=3).propose(PROMPT, 5, hunk_id="h") == []

    def test_load_is_deterministic(self, tmp_path):
        path = tmp_path / "replay.json"
        path.write_text(json.dumps({"h": [[{"text": "a", "score": -0.5}]]}))
        first = ReplayBackend.load(path).propose(PROMPT, 3, hunk_id="h")
        second = ReplayBackend.load(path).propose(PROMPT, 3, hunk_id="h")
        assert first == second


class _Handler(BaseHTTPRequestHandler):
    responses: dict = {}

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        spec = self.responses.get(body["checkpoint"], {"status": 200, "payload": {"candidates": []}})
        payload = json.dumps(spec["payload"]).encode()
        self.send_response(spec["status"])
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def http_generator():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}", _Handler
    finally:
        server.shutdown()
        _Handler.responses = {}


class TestRemoteBackend:
    def test_happy_path(self, http_generator):
        url, handler = http_generator
        handler.responses = {
            1: {"status": 200, "payload": {"candidates": [{"text": "fix;", "score": -0.25}]}}
        }
        got = RemoteBackend(endpoint=url, checkpoint=1).propose(PROMPT, 5)
        assert got == [RawCandidate("fix;", -0.25)]

    def test_non_200_is_unavailable(self, http_generator):
        url, handler = http_generator
        handler.responses = {1: {"status": 503, "payload": {}}}
        with pytest.raises(BackendUnavailableError):
            RemoteBackend(endpoint=url, checkpoint=1).propose(PROMPT, 5)

    def test_unreachable_endpoint(self):
        backend = RemoteBackend(endpoint="http://127.0.0.1:1", checkpoint=1, timeout=0.5)
        with pytest.raises(BackendUnavailableError):
            backend.propose(PROMPT, 5)

    def test_overlong_beam_is_malformed(self, http_generator):
        url, handler = http_generator
        handler.responses = {
            1: {
                "status": 200,
                "payload": {"candidates": [{"text": "a", "score": -1}, {"text": "b", "score": -2}]},
            }
        }
        with pytest.raises(MalformedResponseError):
            RemoteBackend(endpoint=url, checkpoint=1).propose(PROMPT, 1)

    def test_missing_key_is_malformed(self, http_generator):
        url, handler = http_generator
        handler.responses = {1: {"status": 200, "payload": {"wrong": []}}}
        with pytest.raises(MalformedResponseError):
            RemoteBackend(endpoint=url, checkpoint=1).propose(PROMPT, 5)


class TestEnsembleGenerate:
    def test_single_checkpoint_passthrough_with_ranks(self):
        beams = {"h": [[{"text": "a", "score": -0.1}, {"text": "b", "score": -0.2}]]}
        out = ensemble_generate([replay_backend(beams)], PROMPT, EnsembleConfig(k=1, t=5), hunk_id="h")
        assert len(out) == 1
        assert [(c.checkpoint, c.rank, c.text) for c in out[0]] == [(1, 1, "a"), (1, 2, "b")]

    def test_two_checkpoints_count_identity(self):
        beams = {
            "h": [
                [{"text": "a", "score": -0.1}, {"text": "b", "score": -0.2}],
                [{"text": "c", "score": -0.3}, {"text": "d", "score": -0.4}],
            ]
        }
        backends = [replay_backend(beams, checkpoint=cp) for cp in (1, 2)]
        out = ensemble_generate(backends, PROMPT, EnsembleConfig(k=2, t=2), hunk_id="h")
        assert sum(len(lst) for lst in out) == 4
        assert all(c.checkpoint == i + 1 for i, lst in enumerate(out) for c in lst)

    def test_failing_backend_yields_empty_list_and_warning(self):
        class Broken:
            def propose(self, prompt, beam_size, hunk_id=None):
                raise BackendUnavailableError("down")

        beams = {"h": [[{"text": "a", "score": -0.1}]]}
        warnings = []
        out = ensemble_generate(
            [replay_backend(beams), Broken()], PROMPT, EnsembleConfig(k=2, t=5), hunk_id="h", warnings=warnings
        )
        assert [len(lst) for lst in out] == [1, 0]
        assert warnings and warnings[0].checkpoint == 2

    def test_backend_count_mismatch(self):
        with pytest.raises(ValueError):
            ensemble_generate([replay_backend({})], PROMPT, EnsembleConfig(k=2, t=5))

    def test_normalization_applied(self):
        beams = {"h": [[{"text": "  a   =  1 ", "score": -0.1}]]}
        out = ensemble_generate([replay_backend(beams)], PROMPT, EnsembleConfig(k=1, t=5), hunk_id="h")
        assert out[0][0].normalized == "a = 1"

    def test_total_candidates_bounded_by_k_times_t(self):
        beams = {"h": [[{"text": f"c{i}", "score": -float(i)} for i in range(10)]] * 3}
        backends = [replay_backend(beams, checkpoint=cp) for cp in (1, 2, 3)]
        out = ensemble_generate(backends, PROMPT, EnsembleConfig(k=3, t=4), hunk_id="h")
        assert sum(len(lst) for lst in out) <= 3 * 4


def test_ensemble_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(k=0, t=5)
    with pytest.raises(ValueError):
        EnsembleConfig(k=1, t=0)
    cfg = EnsembleConfig()
    assert (cfg.k, cfg.t) == (5, 100)
