from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mendkit.generate import CandidatePatch
from mendkit.rank import (
    MergedCandidate,
    UniformCandidate,
    merge_candidates,
    normalize_ws,
    uniform_candidates,
)
from oracles import reference_merge


class TestNormalizeWs:
    def test_collapse_and_trim(self):
        assert normalize_ws("  a  =  1 ; ") == "a = 1 ;"

    def test_fixed_point(self):
        assert normalize_ws("a=1;") == "a=1;"

    def test_newline_and_tab(self):
        assert normalize_ws("a\n\tb") == "a b"

    @given(st.text(max_size=60))
    def test_idempotent(self, text):
        once = normalize_ws(text)
        assert normalize_ws(once) == once


def cp(text: str, checkpoint: int, rank: int, score: float) -> CandidatePatch:
    return CandidatePatch(text=text, normalized=normalize_ws(text), checkpoint=checkpoint, rank=rank, score=score)


class TestMergeCandidates:
    def test_worked_example(self):
        beams = [
            [cp("x=1", 1, 1, -0.1), cp("x=2", 1, 2, -0.5)],
            [cp("x=2", 2, 1, -0.2), cp("x=3", 2, 2, -0.9)],
        ]
        merged = merge_candidates(beams, "x=0")
        assert [m.normalized for m in merged] == ["", "x=1", "x=2", "x=3"]
        # the rank-1 group is ordered by score: -0.1 beats -0.2
        assert merged[1].best_score == -0.1
        # "x=2" kept its highest-ranked occurrence (checkpoint 2, rank 1)
        assert merged[2].best_rank == 1 and merged[2].provenance[0] == (2, 1, -0.2)

    def test_single_candidate_equal_to_source(self):
        merged = merge_candidates([[cp("a = 1", 1, 1, -0.3)]], "a  =  1")
        assert [m.normalized for m in merged] == [""]

    def test_empty_source_hunk_gets_no_deletion_patch(self):
        merged = merge_candidates([[cp("y=2;", 1, 1, -0.3)]], "")
        assert [m.normalized for m in merged] == ["y=2;"]

    def test_generated_deletion_moves_to_front_keeping_provenance(self):
        beams = [[cp("a", 1, 1, -0.1), cp("", 1, 2, -0.2)]]
        merged = merge_candidates(beams, "src")
        assert merged[0].normalized == ""
        assert merged[0].provenance == ((1, 2, -0.2),)
        assert merged[0].best_rank == 2

    def test_no_duplicates_and_no_source(self):
        beams = [
            [cp("p", 1, 1, -0.1), cp("src", 1, 2, -0.2), cp("p", 1, 3, -0.3)],
            [cp("q", 2, 1, -0.15), cp("p", 2, 2, -0.25)],
        ]
        merged = merge_candidates(beams, "src")
        norms = [m.normalized for m in merged]
        assert len(norms) == len(set(norms))
        assert "src" not in norms
        assert norms[0] == ""

    def test_display_keeps_original_spelling(self):
        beams = [[cp("  return  x ;", 1, 1, -0.1)]]
        merged = merge_candidates(beams, "src")
        assert merged[1].display == "  return  x ;"
        assert merged[1].normalized == "return x ;"

    def test_deletion_occurs_exactly_once(self):
        beams = [[cp("", 1, 1, -0.1)], [cp("", 2, 1, -0.2)]]
        merged = merge_candidates(beams, "src")
        assert [m.normalized for m in merged] == [""]
        assert len(merged[0].provenance) == 2


def make_random_beams(rng: random.Random, k: int, t: int, pool: list[str]):
    beams = []
    for checkpoint in range(1, k + 1):
        scores = sorted((round(rng.uniform(-5, 0), 3) for _ in range(t)), reverse=True)
        beams.append(
            [cp(rng.choice(pool), checkpoint, rank, score) for rank, (score) in enumerate(scores, start=1)]
        )
    return beams


POOL = ["x=1", "x=2", "x = 2", "y+=1", "", "src line", "  x=1  ", "call(a, b)", "z"]


def test_merge_matches_bruteforce_reference():
    rng = random.Random(99)
    for _ in range(300):
        k, t = rng.randint(1, 5), rng.randint(1, 10)
        beams = make_random_beams(rng, k, t, POOL)
        source = rng.choice(["src line", "x=1", "", "unrelated"])
        merged = merge_candidates(beams, source)
        got = [(m.normalized, m.display, m.best_rank, m.best_score, m.provenance) for m in merged]
        assert got == reference_merge(beams, source)


class TestUniformCandidates:
    def mc(self, norm: str, score: float) -> MergedCandidate:
        return MergedCandidate(normalized=norm, display=norm, best_rank=1, best_score=score)

    def test_disjoint_lists_share_only_deletion(self):
        l1 = [self.mc("", 0.0), self.mc("a", -0.1)]
        l2 = [self.mc("", 0.0), self.mc("b", -0.2)]
        got = uniform_candidates([l1, l2])
        assert [u.normalized for u in got] == [""]
        assert got[0].rank_sum == 2

    def test_worked_tie_example(self):
        l1 = [self.mc("p", -0.3), self.mc("q", -0.2)]
        l2 = [self.mc("q", -0.1), self.mc("p", -0.4)]
        got = uniform_candidates([l1, l2])
        assert [u.normalized for u in got] == ["q", "p"]
        assert got[0] == UniformCandidate("q", rank_sum=3, max_score=-0.1)
        assert got[1] == UniformCandidate("p", rank_sum=3, max_score=-0.3)

    def test_empty_merged_list_gives_empty_intersection(self):
        assert uniform_candidates([[self.mc("a", -0.1)], []]) == []

    def test_requires_two_hunks(self):
        with pytest.raises(ValueError):
            uniform_candidates([[self.mc("a", -0.1)]])

    def test_subset_of_every_list(self):
        rng = random.Random(5)
        for _ in range(200):
            lists = []
            for _ in range(rng.randint(2, 4)):
                texts = rng.sample(POOL, rng.randint(0, 6))
                lists.append([self.mc(t, round(rng.uniform(-3, 0), 3)) for t in texts])
            got = uniform_candidates(lists)
            norms = [u.normalized for u in got]
            assert len(norms) == len(set(norms))
            for lst in lists:
                have = {m.normalized for m in lst}
                assert all(n in have for n in norms)
            # deterministic total order
            again = uniform_candidates(lists)
            assert got == again


def test_rank_monotonicity_before_dedup():
    """Merged order (deletion aside) follows the flattened sort of each
    candidate's winning occurrence: rank asc, score desc, checkpoint asc."""
    rng = random.Random(11)
    for _ in range(200):
        beams = make_random_beams(rng, rng.randint(1, 4), rng.randint(1, 6), POOL)
        source = rng.choice(POOL)
        merged = merge_candidates(beams, source)
        body = [m for m in merged if m.normalized != ""]
        keys = [(m.best_rank, -m.best_score, m.provenance[0][0]) for m in body]
        assert keys == sorted(keys)
