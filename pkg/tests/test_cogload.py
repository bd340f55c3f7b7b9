"""Readability scoring and the inline load-tag scanner."""

import numpy as np
import pytest

from cogstream.cogload import (
    DEFAULT_SCORE,
    MAX_PENDING,
    TagScanState,
    flesch_kincaid_grade,
    fog_to_score,
    gunning_fog,
    scan_chunk,
    scan_text,
    strip_tags_with_offsets,
    syllable_count,
)
from cogstream.errors import EmptyText


class TestSyllables:
    def test_heuristic_cases(self):
        assert syllable_count("cat") == 1
        assert syllable_count("happy") == 2
        assert syllable_count("adaptive") == 3
        # vowel-group arithmetic, not dictionary syllables: e-e-i-a-e
        assert syllable_count("necessitates") == 5
        assert syllable_count("sophisticated") == 5
        # silent e
        assert syllable_count("mate") == 1
        assert syllable_count("table") == 2  # consonant + le keeps the e
        # never below one
        assert syllable_count("nth") == 1


class TestGunningFog:
    def test_cat_fixture(self):
        fb = gunning_fog("The cat sat on the mat. It was happy.")
        assert (fb.words, fb.sentences, fb.complex_words) == (9, 2, 0)
        assert fb.index == pytest.approx(1.8, abs=1e-12)

    def test_go_fixture(self):
        fb = gunning_fog("Go.")
        assert (fb.words, fb.sentences, fb.complex_words) == (1, 1, 0)
        assert fb.index == pytest.approx(0.4, abs=1e-12)

    def test_dense_fixture(self):
        fb = gunning_fog("Adaptive streaming necessitates sophisticated allocation.")
        assert (fb.words, fb.sentences, fb.complex_words) == (5, 1, 4)
        assert fb.index == pytest.approx(34.0, abs=1e-12)

    def test_no_terminator_counts_one_sentence(self):
        fb = gunning_fog("no boundary here")
        assert fb.sentences == 1

    def test_empty_rejected(self):
        for text in ("", "   ", "...", "123 456"):
            with pytest.raises(EmptyText):
                gunning_fog(text)

    def test_duplication_invariance(self):
        text = "The cat sat on the mat. It was happy."
        once = gunning_fog(text).index
        twice = gunning_fog(text + " " + text).index
        assert twice == pytest.approx(once, abs=1e-12)

    def test_complexity_ordering(self):
        """A low-complexity passage scores easier than a complex-laden one."""
        simple = " ".join(["the cat sat on the mat."] * 200)
        hard_words = ["calculator", "electricity", "umbrella", "positive"]
        hard = " ".join(
            " ".join(hard_words[i % 4] for i in range(6)) + "."
            for _ in range(160)
        )
        assert gunning_fog(simple).index < gunning_fog(hard).index

    def test_proper_noun_and_suffix_rules(self):
        # 'Washington' mid-sentence is capitalized, so it is not complex
        fb = gunning_fog("We saw Washington yesterday.")
        assert fb.complex_words == 1  # only 'yesterday'
        # -ing on a short stem is not complex ('following' stems to 'follow')
        fb2 = gunning_fog("He was following us.")
        assert fb2.complex_words == 0


class TestFleschKincaid:
    def test_cat_fixture(self):
        assert flesch_kincaid_grade("The cat sat.") == pytest.approx(-2.62, abs=1e-9)

    def test_tracks_difficulty(self):
        assert flesch_kincaid_grade("Go now.") < flesch_kincaid_grade(
            "Adaptive streaming necessitates sophisticated allocation.")


class TestFogToScore:
    def test_anchors(self):
        assert fog_to_score(2.0) == 10
        assert fog_to_score(20.0) == 1
        assert fog_to_score(50.0) == 1
        assert fog_to_score(0.0) == 10
        assert fog_to_score(12.0) == 5

    def test_monotone_nonincreasing(self):
        xs = np.linspace(0.0, 40.0, 401)
        scores = [fog_to_score(float(x)) for x in xs]
        assert all(b <= a for a, b in zip(scores, scores[1:]))
        assert all(1 <= s <= 10 for s in scores)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            fog_to_score(-0.5)


class TestTagScanner:
    def test_basic_strip(self):
        display, scores = scan_text("Plain words <3> more words.")
        assert display == "Plain words  more words."
        assert scores == [3]

    def test_default_score_constant(self):
        assert DEFAULT_SCORE == 5

    def test_tag_split_across_chunks(self):
        state = TagScanState()
        out = []
        scores = []
        for chunk in ("before <", "1", "0", "> after",):
            display, got, state = scan_chunk(state, chunk)
            out.append(display)
            scores.extend(got)
        assert "".join(out) == "before  after"
        assert scores == [10]

    def test_out_of_range_passthrough(self):
        display, scores = scan_text("a <11> b <0> c")
        assert display == "a <11> b <0> c"
        assert scores == []

    def test_pending_never_exceeds_cap(self):
        state = TagScanState()
        _, _, state = scan_chunk(state, "text ends with <1")
        assert len(state.pending) <= MAX_PENDING
        assert state.pending == "<1"

    def test_flush_returns_dangling_prefix(self):
        from cogstream.cogload import flush

        state = TagScanState()
        display, _, state = scan_chunk(state, "hang <1")
        tail, state = flush(state)
        assert display + tail == "hang <1"
        assert state.pending == ""

    def test_length_conservation(self):
        text = "x <3> y <10> z <11> w"
        display, scores = scan_text(text)
        stripped = sum(len(f"<{s}>") for s in scores)
        assert len(display) == len(text) - stripped

    def test_adjacent_tags_and_glue(self):
        display, scores = scan_text("ab<3><7>cd")
        assert display == "abcd"
        assert scores == [3, 7]

    def test_chunking_invariance_random(self):
        """Any partition of any text yields identical display and scores."""
        rng = np.random.default_rng(1234)
        pieces = ["word", " ", "<3>", "<10>", "<11>", "<", ">", "1", "0",
                  "text.", "a<5>b", "\n"]
        for _ in range(300):
            text = "".join(rng.choice(pieces) for _ in range(int(rng.integers(1, 30))))
            want_display, want_scores = scan_text(text)
            cuts = sorted(rng.integers(0, len(text) + 1, size=int(rng.integers(0, 6))))
            bounds = [0, *cuts, len(text)]
            state = TagScanState()
            display_parts, scores = [], []
            for lo, hi in zip(bounds, bounds[1:]):
                d, got, state = scan_chunk(state, text[lo:hi])
                display_parts.append(d)
                scores.extend(got)
            from cogstream.cogload import flush

            tail, _ = flush(state)
            assert "".join(display_parts) + tail == want_display
            assert scores == want_scores

    def test_offsets_agree_with_scan_text(self):
        rng = np.random.default_rng(77)
        pieces = ["alpha ", "<2>", "beta", " <9> ", "<11>", "gamma. ", "<", "7>"]
        for _ in range(200):
            text = "".join(rng.choice(pieces) for _ in range(int(rng.integers(1, 12))))
            display, marks = strip_tags_with_offsets(text)
            want_display, want_scores = scan_text(text)
            assert display == want_display
            assert [s for _, s in marks] == want_scores
            for offset, _ in marks:
                assert 0 <= offset <= len(display)
