"""Cognitive-load scoring of text: readability indices and inline load tags.

Two estimators produce a 1..10 load score (1 = hardest, 10 = easiest): the
Gunning-Fog index computed from the text itself, and explicit load tags of
the form <n> spliced into a generated stream by its producer.  The tag
scanner is incremental so tags split across arbitrary chunk boundaries are
reassembled without ever displaying them.

The tokenizer is deliberately simple and pinned: a word is a maximal run of
letters (with internal apostrophes), a sentence boundary is '.', '!' or '?'
followed by whitespace or end of text, and syllables are vowel groups
(aeiouy) with a trailing silent 'e' dropped unless the word ends in a
consonant plus 'le'.  Changing any of these rules changes scores; tests pin
hand-counted fixtures.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyText

# A load score is a plain int in 1..10; 1 flags the hardest text.
CogScore = int

SCORE_MIN = 1
SCORE_MAX = 10
# Neutral midpoint used for a tagged stream before its first tag arrives.
DEFAULT_SCORE: CogScore = 5

_WORD_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)*")
_BOUNDARY_RE = re.compile(r"[.!?](?=\s|$)")
_VOWELS = frozenset("aeiouy")
_SUFFIXES = ("ing", "es", "ed")

_TAG_RE = re.compile(r"<(10|[1-9])>")
# Every proper prefix of a valid tag; the scanner may hold at most this much.
_TAG_PREFIXES = frozenset(
    ["<", "<1", "<2", "<3", "<4", "<5", "<6", "<7", "<8", "<9", "<10"]
)
MAX_PENDING = 4


@dataclass(frozen=True)
class FogBreakdown:
    """The counts behind a Gunning-Fog index, for auditability."""

    words: int
    sentences: int
    complex_words: int
    index: float


@dataclass(frozen=True)
class TagScanState:
    """Carry-over between chunk scans: a possible tag prefix and last score."""

    pending: str = ""
    last_score: CogScore | None = None

    def __post_init__(self) -> None:
        if len(self.pending) > MAX_PENDING:
            raise ValueError(f"pending buffer too long: {self.pending!r}")


def syllable_count(word: str) -> int:
    """Heuristic syllable count: vowel groups with the silent-e rule."""
    w = word.lower()
    groups = 0
    prev_vowel = False
    for ch in w:
        is_vowel = ch in _VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if (
        w.endswith("e")
        and not (len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS)
        and groups > 1
    ):
        groups -= 1
    return max(groups, 1)


def _words_with_positions(text: str) -> list[tuple[str, int]]:
    return [(m.group(0), m.start()) for m in _WORD_RE.finditer(text)]


def _sentence_count(text: str) -> int:
    return max(1, len(_BOUNDARY_RE.findall(text)))


def _is_complex(word: str, at_sentence_start: bool) -> bool:
    if word[0].isupper() and not at_sentence_start:
        return False  # proper-noun proxy
    syllables = syllable_count(word)
    if syllables < 3:
        return False
    lower = word.lower()
    for suffix in _SUFFIXES:
        if lower.endswith(suffix):
            stem = lower[: -len(suffix)]
            if stem and syllable_count(stem) < 3:
                return False
            break
    return True


def gunning_fog(text: str) -> FogBreakdown:
    """Gunning-Fog index: 0.4 * (words/sentences + 100 * complex/words)."""
    words = _words_with_positions(text)
    if not words:
        raise EmptyText("no words found")
    boundaries = [m.start() for m in _BOUNDARY_RE.finditer(text)]
    sentences = max(1, len(boundaries))

    complex_count = 0
    b_iter = iter(boundaries)
    next_boundary = next(b_iter, None)
    at_start = True
    for word, pos in words:
        while next_boundary is not None and next_boundary < pos:
            at_start = True
            next_boundary = next(b_iter, None)
        if _is_complex(word, at_start):
            complex_count += 1
        at_start = False

    n_words = len(words)
    index = 0.4 * (n_words / sentences + 100.0 * complex_count / n_words)
    return FogBreakdown(
        words=n_words,
        sentences=sentences,
        complex_words=complex_count,
        index=index,
    )


def flesch_kincaid_grade(text: str) -> float:
    """Flesch-Kincaid grade level with the same tokenizer and syllables."""
    words = _words_with_positions(text)
    if not words:
        raise EmptyText("no words found")
    sentences = _sentence_count(text)
    syllables = sum(syllable_count(w) for w, _ in words)
    n = len(words)
    return 0.39 * (n / sentences) + 11.8 * (syllables / n) - 15.59


def fog_to_score(index: float) -> CogScore:
    """Map a fog index onto the 1..10 load scale (10 = easiest)."""
    if index < 0.0:
        raise ValueError(f"fog index must be >= 0, got {index!r}")
    return min(SCORE_MAX, max(SCORE_MIN, round(11.0 - index / 2.0)))


def scan_chunk(
    state: TagScanState, chunk: str
) -> tuple[str, list[CogScore], TagScanState]:
    """Strip complete <n> tags from a chunk, emitting their scores in order.

    Anything that could still become a tag (a proper prefix such as '<1' at
    the end of the chunk) is withheld in the returned state's pending buffer
    and re-examined with the next chunk.  Non-tags such as '<11>' or '<x'
    pass through untouched.
    """
    data = state.pending + chunk
    display_parts: list[str] = []
    scores: list[CogScore] = []
    pos = 0
    for m in _TAG_RE.finditer(data):
        display_parts.append(data[pos:m.start()])
        scores.append(int(m.group(1)))
        pos = m.end()
    rest = data[pos:]

    hold = 0
    for k in (3, 2, 1):
        if len(rest) >= k and rest[-k:] in _TAG_PREFIXES:
            hold = k
            break
    if hold:
        display_parts.append(rest[:-hold])
        pending = rest[-hold:]
    else:
        display_parts.append(rest)
        pending = ""

    last = scores[-1] if scores else state.last_score
    return "".join(display_parts), scores, TagScanState(pending=pending, last_score=last)


def flush(state: TagScanState) -> tuple[str, TagScanState]:
    """Release any withheld prefix at end of stream; it was not a tag."""
    return state.pending, TagScanState(pending="", last_score=state.last_score)


def scan_text(text: str) -> tuple[str, list[CogScore]]:
    """Scan a complete text in one go: stripped display text plus scores."""
    display, scores, state = scan_chunk(TagScanState(), text)
    tail, _ = flush(state)
    return display + tail, scores


def strip_tags_with_offsets(text: str) -> tuple[str, list[tuple[int, CogScore]]]:
    """Like scan_text, but report where in the display text each tag sat.

    Offsets index the display text: the character that would follow the
    tag.  A pacing loop uses them to switch rates at the exact word the
    tag precedes.
    """
    parts: list[str] = []
    marks: list[tuple[int, CogScore]] = []
    pos = 0
    out_len = 0
    for m in _TAG_RE.finditer(text):
        parts.append(text[pos : m.start()])
        out_len += m.start() - pos
        marks.append((out_len, int(m.group(1))))
        pos = m.end()
    parts.append(text[pos:])
    return "".join(parts), marks
