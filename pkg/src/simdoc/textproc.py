"""Deterministic text processing: sentence segmentation, word tokenization,
syllable counting and fixed-size document framing.

All operations are pure functions on immutable values, so they are safe to
call concurrently. The segmenter is rule-based on purpose: terminator
punctuation followed by whitespace and an uppercase letter or digit marks a
boundary, with a fixed abbreviation stop-list. This keeps every downstream
number bit-reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyText, EmptyToken

PAD_TOKEN = "<pad>"
DEFAULT_FRAME = 10

# Abbreviations that end with '.' but never terminate a sentence.
ABBREVIATIONS = frozenset(
    ["Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "vs.", "e.g.", "i.e.", "etc."]
)

_WORD_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*", re.UNICODE)
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")
_BOUNDARY_RE = re.compile(r"[.!?]+(\s+)(?=[A-Z0-9])")


@dataclass(frozen=True)
class Sentence:
    """One sentence with its word tokens. Padding sentences carry exactly
    the reserved pad token."""

    text: str
    tokens: tuple[str, ...]
    is_pad: bool = False


@dataclass(frozen=True)
class Document:
    """An ordered, framed list of sentences. Real sentences always precede
    padding sentences; ``pad_count`` records how many pads were appended."""

    id: str
    sentences: tuple[Sentence, ...]
    pad_count: int = 0


PAD_SENTENCE = Sentence(text=PAD_TOKEN, tokens=(PAD_TOKEN,), is_pad=True)


def tokenize_words(sentence_text: str) -> list[str]:
    """Return maximal alphanumeric runs, keeping internal apostrophes and
    hyphens; punctuation is dropped and case is preserved."""
    return _WORD_RE.findall(sentence_text)


def make_sentence(text: str) -> Sentence:
    """Build a non-pad Sentence with whitespace normalized to single spaces."""
    normalized = " ".join(text.split())
    return Sentence(text=normalized, tokens=tuple(tokenize_words(normalized)))


def split_sentences(text: str) -> list[Sentence]:
    """Segment ``text`` into sentences.

    A boundary occurs after a run of {., !, ?} followed by whitespace and an
    uppercase letter or digit, unless the preceding word is on the
    abbreviation stop-list. Raises EmptyText on empty/whitespace-only input.
    """
    if not text or not text.strip():
        raise EmptyText("cannot segment empty text")
    pieces: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(text):
        terminator_end = match.start(1)
        prefix = text[:terminator_end]
        last_word = prefix.rsplit(None, 1)[-1] if prefix.split() else ""
        if last_word in ABBREVIATIONS:
            continue
        pieces.append(text[start:terminator_end])
        start = match.end()
    pieces.append(text[start:])
    return [make_sentence(p) for p in pieces if p.strip()]


def count_syllables(word: str) -> int:
    """Count syllables as maximal vowel groups (a,e,i,o,u,y), minus one for
    a trailing silent 'e' (kept when the word ends in consonant + 'le');
    always at least 1."""
    if not word:
        raise EmptyToken("cannot count syllables of an empty token")
    lowered = word.lower()
    count = len(_VOWEL_GROUP_RE.findall(lowered))
    if lowered.endswith("e"):
        consonant_le = (
            len(lowered) >= 3
            and lowered.endswith("le")
            and lowered[-3] not in "aeiouy"
        )
        if not consonant_le:
            count -= 1
    return max(count, 1)


def frame_document(
    sentences: list[Sentence] | tuple[Sentence, ...],
    frame: int = DEFAULT_FRAME,
    doc_id: str = "doc",
) -> Document:
    """Keep the first ``frame`` real sentences, appending pad sentences
    (one pad token each) up to ``frame``. Idempotent for a fixed frame."""
    if frame < 1:
        raise ValueError("frame must be >= 1")
    real = [s for s in sentences if not s.is_pad]
    if not real:
        raise EmptyText("cannot frame an empty sentence list")
    kept = real[:frame]
    pad_count = frame - len(kept)
    return Document(
        id=doc_id,
        sentences=tuple(kept) + (PAD_SENTENCE,) * pad_count,
        pad_count=pad_count,
    )


def document_from_text(text: str, frame: int = DEFAULT_FRAME, doc_id: str = "doc") -> Document:
    """Segment ``text`` and frame it in one step."""
    return frame_document(split_sentences(text), frame=frame, doc_id=doc_id)


def non_pad_sentences(doc: Document) -> list[Sentence]:
    return [s for s in doc.sentences if not s.is_pad]


def document_text(doc: Document) -> str:
    """Join the non-pad sentence texts with single spaces."""
    return " ".join(s.text for s in non_pad_sentences(doc))


def document_tokens(doc: Document) -> list[str]:
    """All word tokens of the non-pad sentences, in order."""
    tokens: list[str] = []
    for sentence in non_pad_sentences(doc):
        tokens.extend(sentence.tokens)
    return tokens
