"""Sentiment lexicon parsing and cross-lexicon comparison.

Two on-disk formats are supported: flat word lists (one word per line, ';'
comments) that carry a single polarity, and structured entries of
whitespace-separated key=value pairs with type/len/word1/pos1/stemmed1/
priorpolarity attributes.  Only positive and negative entries score;
neutral and both-polarity entries are kept but flagged non-scoring.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyList, InputError, InvalidValue, LexiconNotFound, MissingField


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    BOTH = "both"


class PosTag(enum.Enum):
    ADJ = "adj"
    NOUN = "noun"
    VERB = "verb"
    ADVERB = "adverb"
    ANYPOS = "anypos"
    UNCONSTRAINED = "unconstrained"


class Strength(enum.Enum):
    STRONGSUBJ = "strongsubj"
    WEAKSUBJ = "weaksubj"
    UNSPECIFIED = "unspecified"


SCORING_POLARITIES = (Polarity.POSITIVE, Polarity.NEGATIVE)


@dataclass(frozen=True)
class LexiconEntry:
    word: str  # lowercase; multiword entries use single spaces
    polarity: Polarity
    stemmed: bool = False
    pos_tag: PosTag = PosTag.UNCONSTRAINED
    strength: Strength = Strength.UNSPECIFIED

    def __post_init__(self):
        if not self.word:
            raise InputError("lexicon entry word is empty")
        if self.word != self.word.lower():
            raise InputError(f"lexicon entry word must be lowercase: {self.word!r}")

    @property
    def length(self) -> int:
        return len(self.tokens)

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(self.word.split(" "))

    @property
    def is_scoring(self) -> bool:
        return self.polarity in SCORING_POLARITIES


_MPQA_KEYS = ("type", "len", "word1", "pos1", "stemmed1", "priorpolarity")

_STRENGTHS = {"strongsubj": Strength.STRONGSUBJ, "weaksubj": Strength.WEAKSUBJ}
_POS_TAGS = {t.value: t for t in PosTag if t is not PosTag.UNCONSTRAINED}
_POLARITIES = {p.value: p for p in Polarity}
_STEMMED = {"y": True, "n": False}


def parse_mpqa_line(line: str) -> LexiconEntry:
    """Parse a key=value entry line; unknown keys are ignored."""
    entry, _ = _parse_mpqa_line_counting(line)
    return entry


def _parse_mpqa_line_counting(line: str) -> tuple[LexiconEntry, int]:
    pairs: dict[str, str] = {}
    unknown = 0
    for token in line.split():
        if "=" not in token:
            raise InvalidValue("entry", token)
        key, _, value = token.partition("=")
        if key not in _MPQA_KEYS:
            unknown += 1
            continue
        pairs[key] = value
    for key in _MPQA_KEYS:
        if key not in pairs:
            raise MissingField(key, line)

    if pairs["type"] not in _STRENGTHS:
        raise InvalidValue("type", pairs["type"])
    if pairs["pos1"] not in _POS_TAGS:
        raise InvalidValue("pos1", pairs["pos1"])
    if pairs["stemmed1"] not in _STEMMED:
        raise InvalidValue("stemmed1", pairs["stemmed1"])
    if pairs["priorpolarity"] not in _POLARITIES:
        raise InvalidValue("priorpolarity", pairs["priorpolarity"])
    try:
        length = int(pairs["len"])
    except ValueError:
        raise InvalidValue("len", pairs["len"]) from None
    if length < 1:
        raise InvalidValue("len", pairs["len"])

    word = pairs["word1"].lower().replace("_", " ")
    entry = LexiconEntry(
        word=word,
        polarity=_POLARITIES[pairs["priorpolarity"]],
        stemmed=_STEMMED[pairs["stemmed1"]],
        pos_tag=_POS_TAGS[pairs["pos1"]],
        strength=_STRENGTHS[pairs["type"]],
    )
    if entry.length != length:
        raise InvalidValue("len", pairs["len"])
    return entry, unknown


def format_mpqa_line(entry: LexiconEntry) -> str:
    """Inverse of parse_mpqa_line for entries with explicit MPQA attributes."""
    if entry.pos_tag is PosTag.UNCONSTRAINED or entry.strength is Strength.UNSPECIFIED:
        raise InvalidValue("entry", entry.word)
    return (
        f"type={entry.strength.value} len={entry.length} word1={entry.word.replace(' ', '_')} "
        f"pos1={entry.pos_tag.value} stemmed1={'y' if entry.stemmed else 'n'} "
        f"priorpolarity={entry.polarity.value}"
    )


def parse_mpqa_file(path: str | Path) -> tuple[list[LexiconEntry], int]:
    """All entries of a structured lexicon file plus total unknown-key count."""
    path = Path(path)
    if not path.exists():
        raise LexiconNotFound(str(path))
    entries = []
    warnings = 0
    for raw in path.read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if not raw or raw.startswith(";"):
            continue
        entry, unknown = _parse_mpqa_line_counting(raw)
        entries.append(entry)
        warnings += unknown
    if not entries:
        raise EmptyList(str(path))
    return entries, warnings


def load_wordlist(path: str | Path, polarity: Polarity) -> list[LexiconEntry]:
    """Flat one-word-per-line list; lowercased, deduplicated, ';' comments."""
    path = Path(path)
    if not path.exists():
        raise LexiconNotFound(str(path))
    seen: set[str] = set()
    entries: list[LexiconEntry] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        raw = raw.strip()
        if not raw or raw.startswith(";"):
            continue
        word = raw.lower()
        if word in seen:
            continue
        seen.add(word)
        entries.append(LexiconEntry(word=word, polarity=polarity))
    if not entries:
        raise EmptyList(str(path))
    return entries


@dataclass(frozen=True)
class Lexicon:
    """Entries split into an unstemmed and a stemmed lookup index.

    Index keys are the entry's first token so multiword entries can be
    matched as contiguous token runs starting at a key hit.
    """

    name: str
    entries: tuple[LexiconEntry, ...]
    unstemmed_index: Mapping[str, tuple[LexiconEntry, ...]] = field(repr=False, default=None)  # type: ignore[assignment]
    stemmed_index: Mapping[str, tuple[LexiconEntry, ...]] = field(repr=False, default=None)  # type: ignore[assignment]
    duplicate_warnings: int = 0

    def scoring_entries(self) -> list[LexiconEntry]:
        return [e for e in self.entries if e.is_scoring]

    def words(self, polarity: Polarity) -> set[str]:
        return {e.word for e in self.entries if e.polarity is polarity}


def build_lexicon(name: str, entries: Iterable[LexiconEntry]) -> Lexicon:
    """Index entries; duplicate (word, pos_tag, stemmed) keeps the first."""
    entries = list(entries)
    if not entries:
        raise EmptyList(name)
    unique: list[LexiconEntry] = []
    seen: set[tuple[str, PosTag, bool]] = set()
    duplicates = 0
    for entry in entries:
        key = (entry.word, entry.pos_tag, entry.stemmed)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        unique.append(entry)

    unstemmed: dict[str, list[LexiconEntry]] = {}
    stemmed: dict[str, list[LexiconEntry]] = {}
    for entry in unique:
        target = stemmed if entry.stemmed else unstemmed
        target.setdefault(entry.tokens[0], []).append(entry)
    return Lexicon(
        name=name,
        entries=tuple(unique),
        unstemmed_index={k: tuple(v) for k, v in unstemmed.items()},
        stemmed_index={k: tuple(v) for k, v in stemmed.items()},
        duplicate_warnings=duplicates,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Per-polarity unique/shared word lists, frequency-ordered."""

    lexicon_a: str
    lexicon_b: str
    min_count: int
    unique_to_a: Mapping[Polarity, tuple[str, ...]]
    unique_to_b: Mapping[Polarity, tuple[str, ...]]
    shared: Mapping[Polarity, tuple[str, ...]]

    def top(self, which: str, polarity: Polarity, k: int = 10) -> tuple[str, ...]:
        table = {"a": self.unique_to_a, "b": self.unique_to_b, "shared": self.shared}[which]
        return table[polarity][:k]


def compare_lexica(
    a: Lexicon,
    b: Lexicon,
    corpus_freq: Mapping[str, int],
    min_count: int = 1,
) -> ComparisonReport:
    """Unique and shared scoring words, restricted to corpus-frequency >= min_count."""
    if min_count < 1:
        raise InputError("min_count must be >= 1")

    def qualifying(words: set[str]) -> set[str]:
        return {w for w in words if corpus_freq.get(w, 0) >= min_count}

    def ordered(words: set[str]) -> tuple[str, ...]:
        return tuple(sorted(words, key=lambda w: (-corpus_freq.get(w, 0), w)))

    unique_a: dict[Polarity, tuple[str, ...]] = {}
    unique_b: dict[Polarity, tuple[str, ...]] = {}
    shared: dict[Polarity, tuple[str, ...]] = {}
    for polarity in SCORING_POLARITIES:
        words_a = qualifying(a.words(polarity))
        words_b = qualifying(b.words(polarity))
        unique_a[polarity] = ordered(words_a - words_b)
        unique_b[polarity] = ordered(words_b - words_a)
        shared[polarity] = ordered(words_a & words_b)
    return ComparisonReport(
        lexicon_a=a.name,
        lexicon_b=b.name,
        min_count=min_count,
        unique_to_a=unique_a,
        unique_to_b=unique_b,
        shared=shared,
    )


def corpus_frequencies(tokenized_articles: Iterable[Sequence[Sequence[str]]]) -> dict[str, int]:
    """Word frequencies over tokenized articles (sentences of tokens)."""
    freq: dict[str, int] = {}
    for sentences in tokenized_articles:
        for sentence in sentences:
            for token in sentence:
                freq[token] = freq.get(token, 0) + 1
    return freq
