"""Tokenization, lexicon scoring with negation handling, and daily aggregation.

Scoring runs two passes over each article: unstemmed lexicon entries match
raw tokens first, then stemmed entries match the stems of whatever is still
unclaimed, so no token is ever counted twice.  A negation word within the
configured token distance of a matched word (same sentence) flips its
polarity once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import EmptyText, InputError, NoActiveRecords, WindowOutOfRange
from .lexicon import Lexicon, LexiconEntry, Polarity, PosTag
from .stemmer import porter_stem

# Words whose trailing period does not terminate a sentence.
_ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "prof", "rev", "gen", "sen", "rep", "sr", "jr",
    "st", "vs", "etc", "inc", "ltd", "co", "corp", "no", "nos", "dept",
    "est", "fig", "al", "approx", "e.g", "i.e", "u.s", "u.k", "a.m", "p.m",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct",
    "nov", "dec",
})

_TERMINATOR = re.compile(r"[.!?]+(?=\s|$)")
_WORD_RUN = re.compile(r"[a-z']+")

DEFAULT_NEGATORS = ("not", "never", "no", "neither", "nor", "none", "n't")


@dataclass(frozen=True)
class NegationConfig:
    window: int = 5
    negators: frozenset[str] = frozenset(DEFAULT_NEGATORS)
    bidirectional: bool = True


# A tagger maps a sentence's tokens to one part-of-speech tag per token.
Tagger = Callable[[Sequence[str]], Sequence[PosTag]]


@dataclass(frozen=True)
class MatchPolicy:
    """How part-of-speech constraints on lexicon entries are enforced.

    The default ignores pos tags entirely.  Strict mode matches anypos and
    unconstrained entries always, and tag-constrained entries only when the
    pluggable tagger confirms the tag (for multiword entries, the tag of the
    first token).
    """

    strict_pos: bool = False
    tagger: Tagger | None = None

    def __post_init__(self):
        if self.strict_pos and self.tagger is None:
            raise InputError("strict POS matching requires a tagger")


@dataclass(frozen=True)
class TokenizedArticle:
    """Sentences of lowercase word tokens; punctuation and numbers dropped."""

    sentences: tuple[tuple[str, ...], ...]

    @property
    def word_count(self) -> int:
        return sum(len(s) for s in self.sentences)


def _is_abbreviation(text: str, period_at: int) -> bool:
    start = period_at
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] == "."):
        start -= 1
    token = text[start:period_at].lower().rstrip(".")
    if not token:
        return False
    if token in _ABBREVIATIONS:
        return True
    # single-letter initials such as "J." or internal-dot runs like "u.s"
    return len(token) == 1 and token.isalpha()


def _split_sentences(text: str) -> list[str]:
    sentences = []
    start = 0
    for match in _TERMINATOR.finditer(text):
        if text[match.start()] == "." and match.group() == "." and _is_abbreviation(text, match.start()):
            continue
        sentences.append(text[start : match.end()])
        start = match.end()
    if start < len(text):
        sentences.append(text[start:])
    return [s for s in (s.strip() for s in sentences) if s]


def _word_tokens(sentence: str) -> list[str]:
    tokens: list[str] = []
    for run in _WORD_RUN.findall(sentence.lower()):
        word = run.strip("'")
        if not word:
            continue
        if word.endswith("n't") and len(word) > 3:
            tokens.append(word[:-3])
            tokens.append("n't")
        else:
            tokens.append(word)
    return tokens


def tokenize(text: str) -> TokenizedArticle:
    """Sentence-split then extract word tokens (alphabetic + apostrophe runs)."""
    if not text or not text.strip():
        raise EmptyText("cannot tokenize empty text")
    sentences = []
    for sentence in _split_sentences(text):
        tokens = _word_tokens(sentence)
        if tokens:
            sentences.append(tuple(tokens))
    return TokenizedArticle(sentences=tuple(sentences))


@dataclass(frozen=True)
class ArticleScore:
    article_id: str
    lexicon_name: str
    pos_count: int
    neg_count: int
    word_count: int

    def __post_init__(self):
        if self.word_count < 1:
            raise EmptyText(f"article {self.article_id!r} has no word tokens")

    @property
    def pos_prop(self) -> float:
        return self.pos_count / self.word_count

    @property
    def neg_prop(self) -> float:
        return self.neg_count / self.word_count


def _negator_positions(tokens: Sequence[str], negators: frozenset[str]) -> list[int]:
    return [i for i, tok in enumerate(tokens) if tok in negators]


def _is_negated(span: tuple[int, int], negator_pos: Sequence[int], config: NegationConfig) -> bool:
    start, end = span  # [start, end) token positions of the match
    for p in negator_pos:
        if start <= p < end:
            continue
        if p < start:
            if start - p <= config.window:
                return True
        elif config.bidirectional and p - end + 1 <= config.window:
            return True
    return False


def _pos_allows(entry: LexiconEntry, tags: Sequence[PosTag] | None, i: int) -> bool:
    if tags is None or entry.pos_tag in (PosTag.ANYPOS, PosTag.UNCONSTRAINED):
        return True
    return tags[i] is entry.pos_tag


def _match_at(
    tokens: Sequence[str],
    i: int,
    claimed: list[bool],
    entries: Sequence[LexiconEntry],
    tags: Sequence[PosTag] | None = None,
) -> tuple[LexiconEntry, int] | None:
    """Longest scoring entry whose token run matches unclaimed tokens at i."""
    best: tuple[LexiconEntry, int] | None = None
    for entry in entries:
        if not entry.is_scoring or not _pos_allows(entry, tags, i):
            continue
        width = entry.length
        if best is not None and width <= best[1]:
            continue
        if i + width > len(tokens):
            continue
        if any(claimed[i + k] for k in range(width)):
            continue
        if tuple(tokens[i : i + width]) == entry.tokens:
            best = (entry, width)
    return best


def score_article(
    article: TokenizedArticle,
    lex: Lexicon,
    negation: NegationConfig = NegationConfig(),
    article_id: str = "",
    policy: MatchPolicy = MatchPolicy(),
) -> ArticleScore:
    """Two-pass lexicon projection of one tokenized article."""
    if article.word_count < 1:
        raise EmptyText(f"article {article_id!r} has no word tokens")
    pos_count = 0
    neg_count = 0
    for tokens in article.sentences:
        claimed = [False] * len(tokens)
        negator_pos = _negator_positions(tokens, negation.negators)
        matches: list[tuple[LexiconEntry, tuple[int, int]]] = []
        tags = tuple(policy.tagger(tokens)) if policy.strict_pos else None

        # pass 1: unstemmed entries against raw tokens
        for i, token in enumerate(tokens):
            if claimed[i]:
                continue
            hit = _match_at(tokens, i, claimed, lex.unstemmed_index.get(token, ()), tags)
            if hit is None:
                continue
            entry, width = hit
            for k in range(width):
                claimed[i + k] = True
            matches.append((entry, (i, i + width)))

        # pass 2: stemmed entries against stems of unclaimed tokens
        stems = tuple(porter_stem(tok) for tok in tokens)
        for i, stem in enumerate(stems):
            if claimed[i]:
                continue
            hit = _match_at(stems, i, claimed, lex.stemmed_index.get(stem, ()), tags)
            if hit is None:
                continue
            entry, width = hit
            for k in range(width):
                claimed[i + k] = True
            matches.append((entry, (i, i + width)))

        for entry, span in matches:
            polarity = entry.polarity
            if _is_negated(span, negator_pos, negation):
                polarity = Polarity.NEGATIVE if polarity is Polarity.POSITIVE else Polarity.POSITIVE
            if polarity is Polarity.POSITIVE:
                pos_count += 1
            else:
                neg_count += 1

    return ArticleScore(
        article_id=article_id,
        lexicon_name=lex.name,
        pos_count=pos_count,
        neg_count=neg_count,
        word_count=article.word_count,
    )


def classify_article(score: ArticleScore) -> Polarity:
    if score.pos_prop > score.neg_prop:
        return Polarity.POSITIVE
    if score.pos_prop < score.neg_prop:
        return Polarity.NEGATIVE
    return Polarity.NEUTRAL


@dataclass(frozen=True)
class SentimentRecord:
    """Per symbol-day sentiment variables for one lexicon projection."""

    symbol: str
    day: int
    lexicon_name: str
    active: int  # article-arrival indicator, 0 or 1
    pos: float
    neg: float
    n_articles: int = 0


def aggregate_daily(
    scores: Sequence[ArticleScore],
    symbol: str,
    day: int,
    lexicon_name: str | None = None,
) -> SentimentRecord:
    """Unweighted mean of article proportions; zeros when no articles."""
    if lexicon_name is None:
        if not scores:
            raise ValueError("lexicon_name required when scores is empty")
        lexicon_name = scores[0].lexicon_name
    if not scores:
        return SentimentRecord(symbol, day, lexicon_name, active=0, pos=0.0, neg=0.0)
    n = len(scores)
    return SentimentRecord(
        symbol=symbol,
        day=day,
        lexicon_name=lexicon_name,
        active=1,
        pos=sum(s.pos_prop for s in scores) / n,
        neg=sum(s.neg_prop for s in scores) / n,
        n_articles=n,
    )


def cumulative_record(
    records: Mapping[int, SentimentRecord],
    t: int,
    h: int,
) -> SentimentRecord:
    """Pool article proportions over trading days t .. t+h-1.

    Pooling weights each day by its article count, which equals averaging
    per-article proportions over every article in the window.
    """
    if h < 1:
        raise WindowOutOfRange(f"h must be >= 1, got {h}")
    window = []
    for day in range(t, t + h):
        if day not in records:
            raise WindowOutOfRange(f"no record for day {day}")
        window.append(records[day])
    base = window[0]
    n = sum(r.n_articles for r in window)
    if n == 0:
        return SentimentRecord(base.symbol, t, base.lexicon_name, active=0, pos=0.0, neg=0.0)
    pos = sum(r.n_articles * r.pos for r in window) / n
    neg = sum(r.n_articles * r.neg for r in window) / n
    return SentimentRecord(base.symbol, t, base.lexicon_name, active=1, pos=pos, neg=neg, n_articles=n)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    sd: float
    maximum: float
    q1: float
    q2: float
    q3: float


@dataclass(frozen=True)
class SentimentSummary:
    """Descriptive statistics conditional on article arrival."""

    n_active: int
    pos: SummaryStats
    neg: SummaryStats
    share_pos_dominant: float  # P(pos > neg)
    share_neg_dominant: float  # P(neg > pos)


def _quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear interpolation between order statistics."""
    n = len(sorted_values)
    if n == 1:
        return sorted_values[0]
    pos = q * (n - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return sorted_values[lo] * (1 - frac) + sorted_values[hi] * frac


def _summary(values: list[float]) -> SummaryStats:
    n = len(values)
    mean = sum(values) / n
    sd = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
    ordered = sorted(values)
    return SummaryStats(
        mean=mean,
        sd=sd,
        maximum=ordered[-1],
        q1=_quantile(ordered, 0.25),
        q2=_quantile(ordered, 0.50),
        q3=_quantile(ordered, 0.75),
    )


def sentiment_summary(records: Iterable[SentimentRecord]) -> SentimentSummary:
    active = [r for r in records if r.active]
    if not active:
        raise NoActiveRecords("no records with article arrival")
    n = len(active)
    return SentimentSummary(
        n_active=n,
        pos=_summary([r.pos for r in active]),
        neg=_summary([r.neg for r in active]),
        share_pos_dominant=sum(1 for r in active if r.pos > r.neg) / n,
        share_neg_dominant=sum(1 for r in active if r.neg > r.pos) / n,
    )


def _pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx <= 0.0 or syy <= 0.0:
        return None
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def monthly_lexicon_correlation(
    records_by_lexicon: Mapping[str, Sequence[SentimentRecord]],
    month_of_day: Mapping[int, tuple[int, int]],
) -> dict[tuple[str, str], dict[tuple[int, int], tuple[float | None, float | None]]]:
    """Monthly Pearson correlation of Pos and Neg between each lexicon pair.

    Observations are symbol-days with article arrival under both lexica;
    months with fewer than two paired observations (or zero variance) yield
    ``None``.  ``month_of_day`` maps trading-day ordinals to (year, month).
    """
    names = sorted(records_by_lexicon)
    indexed = {
        name: {(r.symbol, r.day): r for r in records_by_lexicon[name] if r.active}
        for name in names
    }
    out: dict[tuple[str, str], dict[tuple[int, int], tuple[float | None, float | None]]] = {}
    for i, name_a in enumerate(names):
        for name_b in names[i + 1 :]:
            keys = sorted(indexed[name_a].keys() & indexed[name_b].keys())
            by_month: dict[tuple[int, int], list[tuple[str, int]]] = {}
            for key in keys:
                by_month.setdefault(month_of_day[key[1]], []).append(key)
            series: dict[tuple[int, int], tuple[float | None, float | None]] = {}
            for month, month_keys in sorted(by_month.items()):
                if len(month_keys) < 2:
                    series[month] = (None, None)
                    continue
                rec_a = [indexed[name_a][k] for k in month_keys]
                rec_b = [indexed[name_b][k] for k in month_keys]
                series[month] = (
                    _pearson([r.pos for r in rec_a], [r.pos for r in rec_b]),
                    _pearson([r.neg for r in rec_a], [r.neg for r in rec_b]),
                )
            out[(name_a, name_b)] = series
    return out
