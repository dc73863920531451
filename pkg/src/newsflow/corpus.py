"""Article corpus loading, validation, and trading-day alignment.

Articles arrive either as one-JSON-object-per-line files or as a directory
of text files with JSON metadata sidecars.  A trading calendar (one ISO date
per line) assigns each article to the trading day whose session window
contains its timestamp; the window for day t runs from the day boundary of t
up to (not including) the boundary of the next trading day, so weekend and
holiday articles fall back to the previous trading day.
"""

from __future__ import annotations

import datetime as dt
import json
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .errors import DuplicateId, EmptyCorpus, InputError, MalformedRecord

_MIDNIGHT = dt.time(0, 0)


def _parse_timestamp(raw: str) -> dt.datetime:
    """ISO-8601 to naive UTC: aware stamps are converted, naive taken as-is."""
    stamp = dt.datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(dt.timezone.utc).replace(tzinfo=None)
    return stamp


@dataclass(frozen=True)
class Article:
    id: str
    published_at: dt.datetime
    symbols: frozenset[str]
    title: str
    body: str
    contributor: str | None = None
    day: int | None = None  # trading-day ordinal, set by assign_trading_days

    def __post_init__(self):
        if not self.id:
            raise MalformedRecord("article id is empty")
        if not self.body:
            raise MalformedRecord(f"article {self.id!r} has empty body")


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing trading dates with contiguous ordinals from 0."""

    days: tuple[dt.date, ...]
    index: Mapping[dt.date, int] = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.days:
            raise InputError("trading calendar is empty")
        for prev, cur in zip(self.days, self.days[1:]):
            if cur <= prev:
                raise InputError(f"calendar dates not strictly increasing at {cur}")
        object.__setattr__(self, "index", {d: t for t, d in enumerate(self.days)})

    def __len__(self) -> int:
        return len(self.days)

    @classmethod
    def from_file(cls, path: str | Path) -> "TradingCalendar":
        days = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                days.append(dt.date.fromisoformat(line))
            except ValueError as exc:
                raise MalformedRecord(str(exc), source=str(path), position=lineno) from exc
        return cls(days=tuple(days))

    def month_of(self, day: int) -> tuple[int, int]:
        d = self.days[day]
        return (d.year, d.month)


@dataclass(frozen=True)
class ArticleSet:
    articles: tuple[Article, ...]
    by_symbol_day: Mapping[tuple[str, int], tuple[str, ...]] = field(default_factory=dict)
    unassigned_count: int = 0

    def __post_init__(self):
        ids = set()
        for art in self.articles:
            if art.id in ids:
                raise DuplicateId(art.id)
            ids.add(art.id)
        for (symbol, day), art_ids in self.by_symbol_day.items():
            for art_id in art_ids:
                if art_id not in ids:
                    raise InputError(f"by_symbol_day references unknown id {art_id!r}")

    def __len__(self) -> int:
        return len(self.articles)

    @property
    def symbols(self) -> set[str]:
        out: set[str] = set()
        for art in self.articles:
            out.update(art.symbols)
        return out


def _article_from_record(record: dict, source: str, position: int) -> Article:
    for key in ("id", "published_at", "symbols", "title", "body"):
        if key not in record:
            raise MalformedRecord(f"missing field {key!r}", source=source, position=position)
    try:
        published = _parse_timestamp(record["published_at"])
    except (ValueError, TypeError) as exc:
        raise MalformedRecord(f"bad published_at: {exc}", source=source, position=position) from exc
    symbols = record["symbols"]
    if not isinstance(symbols, (list, tuple)):
        raise MalformedRecord("symbols must be an array", source=source, position=position)
    try:
        return Article(
            id=str(record["id"]),
            published_at=published,
            symbols=frozenset(str(s).upper() for s in symbols),
            title=str(record["title"]),
            body=str(record["body"]),
            contributor=record.get("contributor"),
        )
    except MalformedRecord as exc:
        raise MalformedRecord(str(exc), source=source, position=position) from exc


def load_articles(path: str | Path, format: str = "jsonl") -> ArticleSet:
    """Load a corpus; ``by_symbol_day`` stays empty until assign_trading_days."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus path does not exist: {path}")
    if format == "jsonl":
        articles = _load_jsonl(path)
    elif format == "directory_of_text_files":
        articles = _load_directory(path)
    else:
        raise InputError(f"unknown corpus format {format!r}")
    if not articles:
        raise EmptyCorpus(f"no articles found in {path}")
    seen: set[str] = set()
    for art in articles:
        if art.id in seen:
            raise DuplicateId(art.id)
        seen.add(art.id)
    return ArticleSet(articles=tuple(articles))


def _load_jsonl(path: Path) -> list[Article]:
    articles = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"bad JSON: {exc}", source=str(path), position=lineno) from exc
            if not isinstance(record, dict):
                raise MalformedRecord("record is not an object", source=str(path), position=lineno)
            articles.append(_article_from_record(record, str(path), lineno))
    return articles


def _load_directory(path: Path) -> list[Article]:
    """Directory format: ``<name>.json`` metadata sidecar + ``<name>.txt`` body."""
    articles = []
    for meta_path in sorted(path.glob("*.json")):
        body_path = meta_path.with_suffix(".txt")
        if not body_path.exists():
            raise MalformedRecord("missing .txt body for sidecar", source=str(meta_path))
        try:
            record = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"bad JSON: {exc}", source=str(meta_path)) from exc
        record["body"] = body_path.read_text(encoding="utf-8")
        articles.append(_article_from_record(record, str(meta_path), 1))
    return articles


def serialize_articles(articles: Iterable[Article]) -> str:
    """Inverse of the jsonl loader; load -> serialize -> load round-trips."""
    lines = []
    for art in articles:
        lines.append(json.dumps({
            "id": art.id,
            "published_at": art.published_at.isoformat(),
            "symbols": sorted(art.symbols),
            "title": art.title,
            "body": art.body,
            "contributor": art.contributor,
        }, sort_keys=True))
    return "\n".join(lines) + "\n"


def assign_trading_days(
    article_set: ArticleSet,
    calendar: TradingCalendar,
    boundary: dt.time = _MIDNIGHT,
) -> ArticleSet:
    """Map each article to the trading day whose window contains it.

    Day t covers [boundary(date_t), boundary(date_{t+1})); the last day's
    window closes at boundary(last date + 1 calendar day).  Articles outside
    every window keep day=None and are counted, never dropped.
    """
    starts = [dt.datetime.combine(d, boundary) for d in calendar.days]
    end = dt.datetime.combine(calendar.days[-1] + dt.timedelta(days=1), boundary)

    assigned: list[Article] = []
    by_symbol_day: dict[tuple[str, int], list[str]] = {}
    unassigned = 0
    for art in article_set.articles:
        stamp = art.published_at
        if stamp < starts[0] or stamp >= end:
            assigned.append(replace(art, day=None))
            unassigned += 1
            continue
        day = bisect_right(starts, stamp) - 1
        assigned.append(replace(art, day=day))
        for symbol in sorted(art.symbols):
            by_symbol_day.setdefault((symbol, day), []).append(art.id)
    return ArticleSet(
        articles=tuple(assigned),
        by_symbol_day={k: tuple(v) for k, v in by_symbol_day.items()},
        unassigned_count=unassigned,
    )


def filter_by_symbols(article_set: ArticleSet, symbols: Iterable[str]) -> ArticleSet:
    """Keep articles whose symbol set intersects ``symbols`` (case-insensitive)."""
    wanted = {s.upper() for s in symbols}
    if not wanted:
        raise InputError("symbol filter is empty")
    kept = tuple(a for a in article_set.articles if a.symbols & wanted)
    kept_ids = {a.id for a in kept}
    by_symbol_day: dict[tuple[str, int], tuple[str, ...]] = {}
    for (symbol, day), ids in article_set.by_symbol_day.items():
        if symbol not in wanted:
            continue
        remaining = tuple(i for i in ids if i in kept_ids)
        if remaining:
            by_symbol_day[(symbol, day)] = remaining
    return ArticleSet(
        articles=kept,
        by_symbol_day=by_symbol_day,
        unassigned_count=sum(1 for a in kept if a.day is None),
    )
