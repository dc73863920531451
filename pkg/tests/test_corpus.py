import datetime as dt
import json

import pytest

from newsflow.corpus import (
    Article,
    ArticleSet,
    TradingCalendar,
    assign_trading_days,
    filter_by_symbols,
    load_articles,
    serialize_articles,
)
from newsflow.errors import DuplicateId, EmptyCorpus, InputError, MalformedRecord


def record(i, published="2020-01-06T12:00:00", symbols=("AAPL",), body="Stocks fell."):
    return {
        "id": f"a{i}",
        "published_at": published,
        "symbols": list(symbols),
        "title": f"title {i}",
        "body": body,
        "contributor": None,
    }


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def calendar():
    # Mon 2020-01-06 .. Fri 2020-01-10, then Mon 2020-01-13 (weekend gap)
    days = [dt.date(2020, 1, d) for d in (6, 7, 8, 9, 10, 13)]
    return TradingCalendar(days=tuple(days))


def test_load_two_records(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1), record(2)])
    articles = load_articles(path, "jsonl")
    assert len(articles) == 2
    assert articles.articles[0].symbols == frozenset({"AAPL"})


def test_duplicate_id_rejected(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1), record(1)])
    with pytest.raises(DuplicateId):
        load_articles(path, "jsonl")


def test_missing_published_at_names_field(tmp_path):
    bad = record(1)
    del bad["published_at"]
    path = write_jsonl(tmp_path / "c.jsonl", [bad])
    with pytest.raises(MalformedRecord, match="published_at"):
        load_articles(path, "jsonl")


def test_empty_corpus(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(EmptyCorpus):
        load_articles(path, "jsonl")


def test_malformed_json_has_position(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(record(1)) + "\n{broken\n", encoding="utf-8")
    with pytest.raises(MalformedRecord) as err:
        load_articles(path, "jsonl")
    assert err.value.position == 2


def test_directory_format(tmp_path):
    meta = {k: v for k, v in record(7).items() if k != "body"}
    (tmp_path / "art7.json").write_text(json.dumps(meta), encoding="utf-8")
    (tmp_path / "art7.txt").write_text("Body text here.", encoding="utf-8")
    articles = load_articles(tmp_path, "directory_of_text_files")
    assert len(articles) == 1
    assert articles.articles[0].body == "Body text here."


def test_assign_interior_day(calendar, tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1, "2020-01-07T12:00:00")])
    assigned = assign_trading_days(load_articles(path), calendar)
    assert assigned.articles[0].day == 1
    assert assigned.unassigned_count == 0


def test_assign_weekend_to_previous_trading_day(calendar, tmp_path):
    # Saturday between Fri 01-10 (t=4) and Mon 01-13 (t=5)
    path = write_jsonl(tmp_path / "c.jsonl", [record(1, "2020-01-11T15:00:00")])
    assigned = assign_trading_days(load_articles(path), calendar)
    assert assigned.articles[0].day == 4


def test_assign_before_first_day_unassigned(calendar, tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1, "2020-01-03T10:00:00")])
    assigned = assign_trading_days(load_articles(path), calendar)
    assert assigned.articles[0].day is None
    assert assigned.unassigned_count == 1


def test_assign_after_last_day_window_unassigned(calendar, tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1, "2020-01-14T00:00:00")])
    assigned = assign_trading_days(load_articles(path), calendar)
    assert assigned.articles[0].day is None


def test_assign_custom_boundary(calendar, tmp_path):
    # with a 16:00 boundary, a 17:00 article on day t belongs to day t's session
    # only if it is before the *next* boundary; here it lands on day t itself
    path = write_jsonl(tmp_path / "c.jsonl", [record(1, "2020-01-07T15:59:00")])
    assigned = assign_trading_days(load_articles(path), calendar, boundary=dt.time(16, 0))
    assert assigned.articles[0].day == 0  # before 2020-01-07T16:00 boundary


def test_assign_idempotent(calendar, tmp_path):
    path = write_jsonl(
        tmp_path / "c.jsonl",
        [record(1, "2020-01-07T12:00:00"), record(2, "2020-01-11T00:00:00")],
    )
    once = assign_trading_days(load_articles(path), calendar)
    twice = assign_trading_days(once, calendar)
    assert once == twice


def test_multi_symbol_multiplicity(calendar, tmp_path):
    path = write_jsonl(
        tmp_path / "c.jsonl",
        [record(1, symbols=("AAPL", "MSFT")), record(2, symbols=("AAPL",))],
    )
    assigned = assign_trading_days(load_articles(path), calendar)
    keyed = sum(len(ids) for ids in assigned.by_symbol_day.values())
    assert keyed == 3  # article 1 appears under both symbols
    assert set(assigned.by_symbol_day) == {("AAPL", 0), ("MSFT", 0)}


def test_jsonl_round_trip(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [record(1), record(2, symbols=("MSFT", "IBM"))])
    articles = load_articles(path)
    again = tmp_path / "again.jsonl"
    again.write_text(serialize_articles(articles.articles), encoding="utf-8")
    reloaded = load_articles(again)
    assert serialize_articles(reloaded.articles) == serialize_articles(articles.articles)
    assert reloaded.articles == articles.articles


def test_filter_by_symbols(tmp_path, calendar):
    records = [
        record(1, symbols=("AAPL",)),
        record(2, symbols=("AAPL", "MSFT")),
        record(3, symbols=("MSFT",)),
        record(4, symbols=("AAPL",)),
        record(5, symbols=("IBM",)),
    ]
    articles = assign_trading_days(load_articles(write_jsonl(tmp_path / "c.jsonl", records)), calendar)
    aapl = filter_by_symbols(articles, {"aapl"})
    assert len(aapl) == 3
    assert all("AAPL" in a.symbols for a in aapl.articles)
    assert set(aapl.by_symbol_day) == {("AAPL", 0)}

    assert len(filter_by_symbols(articles, {"TSLA"})) == 0
    assert filter_by_symbols(articles, {"AAPL", "MSFT", "IBM"}).articles == articles.articles


def test_calendar_strictly_increasing():
    with pytest.raises(InputError):
        TradingCalendar(days=(dt.date(2020, 1, 7), dt.date(2020, 1, 6)))


def test_calendar_from_file(tmp_path):
    path = tmp_path / "cal.txt"
    path.write_text("2020-01-06\n2020-01-07\n", encoding="utf-8")
    cal = TradingCalendar.from_file(path)
    assert cal.index[dt.date(2020, 1, 7)] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("2020-01-06\nnot-a-date\n", encoding="utf-8")
    with pytest.raises(MalformedRecord):
        TradingCalendar.from_file(bad)


def test_article_set_rejects_unknown_reference():
    art = Article(
        id="a1",
        published_at=dt.datetime(2020, 1, 6, 12),
        symbols=frozenset({"AAPL"}),
        title="t",
        body="b",
    )
    with pytest.raises(InputError):
        ArticleSet(articles=(art,), by_symbol_day={("AAPL", 0): ("ghost",)})
