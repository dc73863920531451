"""Command line pipeline: distill, indicators, panel, simulate, lexstats, report.

Every subcommand is a pure function of (inputs, config, seed); outputs are
written atomically and re-runs are byte-identical.  Exit codes: 0 success,
2 input error, 3 numerical failure; errors print one machine-readable
"ERROR <CODE>: detail" line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import figures, indicators as ind_mod, lexicon as lex_mod, sentiment as sent_mod
from ._util import atomic_write_text, ordered_map, split_seed, write_csv
from .config import RunConfig, config_fingerprint, load_config
from .corpus import TradingCalendar
from .errors import (
    InputError,
    MissingInput,
    NewsflowError,
    NumericalError,
    TooFewBootstraps,
)
from .panel import (
    ClusterMode,
    MarketSeries,
    PanelInputs,
    compute_attention_groups,
    format_suite_table,
    run_specification_suite,
    suite_rows,
)
from .simulate import (
    ScenarioConfig,
    band_overlap_region,
    build_residual_model,
    build_sentiment_models,
    local_linear_fit,
    plugin_bandwidth,
    simulate_scenario,
    uniform_band,
)

SENTIMENT_CSV = "sentiment.csv"
INDICATORS_CSV = "indicators.csv"


def _write_manifest(config: RunConfig, command: str, inputs: list[Path]) -> None:
    manifest = config_fingerprint(config, inputs)
    manifest["command"] = command
    path = config.output_dir / f"manifest_{command}.json"
    atomic_write_text(path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _load_lexica(config: RunConfig) -> dict[str, lex_mod.Lexicon]:
    lexica = {}
    for source in config.lexicons:
        if source.kind == "wordlists":
            entries = lex_mod.load_wordlist(source.paths[0], lex_mod.Polarity.POSITIVE)
            entries += lex_mod.load_wordlist(source.paths[1], lex_mod.Polarity.NEGATIVE)
        else:
            entries, _ = lex_mod.parse_mpqa_file(source.paths[0])
        lexica[source.name] = lex_mod.build_lexicon(source.name, entries)
    return lexica


def _load_assigned_corpus(config: RunConfig) -> tuple[TradingCalendar, corpus_mod.ArticleSet]:
    calendar = TradingCalendar.from_file(config.calendar_path)
    articles = corpus_mod.load_articles(config.corpus_path, config.corpus_format)
    if config.symbols:
        articles = corpus_mod.filter_by_symbols(articles, config.symbols)
    assigned = corpus_mod.assign_trading_days(articles, calendar, config.day_boundary)
    return calendar, assigned


def cmd_distill(config: RunConfig) -> int:
    config.validate(need=("corpus", "calendar", "lexicons"))
    calendar, assigned = _load_assigned_corpus(config)
    lexica = _load_lexica(config)

    tokenized: dict[str, sent_mod.TokenizedArticle] = {}
    zero_word = 0
    usable = [a for a in assigned.articles if a.day is not None]
    for article in usable:
        tok = sent_mod.tokenize(article.title + ". " + article.body)
        if tok.word_count == 0:
            zero_word += 1
            continue
        tokenized[article.id] = tok

    universe = sorted(config.symbols) if config.symbols else sorted(assigned.symbols)
    article_ids = sorted(tokenized)
    rows = []
    for name in sorted(lexica):
        lex = lexica[name]
        scores = ordered_map(
            lambda i: sent_mod.score_article(tokenized[i], lex, config.negation, article_id=i),
            article_ids,
        )
        score_of = dict(zip(article_ids, scores))
        for symbol in universe:
            for day in range(len(calendar)):
                day_scores = [
                    score_of[i]
                    for i in assigned.by_symbol_day.get((symbol, day), ())
                    if i in score_of
                ]
                rec = sent_mod.aggregate_daily(day_scores, symbol, day, lexicon_name=name)
                rows.append((
                    symbol, calendar.days[day].isoformat(), name,
                    rec.active, rec.pos, rec.neg, rec.n_articles,
                ))

    write_csv(
        config.output_dir / SENTIMENT_CSV,
        ("symbol", "date", "lexicon", "I", "pos", "neg", "n_articles"),
        rows,
    )
    _write_manifest(config, "distill", [config.corpus_path, config.calendar_path])
    print(f"articles={len(assigned.articles)} assigned={len(usable)} "
          f"unassigned={assigned.unassigned_count} zero_word={zero_word} rows={len(rows)}")
    return 0


def cmd_indicators(config: RunConfig) -> int:
    config.validate(need=("prices", "calendar"))
    calendar = TradingCalendar.from_file(config.calendar_path)
    grouped = ind_mod.load_market_bars(config.prices_path, calendar)

    rows = []
    totals = ind_mod.IndicatorWarnings()
    for symbol in sorted(grouped):
        points, warnings = ind_mod.compute_indicators(
            grouped[symbol], n_days=len(calendar), window=config.detrend_window
        )
        totals.degenerate_bars += warnings.degenerate_bars
        totals.zero_volume_days += warnings.zero_volume_days
        totals.warmup_days += warnings.warmup_days
        for p in points:
            rows.append((
                p.symbol, calendar.days[p.day].isoformat(),
                p.log_vol, p.detrended_volume, p.ret,
            ))

    write_csv(
        config.output_dir / INDICATORS_CSV,
        ("symbol", "date", "log_vol", "detrended_volume", "ret"),
        rows,
    )
    _write_manifest(config, "indicators", [config.prices_path, config.calendar_path])
    print(f"rows={len(rows)} degenerate_bars={totals.degenerate_bars} "
          f"zero_volume={totals.zero_volume_days} warmup={totals.warmup_days}")
    return 0


def _read_sentiment_csv(path: Path, calendar: TradingCalendar) -> dict[str, list[sent_mod.SentimentRecord]]:
    if not path.exists():
        raise MissingInput(f"sentiment output not found: {path} (run distill first)")
    out: dict[str, list[sent_mod.SentimentRecord]] = {}
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            day = calendar.index.get(dt.date.fromisoformat(row["date"]))
            if day is None:
                raise InputError(f"sentiment date {row['date']} not in calendar")
            out.setdefault(row["lexicon"], []).append(sent_mod.SentimentRecord(
                symbol=row["symbol"],
                day=day,
                lexicon_name=row["lexicon"],
                active=int(row["I"]),
                pos=float(row["pos"]),
                neg=float(row["neg"]),
                n_articles=int(row["n_articles"]),
            ))
    if not out:
        raise MissingInput(f"sentiment file {path} is empty")
    return out


def _read_indicators_csv(path: Path, calendar: TradingCalendar) -> dict[tuple[str, int], ind_mod.IndicatorPoint]:
    if not path.exists():
        raise MissingInput(f"indicator output not found: {path} (run indicators first)")
    points = {}
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            day = calendar.index.get(dt.date.fromisoformat(row["date"]))
            if day is None:
                raise InputError(f"indicator date {row['date']} not in calendar")
            points[(row["symbol"], day)] = ind_mod.IndicatorPoint(
                symbol=row["symbol"],
                day=day,
                log_vol=float(row["log_vol"]) if row["log_vol"] else None,
                detrended_volume=float(row["detrended_volume"]) if row["detrended_volume"] else None,
                ret=float(row["ret"]) if row["ret"] else None,
            )
    return points


def _load_sectors(path: Path) -> dict[str, str]:
    sectors = {}
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            sectors[row["symbol"].upper()] = row["sector"]
    return sectors


def _panel_inputs(config: RunConfig, need_sectors: bool) -> tuple[TradingCalendar, PanelInputs]:
    calendar = TradingCalendar.from_file(config.calendar_path)
    records = _read_sentiment_csv(config.output_dir / SENTIMENT_CSV, calendar)
    points = _read_indicators_csv(config.output_dir / INDICATORS_CSV, calendar)
    market = MarketSeries.from_csv(config.market_path, calendar)
    sectors = None
    if need_sectors:
        config.validate(need=("sectors",))
        sectors = _load_sectors(config.sectors_path)
    return calendar, PanelInputs(
        records_by_lexicon=records,
        indicator_points=points,
        market=market,
        n_days=len(calendar),
        sectors=sectors,
    )


def cmd_panel(config: RunConfig) -> int:
    config.validate(need=("calendar", "market"))
    calendar, inputs = _panel_inputs(config, need_sectors="sector" in config.suites)
    cluster = ClusterMode(config.cluster_mode)

    for suite in config.suites:
        cells = run_specification_suite(inputs, suite, h=config.lag_h, cluster_mode=cluster)
        write_csv(
            config.output_dir / f"results_{suite}.csv",
            ("spec", "variable", "estimate", "std_error", "p_value", "stars"),
            suite_rows(cells),
        )
        atomic_write_text(config.output_dir / f"table_{suite}.txt", format_suite_table(cells))
        if suite == "entire":
            for cell in cells:
                if cell.result is None or cell.spec.dependent != "log_vol":
                    continue
                res = cell.result
                rows = [
                    (ent, int(t), float(r))
                    for ent, t, r in zip(res.entity_labels, res.time_labels, res.residuals)
                ]
                write_csv(
                    config.output_dir / f"residuals_log_vol_{cell.spec.projection}.csv",
                    ("symbol", "day", "residual"),
                    rows,
                )
        n_ok = sum(1 for c in cells if c.result is not None)
        print(f"suite={suite} cells={len(cells)} fitted={n_ok}")

    _write_manifest(config, "panel", [config.market_path,
                                      config.output_dir / SENTIMENT_CSV,
                                      config.output_dir / INDICATORS_CSV])
    return 0


def _read_entire_coefficients(path: Path, projection: str) -> tuple[float, dict[str, float]]:
    if not path.exists():
        raise MissingInput(f"panel results not found: {path} (run panel first)")
    wanted = f"log_vol/{projection}/h=1"
    alpha = None
    coefficients = {}
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            if row["spec"] != wanted:
                continue
            if row["variable"] == "(intercept)":
                alpha = float(row["estimate"])
            elif row["variable"] != "(error)":
                coefficients[row["variable"]] = float(row["estimate"])
    if alpha is None or not coefficients:
        raise MissingInput(f"no fitted coefficients for spec {wanted!r} in {path}")
    return alpha, coefficients


def _read_residual_pool(path: Path) -> np.ndarray:
    if not path.exists():
        raise MissingInput(f"residual file not found: {path} (run panel first)")
    values = []
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            values.append(float(row["residual"]))
    if not values:
        raise MissingInput(f"residual file {path} is empty")
    return np.array(values)


def cmd_simulate(config: RunConfig) -> int:
    config.validate(need=("calendar", "market"))
    if config.sim_n_boot < 100:
        raise TooFewBootstraps(f"n_boot must be >= 100, got {config.sim_n_boot}")
    calendar = TradingCalendar.from_file(config.calendar_path)
    records = _read_sentiment_csv(config.output_dir / SENTIMENT_CSV, calendar)
    points = _read_indicators_csv(config.output_dir / INDICATORS_CSV, calendar)
    market = MarketSeries.from_csv(config.market_path, calendar)

    market_finite = market.market_return[np.isfinite(market.market_return)]
    if len(market_finite) != len(market.market_return):
        raise InputError("market return series has gaps")
    vix_mean = float(np.mean(market.vix[np.isfinite(market.vix)]))

    returns_by_symbol: dict[str, np.ndarray] = {}
    for (symbol, day), point in points.items():
        arr = returns_by_symbol.setdefault(symbol, np.full(len(calendar), np.nan))
        if point.ret is not None:
            arr[day] = point.ret

    residual_model, skipped = build_residual_model(market.market_return, returns_by_symbol)
    if skipped:
        print(f"skipped_returns={','.join(skipped)}")

    projections = list(config.sim_projections) if config.sim_projections else sorted(records)
    for projection in projections:
        if projection not in records:
            raise MissingInput(f"no sentiment records for projection {projection!r}")
        alpha, coefficients = _read_entire_coefficients(
            config.output_dir / config.sim_results_csv, projection
        )
        pool = _read_residual_pool(config.output_dir / f"residuals_log_vol_{projection}.csv")
        models, diagnostics = build_sentiment_models(
            records[projection], n_days=len(calendar), min_active=config.sim_min_active
        )
        models = [m for m in models if m.symbol in residual_model.labels]
        scenario = ScenarioConfig(
            alpha=alpha,
            coefficients=coefficients,
            vix_value=vix_mean,
            residual_pool=pool,
            n_days=config.sim_n_days,
            rng_seed=split_seed(config.seed, f"scenario:{projection}"),
            sentiment_models=tuple(models),
            residual_model=residual_model,
        )
        panel = simulate_scenario(scenario)

        pos_x, pos_y = panel.scatter("pos")
        neg_x, neg_y = panel.scatter("neg")
        lo = float(min(pos_x.min(), neg_x.min()))
        hi = float(max(pos_x.max(), neg_x.max()))
        if hi <= lo:
            raise NumericalError("simulated sentiment support is degenerate")
        grid = np.linspace(lo, hi, config.sim_grid_points)

        fits = {}
        for which, (x, y) in (("pos", (pos_x, pos_y)), ("neg", (neg_x, neg_y))):
            h = plugin_bandwidth(x, y)
            fit = local_linear_fit(x, y, h, grid)
            fits[which] = uniform_band(
                fit, x, y, level=0.95, n_boot=config.sim_n_boot,
                rng_seed=split_seed(config.seed, f"band:{projection}:{which}"),
            )
        overlap = band_overlap_region(fits["pos"], fits["neg"])

        write_csv(
            config.output_dir / f"simulated_{projection}.csv",
            ("symbol", "day", "I", "pos", "neg", "r_m", "r_i", "log_vol"),
            panel.rows(),
        )
        curve_rows = []
        for which in ("pos", "neg"):
            fit = fits[which]
            for g, m, lo_b, hi_b in zip(fit.grid, fit.curve, fit.band_lower, fit.band_upper):
                curve_rows.append((which, float(g),
                                   float(m) if math.isfinite(m) else None,
                                   float(lo_b) if math.isfinite(lo_b) else None,
                                   float(hi_b) if math.isfinite(hi_b) else None))
        write_csv(
            config.output_dir / f"curves_{projection}.csv",
            ("curve", "grid", "fitted", "band_lower", "band_upper"),
            curve_rows,
        )
        write_csv(
            config.output_dir / f"overlap_{projection}.csv",
            ("start", "end"),
            [(s, e) for s, e in overlap],
        )
        svg = figures.scatter_band_figure(
            f"Simulated volatility vs sentiment ({projection})",
            (pos_x, pos_y), (neg_x, neg_y), fits["pos"], fits["neg"],
            x_range=config.plot_x_range, y_range=config.plot_y_range,
        )
        atomic_write_text(config.output_dir / f"figure_{projection}.svg", svg)
        print(f"projection={projection} symbols={len(models)} "
              f"skipped_sentiment={len(diagnostics.skipped_symbols)} "
              f"nonoverlap_intervals={len(overlap)}")

    _write_manifest(config, "simulate", [config.market_path,
                                         config.output_dir / SENTIMENT_CSV,
                                         config.output_dir / INDICATORS_CSV,
                                         config.output_dir / config.sim_results_csv])
    return 0


def cmd_lexstats(config: RunConfig) -> int:
    config.validate(need=("corpus", "lexicons"))
    articles = corpus_mod.load_articles(config.corpus_path, config.corpus_format)
    if config.symbols:
        articles = corpus_mod.filter_by_symbols(articles, config.symbols)
    lexica = _load_lexica(config)

    tokenized = []
    for article in articles.articles:
        tok = sent_mod.tokenize(article.title + ". " + article.body)
        tokenized.append(tok.sentences)
    freq = lex_mod.corpus_frequencies(tokenized)

    rows = []
    names = sorted(lexica)
    for i, name_a in enumerate(names):
        for name_b in names[i + 1 :]:
            report = lex_mod.compare_lexica(
                lexica[name_a], lexica[name_b], freq, min_count=config.lexstats_min_count
            )
            for category, table in (
                (f"unique_to_{name_a}", report.unique_to_a),
                (f"unique_to_{name_b}", report.unique_to_b),
                ("shared", report.shared),
            ):
                for polarity in (lex_mod.Polarity.POSITIVE, lex_mod.Polarity.NEGATIVE):
                    for rank, word in enumerate(table[polarity][: config.lexstats_top], 1):
                        rows.append((
                            f"{name_a}-{name_b}", polarity.value, category,
                            rank, word, freq.get(word, 0),
                        ))
    write_csv(
        config.output_dir / "lexstats.csv",
        ("pair", "polarity", "category", "rank", "word", "frequency"),
        rows,
    )
    _write_manifest(config, "lexstats", [config.corpus_path])
    print(f"pairs={len(names) * (len(names) - 1) // 2} rows={len(rows)}")
    return 0


def cmd_report(config: RunConfig) -> int:
    config.validate(need=("calendar",))
    calendar = TradingCalendar.from_file(config.calendar_path)
    records = _read_sentiment_csv(config.output_dir / SENTIMENT_CSV, calendar)

    summary_rows = []
    for name in sorted(records):
        summary = sent_mod.sentiment_summary(records[name])
        for side, stats_ in (("pos", summary.pos), ("neg", summary.neg)):
            summary_rows.append((
                name, side, summary.n_active, stats_.mean, stats_.sd, stats_.maximum,
                stats_.q1, stats_.q2, stats_.q3,
                summary.share_pos_dominant if side == "pos" else summary.share_neg_dominant,
            ))
    write_csv(
        config.output_dir / "report_summary.csv",
        ("lexicon", "side", "n_active", "mean", "sd", "max", "q1", "q2", "q3", "dominance_share"),
        summary_rows,
    )

    month_of_day = {day: calendar.month_of(day) for day in range(len(calendar))}
    correlations = sent_mod.monthly_lexicon_correlation(records, month_of_day)
    corr_rows = []
    for (name_a, name_b), series in sorted(correlations.items()):
        for (year, month), (pos_corr, neg_corr) in sorted(series.items()):
            corr_rows.append((name_a, name_b, year, month, pos_corr, neg_corr))
    write_csv(
        config.output_dir / "report_monthly_correlation.csv",
        ("lexicon_a", "lexicon_b", "year", "month", "pos_correlation", "neg_correlation"),
        corr_rows,
    )

    inputs = PanelInputs(
        records_by_lexicon=records,
        indicator_points={},
        market=MarketSeries(np.zeros(len(calendar)), np.zeros(len(calendar))),
        n_days=len(calendar),
    )
    groups = compute_attention_groups(inputs)
    first = records[sorted(records)[0]]
    by_symbol: dict[str, list[sent_mod.SentimentRecord]] = {}
    for rec in first:
        by_symbol.setdefault(rec.symbol, []).append(rec)
    group_rows = [
        (symbol, ind_mod.attention_ratio(by_symbol[symbol], len(calendar)), groups[symbol].value)
        for symbol in sorted(groups)
    ]
    write_csv(
        config.output_dir / "report_attention.csv",
        ("symbol", "attention_ratio", "group"),
        group_rows,
    )
    _write_manifest(config, "report", [config.output_dir / SENTIMENT_CSV])
    print(f"lexica={len(records)} correlation_rows={len(corr_rows)} symbols={len(group_rows)}")
    return 0


COMMANDS = {
    "distill": cmd_distill,
    "indicators": cmd_indicators,
    "panel": cmd_panel,
    "simulate": cmd_simulate,
    "lexstats": cmd_lexstats,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsflow",
        description="Distill news flow into sentiment variables and stock-reaction analytics.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default="newsflow.ini", help="INI run configuration")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output", default=None, help="output directory")
    parser.add_argument("--h", dest="lag_h", type=int, default=None, help="panel lag (1..5)")
    parser.add_argument("--suite", action="append", default=None,
                        help="panel suite (repeatable): entire, lags_noncumulative, "
                             "lags_cumulative, attention, sector")
    parser.add_argument("--n-boot", dest="sim_n_boot", type=int, default=None)
    parser.add_argument("--n-days", dest="sim_n_days", type=int, default=None)
    parser.add_argument("--day-boundary", dest="day_boundary", default=None,
                        help="session boundary clock time, e.g. 00:00")
    parser.add_argument("--window", dest="detrend_window", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "seed": args.seed,
        "output_dir": Path(args.output) if args.output else None,
        "lag_h": args.lag_h,
        "suites": tuple(args.suite) if args.suite else None,
        "sim_n_boot": args.sim_n_boot,
        "sim_n_days": args.sim_n_days,
        "day_boundary": dt.time.fromisoformat(args.day_boundary) if args.day_boundary else None,
        "detrend_window": args.detrend_window,
    }
    try:
        config = load_config(args.config, overrides=overrides)
        return COMMANDS[args.command](config)
    except NumericalError as exc:
        print(f"ERROR {exc.error_code}: {exc}", file=sys.stderr)
        return 3
    except NewsflowError as exc:
        print(f"ERROR {exc.error_code}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"ERROR MISSING_INPUT: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
