"""Run configuration: one INI-style declarative file plus CLI flag overrides."""

from __future__ import annotations

import configparser
import datetime as dt
import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InputError, LexiconNotFound, MissingInput
from .sentiment import DEFAULT_NEGATORS, NegationConfig

LEXICON_KINDS = ("wordlists", "mpqa")


@dataclass(frozen=True)
class LexiconSource:
    name: str
    kind: str  # wordlists: positive,negative paths; mpqa: one entries file
    paths: tuple[Path, ...]

    def __post_init__(self):
        if self.kind not in LEXICON_KINDS:
            raise InputError(f"unknown lexicon format {self.kind!r} for {self.name}")
        if self.kind == "wordlists" and len(self.paths) != 2:
            raise InputError(f"lexicon {self.name}: wordlists format needs pos,neg paths")
        if self.kind == "mpqa" and len(self.paths) != 1:
            raise InputError(f"lexicon {self.name}: mpqa format takes exactly one path")


@dataclass(frozen=True)
class RunConfig:
    corpus_path: Path
    corpus_format: str
    calendar_path: Path
    prices_path: Path
    market_path: Path
    lexicons: tuple[LexiconSource, ...]
    output_dir: Path
    seed: int = 0
    symbols: tuple[str, ...] = ()
    day_boundary: dt.time = dt.time(0, 0)
    negation: NegationConfig = NegationConfig()
    detrend_window: int = 120
    lag_h: int = 1
    suites: tuple[str, ...] = ("entire",)
    cluster_mode: str = "two_way"
    sectors_path: Path | None = None
    sim_projections: tuple[str, ...] = ()
    sim_n_days: int = 300
    sim_n_boot: int = 500
    sim_grid_points: int = 101
    sim_min_active: int = 30
    sim_results_csv: str = "results_entire.csv"  # panel results consumed by simulate
    plot_x_range: tuple[float, float] | None = None
    plot_y_range: tuple[float, float] | None = None
    lexstats_min_count: int = 3
    lexstats_top: int = 10

    def validate(self, need: tuple[str, ...] = ()) -> None:
        """Check invariants; `need` lists the inputs the command will read."""
        if not 1 <= self.lag_h <= 5:
            raise InputError(f"lag h must be in 1..5, got {self.lag_h}")
        if self.detrend_window < 10:
            raise InputError(f"detrend window must be >= 10, got {self.detrend_window}")
        if "corpus" in need and not self.corpus_path.exists():
            raise MissingInput(f"corpus not found: {self.corpus_path}")
        if "calendar" in need and not self.calendar_path.exists():
            raise MissingInput(f"calendar not found: {self.calendar_path}")
        if "prices" in need and not self.prices_path.exists():
            raise MissingInput(f"price CSV not found: {self.prices_path}")
        if "market" in need and not self.market_path.exists():
            raise MissingInput(f"market CSV not found: {self.market_path}")
        if "lexicons" in need:
            if not self.lexicons:
                raise LexiconNotFound("no lexicons configured")
            for source in self.lexicons:
                for path in source.paths:
                    if not path.exists():
                        raise LexiconNotFound(f"lexicon file not found: {path}")
        if "sectors" in need:
            if self.sectors_path is None or not self.sectors_path.exists():
                raise MissingInput("sector suite requires a sectors CSV")


def _parse_lexicons(section: configparser.SectionProxy, base: Path) -> tuple[LexiconSource, ...]:
    sources = []
    for name, value in section.items():
        kind, _, path_list = value.partition(":")
        paths = tuple(base / p.strip() for p in path_list.split(",") if p.strip())
        sources.append(LexiconSource(name=name.upper(), kind=kind.strip(), paths=paths))
    return tuple(sources)


def _get_range(section, lo_key, hi_key):
    lo = section.get(lo_key, "").strip()
    hi = section.get(hi_key, "").strip()
    if lo and hi:
        return (float(lo), float(hi))
    return None


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    """Parse the INI run file; override values win over file values."""
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read(path, encoding="utf-8")
    base = path.parent

    def section(name):
        return parser[name] if parser.has_section(name) else {}

    corpus = section("corpus")
    negation = section("negation")
    panel = section("panel")
    simulate = section("simulate")
    lexstats = section("lexstats")
    run = section("run")

    boundary_raw = corpus.get("day_boundary", "00:00")
    try:
        boundary = dt.time.fromisoformat(boundary_raw)
    except ValueError as exc:
        raise InputError(f"bad day_boundary {boundary_raw!r}") from exc

    negators = tuple(
        t.strip() for t in negation.get("negators", ",".join(DEFAULT_NEGATORS)).split(",") if t.strip()
    )
    symbols = tuple(
        s.strip().upper() for s in corpus.get("symbols", "").split(",") if s.strip()
    )

    config = RunConfig(
        corpus_path=base / corpus.get("path", "corpus.jsonl"),
        corpus_format=corpus.get("format", "jsonl"),
        calendar_path=base / corpus.get("calendar", "calendar.txt"),
        prices_path=base / section("prices").get("path", "prices.csv"),
        market_path=base / section("market").get("path", "market.csv"),
        sectors_path=(base / section("sectors")["path"]) if "path" in section("sectors") else None,
        lexicons=_parse_lexicons(parser["lexicons"], base) if parser.has_section("lexicons") else (),
        output_dir=Path(run.get("output", "out")),
        seed=int(run.get("seed", "0")),
        symbols=symbols,
        day_boundary=boundary,
        negation=NegationConfig(
            window=int(negation.get("window", "5")),
            negators=frozenset(negators),
            bidirectional=negation.get("bidirectional", "true").strip().lower() != "false",
        ),
        detrend_window=int(section("indicators").get("window", "120")),
        lag_h=int(panel.get("h", "1")),
        suites=tuple(s.strip() for s in panel.get("suites", "entire").split(",") if s.strip()),
        cluster_mode=panel.get("cluster", "two_way").strip(),
        sim_projections=tuple(
            s.strip().upper() for s in simulate.get("projections", "").split(",") if s.strip()
        ),
        sim_n_days=int(simulate.get("n_days", "300")),
        sim_n_boot=int(simulate.get("n_boot", "500")),
        sim_grid_points=int(simulate.get("grid_points", "101")),
        sim_min_active=int(simulate.get("min_active", "30")),
        sim_results_csv=simulate.get("results", "results_entire.csv").strip(),
        plot_x_range=_get_range(simulate, "x_min", "x_max"),
        plot_y_range=_get_range(simulate, "y_min", "y_max"),
        lexstats_min_count=int(lexstats.get("min_count", "3")),
        lexstats_top=int(lexstats.get("top", "10")),
    )
    if overrides:
        clean = {k: v for k, v in overrides.items() if v is not None}
        if clean:
            config = replace(config, **clean)
    return config


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dt.time):
        return value.isoformat()
    if isinstance(value, NegationConfig):
        return {
            "window": value.window,
            "negators": sorted(value.negators),
            "bidirectional": value.bidirectional,
        }
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, LexiconSource):
        return {"name": value.name, "kind": value.kind, "paths": [str(p) for p in value.paths]}
    return value


def config_fingerprint(config: RunConfig, input_paths: list[Path]) -> dict:
    """Manifest payload: config hash plus per-input checksums (provenance)."""
    payload = {k: _jsonable(v) for k, v in sorted(vars(config).items())}
    config_hash = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
    checksums = {}
    for p in sorted(set(map(str, input_paths))):
        path = Path(p)
        if path.exists() and path.is_file():
            checksums[p] = hashlib.sha256(path.read_bytes()).hexdigest()
    return {"config_sha256": config_hash, "inputs": checksums}
