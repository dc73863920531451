"""Panel assembly, within-estimator fixed effects, clustered covariance, PCA index.

The within estimator demeans all variables by entity, runs OLS on the
demeaned data, and recovers per-entity effects that sum to zero.  Cluster
covariance follows the sandwich construction with cluster-summed scores,
one-way by entity or time, or the two-way combination (entity + time -
heteroskedasticity-robust intersection term).
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .corpus import TradingCalendar
from .errors import (
    CalendarMismatch,
    ConstantColumn,
    EmptyPanel,
    InputError,
    RankDeficient,
    SingleCluster,
    TooFewObservations,
)
from .indicators import AttentionGroup, IndicatorPoint, attention_groups, attention_ratio
from .sentiment import SentimentRecord, cumulative_record

SENTIMENT_VARS = ("I", "Pos", "Neg")
CONTROL_VARS = ("R_M", "VIX", "log_vol_t", "ret_t", "dvol_t")
REGRESSOR_NAMES = SENTIMENT_VARS + CONTROL_VARS

DEPENDENTS = ("log_vol", "dvol", "ret")
PCA_NAME = "PCA"


class ClusterMode(enum.Enum):
    BY_ENTITY = "by_entity"
    BY_TIME = "by_time"
    TWO_WAY = "two_way"


@dataclass(frozen=True)
class MarketSeries:
    """Per trading day market return and risk-aversion level (NaN = missing)."""

    market_return: np.ndarray
    vix: np.ndarray

    def __post_init__(self):
        if len(self.market_return) != len(self.vix):
            raise CalendarMismatch("market return and vix series differ in length")

    @classmethod
    def from_csv(cls, path: str | Path, calendar: TradingCalendar) -> "MarketSeries":
        ret = np.full(len(calendar), np.nan)
        vix = np.full(len(calendar), np.nan)
        with Path(path).open(encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            required = {"date", "market_return", "vix"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise InputError(f"market CSV must have columns {sorted(required)}")
            for row in reader:
                date = dt.date.fromisoformat(row["date"])
                if date not in calendar.index:
                    raise CalendarMismatch(f"market date {date} not in trading calendar")
                day = calendar.index[date]
                ret[day] = float(row["market_return"])
                vix[day] = float(row["vix"])
        return cls(market_return=ret, vix=vix)


@dataclass(frozen=True)
class PanelSpec:
    dependent: str
    h: int = 1
    cumulative: bool = False
    projection: str = "BL"
    subsample: str | None = None

    def __post_init__(self):
        if self.dependent not in DEPENDENTS:
            raise InputError(f"unknown dependent {self.dependent!r}")
        if not 1 <= self.h <= 5:
            raise InputError(f"lag h must be in 1..5, got {self.h}")

    @property
    def label(self) -> str:
        parts = [self.dependent, self.projection, f"h={self.h}"]
        if self.cumulative:
            parts.append("cumulative")
        if self.subsample:
            parts.append(self.subsample)
        return "/".join(parts)


@dataclass(frozen=True)
class PanelObservation:
    symbol: str
    day: int
    dependent: float
    regressors: tuple[float, ...]  # ordered as REGRESSOR_NAMES


@dataclass(frozen=True)
class PanelDataset:
    spec: PanelSpec
    observations: tuple[PanelObservation, ...]
    dropped: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.observations:
            raise EmptyPanel(self.spec.label)
        seen = set()
        counts: dict[str, int] = {}
        for obs in self.observations:
            key = (obs.symbol, obs.day)
            if key in seen:
                raise InputError(f"duplicate observation {key}")
            seen.add(key)
            counts[obs.symbol] = counts.get(obs.symbol, 0) + 1
        for symbol, count in counts.items():
            if count < 2:
                raise TooFewObservations(f"entity {symbol} has {count} observation")

    @property
    def entities(self) -> tuple[str, ...]:
        return tuple(sorted({obs.symbol for obs in self.observations}))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        y = np.array([obs.dependent for obs in self.observations])
        x = np.array([obs.regressors for obs in self.observations])
        ent = np.array([obs.symbol for obs in self.observations])
        tim = np.array([obs.day for obs in self.observations])
        return y, x, ent, tim


def _indicator_value(point: IndicatorPoint | None, name: str) -> float | None:
    if point is None:
        return None
    return {"log_vol": point.log_vol, "dvol": point.detrended_volume, "ret": point.ret}[name]


def assemble_panel(
    records: Mapping[tuple[str, int], SentimentRecord],
    indicator_points: Mapping[tuple[str, int], IndicatorPoint],
    market: MarketSeries,
    spec: PanelSpec,
    n_days: int,
    symbols: Iterable[str] | None = None,
) -> PanelDataset:
    """Align day-(t+h) outcomes with day-t regressors, listwise-deleting gaps.

    Cumulative specs pool the sentiment variables over days t..t+h-1; all
    control variables stay dated t.
    """
    if len(market.market_return) < n_days:
        raise CalendarMismatch("market series shorter than the trading calendar")
    for (_, day) in records:
        if day >= n_days:
            raise CalendarMismatch(f"sentiment record day {day} outside calendar")

    universe = sorted({sym for sym, _ in records} | {sym for sym, _ in indicator_points})
    if symbols is not None:
        wanted = {s.upper() for s in symbols}
        universe = [s for s in universe if s in wanted]

    by_symbol_records: dict[str, dict[int, SentimentRecord]] = {}
    for (sym, day), rec in records.items():
        by_symbol_records.setdefault(sym, {})[day] = rec

    observations = []
    dropped = {"missing_field": 0, "singleton_entity": 0}
    for sym in universe:
        sym_records = by_symbol_records.get(sym, {})
        for t in range(0, n_days - spec.h):
            dep = _indicator_value(indicator_points.get((sym, t + spec.h)), spec.dependent)
            point_t = indicator_points.get((sym, t))
            if spec.cumulative and spec.h > 1:
                if any(day not in sym_records for day in range(t, t + spec.h)):
                    dropped["missing_field"] += 1
                    continue
                rec = cumulative_record(sym_records, t, spec.h)
            else:
                rec = sym_records.get(t)
            row = {
                "dep": dep,
                "I": float(rec.active) if rec is not None else None,
                "Pos": rec.pos if rec is not None else None,
                "Neg": rec.neg if rec is not None else None,
                "R_M": float(market.market_return[t]),
                "VIX": float(market.vix[t]),
                "log_vol_t": _indicator_value(point_t, "log_vol"),
                "ret_t": _indicator_value(point_t, "ret"),
                "dvol_t": _indicator_value(point_t, "dvol"),
            }
            if any(v is None or (isinstance(v, float) and math.isnan(v)) for v in row.values()):
                dropped["missing_field"] += 1
                continue
            observations.append(PanelObservation(
                symbol=sym,
                day=t,
                dependent=row["dep"],
                regressors=tuple(row[name] for name in REGRESSOR_NAMES),
            ))

    counts: dict[str, int] = {}
    for obs in observations:
        counts[obs.symbol] = counts.get(obs.symbol, 0) + 1
    kept = [obs for obs in observations if counts[obs.symbol] >= 2]
    dropped["singleton_entity"] = len(observations) - len(kept)
    if not kept:
        raise EmptyPanel(spec.label)
    return PanelDataset(spec=spec, observations=tuple(kept), dropped=dropped)


@dataclass(frozen=True)
class RegressionResult:
    spec: PanelSpec
    coef_names: tuple[str, ...]
    coefficients: np.ndarray
    alpha: float
    fixed_effects: Mapping[str, float]
    covariance: np.ndarray
    std_errors: np.ndarray
    p_values: np.ndarray
    residuals: np.ndarray
    n_obs: int
    entity_counts: Mapping[str, int]
    cluster_mode: ClusterMode
    df: int
    psd_repaired: bool = False
    demeaned_x: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    entity_labels: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    time_labels: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.coef_names.index(name)])

    def std_error(self, name: str) -> float:
        return float(self.std_errors[self.coef_names.index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self.coef_names.index(name)])


def significance_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def _collinear_columns(x: np.ndarray, names: Sequence[str]) -> list[str]:
    """Columns that add no rank beyond their predecessors (after demeaning)."""
    bad = []
    rank_prev = 0
    for j in range(x.shape[1]):
        rank_j = np.linalg.matrix_rank(x[:, : j + 1])
        if rank_j == rank_prev:
            bad.append(names[j])
        rank_prev = rank_j
    return bad or list(names)


def _demean_by_group(values: np.ndarray, groups: np.ndarray) -> np.ndarray:
    out = values.astype(float).copy()
    for g in np.unique(groups):
        mask = groups == g
        out[mask] -= out[mask].mean(axis=0)
    return out


def fit_fixed_effects(
    panel: PanelDataset,
    coef_names: Sequence[str] = REGRESSOR_NAMES,
    cluster_mode: ClusterMode = ClusterMode.TWO_WAY,
) -> RegressionResult:
    """Within estimator with cluster-robust covariance."""
    y, x, entities, times = panel.arrays()
    n, k = x.shape
    if n <= k:
        raise TooFewObservations(f"{n} observations for {k} regressors")

    y_dm = _demean_by_group(y, entities)
    x_dm = _demean_by_group(x, entities)

    rank = np.linalg.matrix_rank(x_dm)
    if rank < k:
        raise RankDeficient(_collinear_columns(x_dm, coef_names))

    beta, _, _, _ = np.linalg.lstsq(x_dm, y_dm, rcond=None)

    entity_list = sorted(set(entities.tolist()))
    a = {}
    entity_counts = {}
    for ent in entity_list:
        mask = entities == ent
        entity_counts[ent] = int(mask.sum())
        a[ent] = float(y[mask].mean() - x[mask].mean(axis=0) @ beta)
    alpha = sum(a.values()) / len(a)
    gamma = {ent: a[ent] - alpha for ent in entity_list}

    gamma_arr = np.array([gamma[e] for e in entities])
    residuals = y - alpha - x @ beta - gamma_arr

    cov, df, repaired = _cluster_covariance_arrays(
        x_dm, residuals, entities, times, cluster_mode, k
    )
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = np.where(se > 0, beta / se, np.inf)
    p = 2.0 * stats.t.sf(np.abs(tstat), df)

    return RegressionResult(
        spec=panel.spec,
        coef_names=tuple(coef_names),
        coefficients=beta,
        alpha=alpha,
        fixed_effects=gamma,
        covariance=cov,
        std_errors=se,
        p_values=p,
        residuals=residuals,
        n_obs=n,
        entity_counts=entity_counts,
        cluster_mode=cluster_mode,
        df=df,
        psd_repaired=repaired,
        demeaned_x=x_dm,
        entity_labels=entities,
        time_labels=times,
    )


def _meat(x: np.ndarray, u: np.ndarray, groups: np.ndarray) -> np.ndarray:
    scores = x * u[:, None]
    k = x.shape[1]
    meat = np.zeros((k, k))
    for g in np.unique(groups):
        s = scores[groups == g].sum(axis=0)
        meat += np.outer(s, s)
    return meat


def _sandwich(x: np.ndarray, u: np.ndarray, groups: np.ndarray, k: int) -> np.ndarray:
    n = len(u)
    n_groups = len(np.unique(groups))
    bread = np.linalg.inv(x.T @ x)
    factor = (n_groups / (n_groups - 1)) * ((n - 1) / (n - k))
    return factor * bread @ _meat(x, u, groups) @ bread


def _cluster_covariance_arrays(
    x_dm: np.ndarray,
    residuals: np.ndarray,
    entities: np.ndarray,
    times: np.ndarray,
    mode: ClusterMode,
    k: int,
) -> tuple[np.ndarray, int, bool]:
    n_ent = len(np.unique(entities))
    n_time = len(np.unique(times))
    if mode is ClusterMode.BY_ENTITY:
        if n_ent < 2:
            raise SingleCluster("need >= 2 entity clusters")
        cov, df = _sandwich(x_dm, residuals, entities, k), n_ent - 1
    elif mode is ClusterMode.BY_TIME:
        if n_time < 2:
            raise SingleCluster("need >= 2 time clusters")
        cov, df = _sandwich(x_dm, residuals, times, k), n_time - 1
    else:
        if n_ent < 2 or n_time < 2:
            raise SingleCluster("two-way clustering needs >= 2 clusters per dimension")
        obs_ids = np.arange(len(residuals))
        cov = (
            _sandwich(x_dm, residuals, entities, k)
            + _sandwich(x_dm, residuals, times, k)
            - _sandwich(x_dm, residuals, obs_ids, k)
        )
        df = min(n_ent, n_time) - 1

    eigvals, eigvecs = np.linalg.eigh(cov)
    repaired = bool(eigvals.min() < 0)
    if repaired:
        cov = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
    return cov, df, repaired


def clustered_covariance(
    result: RegressionResult,
    panel: PanelDataset,
    mode: ClusterMode = ClusterMode.TWO_WAY,
) -> np.ndarray:
    """Sandwich covariance of the within estimates under the given clustering."""
    _, _, entities, times = panel.arrays()
    cov, _, _ = _cluster_covariance_arrays(
        result.demeaned_x, result.residuals, entities, times, mode, len(result.coef_names)
    )
    return cov


# PCA sentiment index -----------------------------------------------------

@dataclass(frozen=True)
class SentimentIndex:
    column_names: tuple[str, ...]
    loadings: np.ndarray
    scores: np.ndarray
    explained_share: float
    column_means: np.ndarray
    column_sds: np.ndarray

    def project(self, rows: np.ndarray) -> np.ndarray:
        standardized = (rows - self.column_means) / self.column_sds
        return standardized @ self.loadings


def pca_sentiment_index(matrix: np.ndarray, column_names: Sequence[str] = ("BL", "LM", "MPQA")) -> SentimentIndex:
    """First principal component of the column-standardized observation matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] < 3:
        raise InputError("need a 2-d matrix with >= 3 observations")
    means = matrix.mean(axis=0)
    sds = matrix.std(axis=0, ddof=1)
    for j, sd in enumerate(sds):
        if sd <= 0:
            raise ConstantColumn(f"column {column_names[j]!r} is constant")
    standardized = (matrix - means) / sds

    _, singular, vt = np.linalg.svd(standardized, full_matrices=False)
    eigenvalues = singular**2 / (matrix.shape[0] - 1)
    loadings = vt[0]
    if loadings.sum() < 0 or (loadings.sum() == 0 and loadings[np.nonzero(loadings)[0][0]] < 0):
        loadings = -loadings
    return SentimentIndex(
        column_names=tuple(column_names),
        loadings=loadings,
        scores=standardized @ loadings,
        explained_share=float(eigenvalues[0] / eigenvalues.sum()),
        column_means=means,
        column_sds=sds,
    )


def build_pca_records(
    records_by_lexicon: Mapping[str, Sequence[SentimentRecord]],
) -> tuple[list[SentimentRecord], SentimentIndex, SentimentIndex]:
    """Common-component sentiment records across the three lexical projections.

    Both indices are fitted on symbol-days with article arrival only;
    inactive days keep the zero-by-convention sentiment values.
    """
    names = sorted(records_by_lexicon)
    if len(names) < 2:
        raise InputError("PCA index needs at least two lexical projections")
    indexed = {
        name: {(r.symbol, r.day): r for r in records_by_lexicon[name]}
        for name in names
    }
    active_keys = sorted(
        set.intersection(*({k for k, r in indexed[name].items() if r.active} for name in names))
    )
    if len(active_keys) < 3:
        raise InputError("PCA index needs at least 3 active symbol-days")
    pos_matrix = np.array([[indexed[name][key].pos for name in names] for key in active_keys])
    neg_matrix = np.array([[indexed[name][key].neg for name in names] for key in active_keys])
    pos_index = pca_sentiment_index(pos_matrix, names)
    neg_index = pca_sentiment_index(neg_matrix, names)

    base = names[0]
    out = []
    score_of = {key: i for i, key in enumerate(active_keys)}
    for key, rec in sorted(indexed[base].items()):
        if rec.active and key in score_of:
            i = score_of[key]
            out.append(SentimentRecord(
                symbol=rec.symbol,
                day=rec.day,
                lexicon_name=PCA_NAME,
                active=1,
                pos=float(pos_index.scores[i]),
                neg=float(neg_index.scores[i]),
                n_articles=rec.n_articles,
            ))
        else:
            out.append(SentimentRecord(
                symbol=rec.symbol,
                day=rec.day,
                lexicon_name=PCA_NAME,
                active=0,
                pos=0.0,
                neg=0.0,
            ))
    return out, pos_index, neg_index


# specification suites -----------------------------------------------------

@dataclass
class PanelInputs:
    records_by_lexicon: Mapping[str, Sequence[SentimentRecord]]
    indicator_points: Mapping[tuple[str, int], IndicatorPoint]
    market: MarketSeries
    n_days: int
    sectors: Mapping[str, str] | None = None


@dataclass(frozen=True)
class SuiteCell:
    spec: PanelSpec
    result: RegressionResult | None
    error: str | None = None


def _indexed_records(records: Sequence[SentimentRecord]) -> dict[tuple[str, int], SentimentRecord]:
    return {(r.symbol, r.day): r for r in records}


def run_specification_suite(
    inputs: PanelInputs,
    suite: str,
    h: int = 1,
    cluster_mode: ClusterMode = ClusterMode.TWO_WAY,
) -> list[SuiteCell]:
    """One regression per (dependent x projection x subsample x lag) cell.

    `h` applies to the entire/attention/sector suites; the lag suites sweep
    h = 2..5 by construction.
    """
    lexica = sorted(inputs.records_by_lexicon)
    projections: dict[str, Mapping[tuple[str, int], SentimentRecord]] = {
        name: _indexed_records(inputs.records_by_lexicon[name]) for name in lexica
    }
    specs: list[tuple[PanelSpec, str, Iterable[str] | None]] = []

    if suite == "entire":
        names = list(lexica)
        if len(lexica) >= 2:
            pca_records, _, _ = build_pca_records(inputs.records_by_lexicon)
            projections[PCA_NAME] = _indexed_records(pca_records)
            names.append(PCA_NAME)
        for dependent in DEPENDENTS:
            for name in names:
                specs.append((PanelSpec(dependent, h, False, name), name, None))
    elif suite in ("lags_noncumulative", "lags_cumulative"):
        cumulative = suite == "lags_cumulative"
        for dependent in DEPENDENTS:
            for name in lexica:
                for lag in (2, 3, 4, 5):
                    specs.append((PanelSpec(dependent, lag, cumulative, name), name, None))
    elif suite == "attention":
        groups = compute_attention_groups(inputs)
        members: dict[AttentionGroup, list[str]] = {g: [] for g in AttentionGroup}
        for symbol, group in groups.items():
            members[group].append(symbol)
        for group in AttentionGroup:
            if not members[group]:
                continue
            for dependent in DEPENDENTS:
                for name in lexica:
                    spec = PanelSpec(dependent, h, False, name, subsample=group.value)
                    specs.append((spec, name, members[group]))
    elif suite == "sector":
        if inputs.sectors is None:
            raise InputError("sector suite requires a symbol-to-sector map")
        by_sector: dict[str, list[str]] = {}
        for symbol, sector in inputs.sectors.items():
            by_sector.setdefault(sector, []).append(symbol)
        for sector in sorted(by_sector):
            if len(by_sector[sector]) < 2:
                continue
            for dependent in DEPENDENTS:
                for name in lexica:
                    spec = PanelSpec(dependent, h, False, name, subsample=sector)
                    specs.append((spec, name, by_sector[sector]))
    else:
        raise InputError(f"unknown suite {suite!r}")

    cells = []
    for spec, name, symbols in specs:
        try:
            panel = assemble_panel(
                projections[name], inputs.indicator_points, inputs.market, spec,
                inputs.n_days, symbols=symbols,
            )
            cells.append(SuiteCell(spec=spec, result=fit_fixed_effects(panel, cluster_mode=cluster_mode)))
        except (InputError, RankDeficient) as exc:
            cells.append(SuiteCell(spec=spec, result=None, error=f"{exc.error_code}: {exc}"))
    return cells


def compute_attention_groups(inputs: PanelInputs) -> dict[str, AttentionGroup]:
    first = inputs.records_by_lexicon[sorted(inputs.records_by_lexicon)[0]]
    by_symbol: dict[str, list[SentimentRecord]] = {}
    for rec in first:
        by_symbol.setdefault(rec.symbol, []).append(rec)
    ratios = {sym: attention_ratio(recs, inputs.n_days) for sym, recs in by_symbol.items()}
    return attention_groups(ratios)


def suite_rows(cells: Sequence[SuiteCell]) -> list[tuple[str, str, object, object, object, str]]:
    """Flat (spec, variable, estimate, se, p, stars) rows for CSV output."""
    rows: list[tuple[str, str, object, object, object, str]] = []
    for cell in cells:
        if cell.result is None:
            rows.append((cell.spec.label, "(error)", None, None, None, cell.error or ""))
            continue
        res = cell.result
        rows.append((cell.spec.label, "(intercept)", res.alpha, None, None, ""))
        for j, name in enumerate(res.coef_names):
            p = float(res.p_values[j])
            rows.append((
                cell.spec.label, name, float(res.coefficients[j]),
                float(res.std_errors[j]), p, significance_stars(p),
            ))
    return rows


def format_suite_table(cells: Sequence[SuiteCell]) -> str:
    """Monospace table: one block per dependent, columns per projection."""
    blocks: dict[tuple[str, int, bool, str | None], list[SuiteCell]] = {}
    for cell in cells:
        key = (cell.spec.dependent, cell.spec.h, cell.spec.cumulative, cell.spec.subsample)
        blocks.setdefault(key, []).append(cell)

    lines = []
    for key in sorted(blocks, key=lambda k: (k[0], k[1], k[2], k[3] or "")):
        dependent, h, cumulative, subsample = key
        block = blocks[key]
        title = f"dependent={dependent} h={h}" + (" cumulative" if cumulative else "")
        if subsample:
            title += f" subsample={subsample}"
        lines.append(title)
        header = ["variable"] + [cell.spec.projection for cell in block]
        widths = [22] + [24] * len(block)
        lines.append(" | ".join(name.ljust(w) for name, w in zip(header, widths)))
        var_names: tuple[str, ...] = ()
        for cell in block:
            if cell.result is not None:
                var_names = cell.result.coef_names
                break
        for name in var_names:
            row = [name.ljust(widths[0])]
            for cell in block:
                if cell.result is None:
                    row.append("--".ljust(24))
                    continue
                est = cell.result.coefficient(name)
                se = cell.result.std_error(name)
                stars = significance_stars(cell.result.p_value(name))
                row.append(f"{est: .4f}{stars} ({se:.4f})".ljust(24))
            lines.append(" | ".join(row))
        lines.append("")
    return "\n".join(lines)
