"""Batch command-line front door.

Subcommands: ``synth`` (write a deterministic synthetic panel), ``var``
(prices + rates -> per-entity VaR/RFR CSVs and a run summary),
``diagnostics`` (threshold diagnostics for one entity-month), ``analyze``
(cross-entity correlation/share/sign-fraction/comparison reports from
``var`` outputs).

Exit codes: 0 success, 2 configuration error, 3 input error, 4 internal
failure that aborted the run (individual window fit failures are data,
not run failures). Configuration comes from flags only; environment
variables are never consulted. Output files are written atomically
(temp file + rename) and all numbers use 12 significant digits, so runs
with identical inputs are byte-identical; the only timestamp lives in
``summary.json`` under ``generated_at``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

from . import __version__, analysis, gpd, risk, synthgen, threshold
from .ingest import align, list_entities, load_prices, load_rates, partition_months
from .ingest import write_prices, write_rates
from .returns import excess_returns

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4


class ConfigError(ValueError):
    pass


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Effective parameters of one batch run (defaults included)."""

    prices: str = ""
    rates: str = ""
    out: str = "."
    threshold_confidence: float = 0.80
    var_p: float = 0.95
    estimator: str = gpd.PROFILE_MLE
    r_zhang: float = -0.5
    min_obs: int = 10
    pool_window: int = 1
    seed: int = 0
    index_entities: tuple[str, ...] = ()

    def validate(self) -> None:
        if not 0.0 < self.threshold_confidence < self.var_p < 1.0:
            raise ConfigError(
                "need 0 < threshold-confidence < var-p < 1, got "
                f"threshold-confidence={self.threshold_confidence} and var-p={self.var_p}"
            )
        if self.estimator not in gpd.ESTIMATORS:
            raise ConfigError(f"estimator must be one of {gpd.ESTIMATORS}")
        if self.estimator == gpd.ZHANG_LM and (
            not self.r_zhang < 0.5 or self.r_zhang == 0.0
        ):
            raise ConfigError(
                f"r-zhang must satisfy r < 1/2 and r != 0, got {self.r_zhang}"
            )
        if self.min_obs < 2:
            raise ConfigError(f"min-obs must be >= 2, got {self.min_obs}")
        if self.pool_window < 1:
            raise ConfigError(f"pool-window must be >= 1, got {self.pool_window}")

    def echo(self) -> dict:
        return {
            "prices": self.prices,
            "rates": self.rates,
            "out": self.out,
            "threshold_confidence": self.threshold_confidence,
            "var_p": self.var_p,
            "estimator": self.estimator,
            "r_zhang": self.r_zhang,
            "min_obs": self.min_obs,
            "pool_window": self.pool_window,
            "seed": self.seed,
            "index_entities": list(self.index_entities),
        }


def fmt(value) -> str:
    """CSV cell: 12 significant digits, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, float) and not math.isfinite(value):
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def month_str(key: tuple[int, int]) -> str:
    return f"{key[0]:04d}-{key[1]:02d}"


def parse_month(text: str) -> tuple[int, int]:
    try:
        y, m = text.split("-")
        key = (int(y), int(m))
    except ValueError:
        raise InputError(f"bad month {text!r}, expected YYYY-MM") from None
    if not 1 <= key[1] <= 12:
        raise InputError(f"bad month {text!r}, expected YYYY-MM")
    return key


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


ENTITY_CSV_HEADER = (
    "entity", "month", "var", "rfr", "status",
    "k_hat", "sigma_hat", "mu", "n", "n_u", "estimator",
)


def entity_csv_rows(points, rfr_points):
    """Rows per the per-entity schema; rfr lands on the later month's row."""
    rfr_by_month = {p.month_pair[1]: p.rfr for p in rfr_points}
    rows = []
    for pt in points:
        fit = pt.fit
        rows.append([
            pt.entity_id,
            month_str(pt.month_key),
            fmt(pt.var),
            fmt(rfr_by_month.get(pt.month_key)),
            pt.status,
            fmt(fit.params.k if fit else None),
            fmt(fit.params.sigma if fit else None),
            fmt(fit.mu if fit else None),
            fmt(fit.n if fit else None),
            fmt(fit.n_u if fit else None),
            fit.estimator if fit else "",
        ])
    return rows


def read_entity_csv(path: Path):
    """Parse a per-entity VaR CSV back into month-keyed var/rfr mappings."""
    var_by_month: dict[tuple[int, int], float] = {}
    rfr_by_month: dict[tuple[int, int], float] = {}
    entity = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entity = row["entity"]
            key = parse_month(row["month"])
            if row["status"] == risk.STATUS_OK and row["var"]:
                var_by_month[key] = float(row["var"])
            if row["rfr"]:
                rfr_by_month[key] = float(row["rfr"])
    if entity is None:
        raise InputError(f"{path}: no data rows")
    return entity, var_by_month, rfr_by_month


def _entity_pipeline(prices_path, rates, entity, config: RunConfig):
    series = load_prices(prices_path, entity)
    returns = excess_returns(align(series, rates))
    windows, skipped = partition_months(returns.dates, config.min_obs, entity)
    points = risk.var_series(
        returns,
        windows,
        skipped,
        threshold_confidence=config.threshold_confidence,
        p=config.var_p,
        estimator=config.estimator,
        r_zhang=config.r_zhang,
        pool_window=config.pool_window,
    )
    return returns, windows, skipped, points, risk.rfr_series(points)


def cmd_synth(config: RunConfig, args) -> int:
    spec = synthgen.SynthSpec(
        seed=config.seed,
        n_entities=args.entities,
        n_days=args.days,
        shape=args.shape,
        scale=args.scale,
        common_factor_weight=args.common_factor_weight,
        factor_shape=args.factor_shape,
        factor_scale=args.factor_scale,
        start=date.fromisoformat(args.start),
        daily_rate=args.daily_rate,
    )
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    series, rates = synthgen.generate_panel(spec)
    write_prices(out / "prices.csv", series)
    write_rates(out / "rates.csv", rates)
    print(f"wrote {out / 'prices.csv'} ({spec.n_entities} entities, {spec.n_days} days)")
    return EXIT_OK


def cmd_var(config: RunConfig, args) -> int:
    try:
        entities = list_entities(config.prices)
        if not entities:
            raise InputError(f"{config.prices}: no entities found")
        rates = load_rates(config.rates)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    totals = {"ok": 0, "skipped_min_obs": 0, "fit_failed": 0}
    per_entity = {}
    for entity in entities:
        try:
            _, windows, skipped, points, rfrs = _entity_pipeline(
                config.prices, rates, entity, config
            )
        except ValueError as exc:
            raise InputError(f"entity {entity!r}: {exc}") from exc
        name = f"var_{entity}.csv"
        write_csv(out / name, ENTITY_CSV_HEADER, entity_csv_rows(points, rfrs))
        files[entity] = name
        counts = {
            "ok": sum(1 for p in points if p.status == risk.STATUS_OK),
            "skipped_min_obs": sum(1 for p in points if p.status == risk.STATUS_SKIPPED),
            "fit_failed": sum(1 for p in points if p.status == risk.STATUS_FAILED),
        }
        for key, value in counts.items():
            totals[key] += value
        per_entity[entity] = counts
    summary = {
        "config": config.echo(),
        "entities": entities,
        "files": files,
        "windows": per_entity,
        "window_totals": totals,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
    }
    atomic_write_text(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(
        f"wrote {len(entities)} entity files to {out} "
        f"(ok={totals['ok']}, skipped={totals['skipped_min_obs']}, "
        f"failed={totals['fit_failed']})"
    )
    return EXIT_OK


def cmd_diagnostics(config: RunConfig, args) -> int:
    month_key = parse_month(args.month)
    try:
        rates = load_rates(config.rates)
        series = load_prices(config.prices, args.entity)
        returns = excess_returns(align(series, rates))
        windows, skipped = partition_months(returns.dates, config.min_obs, args.entity)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    window = next((w for w in windows if w.month_key == month_key), None)
    if window is None:
        skip = next((s for s in skipped if s.month_key == month_key), None)
        if skip is not None:
            raise InputError(
                f"month {args.month} of {args.entity!r} was skipped: "
                f"{skip.obs_count} observations < min-obs {config.min_obs}"
            )
        raise InputError(f"no window {args.month} for entity {args.entity!r}")

    losses = list(returns.losses[window.start : window.stop])
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.entity}_{args.month}"

    grid = sorted(set(losses))
    curve = threshold.mean_excess_curve(losses, grid)
    write_csv(
        out / f"{stem}_mean_excess.csv",
        ("u", "mean_excess"),
        [[fmt(u), fmt(e)] for u, e in curve],
    )

    positive = [x for x in losses if x > 0.0]
    hill_rows = []
    if len(positive) >= 2:
        hill_rows = [[k, fmt(h)] for k, h in threshold.hill_curve(positive)]
    else:
        print(
            f"warning: {stem}: no positive losses, hill curve is empty",
            file=sys.stderr,
        )
    write_csv(out / f"{stem}_hill.csv", ("k", "hill"), hill_rows)

    ladder = [0.50 + 0.05 * i for i in range(9)]  # 0.50 .. 0.90
    stability = threshold.threshold_stability(
        losses, ladder, estimator=config.estimator, r_zhang=config.r_zhang
    )
    write_csv(
        out / f"{stem}_stability.csv",
        ("u", "k_hat", "sigma_hat", "ks"),
        [[fmt(u), fmt(k), fmt(s), fmt(d)] for u, k, s, d in stability],
    )
    print(f"wrote diagnostics for {args.entity} {args.month} to {out}")
    return EXIT_OK


def _load_panels(var_dir: Path):
    summary_path = var_dir / "summary.json"
    if summary_path.exists():
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
        paths = [var_dir / name for name in summary["files"].values()]
    else:
        paths = sorted(var_dir.glob("var_*.csv"))
    var_data, rfr_data = {}, {}
    for path in paths:
        if not path.exists():
            raise InputError(f"missing var file {path}")
        entity, var_by_month, rfr_by_month = read_entity_csv(path)
        var_data[entity] = var_by_month
        rfr_data[entity] = rfr_by_month
    return var_data, rfr_data


def _matrix_rows(matrix: analysis.CorrelationMatrix):
    rows = [["entity", *matrix.entities]]
    for i, entity in enumerate(matrix.entities):
        rows.append([entity, *(fmt(v) if math.isfinite(v) else "" for v in matrix.rho[i])])
    return rows


def cmd_analyze(config: RunConfig, args) -> int:
    var_dir = Path(args.var_dir)
    if not var_dir.is_dir():
        raise InputError(f"{var_dir} is not a directory")
    var_data, rfr_data = _load_panels(var_dir)
    if len(var_data) < 2:
        raise InputError(f"need at least 2 entities to analyze, got {len(var_data)}")

    var_panel = analysis.panel_from_mapping(var_data)
    rfr_panel = analysis.panel_from_mapping(rfr_data)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    var_matrix = analysis.correlation_matrix(var_panel)
    rfr_matrix = analysis.correlation_matrix(rfr_panel)
    rows = _matrix_rows(var_matrix)
    write_csv(out / "correlation_var.csv", rows[0], rows[1:])
    rows = _matrix_rows(rfr_matrix)
    write_csv(out / "correlation_rfr.csv", rows[0], rows[1:])

    shares, totals = analysis.stacked_shares(rfr_panel)
    share_rows = []
    for j, month in enumerate(shares.months):
        for i, entity in enumerate(shares.entities):
            value = shares.values[i, j]
            if math.isfinite(value):
                share_rows.append(
                    [month_str(month), entity, fmt(float(value)), fmt(float(totals[j]))]
                )
    write_csv(out / "shares.csv", ("month", "entity", "share", "total_magnitude"), share_rows)

    fraction_rows = []
    for entity in rfr_panel.entities:
        values = [v for v in rfr_panel.row(entity) if math.isfinite(v)]
        if not values:
            continue
        above, below, zero = risk.sign_fractions(values)
        fraction_rows.append((above, entity, below, zero, len(values)))
    fraction_rows.sort(key=lambda r: (-r[0], r[1]))
    write_csv(
        out / "sign_fractions.csv",
        ("entity", "above", "below", "zero", "n_points"),
        [[e, fmt(a), fmt(b), fmt(z), n] for a, e, b, z, n in fraction_rows],
    )

    if config.index_entities:
        comparison = analysis.compare_to_index(var_panel, rfr_panel, config.index_entities)
        write_csv(
            out / "comparison.csv",
            ("entity", "index", "var_rho", "rfr_rho", "rfr_std_ratio"),
            [
                [c.entity, c.index, fmt(c.var_rho), fmt(c.rfr_rho), fmt(c.rfr_std_ratio)]
                for c in comparison
            ],
        )
    print(f"wrote analysis reports to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailrisk",
        description="Peaks-over-threshold tail-risk analytics over daily price CSVs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="write a deterministic synthetic panel")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--entities", type=int, default=4)
    synth.add_argument("--days", type=int, default=500)
    synth.add_argument("--shape", type=float, default=-0.1)
    synth.add_argument("--scale", type=float, default=0.012)
    synth.add_argument("--common-factor-weight", type=float, default=0.0)
    synth.add_argument("--factor-shape", type=float, default=-0.15)
    synth.add_argument("--factor-scale", type=float, default=0.012)
    synth.add_argument("--start", default="2018-01-01")
    synth.add_argument("--daily-rate", type=float, default=1e-4)
    synth.add_argument("--out", default=".")
    synth.set_defaults(func=cmd_synth)

    def add_pipeline_flags(p):
        p.add_argument("--prices", required=True)
        p.add_argument("--rates", required=True)
        p.add_argument("--threshold-confidence", type=float, default=0.80)
        p.add_argument("--var-p", type=float, default=0.95)
        p.add_argument("--estimator", choices=gpd.ESTIMATORS, default=gpd.PROFILE_MLE)
        p.add_argument("--r-zhang", type=float, default=-0.5)
        p.add_argument("--min-obs", type=int, default=10)
        p.add_argument("--pool-window", type=int, default=1)
        p.add_argument("--out", default=".")

    var = sub.add_parser("var", help="per-entity monthly VaR/RFR series")
    add_pipeline_flags(var)
    var.set_defaults(func=cmd_var)

    diag = sub.add_parser("diagnostics", help="threshold diagnostics for one window")
    add_pipeline_flags(diag)
    diag.add_argument("--entity", required=True)
    diag.add_argument("--month", required=True, help="window month, YYYY-MM")
    diag.set_defaults(func=cmd_diagnostics)

    analyze = sub.add_parser("analyze", help="cross-entity reports from var outputs")
    analyze.add_argument("--var-dir", required=True)
    analyze.add_argument("--index-entities", default="",
                         help="comma-separated entity ids treated as indices")
    analyze.add_argument("--threshold-confidence", type=float, default=0.80)
    analyze.add_argument("--var-p", type=float, default=0.95)
    analyze.add_argument("--out", default=".")
    analyze.set_defaults(func=cmd_analyze)

    return parser


def config_from_args(args) -> RunConfig:
    index_entities = tuple(
        e.strip() for e in getattr(args, "index_entities", "").split(",") if e.strip()
    )
    config = RunConfig(
        prices=getattr(args, "prices", ""),
        rates=getattr(args, "rates", ""),
        out=args.out,
        threshold_confidence=getattr(args, "threshold_confidence", 0.80),
        var_p=getattr(args, "var_p", 0.95),
        estimator=getattr(args, "estimator", gpd.PROFILE_MLE),
        r_zhang=getattr(args, "r_zhang", -0.5),
        min_obs=getattr(args, "min_obs", 10),
        pool_window=getattr(args, "pool_window", 1),
        seed=getattr(args, "seed", 0),
        index_entities=index_entities,
    )
    config.validate()
    return config


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(config, args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # numerical failure that aborted the run
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
