"""Command-line interface.

Subcommands mirror the pipeline stages (synth, clean, h0-table,
preprocess, spectrum, train, predict, invert, evaluate, compare) plus
``run`` for the whole protocol driven by a JSON config. Exit codes:
0 success, 1 config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import evaluation, model_io, pipeline, preprocess, spectral
from .errors import ConfigError, DataError, NumericalError
from .series import DailySeries, SynthConfig, clean, generate_synthetic, load_csv, write_csv
from .solar import SiteSpec, h0_table


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise ConfigError(message)


def _parse_years(text: str) -> tuple[int, int]:
    try:
        first, last = text.split(":")
        return int(first), int(last)
    except ValueError:
        raise ConfigError(f"expected a YEAR:YEAR span, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="solarcast", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic daily irradiation CSV")
    p.add_argument("--years", type=int, required=True)
    p.add_argument("--lat", type=float, default=41.917)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start-year", type=int, default=1971)
    p.add_argument("--k-mean", type=float, default=0.6)
    p.add_argument("--ar1", type=float, default=0.7)
    p.add_argument("--noise-std", type=float, default=0.2)
    p.add_argument("--amplitude", type=float, default=0.25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("clean", help="replace atypical days by cross-year means")
    p.add_argument("--input", required=True)
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("h0-table", help="dump daily extraterrestrial irradiation")
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--solar-constant", type=float, default=1367.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_h0_table)

    p = sub.add_parser("preprocess", help="fit seasonal factors and emit the corrected series")
    p.add_argument("--input", required=True)
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--train-years", type=_parse_years, default=None)
    p.add_argument("--corrected-out", required=True)
    p.add_argument("--factors-out", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("spectrum", help="periodogram of a series CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("train", help="fit a forecaster on the training span")
    p.add_argument("--model", choices=pipeline.MODEL_NAMES, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--train-years", type=_parse_years, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=int, default=None, help="AR order / MLP input lags")
    p.add_argument("--q", type=int, default=None, help="MA order")
    p.add_argument("--order", type=int, default=None, help="Markov/Bayes order")
    p.add_argument("--n-classes", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--n-hidden", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--max-fail", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="one-step-ahead predictions over a day span")
    p.add_argument("--model-file", required=True)
    p.add_argument("--history", required=True, help="series CSV on the model's working scale")
    p.add_argument("--days", type=_parse_years, required=True)
    p.add_argument("--column", default=pipeline.GHI_PRED_COLUMN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("invert", help="map corrected predictions back to Wh/m^2")
    p.add_argument("--input", required=True)
    p.add_argument("--factors", required=True)
    p.add_argument("--lat", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("evaluate", help="metrics for one or more prediction CSVs")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--measured", required=True)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="one nRMSE row per prediction CSV")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--measured", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="full protocol from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--outdir", default=None)
    p.add_argument("--model", default=None)
    p.add_argument("--seed", type=int, default=None)
    pre = p.add_mutually_exclusive_group()
    pre.add_argument("--preprocess", dest="preprocess", action="store_true", default=None)
    pre.add_argument("--no-preprocess", dest="preprocess", action="store_false")
    p.add_argument("--input", default=None)
    p.set_defaults(func=cmd_run)

    return parser


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------


def cmd_synth(args) -> None:
    cfg = SynthConfig(
        n_years=args.years,
        latitude_deg=args.lat,
        clear_sky_fraction_mean=args.k_mean,
        cloud_ar1=args.ar1,
        cloud_std=args.noise_std,
        seasonal_amplitude=args.amplitude,
        start_year=args.start_year,
        seed=args.seed,
    )
    write_csv(generate_synthetic(cfg), args.out)


def cmd_clean(args) -> None:
    series = load_csv(args.input)
    cleaned, report = clean(series, SiteSpec.from_degrees(args.lat))
    write_csv(cleaned, args.out)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            fh.write("date,old_value,new_value\n")
            for day, old, new in report.replaced:
                old_text = "" if old is None else f"{old:.3f}"
                fh.write(f"{day.to_date().isoformat()},{old_text},{new:.3f}\n")
    print(f"replaced {len(report)} atypical day(s)")


def cmd_h0_table(args) -> None:
    table = h0_table(SiteSpec.from_degrees(args.lat, args.solar_constant))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("day,h0_wh_m2\n")
        for day, value in enumerate(table, start=1):
            fh.write(f"{day},{value:.3f}\n")


def cmd_preprocess(args) -> None:
    series = load_csv(args.input)
    site = SiteSpec.from_degrees(args.lat)
    fit_on = series if args.train_years is None else series.slice_years(*args.train_years)
    p = preprocess.fit(fit_on, site)
    pipeline.write_factors_csv(p.factors, args.factors_out)
    write_csv(
        p.apply(series), args.corrected_out,
        value_column=pipeline.CORRECTED_COLUMN, decimals=None,
    )


def cmd_spectrum(args) -> None:
    series = load_csv(args.input)
    pgram = spectral.periodogram(series.values)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("period_days,power\n")
        for k, power in enumerate(pgram.ordinates, start=1):
            fh.write(f"{pgram.n / k:.6g},{power:.6g}\n")
    test = spectral.fisher_g_test(pgram)
    print(
        f"peak period {test.peak_period:.6g} days; Fisher g {test.g:.6g} "
        f"(p-value {test.p_value:.6g})"
    )


def cmd_train(args) -> None:
    series = load_csv(args.input)
    train_series = series if args.train_years is None else series.slice_years(*args.train_years)
    params = {
        key: value
        for key, value in {
            "p": args.p, "q": args.q, "order": args.order, "n_classes": args.n_classes,
            "k": args.k, "window": args.window, "n_hidden": args.n_hidden,
            "max_epochs": args.epochs, "max_fail": args.max_fail, "seed": args.seed,
        }.items()
        if value is not None
    }
    model = pipeline.fit_forecaster(args.model, params, args.seed, train_series)
    model_io.save_forecaster(args.out, model)


def cmd_predict(args) -> None:
    model = model_io.load_forecaster(args.model_file)
    history = load_csv(args.history)
    test_days = history.slice_years(*args.days).dates()
    preds = pipeline.forecast_one_step(model, history, test_days)
    decimals = None if args.column != pipeline.GHI_PRED_COLUMN else 3
    if decimals == 3:
        preds = np.maximum(preds, 0.0)
    write_csv(
        DailySeries(test_days[0], preds), args.out,
        value_column=args.column, decimals=decimals,
    )


def cmd_invert(args) -> None:
    final, n_years = pipeline.read_factors_csv(args.factors)
    p = pipeline.preprocessor_from_factors(SiteSpec.from_degrees(args.lat), final, n_years)
    corrected = load_csv(args.input)
    inverted = np.maximum(p.invert(corrected).values, 0.0)
    write_csv(
        corrected.with_values(inverted), args.out,
        value_column=pipeline.GHI_PRED_COLUMN, decimals=3,
    )


def _load_runs(measured_path, prediction_paths) -> dict[str, evaluation.ForecastRun]:
    measured = load_csv(measured_path)
    runs: dict[str, evaluation.ForecastRun] = {}
    for path in prediction_paths:
        pred = load_csv(path)
        model_id = Path(path).stem
        days = pred.dates()
        meas_values = measured.slice_dates(pred.start, pred.end).values
        runs[model_id] = evaluation.ForecastRun(
            days=tuple(days), measured=meas_values, predicted=pred.values, model_id=model_id
        )
    return runs


def cmd_evaluate(args) -> None:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runs = _load_runs(args.measured, args.predictions)

    with open(outdir / "metrics.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("model,rmse,nrmse,mbe,r_squared,n\n")
        reports = {}
        for model_id, run in runs.items():
            rep = evaluation.metrics(run)
            reports[model_id] = rep
            fh.write(
                f"{model_id},{rep.rmse:.6g},{rep.nrmse:.6g},{rep.mbe:.6g},"
                f"{rep.r_squared:.6g},{rep.n}\n"
            )
    with open(outdir / "seasonal.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("model,season,rmse,nrmse,mbe,r_squared,n\n")
        for model_id, run in runs.items():
            for season, rep in evaluation.seasonal_breakdown(run).items():
                fh.write(
                    f"{model_id},{season},{rep.rmse:.6g},{rep.nrmse:.6g},"
                    f"{rep.mbe:.6g},{rep.r_squared:.6g},{rep.n}\n"
                )
    with open(outdir / "monthly.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("model,month,aggregate_error_pct\n")
        for model_id, run in runs.items():
            table = evaluation.monthly_errors(run)
            for (year, month), pct in sorted(table.items()):
                fh.write(f"{model_id},{year}-{month:02d},{pct:.6g}\n")
            fh.write(f"{model_id},mean,{np.mean(list(table.values())):.6g}\n")
    _write_table1(runs, outdir / "table1.csv")
    if len(runs) >= 2:
        summary = evaluation.confidence_interval(list(reports.values()))
        with open(outdir / "ci.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write("metric,mean,half_width_95,n_runs\n")
            for name in evaluation.METRIC_NAMES:
                fh.write(
                    f"{name},{summary.means[name]:.6g},"
                    f"{summary.half_widths[name]:.6g},{summary.n_runs}\n"
                )


def _write_table1(runs, path) -> None:
    rows = evaluation.compare_models(runs)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("model,nrmse\n")
        for model_id, nrmse in rows:
            fh.write(f"{model_id},{nrmse:.6g}\n")


def cmd_compare(args) -> None:
    runs = _load_runs(args.measured, args.predictions)
    _write_table1(runs, args.out)


def cmd_run(args) -> None:
    overrides = {
        "outdir": args.outdir,
        "model": args.model,
        "seed": args.seed,
        "preprocess": args.preprocess,
        "input_csv": args.input,
    }
    cfg = pipeline.load_config(args.config, overrides)
    artifacts = pipeline.run_pipeline(cfg)
    for name, path in artifacts.items():
        print(f"{name}: {path}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
