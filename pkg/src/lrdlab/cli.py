"""Command-line entry point.

Subcommands: ingest, diagnose, hurst, fit, simulate, evaluate, report-all.
Outputs are machine-readable JSON/CSV written to --out-dir, plus plot-data
CSVs (log-log fit points, histogram and QQ data) for external plotting.
Configuration can come from a TOML file via --config; explicit flags win.

Exit codes: 0 success, 1 input error, 2 numerical failure (partial output
is retained).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import arfima_figarch, datasets, diagnostics
from .dfa import dfa_analysis
from .ensemble import canonical_json, evaluate, load_ensemble
from .rescaled_range import rs_analysis
from .series import Frequency, IngestError, PriceSeries, downsample, load_prices, log_returns

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    # input errors (unknown flags, bad values) exit with 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lrdlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, data=False, freq=False, out=True, fmt=False, trunc=False):
        p.add_argument("--config", type=Path, help="TOML config file; flags win")
        if data:
            p.add_argument("--data", help="price CSV path or bundled name "
                           f"({', '.join(sorted(datasets.BUNDLED))})")
            p.add_argument("--label", default=None, help="series label")
        if freq:
            p.add_argument("--frequency", choices=[f.value for f in Frequency],
                           default="daily")
        if out:
            p.add_argument("--out-dir", type=Path, default=Path("."))
        if fmt:
            p.add_argument("--format", choices=["json", "csv"], default="json")
        if trunc:
            p.add_argument("--truncation-lag", type=int, default=arfima_figarch.DEFAULT_TRUNCATION)

    p = sub.add_parser("ingest", help="load a price CSV and emit the downsampled series")
    add_common(p, data=True, freq=True)

    p = sub.add_parser("diagnose", help="moment statistics, normality tests, plot data")
    add_common(p, data=True, freq=True, fmt=True)

    p = sub.add_parser("hurst", help="Hurst exponent via R/S or DFA")
    add_common(p, data=True, freq=True, fmt=True)
    p.add_argument("--method", choices=["rs", "dfa"], required=True)

    p = sub.add_parser("fit", help="ARFIMA-FIGARCH maximum-likelihood fit")
    add_common(p, data=True, freq=True, trunc=True)

    p = sub.add_parser("simulate", help="simulate an ARFIMA-FIGARCH return series")
    add_common(p, trunc=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=8192)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--params", type=Path, default=None,
                   help="JSON file with model parameters (defaults otherwise)")

    p = sub.add_parser("evaluate", help="score a synthetic path ensemble")
    add_common(p, data=True, freq=True, trunc=True)
    p.add_argument("--ensemble", type=Path, required=True)

    p = sub.add_parser("report-all", help="full battery: Tables 1-4 rows for one series")
    add_common(p, data=True, freq=True, fmt=True, trunc=True)

    return parser


def _apply_config(args: argparse.Namespace, argv: list[str]) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    with open(args.config, "rb") as fh:
        cfg = tomllib.load(fh)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if hasattr(args, dest) and dest not in explicit:
            if dest in ("out_dir", "params", "ensemble", "data"):
                value = Path(value) if dest != "data" else str(value)
            setattr(args, dest, value)
    return args


def _load_series(args) -> PriceSeries:
    if not args.data:
        raise IngestError("--data is required")
    if args.data in datasets.BUNDLED:
        p = load_prices(datasets.bundled_path(args.data), label=datasets.BUNDLED[args.data])
    else:
        p = load_prices(args.data, label=args.label or "")
    if args.label:
        p = PriceSeries(dates=p.dates, closes=p.closes, frequency=p.frequency,
                        label=args.label)
    freq = Frequency(args.frequency)
    if freq is not Frequency.DAILY:
        p = downsample(p, freq)
    return p


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(canonical_json(payload) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def _write_flat(args, stem: str, payload: dict) -> None:
    out = args.out_dir / f"{stem}.{args.format}"
    if args.format == "json":
        _write_json(out, payload)
    else:
        _write_csv(out, list(payload), [[payload[k] for k in payload]])


def _scalefit_csv(args, stem: str, fit_ln) -> None:
    _write_csv(args.out_dir / f"{stem}.csv", ["ln_n", "ln_stat", "fitted"],
               fit_ln.plot_rows())


def _cmd_ingest(args) -> int:
    p = _load_series(args)
    out = args.out_dir / f"prices_{args.frequency}.csv"
    _write_csv(out, ["date", "close"],
               [(d.isoformat(), repr(float(c))) for d, c in p.observations])
    r = log_returns(p)
    _write_csv(args.out_dir / f"returns_{args.frequency}.csv", ["value"],
               [(repr(float(v)),) for v in r.values])
    print(f"{p.label or 'series'}: {len(p)} observations at {args.frequency} frequency")
    return EXIT_OK


def _cmd_diagnose(args) -> int:
    p = _load_series(args)
    r = log_returns(p)
    report = diagnostics.moments(r)
    _write_flat(args, f"moments_{args.frequency}", report.to_dict())
    hist = diagnostics.histogram_data(r)
    edges = hist["bin_edges"]
    _write_csv(args.out_dir / f"histogram_{args.frequency}.csv",
               ["bin_left", "bin_right", "count"],
               [(edges[i], edges[i + 1], c) for i, c in enumerate(hist["counts"])])
    qq = diagnostics.qq_data(r)
    _write_csv(args.out_dir / f"qq_{args.frequency}.csv",
               ["theoretical", "sample"],
               list(zip(qq["theoretical"], qq["sample"])))
    return EXIT_OK


def _cmd_hurst(args) -> int:
    p = _load_series(args)
    r = log_returns(p)
    analysis = rs_analysis if args.method == "rs" else dfa_analysis
    est, fit_ln = analysis(r)
    _write_flat(args, f"hurst_{args.method}_{args.frequency}", est.to_dict())
    _scalefit_csv(args, f"scalefit_{args.method}_{args.frequency}", fit_ln)
    return EXIT_OK


def _cmd_fit(args) -> int:
    p = _load_series(args)
    r = log_returns(p)
    result = arfima_figarch.fit(r, truncation=args.truncation_lag)
    _write_json(args.out_dir / f"fit_{args.frequency}.json", result.to_dict())
    return EXIT_OK if result.converged else EXIT_NUMERICAL


_DEFAULT_SIM = dict(mu=0.0, phi=0.0, theta=0.0, d_m=0.0, omega=1e-6,
                    alpha=0.15, beta=0.45, d_v=0.4, nu=6.0)


def _cmd_simulate(args) -> int:
    raw = dict(_DEFAULT_SIM)
    if args.params:
        raw.update(json.loads(Path(args.params).read_text()))
    params = arfima_figarch.ArfimaFigarchParams(**raw)
    burn_in = args.burn_in if args.burn_in is not None else args.truncation_lag
    r = arfima_figarch.simulate(params, n=args.n, burn_in=burn_in, seed=args.seed,
                                truncation=args.truncation_lag)
    _write_csv(args.out_dir / "simulated_returns.csv", ["value"],
               [(repr(float(v)),) for v in r.values])
    _write_json(args.out_dir / "simulated_returns.json", {
        "seed": args.seed, "n": args.n, "burn_in": burn_in,
        "truncation": args.truncation_lag, "frequency": r.frequency.value,
        "params": params.to_dict(),
    })
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    p = _load_series(args)
    ens = load_ensemble(args.ensemble)
    report = evaluate(ens, p, truncation=args.truncation_lag)
    _write_json(args.out_dir / "evaluation_report.json", report.to_dict())
    if report.errors:
        print(f"sections with errors: {sorted(report.errors)}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_report_all(args) -> int:
    p = _load_series(args)
    r = log_returns(p)
    payload: dict = {
        "label": p.label, "frequency": args.frequency, "n_prices": len(p),
        "n_returns": len(r),
    }
    payload["moments"] = diagnostics.moments(r).to_dict()
    est_rs, fit_rs = rs_analysis(r)
    est_dfa, fit_dfa = dfa_analysis(r)
    payload["rs"] = est_rs.to_dict()
    payload["dfa"] = est_dfa.to_dict()
    result = arfima_figarch.fit(r, truncation=args.truncation_lag)
    payload["arfima_figarch"] = result.to_dict()

    stem = (p.label or "series").lower().replace(" ", "_").replace("&", "")
    if args.format == "json":
        _write_json(args.out_dir / f"report_{stem}_{args.frequency}.json", payload)
    else:
        rows = []
        for section in ("moments", "rs", "dfa"):
            for k, v in payload[section].items():
                rows.append((section, k, v))
        for k, v in payload["arfima_figarch"]["params"].items():
            rows.append(("arfima_figarch", k, v))
        for k in ("log_likelihood", "p_dm", "p_dv", "converged", "iterations"):
            rows.append(("arfima_figarch", k, payload["arfima_figarch"][k]))
        _write_csv(args.out_dir / f"report_{stem}_{args.frequency}.csv",
                   ["section", "key", "value"], rows)
    _scalefit_csv(args, f"scalefit_rs_{args.frequency}", fit_rs)
    _scalefit_csv(args, f"scalefit_dfa_{args.frequency}", fit_dfa)
    hist = diagnostics.histogram_data(r)
    edges = hist["bin_edges"]
    _write_csv(args.out_dir / f"histogram_{args.frequency}.csv",
               ["bin_left", "bin_right", "count"],
               [(edges[i], edges[i + 1], c) for i, c in enumerate(hist["counts"])])
    qq = diagnostics.qq_data(r)
    _write_csv(args.out_dir / f"qq_{args.frequency}.csv", ["theoretical", "sample"],
               list(zip(qq["theoretical"], qq["sample"])))
    return EXIT_OK if result.converged else EXIT_NUMERICAL


_COMMANDS = {
    "ingest": _cmd_ingest,
    "diagnose": _cmd_diagnose,
    "hurst": _cmd_hurst,
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "evaluate": _cmd_evaluate,
    "report-all": _cmd_report_all,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(args, argv)
        if hasattr(args, "out_dir"):
            args.out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (IngestError, FileNotFoundError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
