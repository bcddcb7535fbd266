"""Command line entry point: ``floqent {point,sweep,rates,trace,spectrum}``."""
import argparse
import os
import sys
import time

from .config import load_config
from .errors import ConfigError, FloqentError
from .outputs import ensure_dir, heatmap_svg, lines_svg, write_csv, write_provenance
from .sweep import (
    POINT_FIELDS, provenance, rates_report, run_point, spectrum_report, sweep, trace_report,
)

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 2, 3


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value (repeatable)")
    common.add_argument("--out", default="results", help="output directory")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes for sweeps (default: FLOQENT_WORKERS or CPU count)")
    common.add_argument("--format", choices=("csv", "csv+plot"), default="csv+plot")
    parser = argparse.ArgumentParser(prog="floqent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("point", "steady state at one parameter point"),
        ("sweep", "steady concurrence over one or two axes"),
        ("rates", "transition rates across the coupling asymmetry xi"),
        ("trace", "stroboscopic populations and concurrence in time"),
        ("spectrum", "H0 energies across eps0"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _plot(args):
    return args.format == "csv+plot"


def _cmd_point(cfg, args):
    if cfg.sweep:
        raise ConfigError("point takes no sweep axes; use the sweep command")
    start = time.perf_counter()
    rec = run_point(cfg)
    path = os.path.join(args.out, "steady_concurrence.csv")
    write_csv(path, list(POINT_FIELDS), [[rec[k] for k in POINT_FIELDS]])
    write_provenance(os.path.join(args.out, "provenance.txt"),
                     provenance(cfg, wall_time=time.perf_counter() - start))
    for k in ("C_inf", "P0", "P1", "P2", "P3", "labeling", "error"):
        print(f"{k} = {rec[k]}")
    return EXIT_PARTIAL if rec["error"] else EXIT_OK


def _cmd_sweep(cfg, args):
    if not cfg.sweep:
        raise ConfigError("sweep needs at least one axis (sweep.x = name,min,max,steps)")
    result = sweep(cfg, args.workers)
    path = os.path.join(args.out, "steady_concurrence.csv")
    header = result.header()
    rows = list(result.rows())
    write_csv(path, header, rows)
    write_provenance(os.path.join(args.out, "provenance.txt"), result.provenance)
    if _plot(args):
        svg = os.path.join(args.out, "steady_concurrence.svg")
        if len(result.axes) == 2:
            heatmap_svg(svg, result, description=result.provenance["config"])
        else:
            lines_svg(svg, header, rows, result.axes[0].name, ["C_inf", "P0", "P1", "P2", "P3"],
                      ylim=(0, 1), description=result.provenance["config"])
    print(f"{len(rows)} points, {result.failures} failed -> {path}")
    return EXIT_PARTIAL if result.failures else EXIT_OK


def _report(product, builder, plot_kwargs):
    def run(cfg, args):
        start = time.perf_counter()
        header, rows = builder(cfg)
        path = os.path.join(args.out, f"{product}.csv")
        write_csv(path, header, rows)
        info = provenance(cfg, wall_time=time.perf_counter() - start)
        write_provenance(os.path.join(args.out, "provenance.txt"), info)
        if _plot(args):
            lines_svg(os.path.join(args.out, f"{product}.svg"), header, rows,
                      description=info["config"], **plot_kwargs(header))
        print(f"{len(rows)} rows -> {path}")
        return EXIT_OK
    return run


COMMANDS = {
    "point": _cmd_point,
    "sweep": _cmd_sweep,
    "rates": _report("rates_vs_xi", rates_report, lambda h: dict(
        x_col="xi", y_cols=[c for c in h if c.startswith("floquet_G") or c.startswith("exact_G")],
        logy=True)),
    "trace": _report("populations_trace", trace_report, lambda h: dict(
        x_col="t_over_tau", y_cols=["P0", "P1", "P2", "P3", "C"], logx=True, ylim=(0, 1))),
    "spectrum": _report("spectrum", spectrum_report, lambda h: dict(
        x_col="eps0", y_cols=["E0", "E1", "E2", "E3"])),
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        ensure_dir(args.out)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloqentError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
