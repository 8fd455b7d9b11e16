"""Command-line interface.

    pencilpow run    --experiment general_square --n 128 --trials 20 ...
    pencilpow check
    pencilpow bounds --n 16 --p-max 4 --seed 0 --out results/

``run`` writes <out>/<experiment>.csv, <out>/<experiment>.svg and
<out>/manifest.txt. Flags may also come from a flat ``key = value`` config
file (--config); explicit flags override file values.
"""

import argparse
import os
import sys
from dataclasses import fields

from .checks import run_all_checks
from .emit import emit_csv, emit_svg, write_manifest
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    run_bound_report,
    run_experiment,
)

_PRECISION_ALIASES = {
    "f32": "binary32",
    "f64": "binary64",
    "binary32": "binary32",
    "binary64": "binary64",
}

_CONFIG_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_INT_KEYS = {"n", "trials", "p_max", "seed"}
_FLOAT_KEYS = {"delta", "annulus_r_lo", "annulus_r_hi"}


def _read_config_file(path):
    """Parse flat ``key = value`` lines into ExperimentConfig kwargs."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_TYPES:
                raise SystemExit(f"{path}:{lineno}: unknown config key {key!r}")
            if key in _INT_KEYS:
                out[key] = int(val)
            elif key in _FLOAT_KEYS:
                out[key] = float(val)
            elif key == "precision":
                out[key] = _PRECISION_ALIASES.get(val, val)
            else:
                out[key] = val
    return out


def _add_run_flags(parser):
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--experiment", choices=EXPERIMENTS)
    parser.add_argument("--n", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--p-max", dest="p_max", type=int)
    parser.add_argument("--conditioning", choices=("well", "ill"))
    parser.add_argument("--spectrum", choices=("circle", "disk", "annulus"))
    parser.add_argument("--delta", type=float)
    parser.add_argument("--precision", choices=sorted(_PRECISION_ALIASES))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", dest="output_dir")


def _build_config(args):
    kwargs = {}
    if args.config:
        kwargs.update(_read_config_file(args.config))
    for key in (
        "experiment",
        "n",
        "trials",
        "p_max",
        "conditioning",
        "spectrum",
        "delta",
        "precision",
        "seed",
        "output_dir",
    ):
        val = getattr(args, key, None)
        if val is not None:
            kwargs[key] = val
    if "precision" in kwargs:
        kwargs["precision"] = _PRECISION_ALIASES.get(kwargs["precision"], kwargs["precision"])
    return ExperimentConfig(**kwargs)


def _cmd_run(args):
    config = _build_config(args)
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    if config.experiment == "bound_report":
        return _emit_bound_report(config, out)
    records = run_experiment(config)
    csv_path = os.path.join(out, f"{config.experiment}.csv")
    svg_path = os.path.join(out, f"{config.experiment}.svg")
    emit_csv(records, csv_path, config.experiment)
    emit_svg(records, svg_path, title=config.experiment)
    write_manifest(os.path.join(out, "manifest.txt"), config)
    print(f"wrote {csv_path}, {svg_path} ({len(records)} rows)")
    return 0


def _emit_bound_report(config, out):
    report = run_bound_report(config)
    path = os.path.join(out, "bound_report.csv")
    with open(path, "w") as fh:
        fh.write("p,err_irs,bound_irs,ratio_irs,err_es,bound_es,ratio_es\n")
        for row in report.rows:
            fh.write(
                f"{row.p},{row.err_irs:.17g},{row.bound_irs:.17g},{row.ratio_irs:.6g},"
                f"{row.err_es:.17g},{row.bound_es:.17g},{row.ratio_es:.6g}\n"
            )
    write_manifest(
        os.path.join(out, "manifest.txt"),
        config,
        extra={
            "flops_irs": report.flops_irs,
            "flops_es": report.flops_es,
            "flops_match": report.flops_match,
        },
    )
    _print_bound_table(report)
    print(f"wrote {path}")
    return 0


def _print_bound_table(report):
    print(f"{'p':>3} {'measured irs':>14} {'bound irs':>12} {'measured es':>14} {'bound es':>12}")
    for row in report.rows:
        print(
            f"{row.p:>3} {row.err_irs:>14.3e} {row.bound_irs:>12.3e} "
            f"{row.err_es:>14.3e} {row.bound_es:>12.3e}"
        )
    ok = "match" if report.flops_match else "MISMATCH"
    print(
        f"kernel calls ({ok}): irs {report.flops_irs} expected {report.expected_flops_irs}; "
        f"es {report.flops_es} expected {report.expected_flops_es}"
    )


def _cmd_check(_args):
    return 0 if run_all_checks(verbose=True) else 1


def _cmd_bounds(args):
    if args.experiment is None:
        args.experiment = "bound_report"
    if args.n is None:
        args.n = 16
    if args.p_max is None:
        args.p_max = 4
    config = _build_config(args)
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    return _emit_bound_report(config, out)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="pencilpow",
        description="implicit-repeated-squaring experiments and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and emit CSV/SVG")
    _add_run_flags(run_p)
    run_p.set_defaults(func=_cmd_run)

    check_p = sub.add_parser("check", help="run the invariant suite")
    check_p.set_defaults(func=_cmd_check)

    bounds_p = sub.add_parser("bounds", help="evaluate forward-error bounds")
    _add_run_flags(bounds_p)
    bounds_p.set_defaults(func=_cmd_bounds)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
