"""Command-line interface.

Exit codes: 0 success / hypothesis accepted / (K, H) selected,
1 hypothesis rejected / selection exhausted, 2 usage or runtime error.

Every option can also come from ``--config FILE`` (YAML or JSON) using the
flag names as keys, either at top level or under a section named after the
command. Command-line flags override the file, which overrides defaults.
"""

import argparse
import logging
import sys

import yaml

from . import __version__, jsonio
from .coclustering import ward_cocluster
from .errors import LBMError
from .estimation import estimate
from .experiments import Study, default_plan, run_study, write_csvs
from .generator import INTERPOLATION_CENTER, Family, GeneratorSpec, generate, interpolate_means, preset_params
from .gof import TestConfig, gof_test, sequential_select
from .io import read_matrix, write_matrix
from .model import BlockStructure

log = logging.getLogger("lbmgof")

# flags that do not influence results and are left out of embedded configs
_NON_RESULT_KEYS = {"out", "truth", "out_params", "out_z", "csv_dir", "log_level", "threads", "config", "func"}


class UsageError(Exception):
    pass


def _sizes(text):
    try:
        return [tuple(int(v) for v in item.lower().split("x")) for item in text.split(",") if item]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected sizes like 1500x1125,300x225, got {text!r}")


def _ints(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _build_parser():
    parser = argparse.ArgumentParser(prog="lbmgof", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="YAML/JSON file with default flag values")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("generate", help="draw a synthetic LBM matrix")
    p.add_argument("--family", choices=[f.value for f in Family], default="gaussian")
    p.add_argument("--preset", choices=["paper-4x3"], default="paper-4x3")
    p.add_argument("--t", type=int, default=0, choices=range(10), metavar="0..9")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="matrix CSV path")
    p.add_argument("--truth", help="true structure JSON path")
    p.set_defaults(func=cmd_generate, required=("n", "p", "out"))

    p = sub.add_parser("cluster", help="estimate a (K0, H0) block structure with Ward clustering")
    p.add_argument("--in", dest="input")
    p.add_argument("--k", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster, required=("input", "k", "h", "out"))

    p = sub.add_parser("estimate", help="block parameters and standardized matrix")
    p.add_argument("--in", dest="input")
    p.add_argument("--structure")
    p.add_argument("--out-params")
    p.add_argument("--out-z")
    p.set_defaults(func=cmd_estimate, required=("input", "structure"))

    p = sub.add_parser("test", help="test one hypothesis (K0, H0)")
    p.add_argument("--in", dest="input")
    p.add_argument("--k", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--alpha", type=float, default=0.01)
    p.set_defaults(func=cmd_test, required=("input", "k", "h"))

    p = sub.add_parser("select", help="sequentially select (K, H)")
    p.add_argument("--in", dest="input")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--l-max", type=int, default=12)
    p.set_defaults(func=cmd_select, required=("input",))

    p = sub.add_parser("experiment", help="run a Monte-Carlo study")
    p.add_argument("study", choices=[s.value for s in Study])
    p.add_argument("--family", choices=[f.value for f in Family], default="gaussian")
    p.add_argument("--scale", choices=["desk", "paper"], default="desk")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--sizes", type=_sizes, help="override the size grid, e.g. 400x300,120x90")
    p.add_argument("--t-grid", type=_ints, help="accuracy study: comma-separated t values")
    p.add_argument("--alpha", type=float, help="accuracy study significance level")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    p.add_argument("--csv-dir")
    p.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    p.set_defaults(func=cmd_experiment, required=())
    return parser, sub


def _load_config(path, command):
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must contain a mapping")
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    flat.update(data.get(command) or {})
    out = {}
    for key, value in flat.items():
        key = key.lstrip("-").replace("-", "_")
        out["input" if key == "in" else key] = value
    return out


def _parse(argv):
    parser, sub = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        raise UsageError("a command is required")
    if args.config:
        subparser = sub.choices[args.command]
        defaults = _load_config(args.config, args.command)
        known = {a.dest for a in subparser._actions}
        unknown = set(defaults) - known
        if unknown:
            raise UsageError(f"unknown keys in config file: {sorted(unknown)}")
        # reparse so that flags given on the command line still win
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    missing = [name for name in args.required if getattr(args, name, None) is None]
    if missing:
        sub.choices[args.command].print_usage(sys.stderr)
        flags = ", ".join("--" + ("in" if m == "input" else m.replace("_", "-")) for m in missing)
        raise UsageError(f"missing required option(s): {flags}")
    return args


def _resolved(args):
    return {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in _NON_RESULT_KEYS and k != "required"
    }


def _meta(args, seed=None):
    return {"tool": "lbmgof", "version": __version__, "command": args.command, "config": _resolved(args), "seed": seed}


def _emit(record, path=None):
    if path:
        jsonio.dump(record, path)
    else:
        sys.stdout.write(jsonio.dumps(record) + "\n")


def cmd_generate(args):
    family = Family(args.family)
    params = interpolate_means(preset_params(family), args.t, INTERPOLATION_CENTER[family])
    matrix, truth = generate(GeneratorSpec(family, params, args.n, args.p, args.seed))
    write_matrix(matrix, args.out)
    if args.truth:
        jsonio.dump({**truth.to_dict(), "meta": _meta(args, args.seed)}, args.truth)
    log.info("wrote %dx%d %s matrix to %s", args.n, args.p, family.value, args.out)
    return 0


def cmd_cluster(args):
    structure = ward_cocluster(read_matrix(args.input), args.k, args.h)
    jsonio.dump({**structure.to_dict(), "meta": _meta(args)}, args.out)
    return 0


def cmd_estimate(args):
    matrix = read_matrix(args.input)
    structure = BlockStructure.from_dict(jsonio.load(args.structure))
    result = estimate(matrix, structure)
    record = {**result.params.to_dict(), "meta": _meta(args)}
    _emit(record, args.out_params)
    if args.out_z:
        write_matrix(result.normalized.data, args.out_z)
    return 0


def cmd_test(args):
    result = gof_test(read_matrix(args.input), args.k, args.h, TestConfig(alpha=args.alpha))
    _emit({**result.to_dict(), "K0": args.k, "H0": args.h, "meta": _meta(args)})
    return 1 if result.reject else 0


def cmd_select(args):
    trace = sequential_select(read_matrix(args.input), TestConfig(alpha=args.alpha, L_max=args.l_max))
    _emit({**trace.to_dict(), "meta": _meta(args)})
    return 1 if trace.exhausted else 0


def cmd_experiment(args):
    plan = default_plan(
        args.study,
        family=args.family,
        scale=args.scale,
        trials=args.trials,
        base_seed=args.seed,
        size_grid=args.sizes,
        t_grid=args.t_grid if args.study == Study.ACCURACY.value else None,
        alpha=args.alpha,
    )
    report = run_study(plan, threads=args.threads)
    report.meta["config"] = _resolved(args)
    _emit(report.to_dict(), args.out)
    if args.csv_dir:
        write_csvs(report, args.csv_dir)
    return 0


def dispatch(argv=None):
    """Run one command and return its exit code."""
    try:
        args = _parse(argv)
    except SystemExit as exc:  # argparse usage errors and --help/--version
        return 0 if exc.code in (0, None) else 2
    except UsageError as exc:
        print(f"lbmgof: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (LBMError, OSError, ValueError) as exc:
        print(f"lbmgof: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
