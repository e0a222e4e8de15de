"""
Command-line interface for the symtrunc package.

This module provides a command-line interface for the rearrangement
calculus, the Hardy operator and its criterion, symmetrization, the
majorization certificates and the verification harnesses.

Exit codes: 0 on success with all checks passing, 1 on a failed check,
2 on usage or I/O errors.
"""

import os
import sys
import json
import logging
import argparse
from typing import Any, Dict, List, Optional

import pandas as pd

from symtrunc import __version__
from symtrunc.core import io
from symtrunc.core.configuration import Configuration
from symtrunc.core.domain import SampledFunction, rearrange_sampled, truncate
from symtrunc.core.hardy import HardyParams, default_a_grid, hardy_apply, mazya_criterion_sup, predicted_exponent
from symtrunc.core.majorize import (
    audit,
    check_hypotheses,
    interval_bound_certificate,
    majorization_constant,
    verify_certificate,
)
from symtrunc.core.spaces import RISpaceSpec
from symtrunc.core.stepfn import StepFunction, curves_to_frame, rearrange_step
from symtrunc.core.symmetrize import default_t_grid, modulus_curve, polya_szego_check, spherical_rearrangement
from symtrunc.core.verify import run_full_report, to_jsonable
from symtrunc.utils.progress import set_progress_disabled
from symtrunc.utils.statistics import log_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

VERIFY_CHECKS = {
    "poincare": ["poincare"],
    "theorem-a": ["theorem_a"],
    "theorem-b": ["theorem_b"],
    "gn": ["gn"],
    "har": ["har"],
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Directory for machine-readable artifacts")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="Artifact format")
    common.add_argument("--seed", type=int, default=None, help="Seed of all randomized batteries")
    common.add_argument("--quiet", action="store_true", help="Only log warnings; hide progress bars")
    return common


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser.

    Returns
    -------
    argparse.ArgumentParser
        Parser with the full subcommand tree.
    """
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="symtrunc",
        description="Rearrangements, truncations and symmetrization inequalities",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command")

    rearrange = commands.add_parser("rearrange", parents=[common], help="Decreasing rearrangement f*")
    rearrange.add_argument("--in", dest="input", required=True, help="Step function or sampled function JSON")
    rearrange.add_argument("--points", type=int, default=200, help="t-grid size for CSV output")
    rearrange.set_defaults(handler=rearrange_command)

    trunc = commands.add_parser("truncate", parents=[common], help="Truncation at levels t1 < t2")
    trunc.add_argument("--in", dest="input", required=True, help="Sampled function JSON")
    trunc.add_argument("--t1", type=float, required=True, help="Lower level")
    trunc.add_argument("--t2", type=float, required=True, help="Upper level")
    trunc.set_defaults(handler=truncate_command)

    hardy = commands.add_parser("hardy", help="Hardy operator").add_subparsers(dest="action", metavar="action")
    hardy.required = True
    evaluate = hardy.add_parser("eval", parents=[common], help="Tabulate t -> int_t^1 s^alpha g(s) ds/s")
    evaluate.add_argument("--in", dest="input", required=True, help="Step function JSON")
    evaluate.add_argument("--alpha", type=float, default=0.5, help="Hardy exponent")
    evaluate.add_argument("--points", type=int, default=200, help="Logarithmic t-grid size")
    evaluate.add_argument("--t-min", type=float, default=1e-4, help="Smallest t")
    evaluate.set_defaults(handler=hardy_eval_command)
    criterion = hardy.add_parser("criterion", parents=[common], help="Maz'ya criterion on an s-John domain")
    criterion.add_argument("--n", type=int, required=True, help="Dimension")
    criterion.add_argument("--s", type=float, required=True, help="John exponent")
    criterion.add_argument("--t", type=float, required=True, help="Source exponent")
    criterion.add_argument("--a-min", type=float, default=1e-8, help="Smallest a")
    criterion.add_argument("--ratio", type=float, default=0.8, help="Geometric ratio of the a-grid")
    criterion.set_defaults(handler=hardy_criterion_command)

    symmetrize = commands.add_parser("symmetrize", help="Spherical symmetrization").add_subparsers(
        dest="action", metavar="action"
    )
    symmetrize.required = True
    spherical = symmetrize.add_parser("spherical", parents=[common], help="Spherical rearrangement f°")
    spherical.add_argument("--in", dest="input", required=True, help="Sampled function JSON")
    spherical.set_defaults(handler=spherical_command)
    polya = symmetrize.add_parser("polya", parents=[common], help="Polya-Szego comparison")
    polya.add_argument("--in", dest="input", required=True, help="Sampled function JSON")
    polya.add_argument("--space", default="L1", help="Space label, e.g. L1, L(2,inf)")
    polya.set_defaults(handler=polya_command)
    modulus = symmetrize.add_parser("modulus", parents=[common], help="X-modulus of continuity")
    modulus.add_argument("--in", dest="input", required=True, help="Sampled function JSON")
    modulus.add_argument("--space", default="L1", help="Space label")
    modulus.add_argument("--points", type=int, default=50, help="Logarithmic t-grid size")
    modulus.set_defaults(handler=modulus_command)

    majorize = commands.add_parser("majorize", help="Majorization certificates").add_subparsers(
        dest="action", metavar="action"
    )
    majorize.required = True
    check = majorize.add_parser("check", parents=[common], help="Hypothesis constants of a pair g, h")
    check.add_argument("--in", dest="input", required=True, help='Pair JSON {"g": ..., "h": ...}')
    check.set_defaults(handler=majorize_check_command)
    certify = majorize.add_parser("certify", parents=[common], help="Certificate for an interval family")
    certify.add_argument("--in", dest="input", required=True, help="Pair JSON")
    certify.add_argument("--family", required=True, help='Interval family JSON {"intervals": [[a, b], ...]}')
    certify.set_defaults(handler=majorize_certify_command)
    audit_parser = majorize.add_parser("audit", parents=[common], help="Randomized audit of the constant 4")
    audit_parser.add_argument("--n-pairs", type=int, default=200, help="Number of random pairs")
    audit_parser.add_argument("--monitor-memory", action="store_true", help="Show resident memory on the progress bar")
    audit_parser.set_defaults(handler=majorize_audit_command)

    verify = commands.add_parser("verify", help="Verification harnesses").add_subparsers(
        dest="action", metavar="action"
    )
    verify.required = True
    for name in list(VERIFY_CHECKS) + ["full"]:
        sub = verify.add_parser(name, parents=[common], help=f"Run the {name} harness")
        sub.add_argument("--config", default="default", help="YAML/JSON configuration or 'default'")
        sub.add_argument("--shapes", nargs="+", help="Override domains.shapes")
        sub.add_argument("--resolutions", nargs="+", type=int, help="Override domains.resolutions")
        sub.add_argument("--workers", type=int, help="Override performance.n_workers")
        if name in ("poincare", "theorem-a", "gn"):
            sub.add_argument("--p", type=float, help="Override exponents.p")
        if name == "theorem-b":
            sub.add_argument("--source", help="Space X")
            sub.add_argument("--target", help="Space Y")
        if name == "har":
            sub.add_argument("--n", type=int, default=2, help="Dimension")
            sub.add_argument("--s", type=float, default=1.5, help="John exponent")
            sub.add_argument("--t", type=float, default=1.2, help="Gradient exponent")
        sub.set_defaults(handler=verify_command)

    return parser


def _setup_logging(quiet: bool) -> None:
    logging.basicConfig(
        level=logging.WARNING if quiet else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    set_progress_disabled(quiet)


def _artifact_path(args: argparse.Namespace, name: str) -> str:
    """Artifacts go to --out when given, else next to the input file."""
    if args.out:
        return os.path.join(args.out, name)
    source = getattr(args, "input", None)
    directory = os.path.dirname(os.path.abspath(source)) if source else os.getcwd()
    return os.path.join(directory, name)


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _emit(payload: Dict[str, Any]) -> None:
    print(json.dumps(to_jsonable(payload), sort_keys=True, indent=2))


def _read_sampled(path: str) -> SampledFunction:
    f = io.read_function(path)
    if not isinstance(f, SampledFunction):
        raise ValueError(f"{path} holds a step function; a sampled function is required")
    return f


def _read_step(path: str) -> StepFunction:
    f = io.read_function(path)
    if not isinstance(f, StepFunction):
        raise ValueError(f"{path} holds a sampled function; a step function is required")
    return f


def rearrange_command(args: argparse.Namespace) -> int:
    """Write f* of a step function or a sampled function."""
    f = io.read_function(args.input)
    f_star = rearrange_step(f) if isinstance(f, StepFunction) else rearrange_sampled(f)
    if args.format == "csv":
        t = log_grid(min(f_star.lengths[f_star.lengths > 0].min(), 1e-3), 1.0, args.points)
        path = _artifact_path(args, f"{_stem(args.input)}.rearranged.csv")
        io.write_csv(curves_to_frame(f_star, t), path)
    else:
        path = _artifact_path(args, f"{_stem(args.input)}.rearranged.json")
        io.write_function(f_star, path)
    print(f"Rearrangement with {f_star.n_pieces} pieces written to {path}")
    return EXIT_OK


def truncate_command(args: argparse.Namespace) -> int:
    """Write the truncation of a sampled function."""
    f = _read_sampled(args.input)
    path = _artifact_path(args, f"{_stem(args.input)}.truncated.json")
    io.write_function(truncate(f, args.t1, args.t2), path)
    print(f"Truncation at ({args.t1}, {args.t2}] written to {path}")
    return EXIT_OK


def hardy_eval_command(args: argparse.Namespace) -> int:
    """Tabulate the Hardy transform of a step function as CSV."""
    g = _read_step(args.input)
    t = log_grid(args.t_min, 1.0, args.points)
    frame = pd.DataFrame({"t": t, "Hg": hardy_apply(g, args.alpha)(t)})
    path = _artifact_path(args, f"{_stem(args.input)}.hardy.csv")
    io.write_csv(frame, path)
    print(f"Hardy transform with alpha = {args.alpha} written to {path}")
    return EXIT_OK


def hardy_criterion_command(args: argparse.Namespace) -> int:
    """Evaluate the Maz'ya criterion and print it as JSON."""
    params = HardyParams(args.n, args.s, args.t)
    result = mazya_criterion_sup(params, default_a_grid(args.a_min, args.ratio))
    payload = {
        "sup": result.sup_value,
        "argmax_a": result.argmax_a,
        "diverging": result.diverging,
        "strong_divergence": result.strong_divergence,
        "fitted_exponent": result.tail_slope,
        "predicted_exponent": predicted_exponent(params),
        "r": params.r_exp,
    }
    _emit(payload)
    if args.out:
        io.write_json(payload, os.path.join(args.out, "hardy_criterion.json"))
    return EXIT_OK


def spherical_command(args: argparse.Namespace) -> int:
    """Write the spherical rearrangement on the ball grid."""
    f_ball = spherical_rearrangement(_read_sampled(args.input))
    path = _artifact_path(args, f"{_stem(args.input)}.spherical.json")
    io.write_function(f_ball, path)
    print(f"Spherical rearrangement on {f_ball.domain!r} written to {path}")
    return EXIT_OK


def polya_command(args: argparse.Namespace) -> int:
    """Compare t -> int_0^t |grad f°|* with int_0^t |grad f|*."""
    result = polya_szego_check(_read_sampled(args.input), RISpaceSpec.parse(args.space))
    _emit(result.to_dict())
    stem = _stem(args.input)
    if args.format == "csv":
        io.write_csv(result.curve, _artifact_path(args, f"{stem}.polya.csv"))
    else:
        io.write_json(result.to_dict(), _artifact_path(args, f"{stem}.polya.json"))
    return EXIT_OK


def modulus_command(args: argparse.Namespace) -> int:
    """Tabulate the X-modulus of continuity."""
    f = _read_sampled(args.input)
    space = RISpaceSpec.parse(args.space)
    t = default_t_grid(f.domain, upper=0.5, n_points=args.points)
    frame = pd.DataFrame({"t": t, "omega": modulus_curve(f, space, t)})
    path = _artifact_path(args, f"{_stem(args.input)}.modulus.csv")
    io.write_csv(frame, path)
    print(f"{space.label}-modulus of continuity written to {path}")
    return EXIT_OK


def majorize_check_command(args: argparse.Namespace) -> int:
    """Print the hypothesis constants and the majorization constant."""
    g, h = io.read_pair(args.input)
    constants = check_hypotheses(g, h)
    payload = {**constants.to_dict(), "majorization_constant": majorization_constant(g, h)}
    _emit(payload)
    if args.out:
        io.write_json(payload, os.path.join(args.out, f"{_stem(args.input)}.constants.json"))
    return EXIT_OK if constants.finite else EXIT_CHECK_FAILED


def majorize_certify_command(args: argparse.Namespace) -> int:
    """Build, re-check and write a certificate for an interval family."""
    g, h = io.read_pair(args.input)
    family = io.read_family(args.family)
    certificate = interval_bound_certificate(g, h, family)
    check = verify_certificate(certificate, g, h, family)
    io.write_certificate(certificate, _artifact_path(args, f"{_stem(args.input)}.certificate.json"))
    print(f"Certificate ({certificate.branch}): {'valid' if check else f'violates {check.violated}'}")
    return EXIT_OK if check else EXIT_CHECK_FAILED


def majorize_audit_command(args: argparse.Namespace) -> int:
    """Run the randomized audit of the constant 4."""
    summary = audit(args.n_pairs, args.seed if args.seed is not None else 0, monitor_memory=args.monitor_memory)
    _emit({key: value for key, value in summary.items() if key != "failures"})
    if args.out:
        io.write_json(summary, os.path.join(args.out, "majorization_audit.json"))
    return EXIT_OK if summary["pass"] else EXIT_CHECK_FAILED


def _verify_config(args: argparse.Namespace) -> Configuration:
    config = Configuration(config_file=args.config)
    if args.action != "full":
        config.set("verify", "checks", VERIFY_CHECKS[args.action])
    if args.shapes:
        config.set("domains", "shapes", args.shapes)
    if args.resolutions:
        config.set("domains", "resolutions", args.resolutions)
    if args.workers:
        config.set("performance", "n_workers", args.workers)
    if args.seed is not None:
        config.set("verify", "seed", args.seed)
    if getattr(args, "p", None) is not None:
        config.set("exponents", "p", args.p)
    if getattr(args, "source", None):
        config.set("spaces", "theorem_b_source", args.source)
    if getattr(args, "target", None):
        config.set("spaces", "theorem_b_target", args.target)
    if args.action == "har":
        config.set("exponents", "har", {"n": args.n, "s": args.s, "t": args.t})
    return config


def verify_command(args: argparse.Namespace) -> int:
    """Run verification harnesses and write the report bundle."""
    config = _verify_config(args)
    report, timings = run_full_report(config)
    out_dir = args.out or config.get_paths().get("output_dir", "results")
    profile = config.get_performance_params().get("profile", True)
    path = io.write_bundle(report, out_dir, timings if profile else None)

    summary = report.summary()
    print(f"{summary['n_passed']}/{summary['n_records']} checks passed; report written to {path}")
    for record in report.records:
        if not record.passed:
            reason = record.error or ", ".join(name for name, ok in record.checks.items() if not ok) or "drift"
            print(f"  FAILED {record.name} [{record.shape}] {reason}")
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the CLI.

    Parameters
    ----------
    argv : list of str, optional
        Arguments; ``sys.argv[1:]`` by default.

    Returns
    -------
    int
        Exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    if getattr(args, "handler", None) is None:
        parser.print_help()
        return EXIT_USAGE

    _setup_logging(args.quiet)
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
