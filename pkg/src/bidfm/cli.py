"""Command-line front end.

Subcommands: ``generate`` (model config to expected/sampled matrices),
``detect`` (matrix to label files), ``evaluate`` (labels vs truth to a
metrics row), ``simulate`` (preset or config to an averaged report),
``estimate-k`` (singular values plus a gap suggestion), ``preprocess``
(zero-degree filtering), and ``theory`` (assumption checks and bound
envelopes).

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import detect as detect_mod
from . import fileio
from .errors import BidfmError, ConvergenceError
from .experiments import (
    PRESET_NAMES,
    estimate_k_eigengap,
    filter_zero_degree,
    preset,
    run_simulation,
)
from .metrics import MetricsReport, combined_report
from .model import expected_adjacency
from .sampling import sample_adjacency
from .theory import (
    check_assumption1,
    check_assumption2,
    deviation_bound_bidcdfm,
    deviation_bound_bidfm,
    error_envelope_bidcdfm,
    error_envelope_bidfm,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="random seed (default 0)")
    parser.add_argument("--output", help="output file or prefix")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="report format"
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="bidfm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("generate",
                       help="build expected and sampled matrices from a model config")
    p.add_argument("--config", required=True, help="JSON model parameters")
    _common_flags(p)

    p = sub.add_parser("detect",
                       help="run a detection algorithm on a matrix file")
    p.add_argument("--input", required=True, help="dense matrix file")
    p.add_argument("--alg", required=True,
                   choices=("bisc", "nbisc", "disim", "dscore", "rdscore"))
    p.add_argument("--kr", required=True, type=int, help="row cluster count")
    p.add_argument("--kc", required=True, type=int, help="column cluster count")
    _common_flags(p)

    p = sub.add_parser("evaluate",
                       help="score estimated labels against the truth")
    p.add_argument("--est-rows", required=True)
    p.add_argument("--truth-rows", required=True)
    p.add_argument("--est-cols", required=True)
    p.add_argument("--truth-cols", required=True)
    _common_flags(p)

    p = sub.add_parser("simulate",
                       help="run a simulation sweep and report averages")
    p.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("--config", help="JSON simulation configuration")
    p.add_argument("--replicates", type=int, help="override the replicate count")
    p.add_argument("--algorithms", help="comma-separated algorithm subset")
    _common_flags(p)

    p = sub.add_parser("estimate-k",
                       help="suggest a cluster count from singular-value gaps")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=int, default=8, help="singular values to inspect")
    _common_flags(p)

    p = sub.add_parser("preprocess",
                       help="drop zero-degree nodes from a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", required=True,
                   choices=("rows", "cols", "both-and", "both-or"))
    _common_flags(p)

    p = sub.add_parser("theory",
                       help="evaluate assumption checks and bound envelopes")
    p.add_argument("--config", required=True, help="JSON theory inputs")
    _common_flags(p)

    return parser


def _emit(args, text):
    if args.output:
        fileio.atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args):
    config = fileio.load_json(args.config)
    params = fileio.params_from_config(config)
    omega = expected_adjacency(params)
    prefix = args.output or "generated"
    fileio.write_matrix(f"{prefix}_omega.txt", omega)
    written = [f"{prefix}_omega.txt"]
    if "distribution" in config:
        spec = fileio.distribution_from_config(config["distribution"])
        a = sample_adjacency(omega, spec, args.seed if args.seed is not None else 0)
        fileio.write_matrix(f"{prefix}_adjacency.txt", a)
        written.append(f"{prefix}_adjacency.txt")
    n_r, n_c = params.shape
    fileio.write_labels(f"{prefix}_row_labels.txt", range(1, n_r + 1),
                        params.row_membership.labels)
    fileio.write_labels(f"{prefix}_col_labels.txt", range(1, n_c + 1),
                        params.col_membership.labels)
    written += [f"{prefix}_row_labels.txt", f"{prefix}_col_labels.txt"]
    print("\n".join(written))
    return 0


def _cmd_detect(args):
    a = fileio.read_matrix(args.input)
    algorithm = getattr(detect_mod, args.alg)
    shift = 0.0
    if args.alg in ("disim", "rdscore") and a.min() < 0:
        a, shift = detect_mod.shift_nonnegative(a)
        print(f"applied non-negative shift {shift:.6g}", file=sys.stderr)
    result = algorithm(a, args.kr, args.kc,
                       seed=args.seed if args.seed is not None else 0)
    if shift:
        result.diagnostics["shift"] = shift
    prefix = args.output or "detected"
    fileio.write_labels(f"{prefix}_row_labels.txt",
                        range(1, len(result.row_labels) + 1),
                        result.row_labels.labels)
    fileio.write_labels(f"{prefix}_col_labels.txt",
                        range(1, len(result.col_labels) + 1),
                        result.col_labels.labels)
    print(f"{prefix}_row_labels.txt\n{prefix}_col_labels.txt")
    return 0


def _cmd_evaluate(args):
    est_r = fileio.read_labels(args.est_rows)[1]
    truth_r = fileio.read_labels(args.truth_rows)[1]
    est_c = fileio.read_labels(args.est_cols)[1]
    truth_c = fileio.read_labels(args.truth_cols)[1]
    report = combined_report(est_r, truth_r, est_c, truth_c)
    if args.format == "json":
        text = json.dumps(report.__dict__, indent=2) + "\n"
    else:
        text = ("# bidfm metrics v1\n" + MetricsReport.CSV_HEADER + "\n"
                + report.to_csv_row() + "\n")
    _emit(args, text)
    return 0


def _cmd_simulate(args):
    if bool(args.preset) == bool(args.config):
        raise UsageError("simulate needs exactly one of --preset or --config")
    if args.preset:
        config = preset(args.preset)
    else:
        config = fileio.simulation_config_from_config(fileio.load_json(args.config))
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.replicates:
        overrides["replicates"] = args.replicates
    if args.algorithms:
        overrides["algorithms"] = tuple(args.algorithms.split(","))
    if overrides:
        config = dataclasses.replace(config, **overrides)
    report = run_simulation(config)
    if args.format == "json":
        payload = {
            "model": report.model,
            "kind": report.kind,
            "swept": report.swept_name,
            "points": [p.__dict__ for p in report.points],
        }
        text = json.dumps(payload, indent=2, default=list) + "\n"
    else:
        text = report.to_csv()
    _emit(args, text)
    return 0


def _cmd_estimate_k(args):
    a = fileio.read_matrix(args.input)
    estimate = estimate_k_eigengap(a, m=args.m)
    if args.format == "json":
        text = json.dumps(
            {
                "k_suggestion": estimate.k_suggestion,
                "singular_values": list(estimate.singular_values),
            },
            indent=2,
        ) + "\n"
    else:
        lines = ["# bidfm singular values v1", "rank,singular_value"]
        lines += [f"{i + 1},{v:.10g}" for i, v in enumerate(estimate.singular_values)]
        lines.append(f"# suggested k: {estimate.k_suggestion}")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return 0


def _cmd_preprocess(args):
    a = fileio.read_matrix(args.input)
    result = filter_zero_degree(a, args.mode)
    prefix = args.output or "filtered"
    fileio.write_matrix(f"{prefix}_matrix.txt", result.matrix)
    indices = {
        "kept_rows": list(result.kept_rows),
        "kept_cols": list(result.kept_cols),
        "zero_degree_rows": list(result.removed.rows),
        "zero_degree_cols": list(result.removed.cols),
    }
    if result.removed.both is not None:
        indices["zero_degree_both"] = list(result.removed.both)
        indices["zero_degree_either"] = list(result.removed.either)
    fileio.atomic_write_text(
        f"{prefix}_indices.json", json.dumps(indices, indent=2) + "\n"
    )
    print(f"{prefix}_matrix.txt\n{prefix}_indices.json")
    return 0


def _cmd_theory(args):
    config = fileio.load_json(args.config)
    inputs = fileio.theory_inputs_from_config(config["inputs"])
    model = config.get("model", "bidfm")
    c_alpha = float(config.get("c_alpha", 1.0))
    c = float(config.get("c", 1.0))
    if model == "bidfm":
        check = check_assumption1(inputs)
        bound = deviation_bound_bidfm(inputs, c_alpha)
        envelope = error_envelope_bidfm(inputs, c)
    else:
        check = check_assumption2(inputs)
        bound = deviation_bound_bidcdfm(inputs, c_alpha)
        envelope = error_envelope_bidcdfm(inputs, c)
    payload = {
        "model": model,
        "assumption_holds": check.holds,
        "assumption_ratio": check.ratio,
        "assumption_note": check.note,
        "spectral_deviation_bound": bound,
        "row_error_envelope": envelope.f_r,
        "col_error_envelope": envelope.f_c,
    }
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = "# bidfm theory report v1\nquantity,value\n" + "\n".join(
            f"{k},{v}" for k, v in payload.items()
        ) + "\n"
    _emit(args, text)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "detect": _cmd_detect,
    "evaluate": _cmd_evaluate,
    "simulate": _cmd_simulate,
    "estimate-k": _cmd_estimate_k,
    "preprocess": _cmd_preprocess,
    "theory": _cmd_theory,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage())
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (BidfmError, FileNotFoundError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
