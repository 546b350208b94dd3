"""Batch command-line front end.

Each subcommand runs one construction or oracle, prints a markdown summary of
its property report to stdout and, with ``-o``, writes a canonical JSON result
(sorted keys, two-space indent) that embeds a run manifest. Wall time is only
recorded with ``--record-time`` so equal manifests give byte-identical files.

Exit codes: 0 all checks pass, 1 usage or input error, 2 a property failed,
3 undecided at the precision cap.

Example:
    ```bash
    smoothdual build --n 9 --d 1 -o w.json
    smoothdual verify w.json
    smoothdual thrdeg --fn parity:3
    smoothdual pipeline --log2n 20000
    smoothdual suite --config suite.yaml -o suite.json
    ```

Dependencies:
    - `yaml`: For suite configuration files.
"""

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

import yaml

from smoothdual import __version__
from smoothdual.dualwitness import (
    DegreeOutOfRange,
    EvenN,
    OutOfRange,
    ParameterMismatch,
    build_witness,
    verify_claims,
    verify_witness,
    witness_from_json,
    witness_params,
    witness_to_json,
)
from smoothdual.exactnum import DeltaMismatch, Enclosure, format_rational, parse_rational
from smoothdual.lift import build_psi_pair, verify_lift, verify_psi_pair
from smoothdual.lp import (
    MalformedCertificate,
    ResourceBound,
    parse_eps,
    parse_fn_arg,
    rational_degree_feasible,
    rational_degree_search,
    threshold_degree,
    verify_dual_witness,
)
from smoothdual.patternmatrix import (
    BoundInputs,
    DenseExportTooLarge,
    NotDivisible,
    ParameterRegime,
    PatternMatrixSpec,
    dense_export,
    dense_export_csv,
    pipeline_report,
    rs_bound,
    rs_bound_exact,
    upp_translate,
    upp_validate,
)
from smoothdual.report import (
    DEFAULT_PRECISION_BITS,
    EXIT_USAGE,
    MAX_PRECISION_BITS,
    PASS,
    Report,
    combine_status,
    exit_code_for,
    get_system_adaptive_jobs,
    markdown_summary,
)

MANIFEST_PARAMETERS = ("n", "d", "d0", "d1", "beta", "fn", "eps", "N", "log2n", "gamma", "delta_frac", "witness")

DOMAIN_ERRORS = (
    DeltaMismatch,
    EvenN,
    DegreeOutOfRange,
    OutOfRange,
    ParameterMismatch,
    ResourceBound,
    MalformedCertificate,
    ParameterRegime,
    DenseExportTooLarge,
    NotDivisible,
    ValueError,
    KeyError,
    OSError,
    yaml.YAMLError,
)


class UsageExitParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CommandResult:
    """What a subcommand produced.

    Attributes:
        payload (dict): JSON body of the result file (the manifest is added later).
        status (str): ``pass``, ``fail`` or ``undecided``.
        report (Report | None): Property report to summarize on stdout.
        csv (str | None): CSV body for ``--format csv``.
    """

    payload: dict
    status: str = PASS
    report: Report | None = None
    csv: str | None = None


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Args:
        argv (list[str] | None): Arguments without the program name; ``sys.argv`` when omitted.

    Returns:
        argparse.Namespace: Parsed arguments with ``command`` set.
    """
    common = UsageExitParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION_BITS, help="Starting precision in bits")
    common.add_argument("-o", "--output", help="Write the JSON (or CSV) result to this file")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="Result file format")
    common.add_argument("--jobs", type=int, help="Worker threads (default: dynamic, based on system usage)")
    common.add_argument("--record-time", action="store_true", help="Embed wall time in the manifest")
    common.add_argument("-d", "--debug", action="store_true", help="Enable debug output")

    witness = UsageExitParser(add_help=False)
    witness.add_argument("--n", type=int, required=True, help="Odd grid half-width n")
    witness.add_argument("--d", type=int, required=True, help="Degree parameter d (2^(3d) <= n)")

    parser = UsageExitParser(prog="smoothdual", description="Smooth dual witnesses, degree oracles and sign-rank bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("build", parents=[common, witness], help="Build the smooth dual witness and verify it")
    verify = sub.add_parser("verify", parents=[common], help="Re-verify a witness file")
    verify.add_argument("witness", help="Witness JSON written by build")
    sub.add_parser("claims", parents=[common, witness], help="Check the per-shift inequalities")
    sub.add_parser("lift", parents=[common, witness], help="Check the lifted witness in weight-class form")
    sub.add_parser("psi", parents=[common, witness], help="Build and check the psi pair")

    thrdeg = sub.add_parser("thrdeg", parents=[common], help="Threshold degree with primal and dual certificates")
    thrdeg.add_argument("--fn", required=True, help="Built-in name[:arity] or function-spec file")

    ratdeg = sub.add_parser("ratdeg", parents=[common], help="Rational approximation feasibility or degree search")
    ratdeg.add_argument("--fn", required=True, help="Built-in name[:arity] or function-spec file")
    ratdeg.add_argument("--eps", required=True, help="Approximation parameter p/q")
    ratdeg.add_argument("--d", type=int, help="Degree for both polynomials (omit to search)")
    ratdeg.add_argument("--d0", type=int, help="Degree of p0")
    ratdeg.add_argument("--d1", type=int, help="Degree of p1")

    pattern = sub.add_parser("pattern", parents=[common], help="Export a small pattern matrix")
    pattern.add_argument("--N", type=int, required=True, help="Row-side input length")
    pattern.add_argument("--n", type=int, required=True, help="Number of blocks (arity of the base function)")
    pattern.add_argument("--fn", help="Base function (default maj:<n>)")

    bound = sub.add_parser("bound", parents=[common], help="Evaluate the sign-rank bound formula")
    bound.add_argument("--gamma", required=True, help="Smoothness floor p/q")
    bound.add_argument("--delta-frac", default="0", help="Exception fraction p/q")
    bound.add_argument("--d", type=int, required=True, help="Degree parameter")
    bound.add_argument("--n", type=int, required=True, help="Base-function arity")
    bound.add_argument("--N", type=int, required=True, help="Row-side input length")

    pipeline = sub.add_parser("pipeline", parents=[common], help="Sign-rank bound with the main parameter choice")
    group = pipeline.add_mutually_exclusive_group(required=True)
    group.add_argument("--log2n", type=int, help="log2 of n")
    group.add_argument("--n", type=int, help="n, a power of two")

    upp = sub.add_parser("upp", parents=[common], help="Exhaustively validate the majority protocol")
    upp.add_argument("--n", type=int, required=True, help="Half the input length")
    upp.add_argument("--beta", help="Tie-break weight p/q (default 1/(8n))")

    suite = sub.add_parser("suite", parents=[common], help="Run a YAML-configured batch")
    suite.add_argument("--config", required=True, help="Suite YAML file")

    args = parser.parse_args(argv)
    args.argv = list(argv) if argv is not None else sys.argv[1:]
    if not 1 <= args.precision <= MAX_PRECISION_BITS:
        parser.error(f"--precision must lie in [1, {MAX_PRECISION_BITS}]")
    if args.jobs is not None and args.jobs <= 0:
        parser.error("--jobs must be a positive integer")
    return args


def setup_environment(args: argparse.Namespace) -> None:
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    if args.jobs is None:
        args.jobs, reason = get_system_adaptive_jobs()
        logging.debug(f"Using {args.jobs} worker threads ({reason})")
    args.progress = sys.stderr.isatty() and not args.debug


def _checks_kwargs(args: argparse.Namespace) -> dict:
    return {"bits": args.precision, "max_bits": MAX_PRECISION_BITS, "jobs": args.jobs, "progress": args.progress}


def _report_result(report: Report, payload: dict | None = None) -> CommandResult:
    body = dict(payload or {})
    body["report"] = report.to_json()
    return CommandResult(body, report.status, report)


def cmd_build(args: argparse.Namespace) -> CommandResult:
    cert = build_witness(witness_params(args.n, args.d, args.precision))
    report = verify_witness(cert, **_checks_kwargs(args))
    return CommandResult(witness_to_json(cert), report.status, report)


def cmd_verify(args: argparse.Namespace) -> CommandResult:
    with open(args.witness, encoding="utf-8") as f:
        data = json.load(f)
    cert = witness_from_json(data, args.precision)
    report = verify_witness(cert, **_checks_kwargs(args))
    return _report_result(report, {"n": cert.params.n, "d": cert.params.d})


def cmd_claims(args: argparse.Namespace) -> CommandResult:
    return _report_result(verify_claims(witness_params(args.n, args.d, args.precision), **_checks_kwargs(args)))


def cmd_lift(args: argparse.Namespace) -> CommandResult:
    cert = build_witness(witness_params(args.n, args.d, args.precision))
    return _report_result(verify_lift(cert, **_checks_kwargs(args)))


def cmd_psi(args: argparse.Namespace) -> CommandResult:
    pair = build_psi_pair(build_witness(witness_params(args.n, args.d, args.precision)))
    report = verify_psi_pair(pair, args.precision, MAX_PRECISION_BITS)
    return _report_result(report, {"psi0": pair.psi0.to_json(), "psi1": pair.psi1.to_json()})


def cmd_thrdeg(args: argparse.Namespace) -> CommandResult:
    f = parse_fn_arg(args.fn)
    result = threshold_degree(f)
    payload = {
        "function": f.to_json(),
        "degree": result.degree,
        "polynomial": {label: format_rational(c) for label, c in result.polynomial.items()},
        "witness": result.witness.to_json() if result.witness else None,
    }
    if result.witness is None:
        return CommandResult(payload)
    return _report_result(verify_dual_witness(result.witness), payload)


def cmd_ratdeg(args: argparse.Namespace) -> CommandResult:
    f = parse_fn_arg(args.fn)
    eps = parse_eps(str(args.eps))
    d0 = args.d0 if args.d0 is not None else args.d
    d1 = args.d1 if args.d1 is not None else args.d
    if d0 is None and d1 is None:
        return CommandResult({"function": f.to_json(), "eps": format_rational(eps), "degree": rational_degree_search(f, eps)})
    if d0 is None or d1 is None:
        raise ValueError("give --d, or both --d0 and --d1")
    result = rational_degree_feasible(f, d0, d1, eps)
    payload: dict = {"function": f.to_json(), "eps": format_rational(eps), "d0": d0, "d1": d1, "feasible": result.feasible}
    if result.feasible:
        payload["p0"] = {label: format_rational(c) for label, c in result.p0.items()}
        payload["p1"] = {label: format_rational(c) for label, c in result.p1.items()}
        return CommandResult(payload)
    payload["witness"] = result.witness.to_json()
    return _report_result(verify_dual_witness(result.witness), payload)


def cmd_pattern(args: argparse.Namespace) -> CommandResult:
    phi = parse_fn_arg(args.fn or f"maj:{args.n}")
    if phi.arity != args.n:
        raise ValueError(f"base function has arity {phi.arity}, expected n={args.n}")
    spec = PatternMatrixSpec(args.N, args.n, phi)
    if args.format == "csv":
        return CommandResult({}, csv=dense_export_csv(spec))
    return CommandResult({"N": spec.N, "n": spec.n, "rows": spec.rows, "cols": spec.cols, "matrix": dense_export(spec)})


def cmd_bound(args: argparse.Namespace) -> CommandResult:
    inputs = BoundInputs(
        d=args.d,
        n=args.n,
        N=args.N,
        gamma=Enclosure.point(parse_rational(str(args.gamma))),
        delta_frac=parse_rational(str(args.delta_frac)),
    )
    log2_bound = rs_bound(inputs, args.precision)
    exact = rs_bound_exact(inputs)
    payload = {
        **inputs.to_json(),
        "log2_bound": log2_bound.to_json(),
        "exact_bound": format_rational(exact) if exact is not None else None,
        "upp_cost": upp_translate(log2_bound).to_json(),
    }
    return CommandResult(payload)


def cmd_pipeline(args: argparse.Namespace) -> CommandResult:
    if args.log2n is not None:
        log2n = args.log2n
    elif args.n >= 1 and args.n & (args.n - 1) == 0:
        log2n = args.n.bit_length() - 1
    else:
        raise ParameterRegime(f"n must be a power of two, got {args.n}")
    return CommandResult(pipeline_report(log2n, args.precision))


def cmd_upp(args: argparse.Namespace) -> CommandResult:
    if args.n < 1:
        raise ValueError(f"--n must be a positive integer, got {args.n}")
    beta = parse_rational(str(args.beta)) if args.beta is not None else Fraction(1, 8 * args.n)
    return _report_result(upp_validate(args.n, beta))


SUITE_SECTIONS: dict[str, str] = {
    "witnesses": "build",
    "claims": "claims",
    "lifts": "lift",
    "psi": "psi",
    "thrdeg": "thrdeg",
    "ratdeg": "ratdeg",
    "bounds": "bound",
    "pipeline": "pipeline",
    "upp": "upp",
}

SUITE_DEFAULTS = {
    "n": None,
    "d": None,
    "N": None,
    "fn": None,
    "eps": None,
    "d0": None,
    "d1": None,
    "beta": None,
    "gamma": None,
    "log2n": None,
}


def cmd_suite(args: argparse.Namespace) -> CommandResult:
    with open(args.config, encoding="utf-8") as f:
        config = yaml.safe_load(f)
    if not isinstance(config, dict) or not config:
        raise ValueError(f"Suite config {args.config} is empty or not a mapping")
    entries = []
    for section, command in SUITE_SECTIONS.items():
        if section not in config:
            logging.warning(f"Suite section '{section}' missing, skipping")
            continue
        for entry in config[section] or []:
            if not isinstance(entry, dict):
                logging.warning(f"Skipping malformed {section} entry: {entry!r}")
                continue
            params = {**SUITE_DEFAULTS, "delta_frac": "0", **entry}
            sub_args = argparse.Namespace(**{**vars(args), **params, "command": command, "format": "json"})
            try:
                result = COMMAND_HANDLERS[command](sub_args)
            except (*DOMAIN_ERRORS, TypeError) as e:  # TypeError: a required key is missing (None)
                logging.warning(f"Skipping {section} entry {entry}: {e}")
                continue
            entries.append({"command": command, "parameters": entry, "status": result.status, "result": result.payload})
            logging.info(f"suite: {command} {entry} -> {result.status}")
    if not entries:
        raise ValueError(f"Suite config {args.config} produced no runnable entries")
    return CommandResult({"results": entries}, combine_status([e["status"] for e in entries]))


COMMAND_HANDLERS: dict[str, Callable[[argparse.Namespace], CommandResult]] = {
    "build": cmd_build,
    "verify": cmd_verify,
    "claims": cmd_claims,
    "lift": cmd_lift,
    "psi": cmd_psi,
    "thrdeg": cmd_thrdeg,
    "ratdeg": cmd_ratdeg,
    "pattern": cmd_pattern,
    "bound": cmd_bound,
    "pipeline": cmd_pipeline,
    "upp": cmd_upp,
    "suite": cmd_suite,
}


def build_manifest(args: argparse.Namespace, result: CommandResult, elapsed: float) -> dict[str, object]:
    parameters = {k: getattr(args, k) for k in MANIFEST_PARAMETERS if getattr(args, k, None) is not None}
    manifest: dict[str, object] = {
        "command": args.command,
        "parameters": parameters,
        "argv": list(getattr(args, "argv", [])),
        "precision_bits": max(args.precision, result.report.precision_used()) if result.report else args.precision,
        "version": __version__,
        "outcome": result.status,
    }
    if args.record_time:
        manifest["wall_time_seconds"] = round(elapsed, 3)
    return manifest


def render(args: argparse.Namespace, result: CommandResult, elapsed: float) -> str:
    if args.format == "csv":
        if result.csv is None:
            raise ValueError(f"--format csv is not available for '{args.command}'")
        return result.csv
    document = dict(result.payload)
    document["manifest"] = build_manifest(args, result, elapsed)
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and write its outputs.

    Args:
        argv (list[str] | None): Arguments without the program name.

    Returns:
        int: Exit code.
    """
    args = parse_arguments(argv)
    setup_environment(args)
    start_time = time.time()
    try:
        result = COMMAND_HANDLERS[args.command](args)
        elapsed = time.time() - start_time
        text = render(args, result, elapsed)
        if result.report is not None:
            print(markdown_summary(result.report))
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            logging.info(f"Wrote {args.output}")
        elif result.report is None:
            sys.stdout.write(text)
    except DOMAIN_ERRORS as e:
        logging.error(f"{args.command}: {e}")
        return EXIT_USAGE
    logging.info(f"{args.command} finished in {elapsed:.2f} seconds: {result.status}")
    return exit_code_for(result.status)


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
