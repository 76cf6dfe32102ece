"""Command-line front end.

Exit codes: 0 success, 1 violations / non-convergence / failed suites,
2 configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, TextIO

from . import __version__
from .contraction import verify_condition, verify_monotone
from .errors import GCFPError
from .graph import demo_g_complete_strip
from .oracles import run_lemma_suites
from .report import dumps, dumps_line
from .scenarios import Scenario, builtin, expected_fixed_point_matches, load_scenario
from .solver import SolverConfig, solve

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _manifest(args, source: str, seed: Optional[int]) -> dict:
    return {
        "subcommand": args.command,
        "scenario_source": source,
        "seed": seed,
        "timestamp": None if args.no_timestamp
        else datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z"),
        "tool_version": __version__,
    }


def _scenario(args) -> tuple[Scenario, str]:
    if args.config:
        text = Path(args.config).read_text()
        return load_scenario(text), str(args.config)
    return builtin(args.builtin), f"builtin:{args.builtin}"


def _seed(args, scenario: Optional[Scenario]) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("GCFP_SEED")
    if env is not None:
        return int(env)
    return scenario.verify.seed if scenario else 0


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_check(args) -> int:
    scn, source = _scenario(args)
    seed = _seed(args, scn)
    samples = args.samples or scn.verify.samples
    cond = verify_condition(scn.space, scn.graph, scn.map, scn.params, samples, seed)
    mono = verify_monotone(scn.graph, scn.map, samples, seed)
    ok = cond.ok and mono.ok
    body = {
        "manifest": _manifest(args, source, seed),
        "scenario": scn.name,
        "params": {"variant": scn.params.variant, "a": scn.params.a, "b": scn.params.b,
                   "c": scn.params.c},
        "ok": ok,
        "condition": cond.to_dict(),
        "monotone": mono.to_dict(),
    }
    _emit(dumps(body), args.out)
    print(
        f"check {scn.name}: condition {cond.violation_count}/{cond.samples_tested} violations, "
        f"monotone {mono.violation_count}/{mono.samples_tested} violations",
        file=sys.stderr,
    )
    return EXIT_OK if ok else EXIT_FAIL


def _trace_stream(args) -> tuple[TextIO, bool]:
    if args.trace:
        return open(args.trace, "w"), True
    if args.out:
        return open(Path(args.out).with_suffix(".trace.jsonl"), "w"), True
    return sys.stderr, False


def cmd_solve(args) -> int:
    scn, source = _scenario(args)
    beta = args.beta if args.beta is not None else scn.solver.beta
    config = SolverConfig(
        tolerance=args.tol if args.tol is not None else scn.solver.tolerance,
        max_outer_iterations=args.max_iters or scn.solver.max_iterations,
        beta_override=beta,
        assert_edges=args.assert_edges or scn.solver.assert_edges,
        force_mode=args.force,
    )
    stream, owned = _trace_stream(args)
    try:
        cert = solve(
            scn.space, scn.graph, scn.map, scn.params, scn.start, config,
            on_step=lambda step: stream.write(dumps_line(step) + "\n"),
        )
    finally:
        if owned:
            stream.close()
    body = {
        "manifest": _manifest(args, source, None),
        "scenario": scn.name,
        "certificate": cert,
        "expected": scn.expected.kind,
        "matches_expected": expected_fixed_point_matches(scn, cert.omega),
    }
    _emit(dumps(body), args.out)
    print(
        f"solve {scn.name}: {cert.status} after {len(cert.steps)} steps, "
        f"residual {cert.final_residual:.3g}, omega {list(cert.omega)}",
        file=sys.stderr,
    )
    return EXIT_OK if cert.converged else EXIT_FAIL


def _table(results) -> str:
    head = f"{'check':<28} {'result':<6} {'samples':>8} {'worst margin':>24} {'hyp':<4} detail"
    lines = [head, "-" * len(head)]
    for r in results:
        margin = "-" if r.worst_margin is None else format(r.worst_margin, ".17g")
        lines.append(
            f"{r.lemma:<28} {'PASS' if r.passed else 'FAIL':<6} {r.samples:>8} {margin:>24} "
            f"{'yes' if r.hypotheses_met else 'no':<4} {r.detail}"
        )
    return "\n".join(lines)


def cmd_lemmas(args) -> int:
    scn, source = _scenario(args)
    seed = _seed(args, scn)
    samples = args.samples or 10_000
    results = run_lemma_suites(
        scn.space, scn.graph, scn.map, scn.params, samples=samples, seed=seed,
        beta=scn.solver.beta,
    )
    passed = all(r.passed for r in results)
    print(_table(results))
    if args.out:
        body = {
            "manifest": _manifest(args, source, seed),
            "scenario": scn.name,
            "ok": passed,
            "suites": results,
        }
        _emit(dumps(body), args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_demo_strip(args) -> int:
    report = demo_g_complete_strip(args.terms)
    body = {
        "manifest": _manifest(args, "builtin:strip-space", None),
        "ok": report.ok,
        "monotone_sequence": report.monotone,
        "escaping_sequence": report.escaping,
    }
    _emit(dumps(body), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcfp", description="Monotone Gregus-Ciric contractions: checks, lemma oracles, solver."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so reruns are byte-identical")

    scenario = argparse.ArgumentParser(add_help=False)
    src = scenario.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME")
    src.add_argument("--config", metavar="PATH")
    scenario.add_argument("--seed", type=int, default=None,
                          help="sampling seed (default: $GCFP_SEED, then the scenario's)")
    scenario.add_argument("--samples", type=int, default=None)

    sub.add_parser("check", parents=[common, scenario],
                   help="verify the contraction condition and monotonicity")
    p = sub.add_parser("solve", parents=[common, scenario], help="run the fixed-point solver")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--force", action="store_true",
                   help="run outside the theorem's parameter regime (non-certifying)")
    p.add_argument("--assert-edges", action="store_true")
    p.add_argument("--trace", help="JSON-lines trace path (default: next to --out, else stderr)")
    sub.add_parser("lemmas", parents=[common, scenario], help="run the lemma oracle suites")
    p = sub.add_parser("demo-strip", parents=[common], help="G-completeness demo on the strip")
    p.add_argument("--terms", type=int, default=100)
    return parser


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "lemmas": cmd_lemmas,
    "demo-strip": cmd_demo_strip,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (GCFPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
