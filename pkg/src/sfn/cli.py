"""Command-line front end: ``sfn <subcommand> ...``.

Exit codes: 0 success, 1 verification or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from pathlib import Path

from . import analysis, bounds, simulation
from .network import (FlowNetwork, InvalidNetwork, NetworkFormatError, deserialize, format_rational, serialize, to_dot,
                      validate)
from .synthesis import (SynthesisError, SynthesisTrace, TargetDistribution, WeightedTree, synth_distribution_huffman,
                        synth_distribution_ky, synth_optimal, synthesize)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SCALAR_METHODS = ("optimal", "size-relaxed", "latency-oriented", "dyadic")
DIST_METHODS = ("ky", "huffman")


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    pass


def _plural(n: int) -> str:
    return f"{n} splitter" if n == 1 else f"{n} splitters"


def _emit(args, data: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def _summary(net: FlowNetwork, report: analysis.AnalysisReport | None = None, *,
             with_entropy: bool = False) -> tuple[dict, list[str]]:
    report = report or analysis.analyze(net)
    data = {"splitters": net.size, **report.to_dict()}
    lines = [
        _plural(net.size),
        f"distribution: {report.distribution}",
        f"expected latency: {format_rational(report.expected_latency)}",
    ]
    if with_entropy:
        lines.append(f"entropy: {analysis.entropy(report.distribution):.12g} bits")
    return data, lines


def _write_network(net: FlowNetwork, path: str | None) -> None:
    if path:
        Path(path).write_text(serialize(net))


def _load_network(path: str) -> FlowNetwork:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        net = deserialize(text)
    except NetworkFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    report = validate(net)
    if not report.ok:
        raise InvalidNetwork(report)
    return net


def _load_tree(path: str, target: TargetDistribution) -> WeightedTree:
    try:
        nested = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return WeightedTree.from_nested(nested, target.probs)


def _synth_scalar(args) -> tuple[FlowNetwork, SynthesisTrace]:
    return synthesize(args.prob, args.method)


def _synth_dist(args) -> tuple[FlowNetwork, SynthesisTrace]:
    target = TargetDistribution.of(args.dist)
    if args.method == "ky":
        if args.tree:
            raise UsageError("--tree only applies to --method huffman")
        return synth_distribution_ky(target)
    tree = _load_tree(args.tree, target) if args.tree else None
    return synth_distribution_huffman(target, tree)


def cmd_synth(args) -> int:
    net, trace = _synth_scalar(args)
    _write_network(net, args.out)
    data, lines = _summary(net)
    data["method"] = trace.method
    if args.trace:
        data["trace"] = trace.to_dict()
        lines += ["", trace.to_text()]
    _emit(args, data, "\n".join([f"method: {trace.method}"] + lines))
    return EXIT_OK


def cmd_synth_dist(args) -> int:
    net, trace = _synth_dist(args)
    _write_network(net, args.out)
    data, lines = _summary(net, with_entropy=True)
    data["method"] = trace.method
    if args.trace:
        data["trace"] = trace.to_dict()
        lines += ["", trace.to_text()]
    _emit(args, data, "\n".join([f"method: {trace.method}"] + lines))
    return EXIT_OK


def cmd_trace(args) -> int:
    if (args.prob is None) == (args.dist is None):
        raise UsageError("give exactly one of --prob or --dist")
    if args.prob is not None:
        args.method = args.method or "optimal"
        if args.method not in SCALAR_METHODS:
            raise UsageError(f"--method for --prob must be one of {', '.join(SCALAR_METHODS)}")
        _, trace = _synth_scalar(args)
    else:
        args.method = args.method or "ky"
        if args.method not in DIST_METHODS:
            raise UsageError(f"--method for --dist must be one of {', '.join(DIST_METHODS)}")
        _, trace = _synth_dist(args)
    _emit(args, trace.to_dict(), trace.to_text())
    return EXIT_OK


def cmd_analyze(args) -> int:
    net = _load_network(args.file)
    report = analysis.analyze(net)
    data, lines = _summary(net, report)
    lines.append(f"loop-free: {'yes' if report.loop_free else 'no'}")
    status = EXIT_OK
    if args.mason_crosscheck:
        try:
            mason = analysis.mason_distribution(net)
        except analysis.CycleBudgetExceeded as exc:
            raise VerificationFailure(f"mason cross-check not possible: {exc}") from None
        agree = tuple(mason) == tuple(report.distribution)
        data["mason"] = [format_rational(p) for p in mason]
        data["mason_agrees"] = agree
        lines.append(f"mason: {mason} ({'agrees' if agree else 'DISAGREES'})")
        status = EXIT_OK if agree else EXIT_FAIL
    _emit(args, data, "\n".join(lines))
    return status


def cmd_simulate(args) -> int:
    net = _load_network(args.file)
    config = simulation.SimConfig(args.trials, args.seed, args.max_steps)
    rep = simulation.simulate(net, config)
    exact = analysis.absorption_distribution(net)
    et = analysis.expected_latency(net)
    data = rep.to_dict()
    data["exact"] = [format_rational(p) for p in exact]
    data["exact_expected_latency"] = format_rational(et)
    lines = [f"trials: {rep.trials} (seed {rep.seed}, truncated {rep.truncated})"]
    for j, (count, p) in enumerate(zip(rep.counts, exact)):
        lines.append(f"output {j}: {count} hits, empirical {count / rep.trials:.6f}, exact {p} ({float(p):.6f})")
    lines.append(f"mean latency: {rep.mean_latency:.6f}, exact {format_rational(et)} ({float(et):.6f})")
    lines.append(f"max latency: {rep.max_latency}")
    if args.log:
        with open(args.log, "w") as fh:
            simulation.write_trial_log(net, config, fh)
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_export(args) -> int:
    net = _load_network(args.file)
    annotations = analysis.absorption_distribution(net) if args.annotate else None
    text = to_dot(net, annotations) if args.dot else serialize(net)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _mutant_wiring(even: int, second: int, third: int) -> tuple[int, int]:
    # deliberately wrong: feeds the even output instead of the larger odd one
    return even, third


def cmd_check_bounds(args) -> int:
    methods = bounds.SCALAR_METHODS if args.method == "all" else (args.method,)
    try:
        config = bounds.BoundsConfig(b_max=args.b_max, methods=methods, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    optimal = partial(synth_optimal, odd_wiring=_mutant_wiring) if args.inject_mutant else synth_optimal
    results = bounds.run_checks(config, optimal=optimal)
    ok = all(r.passed for r in results)
    if args.report:
        Path(args.report).write_text(json.dumps([r.to_dict() for r in results], indent=2) + "\n")
    _emit(args, {"passed": ok, "checks": [r.to_dict() for r in results]}, bounds.render_table(results))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfn", description="Synthesize and verify stochastic flow networks.")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[fmt], help="network for one probability a/b")
    p.add_argument("--prob", required=True, help="target as a/b")
    p.add_argument("--method", choices=SCALAR_METHODS, default="optimal")
    p.add_argument("--out", help="write the network file here")
    p.add_argument("--trace", action="store_true", help="append the construction trace")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("synth-dist", parents=[fmt], help="network for a distribution a1/b,...,am/b")
    p.add_argument("--dist", required=True)
    p.add_argument("--method", choices=DIST_METHODS, default="ky")
    p.add_argument("--tree", help="JSON nested pairs of labels, e.g. [0, [1, [2, 3]]] (huffman only)")
    p.add_argument("--out")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_synth_dist)

    p = sub.add_parser("trace", parents=[fmt], help="print the construction trace only")
    p.add_argument("--prob")
    p.add_argument("--dist")
    p.add_argument("--method", choices=SCALAR_METHODS + DIST_METHODS)
    p.add_argument("--tree")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("analyze", parents=[fmt], help="exact distribution and latency of a network file")
    p.add_argument("file")
    p.add_argument("--mason-crosscheck", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", parents=[fmt], help="seeded Monte-Carlo run")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10 ** 6)
    p.add_argument("--log", help="write per-trial records as JSON lines")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="render a network file")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true", help="graph description instead of the network document")
    p.add_argument("--annotate", action="store_true", help="label outputs with exact probabilities")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("check-bounds", parents=[fmt], help="sweep every size and latency bound")
    p.add_argument("--method", choices=("all",) + bounds.SCALAR_METHODS, default="all")
    p.add_argument("--b-max", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write the results as JSON")
    p.add_argument("--inject-mutant", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check_bounds)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidNetwork as exc:
        print(exc.report.render(), file=sys.stderr)
        return EXIT_FAIL
    except VerificationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, SynthesisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
