"""
Command-Line Interface

    python -m src.cli solve INSTANCE [--k K] [--jobs J] [--preset NAME] [--verbose]
    python -m src.cli kernelize INSTANCE [--k K] [--no-shortcuts]
    python -m src.cli oracle INSTANCE [--oracle-cap C]
    python -m src.cli verify INSTANCE REPORT
    python -m src.cli gen {ht,tournament,transitive,random,forest} [options]

Exit codes: 0 YES / kernel produced / report consistent, 1 NO / report
inconsistent, 2 error (message on stderr).
"""

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from .bounds_oracle import (
    Instance,
    count_forward,
    decide_threshold,
    gamma,
    oracle_max_acyclic,
    threshold_q,
    component_count,
)
from .config import PRESETS, DEFAULT_CONFIG, SolverConfig, get_config
from .dp_solver import solve
from .errors import NotPermutation
from .generators import (
    gen_connected_oriented,
    gen_forest_of_cliques,
    gen_Ht,
    gen_random_forest_plan,
    gen_tournament,
    gen_transitive_tournament,
)
from .instance_io import (
    ResultReport,
    format_instance,
    format_report,
    load_instance,
    load_report,
)
from .kernelizer import KernelYes, kernelize
from .reduction_engine import format_trace_line, parse_trace_line, replay_trace_k
from .utils.reporting import print_solve_summary

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2


def _base_report(G, k: int) -> ResultReport:
    return ResultReport(
        n=G.n,
        m=G.m,
        k=k,
        gamma_q=gamma(G).q,
        threshold_q=threshold_q(G, k),
    )


def _elapsed_ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def cmd_solve(path, k: Optional[int] = None, config: SolverConfig = DEFAULT_CONFIG) -> ResultReport:
    """Run the full pipeline on an instance file."""
    graph, file_k = load_instance(path)
    k = file_k if k is None else k
    instance = Instance(graph=graph, k=k)

    start = time.perf_counter()
    result = solve(instance, config)

    report = _base_report(graph, k)
    report.decision = 'YES' if result.decision else 'NO'
    report.certificate = result.certificate
    if result.exact:
        report.a_value = result.a_restricted
    report.witness_forward = result.witness.forward_arcs
    report.witness = result.witness.order
    report.final_k = result.trace.final_k
    report.trace = [format_trace_line(step) for step in result.trace.steps]
    report.time_ms = _elapsed_ms(start)
    if config.verbose:
        print_solve_summary(result, instance, verbose_trace=True)
    return report


def cmd_kernelize(path, k: Optional[int] = None, config: SolverConfig = DEFAULT_CONFIG) -> ResultReport:
    """Kernelize an instance file; the kernel is emitted in instance format."""
    graph, file_k = load_instance(path)
    k = file_k if k is None else k
    instance = Instance(graph=graph, k=k)

    start = time.perf_counter()
    outcome = kernelize(instance, config)

    report = _base_report(graph, k)
    if isinstance(outcome, KernelYes):
        report.decision = 'YES'
        report.certificate = 'reduction' if outcome.reason == 'reduction' else 'shortcut'
        report.reason = outcome.reason
        if outcome.witness is not None:
            report.witness_forward = outcome.witness.forward_arcs
            report.witness = outcome.witness.order
        if outcome.trace is not None:
            report.final_k = outcome.trace.final_k
            report.trace = [format_trace_line(step) for step in outcome.trace.steps]
    else:
        report.decision = 'KERNEL'
        report.final_k = outcome.trace.final_k
        report.trace = [format_trace_line(step) for step in outcome.trace.steps]
        report.kernel = (outcome.instance.graph, outcome.instance.k)
        report.kernel_labels = outcome.labels
        report.kernel_vertex_bound = outcome.size.vertex_bound
        report.kernel_arc_bound = outcome.size.arc_bound
        report.kernel_within = outcome.size.within
    report.time_ms = _elapsed_ms(start)
    return report


def cmd_oracle(path, k: Optional[int] = None, config: SolverConfig = DEFAULT_CONFIG) -> ResultReport:
    """Exact a(G) by subset DP; raises TooLarge above the cap."""
    graph, file_k = load_instance(path)
    k = file_k if k is None else k

    start = time.perf_counter()
    a_value, witness = oracle_max_acyclic(graph, config=config)

    report = _base_report(graph, k)
    if component_count(graph) == 1:
        report.decision = 'YES' if decide_threshold(graph, k, a_value) else 'NO'
    report.certificate = 'oracle'
    report.a_value = a_value
    report.witness_forward = witness.forward_arcs
    report.witness = witness.order
    report.time_ms = _elapsed_ms(start)
    return report


def _recompute_a(graph, k: int, certificate: Optional[str], config: SolverConfig) -> Optional[int]:
    """Exact a(G) for a NO report, or None when the solver certifies YES by reduction."""
    if certificate == 'oracle':
        return oracle_max_acyclic(graph, config=config)[0]
    result = solve(Instance(graph=graph, k=k), replace(config, verbose=False))
    return result.a_restricted if result.exact else None


def cmd_verify(instance_path, report_path, verbose: bool = True,
               config: SolverConfig = DEFAULT_CONFIG) -> bool:
    """
    Re-check a report against its instance.

    Recounts the witness, recomputes gamma and the threshold, checks the
    decision, and replays the trace's k accounting. A shortcut YES is
    re-derived by the kernelizer and a NO has its a(G) recomputed (oracle
    for oracle reports, the DP solver otherwise).

    Returns:
        True iff every check passes
    """
    graph, file_k = load_instance(instance_path)
    report = load_report(report_path)
    k = file_k if report.k is None else report.k
    problems: List[str] = []

    if report.n is not None and report.n != graph.n:
        problems.append(f"n={report.n}, instance has {graph.n}")
    if report.m is not None and report.m != graph.m:
        problems.append(f"m={report.m}, instance has {graph.m}")
    if report.gamma_q is not None and report.gamma_q != gamma(graph).q:
        problems.append(f"gamma_q={report.gamma_q}, expected {gamma(graph).q}")
    if report.threshold_q is not None and report.threshold_q != threshold_q(graph, k):
        problems.append(f"threshold_q={report.threshold_q}, expected {threshold_q(graph, k)}")

    recount = None
    if report.witness is not None:
        try:
            recount = count_forward(graph, report.witness)
        except NotPermutation as exc:
            problems.append(f"witness: {exc}")
        if recount is not None and recount != report.witness_forward:
            problems.append(f"witness_forward={report.witness_forward}, recount gives {recount}")

    if report.decision == 'YES':
        if report.witness is None:
            if report.certificate != 'shortcut':
                problems.append("YES report carries no witness")
            else:
                outcome = kernelize(Instance(graph=graph, k=k), replace(config, use_shortcuts=True))
                if not isinstance(outcome, KernelYes) or outcome.reason != report.reason:
                    problems.append(f"shortcut claim does not hold (reason={report.reason})")
        elif recount is not None and not decide_threshold(graph, k, recount):
            problems.append(f"witness with {recount} arcs misses threshold {threshold_q(graph, k)}/4")
    elif report.decision == 'NO':
        if report.a_value is None:
            problems.append("NO report carries no exact value")
        else:
            if decide_threshold(graph, k, report.a_value):
                problems.append(f"a_value={report.a_value} meets the threshold but decision is NO")
            if recount is not None and recount != report.a_value:
                problems.append(f"a_value={report.a_value}, witness has {recount}")
            exact = _recompute_a(graph, k, report.certificate, config)
            if exact is None:
                problems.append("instance is YES but decision is NO")
            elif exact != report.a_value:
                problems.append(f"a_value={report.a_value}, recomputed a(G)={exact}")

    if report.trace:
        steps = [parse_trace_line(line, idx) for idx, line in enumerate(report.trace, start=1)]
        consistent, final_k, message = replay_trace_k(graph, k, steps, config)
        if not consistent:
            problems.append(f"trace: {message}")
        elif report.final_k is not None and final_k != report.final_k:
            problems.append(f"final_k={report.final_k}, replay gives {final_k}")
        elif report.certificate == 'reduction' and final_k > 0:
            problems.append(f"reduction certificate ends with k={final_k} > 0")

    if verbose:
        for problem in problems:
            print(f"Mismatch: {problem}")
        print("consistent" if not problems else "inconsistent")
    return not problems


def cmd_gen(kind: str, n: int = 6, t: int = 2, density: float = 0.3,
            seed: int = 0, blocks: int = 4, k: int = 1, strict: bool = True) -> str:
    """Generate an instance and return it in instance-file format."""
    if kind == 'ht':
        graph = gen_Ht(t)
    elif kind == 'tournament':
        graph = gen_tournament(n, seed)
    elif kind == 'transitive':
        graph = gen_transitive_tournament(n)
    elif kind == 'random':
        graph = gen_connected_oriented(n, density, seed)
    elif kind == 'forest':
        sizes, attach = gen_random_forest_plan(blocks, seed, strict=strict)
        graph, _ = gen_forest_of_cliques(sizes, attach, seed, strict=strict)
    else:
        raise ValueError(f"Unknown generator: {kind}")
    return format_instance(graph, k)


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, default=None, help="Override the k of the instance file")
    common.add_argument("--preset", choices=sorted(PRESETS), default=None)
    common.add_argument("--oracle-cap", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None, help="Worker processes for U-orderings")
    common.add_argument("--no-shortcuts", action="store_true", help="Disable kernel YES shortcuts")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--output", type=str, default=None, help="Write the report here")

    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Acyclic subgraph above the Poljak-Turzik bound",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("solve", "Decide the instance exactly"),
        ("kernelize", "Reduce to a quadratic kernel or answer YES"),
        ("oracle", "Exact a(G) by subset DP"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("instance", type=str)

    verify = sub.add_parser("verify", parents=[common], help="Re-check a report")
    verify.add_argument("instance", type=str)
    verify.add_argument("report", type=str)

    gen = sub.add_parser("gen", parents=[common], help="Generate an instance")
    gen.add_argument("kind", choices=["ht", "tournament", "transitive", "random", "forest"])
    gen.add_argument("--n", type=int, default=6)
    gen.add_argument("--t", type=int, default=2)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--blocks", type=int, default=4)
    return parser


def _config_from(args) -> SolverConfig:
    return get_config(
        args.preset,
        oracle_cap=args.oracle_cap,
        jobs=args.jobs,
        use_shortcuts=False if args.no_shortcuts else None,
        verbose=True if args.verbose else None,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from(args)

        if args.command == "gen":
            _emit(cmd_gen(args.kind, n=args.n, t=args.t, density=args.density,
                          seed=args.seed, blocks=args.blocks,
                          k=1 if args.k is None else args.k,
                          strict=config.strict_forest_plan), args.output)
            return EXIT_YES

        if args.command == "verify":
            return EXIT_YES if cmd_verify(args.instance, args.report, config=config) else EXIT_NO

        command = {"solve": cmd_solve, "kernelize": cmd_kernelize, "oracle": cmd_oracle}[args.command]
        report = command(args.instance, k=args.k, config=config)
        _emit(format_report(report), args.output)
        return EXIT_NO if report.decision == 'NO' else EXIT_YES

    except (ValueError, OSError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
