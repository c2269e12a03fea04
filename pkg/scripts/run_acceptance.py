"""
Acceptance Run

Checks every quantitative claim the solver relies on against the subset-DP
oracle: the lower bound, the tight family, the tournament bound, rule
exactness and soundness, rule totality, decomposition structure, solver
exactness, kernel size and equivalence, the triangle labeling and the
forest vertex bound.

Usage:
    python scripts/run_acceptance.py            # full counts
    python scripts/run_acceptance.py --quick    # reduced counts for a smoke run
    python scripts/run_acceptance.py --only 2 8 --csv results/acceptance.csv
"""

import argparse
import sys
import time
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.bounds_oracle import Instance, decide_threshold, gamma, oracle_max_acyclic, verify_yes
from src.dp_solver import solve
from src.graph_core import build
from src.generators import (
    SplitMix64,
    enumerate_connected_oriented,
    enumerate_tournaments,
    gen_connected_oriented,
    gen_forest_of_cliques,
    gen_Ht,
    gen_random_forest_plan,
    gen_rule1_fixture,
    gen_rule2_fixture,
    gen_tournament,
)
from src.kernelizer import KernelYes, kernelize, label_and_pick, size_bounds
from src.reduction_engine import (
    Decomposition,
    apply_rule1,
    apply_rule2,
    apply_rule3,
    apply_rule4,
    apply_rule5,
    decompose,
    detect_rule1,
    detect_rule3,
    detect_rule4,
    detect_rule5,
)
from src.tournament_order import tournament_bound_q, tournament_ordering
from src.utils.reporting import print_metric, print_section, print_subsection, summary_table


def a_of(G):
    return oracle_max_acyclic(G)[0]


def excess_q(G):
    return 4 * a_of(G) - gamma(G).q


def random_graphs(count, n_min, n_max, seed):
    rng = SplitMix64(seed)
    for _ in range(count):
        n = n_min + rng.below(n_max - n_min + 1)
        density = (1 + rng.below(9)) / 10
        yield gen_connected_oriented(n, density, rng.next_u64())


def check_lower_bound(scale):
    cases = violations = 0
    graphs = [G for n in range(1, 6) for G in enumerate_connected_oriented(n)]
    graphs += list(random_graphs(int(10_000 * scale), 6, 12, seed=101))
    for G in graphs:
        cases += 1
        if 4 * a_of(G) < 2 * G.m + (G.n - 1):
            violations += 1
    return cases, violations


def check_tight_family(scale):
    cases = violations = 0
    for t in (1, 2, 3):
        G = gen_Ht(t)
        cases += 1
        ok = (
            a_of(G) == 2 * t
            and solve(Instance(graph=G, k=0)).decision
            and not solve(Instance(graph=G, k=1)).decision
        )
        violations += not ok
    return cases, violations


def check_tournament_bound(scale):
    cases = violations = 0
    tournaments = [T for n in range(2, 6) for T in enumerate_tournaments(n)]
    for n in range(6, 10):
        tournaments += [gen_tournament(n, seed) for seed in range(int(1000 * scale))]
    for T in tournaments:
        cases += 1
        if 4 * tournament_ordering(T).forward_arcs < tournament_bound_q(T.n, T.m):
            violations += 1
    return cases, violations


def check_two_way_exactness(scale):
    cases = violations = 0
    count = int(500 * scale)
    for seed in range(count):
        G, (x, S) = gen_rule1_fixture(4 + seed % 9, 0.3, seed)
        cases += 1
        violations += a_of(G) - a_of(apply_rule1(G, x, S)) != 2
    for seed in range(count):
        fixture = gen_rule2_fixture(6 + seed % 7, 0.3, seed)
        if fixture is None:
            continue
        G, hit = fixture
        cases += 1
        violations += a_of(G) - a_of(apply_rule2(G, *hit)) != 2
    return cases, violations


def check_one_way_soundness(scale):
    cases = violations = 0
    target = int(500 * scale)
    hits = {'R3': 0, 'R4': 0, 'R5': 0}
    for G in random_graphs(40 * target, 3, 12, seed=202):
        if min(hits.values()) >= target:
            break
        before = excess_q(G)
        if hits['R3'] < target and (x := detect_rule3(G)) is not None:
            reduced, k = apply_rule3(G, x, 0)
            hits['R3'] += 1
            cases += 1
            violations += before < excess_q(reduced) - k
        if hits['R4'] < target and (S := detect_rule4(G)) is not None:
            reduced, k = apply_rule4(G, S, 0)
            hits['R4'] += 1
            cases += 1
            violations += before < excess_q(reduced) - k
        if hits['R5'] < target and (S := detect_rule5(G)) is not None:
            reduced, k = apply_rule5(G, S, 0)
            hits['R5'] += 1
            cases += 1
            violations += before < excess_q(reduced) - k
    print_metric("Fixtures per rule", hits)
    return cases, violations


def check_totality(scale):
    cases = violations = 0
    max_n = 7 if scale >= 1 else 5
    for n in range(2, max_n + 1):
        for G in enumerate_connected_oriented(n):
            cases += 1
            fired = (
                detect_rule3(G) is not None
                or detect_rule1(G) is not None
                or detect_rule4(G) is not None
                or detect_rule5(G) is not None
            )
            violations += not fired
    return cases, violations


def check_decomposition(scale):
    cases = violations = 0
    rng = SplitMix64(303)
    for G in random_graphs(int(1000 * scale), 3, 30, seed=304):
        k = 1 + rng.below(4)
        result = decompose(Instance(graph=G, k=k))
        if not isinstance(result, Decomposition):
            continue
        cases += 1
        violations += not (len(result.U) <= 3 * k and result.forest_report.holds)
    return cases, violations


def check_solver(scale):
    cases = violations = 0
    graphs = [G for n in range(1, 6) for G in enumerate_connected_oriented(n)]
    graphs += list(random_graphs(int(1000 * scale), 6, 10, seed=404))
    for G in graphs:
        a_value = a_of(G)
        for k in range(7):
            instance = Instance(graph=G, k=k)
            result = solve(instance)
            cases += 1
            ok = result.decision == decide_threshold(G, k, a_value)
            if result.decision:
                ok = ok and verify_yes(instance, result.witness)
            violations += not ok
    return cases, violations


def check_kernel(scale):
    cases = violations = 0
    rng = SplitMix64(505)
    for G in random_graphs(int(1000 * scale), 3, 60, seed=506):
        k = 1 + rng.below(3)
        instance = Instance(graph=G, k=k)
        answer = kernelize(instance)
        cases += 1
        small = G.n <= 12
        if isinstance(answer, KernelYes):
            ok = not small or decide_threshold(G, k, a_of(G))
            if answer.witness is not None:
                ok = ok and verify_yes(instance, answer.witness)
        else:
            vertex_bound, arc_bound = size_bounds(k)
            kernel = answer.instance.graph
            ok = kernel.n <= vertex_bound and kernel.m <= arc_bound
            if small:
                ok = ok and decide_threshold(G, k, a_of(G)) == decide_threshold(kernel, k, a_of(kernel))
        violations += not ok
    return cases, violations


def check_labeling(scale):
    cases = violations = 0
    for orientation in (0, 1):
        arcs = [(0, 1), (1, 2), (2, 0)]
        if orientation:
            arcs = [(v, u) for u, v in arcs]
        G = build(3, arcs)
        for labels in product((0, 1), repeat=3):
            cases += 1
            picked = label_and_pick(G, (0, 1, 2), labels)
            ok = len(set(picked)) == 2 and all(
                G.has_arc(u, v) and not (labels[u] == 1 and labels[v] == 0) for u, v in picked
            )
            violations += not ok
    return cases, violations


def check_forest_bound(scale):
    cases = violations = 0
    for seed in range(int(10_000 * scale)):
        sizes, attach = gen_random_forest_plan(1 + seed % 40, seed)
        _, profile = gen_forest_of_cliques(sizes, attach, seed)
        cases += 1
        violations += not profile.within_bound
    return cases, violations


CRITERIA = {
    1: ("Lower bound 4a >= 2m + n - 1", check_lower_bound),
    2: ("Tight family H_t", check_tight_family),
    3: ("Tournament ordering bound", check_tournament_bound),
    4: ("Two-way rules are exact", check_two_way_exactness),
    5: ("One-way rules keep excess", check_one_way_soundness),
    6: ("Some rule always fires", check_totality),
    7: ("Decomposition structure", check_decomposition),
    8: ("Solver matches oracle", check_solver),
    9: ("Kernel size and equivalence", check_kernel),
    10: ("Triangle labeling", check_labeling),
    11: ("Forest vertex bound", check_forest_bound),
}


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance checks")
    parser.add_argument("--quick", action="store_true", help="Use 5%% of the full case counts")
    parser.add_argument("--only", type=int, nargs="*", default=None, help="Criterion numbers to run")
    parser.add_argument("--csv", type=str, default=None, help="Write the summary table here")
    args = parser.parse_args()

    scale = 0.05 if args.quick else 1.0
    selected = args.only or sorted(CRITERIA)

    print_section("ASAPT acceptance run")
    print_metric("Scale", scale)

    rows = []
    for number in selected:
        title, check = CRITERIA[number]
        print_subsection(f"{number}. {title}")
        start = time.perf_counter()
        cases, violations = check(scale)
        seconds = time.perf_counter() - start
        print_metric("Cases", cases)
        print_metric("Violations", violations)
        print_metric("Seconds", f"{seconds:.1f}")
        rows.append({
            'criterion': number,
            'title': title,
            'cases': cases,
            'violations': violations,
            'seconds': round(seconds, 1),
            'status': 'PASS' if violations == 0 and cases > 0 else 'FAIL',
        })

    print_section("Summary")
    summary = summary_table(rows, index='criterion')
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        summary.to_csv(args.csv)
        print(f"\nSaved summary to {args.csv}")

    return 0 if all(row['status'] == 'PASS' for row in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
