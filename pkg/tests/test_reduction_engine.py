import pytest

from src.bounds_oracle import Instance, WitnessOrdering, count_forward, verify_yes
from src.config import get_config
from src.errors import InstanceParseError, PreconditionViolated, TraceMismatch
from src.generators import (
    enumerate_connected_oriented,
    gen_Ht,
    gen_rule1_fixture,
    gen_rule2_fixture,
    gen_transitive_tournament,
)
from src.graph_core import build, induced, remove
from src.reduction_engine import (
    Decomposition,
    ReductionTrace,
    Rule,
    YesCertificate,
    apply_rule1,
    apply_rule2,
    apply_rule3,
    apply_rule4,
    apply_rule5,
    check_forest_properties,
    combine,
    decompose,
    detect_rule1,
    detect_rule2,
    detect_rule3,
    detect_rule4,
    detect_rule5,
    format_trace_line,
    lift_witness,
    normalize_two_way,
    parse_trace_line,
    replay_trace_k,
    rule3_delta,
    rule4_delta,
)
from tests.helpers import (
    bridged_double_triangle,
    double_triangle,
    excess,
    oracle_a,
    random_instances,
    triangle_with_pendant,
    two_cycles_joined,
)


def path(n):
    return build(n, [(i, i + 1) for i in range(n - 1)])


class TestRule1:
    def test_detect_pendant_triangle(self):
        assert detect_rule1(triangle_with_pendant()) == (0, (1, 2))

    def test_detect_lone_cycle(self):
        assert detect_rule1(gen_Ht(1)) == (0, (1, 2))

    def test_detect_none_on_arc(self):
        assert detect_rule1(path(2)) is None

    def test_detect_on_h2(self):
        x, S = detect_rule1(gen_Ht(2))
        assert x == 2
        assert S in ((0, 1), (3, 4))

    def test_apply_drops_two_arcs_worth(self):
        G = triangle_with_pendant()
        reduced = apply_rule1(G, 0, (1, 2))
        assert reduced.n == 2 and reduced.m == 1
        assert reduced.labels == (0, 3)
        assert oracle_a(G) == 3
        assert oracle_a(reduced) == 1

    def test_apply_h2_gives_h1(self):
        reduced = apply_rule1(gen_Ht(2), 2, (3, 4))
        assert (reduced.n, reduced.m) == (3, 3)

    def test_apply_rejects_bad_set(self):
        with pytest.raises(PreconditionViolated):
            apply_rule1(two_cycles_joined(), 0, (3, 4))


class TestRule2:
    def test_detect_standalone(self):
        a, b, c, d, e = detect_rule2(double_triangle())
        assert c == 2
        assert {a, b} == {0, 1} and {d, e} == {3, 4}

    def test_detect_with_pendant_picks_attached_vertex(self):
        assert detect_rule2(double_triangle(pendant=True)) == (0, 1, 2, 3, 4)

    def test_detect_none_when_inner_vertex_attached(self):
        arcs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 5), (1, 6)]
        assert detect_rule2(build(7, arcs)) is None

    @pytest.mark.parametrize("pendant", [False, True])
    def test_apply_is_exact(self, pendant):
        G = double_triangle(pendant=pendant)
        reduced = apply_rule2(G, 0, 1, 2, 3, 4)
        assert reduced.n == G.n - 2
        assert reduced.m == G.m - 3
        assert oracle_a(G) == oracle_a(reduced) + 2

    def test_new_vertex_closes_cycle(self):
        reduced = apply_rule2(double_triangle(), 0, 1, 2, 3, 4, new_label=9)
        x = reduced.vertex_of(9)
        a, e = reduced.vertex_of(0), reduced.vertex_of(4)
        assert reduced.has_arc(a, x) and reduced.has_arc(x, e) and reduced.has_arc(e, a)

    def test_apply_rejects(self):
        with pytest.raises(PreconditionViolated):
            apply_rule2(double_triangle(pendant=True), 1, 0, 2, 3, 4)


class TestRule3:
    def test_detect(self):
        assert detect_rule3(path(3)) == 0
        assert detect_rule3(gen_Ht(1)) is None
        assert detect_rule3(gen_Ht(2)) is None

    def test_apply_path(self):
        reduced, k = apply_rule3(path(3), 0, 3)
        assert (reduced.n, k) == (2, 2)

    def test_source_of_transitive_triangle(self):
        G = gen_transitive_tournament(3)
        assert rule3_delta(G, 0) == 3
        assert apply_rule3(G, 0, 5).k == 2

    def test_rejects_cut_vertex(self):
        with pytest.raises(PreconditionViolated):
            apply_rule3(path(3), 1, 3)


class TestRule4:
    def test_delta(self):
        assert rule4_delta(4) == 4
        assert rule4_delta(5) == 3
        assert rule4_delta(6) == 8

    def test_detect_hanging_tournament(self):
        arcs = [(0, 1)] + [(u, v) for u in range(1, 5) for v in range(u + 1, 5)]
        assert detect_rule4(build(5, arcs)) == (1, 2, 3, 4)

    def test_detect_transitive_five(self):
        assert detect_rule4(gen_transitive_tournament(5)) == (1, 2, 3, 4)

    def test_detect_none_on_cycle(self):
        assert detect_rule4(gen_Ht(1)) is None

    @pytest.mark.parametrize("size, k, expected", [(4, 10, 6), (5, 10, 7), (6, 9, 1)])
    def test_apply(self, size, k, expected):
        G = gen_transitive_tournament(size + 1)
        S = tuple(range(1, size + 1))
        assert apply_rule4(G, S, k).k == expected

    def test_empty_remainder_needs_flag(self):
        G = gen_transitive_tournament(4)
        with pytest.raises(PreconditionViolated):
            apply_rule4(G, range(4), 5)
        config = get_config(allow_empty_remainder=True)
        assert apply_rule4(G, range(4), 5, config).graph.n == 0


class TestRule5:
    def test_detect_path(self):
        assert detect_rule5(path(4)) == (0, 1, 2)

    def test_detect_none(self):
        assert detect_rule5(gen_Ht(1)) is None
        assert detect_rule5(double_triangle()) is None

    def test_apply(self):
        reduced, k = apply_rule5(path(4), (0, 1, 2), 2)
        assert reduced.labels == (3,)
        assert k == 1

    def test_rejects_triangle(self):
        with pytest.raises(PreconditionViolated):
            apply_rule5(gen_Ht(1), (0, 1, 2), 2)


class TestCombine:
    def test_two_cycles(self):
        G = two_cycles_joined()
        S = (0, 1, 2)
        order_S = WitnessOrdering(order=(0, 1, 2), forward_arcs=2)
        order_rest = WitnessOrdering(order=(0, 1, 2), forward_arcs=2)
        combined = combine(order_rest, order_S, G, S)
        assert combined.order == (0, 1, 2, 3, 4, 5)
        assert combined.forward_arcs == 5 == oracle_a(G)

    def test_sink_set_goes_last(self):
        G = build(3, [(0, 2), (1, 2)])
        rest = remove(G, [2]).graph
        order_rest = WitnessOrdering(order=(0, 1), forward_arcs=count_forward(rest, (0, 1)))
        combined = combine(order_rest, WitnessOrdering(order=(0,), forward_arcs=0), G, [2])
        assert combined.order[-1] == 2
        assert combined.forward_arcs == 2

    def test_gain_is_heavier_side(self):
        for G in random_instances(25, 4, 9, seed=21):
            S = list(range(G.n // 2))
            part = induced(G, S).graph
            rest = remove(G, S).graph
            order_S = WitnessOrdering(tuple(range(part.n)), count_forward(part, range(part.n)))
            order_rest = WitnessOrdering(tuple(range(rest.n)), count_forward(rest, range(rest.n)))
            leaving = sum(1 for u, v in G.arcs if u in S and v not in S)
            entering = sum(1 for u, v in G.arcs if v in S and u not in S)
            combined = combine(order_rest, order_S, G, S)
            assert combined.forward_arcs == order_S.forward_arcs + order_rest.forward_arcs + max(leaving, entering)


class TestDecompose:
    def test_cycle_needs_dp(self):
        result = decompose(Instance(graph=gen_Ht(1), k=1))
        assert isinstance(result, Decomposition)
        assert result.U == ()
        assert [s.rule for s in result.trace.steps] == [Rule.R1_SmallClique]
        assert result.forest_report.holds

    def test_path_is_yes(self):
        instance = Instance(graph=path(3), k=1)
        result = decompose(instance)
        assert isinstance(result, YesCertificate)
        assert result.trace.steps[0].rule == Rule.R3_Degree
        assert result.witness.forward_arcs == 2
        assert verify_yes(instance, result.witness)

    def test_transitive_five_is_yes(self):
        instance = Instance(graph=gen_transitive_tournament(5), k=3)
        result = decompose(instance)
        assert isinstance(result, YesCertificate)
        assert verify_yes(instance, result.witness)

    def test_final_k_accounting(self):
        for G in random_instances(30, 3, 10, seed=13):
            result = decompose(Instance(graph=G, k=4))
            trace = result.trace
            assert trace.final_k == 4 - trace.total_k_delta
            assert len(trace.U) <= 3 * (4 - trace.final_k)
            assert trace.final_graph.n <= 1

    def test_forest_properties_on_random_runs(self):
        checked = 0
        graphs = [gen_Ht(t) for t in (1, 2, 3, 4)] + list(random_instances(60, 4, 16, seed=17))
        for G in graphs:
            result = decompose(Instance(graph=G, k=4))
            if isinstance(result, Decomposition):
                checked += 1
                assert len(result.U) <= 12
                assert result.forest_report.holds
        assert checked > 0

    def test_nonpositive_k_always_has_witness(self):
        for G in random_instances(40, 2, 12, seed=19):
            for k in (-2, 0):
                instance = Instance(graph=G, k=k)
                result = decompose(instance)
                assert isinstance(result, YesCertificate)
                assert verify_yes(instance, result.witness)

    def test_reduction_yes_witnesses_verify(self):
        for G in random_instances(40, 3, 12, seed=23):
            for k in (1, 2, 3):
                instance = Instance(graph=G, k=k)
                result = decompose(instance)
                if isinstance(result, YesCertificate):
                    assert verify_yes(instance, result.witness)

    def test_verbose_prints_steps(self, capsys):
        decompose(Instance(graph=path(3), k=1), get_config('debug'))
        assert "[R3_Degree]" in capsys.readouterr().out


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_some_rule_always_applies(n):
    for G in enumerate_connected_oriented(n):
        hit = (
            detect_rule3(G) is not None
            or detect_rule1(G) is not None
            or detect_rule4(G) is not None
            or detect_rule5(G) is not None
        )
        assert hit, G.arcs


class TestRuleSoundness:
    def test_two_way_rules_are_exact(self):
        for G in random_instances(120, 4, 10, seed=29):
            hit = detect_rule1(G)
            if hit is not None:
                assert oracle_a(G) == oracle_a(apply_rule1(G, *hit)) + 2
            hit = detect_rule2(G)
            if hit is not None:
                assert oracle_a(G) == oracle_a(apply_rule2(G, *hit)) + 2
        for t in (2, 3):
            G = gen_Ht(t)
            assert oracle_a(G) == oracle_a(apply_rule1(G, *detect_rule1(G))) + 2

    def test_one_way_rules_keep_excess(self):
        for G in random_instances(120, 3, 10, seed=31):
            x = detect_rule3(G)
            if x is not None:
                reduced, k = apply_rule3(G, x, 0)
                assert excess(G) >= excess(reduced) - k
            S = detect_rule4(G)
            if S is not None:
                reduced, k = apply_rule4(G, S, 0)
                assert excess(G) >= excess(reduced) - k
            S = detect_rule5(G)
            if S is not None:
                reduced, k = apply_rule5(G, S, 0)
                assert excess(G) >= excess(reduced) - k


class TestLifting:
    def test_empty_trace_is_identity(self):
        G = path(3)
        trace = ReductionTrace(steps=[], initial=Instance(G, 0), final_graph=G, final_k=0)
        base = WitnessOrdering(order=(2, 0, 1), forward_arcs=1)
        assert lift_witness(trace, base).order == (2, 0, 1)

    def test_rejects_bad_base(self):
        G = path(3)
        trace = ReductionTrace(steps=[], initial=Instance(G, 0), final_graph=G, final_k=0)
        with pytest.raises(TraceMismatch):
            lift_witness(trace, WitnessOrdering(order=(0, 1), forward_arcs=1))

    def test_rule1_lift_on_lone_cycle(self):
        trace = normalize_two_way(Instance(graph=gen_Ht(1), k=0))
        assert trace.final_graph.n == 1
        lifted = lift_witness(trace, WitnessOrdering(order=(0,), forward_arcs=0))
        assert lifted.forward_arcs == 2

    @pytest.mark.parametrize("make", [double_triangle, lambda: double_triangle(pendant=True), bridged_double_triangle])
    def test_two_way_lift_is_exact(self, make):
        G = make()
        trace = normalize_two_way(Instance(graph=G, k=0))
        final = trace.final_graph
        best = max(
            (WitnessOrdering(order=o, forward_arcs=count_forward(final, o)) for o in _orders(final.n)),
            key=lambda w: w.forward_arcs,
        )
        lifted = lift_witness(trace, best)
        assert lifted.forward_arcs == oracle_a(G)


def _orders(n):
    from itertools import permutations
    return permutations(range(n))


def test_normalize_uses_fresh_labels():
    G = bridged_double_triangle()
    trace = normalize_two_way(Instance(graph=G, k=2))
    assert trace.final_k == 2
    assert trace.steps[0].rule == Rule.R2_BridgeTriangles
    assert trace.steps[0].removed == (1, 2, 3)
    assert trace.steps[0].added == (6,)


def test_check_forest_properties_flags_violations():
    report = check_forest_properties(gen_transitive_tournament(4), [])
    assert not report.small_blocks
    assert not report.holds

    two_pairs = build(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    report = check_forest_properties(two_pairs, [])
    assert not report.one_pair_per_component


class TestTraceLines:
    def test_format_and_parse(self):
        result = decompose(Instance(graph=path(3), k=1))
        line = format_trace_line(result.trace.steps[0])
        assert line == "R3_Degree removed=0 added= kdelta=1"
        assert parse_trace_line(line) == (Rule.R3_Degree, (0,), (), 1)

    def test_parse_errors_name_line(self):
        with pytest.raises(InstanceParseError, match="line 4"):
            parse_trace_line("R9 removed=1 added= kdelta=0", 4)
        with pytest.raises(InstanceParseError):
            parse_trace_line("R3_Degree removed=x added= kdelta=1")

    def test_replay_accepts_real_traces(self):
        for G in random_instances(20, 3, 10, seed=37):
            result = decompose(Instance(graph=G, k=3))
            steps = [parse_trace_line(format_trace_line(s)) for s in result.trace.steps]
            ok, final_k, message = replay_trace_k(G, 3, steps)
            assert ok, message
            assert final_k == result.trace.final_k

    def test_replay_rejects_tampered_delta(self):
        G = path(3)
        ok, _, message = replay_trace_k(G, 1, [(Rule.R3_Degree, (0,), (), 2)])
        assert not ok
        assert "expected 1" in message

    @pytest.mark.parametrize("step, fragment", [
        ((Rule.R4_BigClique, (0, 1, 2, 3), (), 4), "Rule 4 does not apply"),
        ((Rule.R5_Triplet, (0, 2, 4), (), 1), "does not induce P3"),
        ((Rule.R3_Degree, (2,), (), -1), "balanced"),
        ((Rule.R1_SmallClique, (0, 1), (), 0), "outside neighbours"),
    ])
    def test_replay_rejects_rule_that_does_not_fire(self, step, fragment):
        ok, final_k, message = replay_trace_k(path(5), 0, [step])
        assert not ok
        assert final_k == 0
        assert message.startswith("step 1:")
        assert fragment in message

    def test_replay_rejects_step_after_valid_prefix(self):
        G = path(5)
        steps = [(Rule.R3_Degree, (0,), (), 1), (Rule.R3_Degree, (2,), (), -1)]
        ok, final_k, message = replay_trace_k(G, 3, steps)
        assert not ok
        assert final_k == 2
        assert message.startswith("step 2:")

    def test_replay_handles_contraction(self):
        G = bridged_double_triangle()
        trace = normalize_two_way(Instance(graph=G, k=1))
        steps = [parse_trace_line(format_trace_line(s)) for s in trace.steps]
        assert steps[0][0] == Rule.R2_BridgeTriangles
        ok, final_k, _ = replay_trace_k(G, 1, steps)
        assert ok and final_k == 1


class TestConstructedFixtures:
    def test_rule1_fixtures_are_exact(self):
        for seed in range(40):
            G, (x, S) = gen_rule1_fixture(4 + seed % 7, 0.3, seed)
            assert oracle_a(G) == oracle_a(apply_rule1(G, x, S)) + 2

    def test_rule2_fixtures_are_exact(self):
        checked = 0
        for seed in range(40):
            fixture = gen_rule2_fixture(7 + seed % 5, 0.3, seed)
            if fixture is None:
                continue
            G, hit = fixture
            assert oracle_a(G) == oracle_a(apply_rule2(G, *hit)) + 2
            checked += 1
        assert checked > 0
