from itertools import permutations

import numpy as np
import pytest

from src.bounds_oracle import Instance, count_forward, decide_threshold, verify_yes
from src.config import get_config
from src.errors import NotLeafBlock, PreconditionViolated
from src.generators import enumerate_connected_oriented, gen_Ht, gen_transitive_tournament
from src.graph_core import build
from src.dp_solver import (
    DPState,
    _best_ordering,
    block_beta,
    forest_blocks,
    init_gap_vector,
    make_u_ordering,
    peel_block,
    solve,
    solve_for_ordering,
    solve_for_ordering_detailed,
)
from src.reduction_engine import Decomposition, decompose
from tests.helpers import oracle_a, random_instances


class TestGapVector:
    def test_arc_from_u(self):
        G = build(2, [(0, 1)])
        vector = init_gap_vector(G, make_u_ordering(G, (0,)), 1)
        assert list(vector.values) == [0, 1]

    def test_arc_into_u(self):
        G = build(2, [(1, 0)])
        vector = init_gap_vector(G, make_u_ordering(G, (0,)), 1)
        assert list(vector.values) == [1, 0]

    def test_rejects_u_vertex(self):
        G = build(2, [(0, 1)])
        with pytest.raises(PreconditionViolated):
            init_gap_vector(G, make_u_ordering(G, (0,)), 0)


def test_make_u_ordering_counts_q():
    G = gen_transitive_tournament(3)
    assert make_u_ordering(G, (0, 1, 2)).Q == 3
    assert make_u_ordering(G, (2, 1, 0)).Q == 0
    assert make_u_ordering(G, (0, 1)).gaps == 3


class TestBlockBeta:
    def test_same_gap_cycle(self):
        assert block_beta(gen_Ht(1), (0, 1, 2), {0: 0, 1: 0, 2: 0}) == 2

    def test_spread_cycle(self):
        assert block_beta(gen_Ht(1), (0, 1, 2), {0: 0, 1: 1, 2: 2}) == 2

    def test_reversed_arc(self):
        G = build(2, [(0, 1)])
        assert block_beta(G, (0, 1), {0: 1, 1: 0}) == 0
        assert block_beta(G, (0, 1), {0: 0, 1: 0}) == 1

    def test_rejects_big_block(self):
        with pytest.raises(PreconditionViolated):
            block_beta(gen_transitive_tournament(4), (0, 1, 2, 3), {v: 0 for v in range(4)})


class TestSolveForOrdering:
    def test_cycle(self):
        G = gen_Ht(1)
        assert solve_for_ordering(G, make_u_ordering(G, ()), forest_blocks(G, [])) == 2

    def test_h2(self):
        G = gen_Ht(2)
        assert solve_for_ordering(G, make_u_ordering(G, ()), forest_blocks(G, [])) == 4

    def test_only_u(self):
        G = gen_transitive_tournament(3)
        assert solve_for_ordering(G, make_u_ordering(G, (0, 1, 2)), []) == 3

    def test_detailed_order_attains_value(self):
        G = gen_Ht(3)
        result = solve_for_ordering_detailed(G, make_u_ordering(G, (2,)), forest_blocks(G, [2]))
        assert sorted(result.order) == list(range(G.n))
        assert count_forward(G, result.order) == result.value == 6


class TestPeelBlock:
    def _state(self):
        G = gen_Ht(2)
        U_order = make_u_ordering(G, ())
        return DPState(
            graph=G,
            u_order=U_order,
            vectors={x: init_gap_vector(G, U_order, x).values for x in range(G.n)},
            blocks=[(0, 1, 2), (2, 3, 4)],
        )

    def test_rejects_shared_non_anchor(self):
        with pytest.raises(NotLeafBlock):
            peel_block(self._state(), (0, 1, 2), 0)

    def test_rejects_foreign_anchor(self):
        with pytest.raises(NotLeafBlock):
            peel_block(self._state(), (0, 1, 2), 3)

    def test_peel_folds_into_anchor(self):
        state = peel_block(self._state(), (0, 1, 2), 2)
        assert state.blocks == [(2, 3, 4)]
        assert set(state.vectors) == {2, 3, 4}
        assert np.array_equal(state.vectors[2], np.array([2]))
        assert state.records[0].anchor == 2


class TestSolve:
    @pytest.mark.parametrize("t", [1, 2, 3])
    def test_tight_family(self, t):
        G = gen_Ht(t)
        yes = solve(Instance(graph=G, k=0))
        assert yes.decision and verify_yes(Instance(graph=G, k=0), yes.witness)

        no = solve(Instance(graph=G, k=1))
        assert not no.decision
        assert no.certificate == 'dp'
        assert no.a_restricted == 2 * t
        assert no.orderings == 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_exhaustive_small(self, n):
        for G in enumerate_connected_oriented(n):
            a_value = oracle_a(G)
            for k in (0, 1, 2, 3):
                instance = Instance(graph=G, k=k)
                result = solve(instance)
                assert result.decision == decide_threshold(G, k, a_value)
                if result.decision:
                    assert verify_yes(instance, result.witness)
                if result.exact:
                    assert result.a_restricted == a_value

    def test_random_against_oracle(self):
        for G in random_instances(40, 5, 11, seed=41):
            a_value = oracle_a(G)
            for k in (1, 3, 5):
                instance = Instance(graph=G, k=k)
                result = solve(instance)
                assert result.decision == decide_threshold(G, k, a_value)
                if result.decision:
                    assert verify_yes(instance, result.witness)
                if result.exact:
                    assert result.a_restricted == a_value
                    assert result.witness.forward_arcs == a_value


def test_best_u_ordering_reaches_oracle():
    checked = 0
    graphs = [gen_Ht(3)] + list(random_instances(60, 5, 11, seed=43))
    for G in graphs:
        result = decompose(Instance(graph=G, k=6))
        if not isinstance(result, Decomposition) or len(result.U) > 5:
            continue
        U = [G.vertex_of(label) for label in result.U]
        forest = forest_blocks(G, U)
        best = max(solve_for_ordering(G, make_u_ordering(G, o), forest) for o in permutations(sorted(U)))
        assert best == oracle_a(G)
        checked += 1
    assert checked > 0


class TestParallelOrderings:
    def test_worker_pool_matches_in_process(self):
        G = gen_Ht(3)
        U = [2, 4]
        forest = forest_blocks(G, U)
        parallel = get_config('parallel')
        assert parallel.jobs > 1

        serial_result = _best_ordering(G, U, forest, get_config())
        pool_result = _best_ordering(G, U, forest, parallel)
        assert pool_result == serial_result
        assert serial_result[1] == oracle_a(G)
        assert serial_result[2] == 2

    @pytest.mark.parametrize("k", [1, 2])
    def test_solve_with_parallel_preset(self, k):
        instance = Instance(graph=gen_Ht(3), k=k)
        serial = solve(instance)
        pooled = solve(instance, get_config('parallel'))
        assert pooled.decision == serial.decision
        assert pooled.a_restricted == serial.a_restricted
        assert pooled.witness == serial.witness
