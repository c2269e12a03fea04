import pytest

from src.errors import InvalidPlan
from src.generators import (
    SplitMix64,
    enumerate_connected_oriented,
    enumerate_tournaments,
    gen_connected_oriented,
    gen_forest_of_cliques,
    gen_Ht,
    gen_random_forest_plan,
    gen_tournament,
)
from src.graph_core import blocks, is_connected
from src.kernelizer import block_profile
from src.tournament_order import is_tournament


class TestSplitMix64:
    def test_reference_value(self):
        assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF

    def test_ranges(self):
        rng = SplitMix64(99)
        for _ in range(200):
            assert rng.bit() in (0, 1)
            assert 0 <= rng.below(7) < 7
            assert 0.0 <= rng.random() < 1.0

    def test_below_rejects_zero(self):
        with pytest.raises(ValueError):
            SplitMix64(1).below(0)


@pytest.mark.parametrize("t", [1, 2, 5])
def test_ht_shape(t):
    G = gen_Ht(t)
    assert (G.n, G.m) == (2 * t + 1, 3 * t)
    assert is_connected(G)


def test_ht_rejects_zero():
    with pytest.raises(ValueError):
        gen_Ht(0)


class TestConnectedOriented:
    def test_deterministic(self):
        assert gen_connected_oriented(12, 0.4, 5).arcs == gen_connected_oriented(12, 0.4, 5).arcs

    def test_always_connected(self):
        for seed in range(50):
            assert is_connected(gen_connected_oriented(1 + seed % 15, 0.2, seed))

    def test_density_extremes(self):
        assert gen_connected_oriented(10, 0.0, 3).m == 9
        assert gen_connected_oriented(10, 1.0, 3).m == 45

    def test_rejects_bad_density(self):
        with pytest.raises(ValueError):
            gen_connected_oriented(5, 1.5, 0)


def test_tournaments():
    T = gen_tournament(7, 11)
    assert is_tournament(T)
    assert T.arcs == gen_tournament(7, 11).arcs
    assert sum(1 for _ in enumerate_tournaments(3)) == 8


def test_enumerate_connected_counts():
    assert sum(1 for _ in enumerate_connected_oriented(1)) == 1
    assert sum(1 for _ in enumerate_connected_oriented(2)) == 2
    assert sum(1 for _ in enumerate_connected_oriented(3)) == 20


class TestForestOfCliques:
    def test_chain(self):
        G, profile = gen_forest_of_cliques([3, 3, 3], [None, 2, 4], seed=1)
        assert (G.n, G.m) == (7, 9)
        assert (profile.leaf_blocks, profile.path_blocks) == (2, 1)

    def test_cyclic_blocks_are_cycles(self):
        G, _ = gen_forest_of_cliques([3, 3], [None, 0], seed=4)
        for block in blocks(G).blocks:
            a, b, c = block
            assert G.has_arc(a, b) == G.has_arc(b, c) == G.has_arc(c, a)

    @pytest.mark.parametrize("sizes, attach", [
        ([1, 2], [None, 0]),
        ([3, 1], [None, 0]),
        ([3, 2, 2], [None, 0, 1]),
        ([1, 1], [None, None]),
        ([4], [None]),
        ([3, 3], [None, 7]),
        ([3], [None, None]),
    ])
    def test_invalid_plans(self, sizes, attach):
        with pytest.raises(InvalidPlan):
            gen_forest_of_cliques(sizes, attach, seed=0)

    def test_relaxed_mode_allows_extra_pairs(self):
        G, _ = gen_forest_of_cliques([3, 2, 2], [None, 0, 1], seed=0, strict=False)
        assert G.n == 5

    def test_random_plans_are_valid(self):
        for seed in range(30):
            sizes, attach = gen_random_forest_plan(10, seed)
            G, profile = gen_forest_of_cliques(sizes, attach, seed)
            got = block_profile(G)
            assert (got.leaf_blocks, got.path_blocks, got.n_vertices) == (
                profile.leaf_blocks, profile.path_blocks, profile.n_vertices,
            )
