"""
Shared fixtures for the test suite: small hand-built graphs and seeded
random instance streams. The subset-DP oracle is the reference answer.
"""

from typing import Iterator, List, Tuple

from src.bounds_oracle import gamma, oracle_max_acyclic
from src.generators import SplitMix64, gen_connected_oriented
from src.graph_core import OrientedGraph, build


def triangle_with_pendant() -> OrientedGraph:
    """Directed 3-cycle 0 -> 1 -> 2 -> 0 plus the arc 0 -> 3."""
    return build(4, [(0, 1), (1, 2), (2, 0), (0, 3)])


def double_triangle(pendant: bool = False) -> OrientedGraph:
    """
    Cycles a -> b -> c -> a and c -> d -> e -> c on ids 0..4
    (a=0, b=1, c=2, d=3, e=4), optionally with the pendant arc a -> 5.
    """
    arcs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]
    if pendant:
        return build(6, arcs + [(0, 5)])
    return build(5, arcs)


def two_cycles_joined() -> OrientedGraph:
    """3-cycles on {0,1,2} and {3,4,5} joined by 0 -> 3."""
    return build(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)])


def degree_shortcut_fixture() -> Tuple[OrientedGraph, List[int]]:
    """
    Vertex 0 with one arc into each of four disjoint 3-cycles; U = [0].

    t_u = 4, so k = 1 is a YES (a = 12, threshold 45/4).
    """
    arcs = []
    for base in (1, 4, 7, 10):
        arcs += [(base, base + 1), (base + 1, base + 2), (base + 2, base)]
        arcs.append((0, base))
    return build(13, arcs), [0]


def danger_shortcut_fixture() -> Tuple[OrientedGraph, List[int]]:
    """
    Pair a=0 -> b=1 with u1=2, u2=3 each closing a directed 3-cycle on it; U = [2, 3].

    The only component of G - U is all-dangerous, so k = 1 is a YES (a = 4).
    """
    return build(4, [(0, 1), (2, 0), (1, 2), (3, 0), (1, 3)]), [2, 3]


def random_instances(count: int, n_min: int, n_max: int, seed: int = 7) -> Iterator[OrientedGraph]:
    """Seeded random connected graphs with sizes in [n_min, n_max] and mixed densities."""
    rng = SplitMix64(seed)
    for _ in range(count):
        n = n_min + rng.below(n_max - n_min + 1)
        density = (1 + rng.below(9)) / 10
        yield gen_connected_oriented(n, density, rng.next_u64())


def oracle_a(G: OrientedGraph) -> int:
    return oracle_max_acyclic(G)[0]


def excess(G: OrientedGraph) -> int:
    """4 a(G) - gamma(G) in quarter units, via the oracle."""
    return 4 * oracle_a(G) - gamma(G).q


def bridged_double_triangle() -> OrientedGraph:
    """
    double_triangle() with a and e both pointing at vertex 5, so Rule 1
    cannot fire and Rule 2 contracts b, c, d.
    """
    arcs = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 5), (4, 5)]
    return build(6, arcs)
