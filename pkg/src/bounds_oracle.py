"""
Bounds and Exact Oracle

Quarter-unit arithmetic for the Poljak-Turzik lower bound
gamma(G) = m/2 + (n - c)/4, the ASAPT threshold test, witness checking, and
an exact subset dynamic program for a(G) on small graphs.

Every score is stored as four times its value, so all comparisons on the
decision path are integer comparisons.
"""

from dataclasses import dataclass
from functools import total_ordering
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import NotConnected, NotPermutation, TooLarge
from .graph_core import OrientedGraph, components


@total_ordering
@dataclass(frozen=True)
class ScoreQ:
    """A score of q/4 arcs."""
    q: int

    @classmethod
    def from_arcs(cls, a: int) -> 'ScoreQ':
        return cls(4 * a)

    def __add__(self, other: 'ScoreQ') -> 'ScoreQ':
        return ScoreQ(self.q + other.q)

    def __sub__(self, other: 'ScoreQ') -> 'ScoreQ':
        return ScoreQ(self.q - other.q)

    def __lt__(self, other: 'ScoreQ') -> bool:
        return self.q < other.q

    def __str__(self) -> str:
        whole, rem = divmod(self.q, 4)
        return f"{whole}" if rem == 0 else f"{self.q}/4"


@dataclass(frozen=True)
class WitnessOrdering:
    """
    Vertex ordering standing for the acyclic subgraph of its forward arcs.

    Attributes:
        order: Permutation of the graph's vertex ids
        forward_arcs: Number of arcs (u, v) with u before v
    """
    order: Tuple[int, ...]
    forward_arcs: int

    def labelled(self, G: OrientedGraph) -> Tuple[int, ...]:
        """The ordering expressed in G's original labels."""
        return tuple(G.labels[v] for v in self.order)


@dataclass(frozen=True)
class Instance:
    """
    ASAPT instance: a connected oriented graph and the integer parameter k.

    Raises:
        NotConnected: If the graph has more than one component
    """
    graph: OrientedGraph
    k: int

    def __post_init__(self):
        if component_count(self.graph) > 1:
            raise NotConnected(
                f"ASAPT needs a connected graph, got {component_count(self.graph)} components"
            )


def component_count(G: OrientedGraph) -> int:
    return len(components(G))


def gamma(G: OrientedGraph) -> ScoreQ:
    """
    Poljak-Turzik bound in quarter units: q = 2m + (n - c).
    """
    return ScoreQ(2 * G.m + G.n - component_count(G))


def threshold_q(G: OrientedGraph, k: int) -> int:
    """Quarter-unit target of the ASAPT question: 2m + (n - 1) + k."""
    return 2 * G.m + (G.n - 1) + k


def decide_threshold(G: OrientedGraph, k: int, a_value: int) -> bool:
    """
    Does an acyclic subgraph with a_value arcs answer ASAPT with YES?

    Args:
        G: Connected oriented graph
        k: Integer parameter
        a_value: Arc count of some acyclic subgraph

    Returns:
        True iff 4 * a_value >= 2m + (n - 1) + k

    Raises:
        NotConnected: If G is not connected
    """
    c = component_count(G)
    if c != 1:
        raise NotConnected(f"Threshold is defined for connected graphs, got {c} components")
    return 4 * a_value >= threshold_q(G, k)


def excess_q(G: OrientedGraph, a_value: int) -> int:
    """4a - gamma(G).q; the instance is YES iff this is at least k."""
    return 4 * a_value - gamma(G).q


def count_forward(G: OrientedGraph, order: Sequence[int]) -> int:
    """
    Number of arcs respecting an ordering.

    Raises:
        NotPermutation: If order is not a permutation of 0..n-1
    """
    order = tuple(order)
    if len(order) != G.n or sorted(order) != list(range(G.n)):
        raise NotPermutation(f"Ordering of length {len(order)} is not a permutation of 0..{G.n - 1}")

    position = [0] * G.n
    for pos, v in enumerate(order):
        position[v] = pos
    return sum(1 for u, v in G.arcs if position[u] < position[v])


def verify_yes(instance: Instance, witness: WitnessOrdering) -> bool:
    """
    Check a YES witness: recount forward arcs and test the threshold.

    Returns:
        False on any mismatch, never raises
    """
    try:
        recount = count_forward(instance.graph, witness.order)
    except NotPermutation:
        return False
    if recount != witness.forward_arcs:
        return False
    return decide_threshold(instance.graph, instance.k, recount)


def _popcounts(n: int) -> np.ndarray:
    counts = np.zeros(1 << n, dtype=np.int16)
    for bit in range(n):
        span = 1 << bit
        counts[span:2 * span] = counts[:span] + 1
    return counts


def oracle_max_acyclic(
    G: OrientedGraph,
    cap: Optional[int] = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> Tuple[int, WitnessOrdering]:
    """
    Exact a(G) by dynamic programming over vertex subsets.

    f(S) is the best forward-arc count of an ordering of S; the last vertex
    v of S gains the arcs entering it from S - v:
    f(S) = max_v f(S - v) + |arcs from S - v into v|.
    Layers are processed by popcount with numpy, one vectorized update per
    candidate last vertex. Ties go to the smallest vertex id.

    Args:
        G: Oriented graph
        cap: Largest accepted vertex count (default config.oracle_cap)
        config: Solver configuration

    Returns:
        Tuple of (a(G), optimal WitnessOrdering)

    Raises:
        TooLarge: If G.n exceeds the cap
    """
    cap = config.oracle_cap if cap is None else cap
    n = G.n
    if n > cap:
        raise TooLarge(f"Oracle is capped at {cap} vertices, graph has {n}")
    if n == 0:
        return 0, WitnessOrdering(order=(), forward_arcs=0)

    in_mask = [sum(1 << u for u in G.in_adj[v]) for v in range(n)]

    size = 1 << n
    pc = _popcounts(n)
    best = np.full(size, -1, dtype=np.int32)
    choice = np.full(size, -1, dtype=np.int8)
    best[0] = 0

    masks = np.arange(size, dtype=np.int64)
    layers = [masks[pc == s] for s in range(n + 1)]

    for s in range(1, n + 1):
        layer = layers[s]
        layer_best = np.full(layer.shape, -1, dtype=np.int32)
        layer_choice = np.full(layer.shape, -1, dtype=np.int8)
        for v in range(n):
            bit = 1 << v
            has_v = (layer & bit) != 0
            rest = layer[has_v] ^ bit
            candidate = best[rest] + pc[rest & in_mask[v]]
            current = layer_best[has_v]
            better = candidate > current
            idx = np.nonzero(has_v)[0][better]
            layer_best[idx] = candidate[better]
            layer_choice[idx] = v
        best[layer] = layer_best
        choice[layer] = layer_choice

    full = size - 1
    order = []
    S = full
    while S:
        v = int(choice[S])
        order.append(v)
        S ^= 1 << v
    order.reverse()

    a_value = int(best[full])
    return a_value, WitnessOrdering(order=tuple(order), forward_arcs=a_value)
