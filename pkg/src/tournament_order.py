"""
Tournament Ordering

Constructive ordering of a tournament whose forward arcs number at least
m/2 + 3n/4 - 1 (n even) or m/2 + 3(n-1)/4 - 1 (n odd). The recursion peels
one or two vertices per step following the inductive argument: a vertex of
large out-degree goes first, one of large in-degree goes last, and
otherwise two vertices of out-degree n/2 go first in arc order.
"""

from typing import List

import numpy as np

from .bounds_oracle import WitnessOrdering, count_forward
from .errors import NotTournament
from .graph_core import OrientedGraph


def is_tournament(G: OrientedGraph) -> bool:
    """True iff every pair of distinct vertices is joined by exactly one arc."""
    return G.m == G.n * (G.n - 1) // 2


def tournament_bound_q(n: int, m: int) -> int:
    """
    Guaranteed forward-arc count of tournament_ordering, in quarter units.

    Args:
        n: Vertex count
        m: Arc count (n(n-1)/2 for a tournament)

    Returns:
        2m + 3n - 4 for even n, 2m + 3(n-1) - 4 for odd n, 0 for n <= 1
    """
    if n <= 1:
        return 0
    if n % 2 == 0:
        return 2 * m + 3 * n - 4
    return 2 * m + 3 * (n - 1) - 4


def _order_subset(adj: np.ndarray, alive: List[int]) -> List[int]:
    """Recursive ordering of the sub-tournament on `alive` (sorted ids)."""
    n = len(alive)
    if n <= 1:
        return list(alive)
    if n == 2:
        x, y = alive
        return [x, y] if adj[x, y] else [y, x]

    sub = adj[np.ix_(alive, alive)]
    out_deg = sub.sum(axis=1)
    in_deg = sub.sum(axis=0)

    if n % 2 == 1:
        x = alive[0]
        rest = _order_subset(adj, alive[1:])
        if in_deg[0] >= out_deg[0]:
            return rest + [x]
        return [x] + rest

    half = n // 2
    for i, v in enumerate(alive):
        if out_deg[i] >= half + 1:
            return [v] + _order_subset(adj, alive[:i] + alive[i + 1:])
    for i, v in enumerate(alive):
        if in_deg[i] >= half + 1:
            return _order_subset(adj, alive[:i] + alive[i + 1:]) + [v]

    balanced = [v for i, v in enumerate(alive) if out_deg[i] == half]
    x, y = balanced[0], balanced[1]
    if not adj[x, y]:
        x, y = y, x
    rest = [v for v in alive if v != x and v != y]
    return [x, y] + _order_subset(adj, rest)


def tournament_ordering(T: OrientedGraph) -> WitnessOrdering:
    """
    Order a tournament so that at least the guaranteed number of arcs is forward.

    Args:
        T: Tournament

    Returns:
        WitnessOrdering on T with 4 * forward_arcs >= tournament_bound_q(n, m)

    Raises:
        NotTournament: If some pair of vertices is non-adjacent
    """
    if not is_tournament(T):
        raise NotTournament(
            f"Graph with n={T.n} has {T.m} arcs, a tournament needs {T.n * (T.n - 1) // 2}"
        )

    adj = np.zeros((T.n, T.n), dtype=np.int32)
    for u, v in T.arcs:
        adj[u, v] = 1

    order = tuple(_order_subset(adj, list(range(T.n))))
    return WitnessOrdering(order=order, forward_arcs=count_forward(T, order))
