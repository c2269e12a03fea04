"""
Oriented Graph Core

Immutable oriented-graph representation (no self-loops, no directed
2-cycles, no parallel arcs) and the structural queries the reduction rules,
the dynamic program and the kernelizer are built on: degrees, cuts,
components, induced subgraphs, the underlying graph and its blocks.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    DuplicateArc,
    EmptySet,
    FullSet,
    SelfLoop,
    TwoCycle,
    VertexOutOfRange,
)

Arc = Tuple[int, int]
VertexSet = Tuple[int, ...]


@dataclass(frozen=True)
class OrientedGraph:
    """
    Oriented graph on dense vertex ids 0..n-1.

    Attributes:
        n: Number of vertices
        arcs: Arc list in insertion order
        out_adj: Out-neighbour set per vertex
        in_adj: In-neighbour set per vertex
        labels: Original id of each vertex (identity unless produced by a
                deletion, so traces can be replayed on the input graph)
    """
    n: int
    arcs: Tuple[Arc, ...]
    out_adj: Tuple[FrozenSet[int], ...]
    in_adj: Tuple[FrozenSet[int], ...]
    labels: Tuple[int, ...]
    _index: Dict[int, int] = field(default_factory=dict, repr=False, compare=False, hash=False)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return v in self.out_adj[u]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self.out_adj[u] or v in self.in_adj[u]

    def neighbors(self, x: int) -> FrozenSet[int]:
        return self.out_adj[x] | self.in_adj[x]

    def vertex_of(self, label: int) -> int:
        """Dense id of the vertex carrying an original label."""
        return self._index[label]

    def vertices(self) -> range:
        return range(self.n)

    def __repr__(self) -> str:
        return f"OrientedGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class BlockDecomposition:
    """
    Blocks (maximal 2-connected subgraphs) of UN(G).

    Attributes:
        blocks: Sorted vertex tuples; an isolated vertex is a one-vertex block
        cut_vertices: Vertices lying in more than one block
        block_cut_tree: networkx Graph on ('B', i) and ('C', v) nodes
    """
    blocks: Tuple[VertexSet, ...]
    cut_vertices: VertexSet
    block_cut_tree: nx.Graph = field(repr=False, compare=False)

    def blocks_of(self, x: int) -> List[int]:
        """Indices of blocks containing vertex x."""
        return [i for i, block in enumerate(self.blocks) if x in block]


@dataclass(frozen=True)
class InducedSubgraph:
    """Induced subgraph plus the id remap between parent and child."""
    graph: OrientedGraph
    old_to_new: Dict[int, int]
    new_to_old: Tuple[int, ...]


def build(n: int, arcs: Iterable[Arc], labels: Optional[Sequence[int]] = None) -> OrientedGraph:
    """
    Validate an arc list and build an oriented graph.

    Args:
        n: Vertex count
        arcs: Ordered pairs (u, v) meaning an arc u -> v
        labels: Optional original ids, one per vertex (default: identity)

    Returns:
        OrientedGraph

    Raises:
        VertexOutOfRange, SelfLoop, DuplicateArc, TwoCycle: naming the arc
    """
    if n < 0:
        raise ValueError(f"Vertex count must be nonnegative, got {n}")

    out_sets: List[set] = [set() for _ in range(n)]
    in_sets: List[set] = [set() for _ in range(n)]
    arc_list: List[Arc] = []

    for u, v in arcs:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"Arc ({u},{v}) has a vertex outside [0,{n})", (u, v))
        if u == v:
            raise SelfLoop(f"Arc ({u},{v}) is a self-loop", (u, v))
        if v in out_sets[u]:
            raise DuplicateArc(f"Arc ({u},{v}) appears more than once", (u, v))
        if u in out_sets[v]:
            raise TwoCycle(f"Arc ({u},{v}) forms a directed 2-cycle with ({v},{u})", (u, v))
        out_sets[u].add(v)
        in_sets[v].add(u)
        arc_list.append((u, v))

    if labels is None:
        labels = range(n)
    labels = tuple(int(x) for x in labels)
    if len(labels) != n:
        raise ValueError(f"Expected {n} labels, got {len(labels)}")

    return OrientedGraph(
        n=n,
        arcs=tuple(arc_list),
        out_adj=tuple(frozenset(s) for s in out_sets),
        in_adj=tuple(frozenset(s) for s in in_sets),
        labels=labels,
        _index={label: i for i, label in enumerate(labels)},
    )


def relabel_dense(G: OrientedGraph) -> OrientedGraph:
    """Same graph with identity labels (drops the link to the input graph)."""
    return build(G.n, G.arcs)


def degrees(G: OrientedGraph, x: int) -> Tuple[int, int]:
    """
    Out- and in-degree of a vertex.

    Returns:
        Tuple of (d+(x), d-(x))
    """
    if not 0 <= x < G.n:
        raise VertexOutOfRange(f"Vertex {x} outside [0,{G.n})")
    return len(G.out_adj[x]), len(G.in_adj[x])


def cut_degrees(G: OrientedGraph, S: Iterable[int]) -> Tuple[int, int]:
    """
    Arcs leaving and entering a vertex set.

    Args:
        G: Graph
        S: Nonempty proper vertex subset

    Returns:
        Tuple of (d+(S), d-(S)); their sum is |E(S, V \\ S)|

    Raises:
        EmptySet: S is empty
        FullSet: S is all of V
    """
    members = set(S)
    if not members:
        raise EmptySet("Cut set is empty")
    if len(members) >= G.n:
        raise FullSet("Cut set contains every vertex")

    leaving = entering = 0
    for u, v in G.arcs:
        if u in members and v not in members:
            leaving += 1
        elif v in members and u not in members:
            entering += 1
    return leaving, entering


def cut_size(G: OrientedGraph, S: Iterable[int]) -> int:
    """|E(S, V \\ S)|."""
    leaving, entering = cut_degrees(G, S)
    return leaving + entering


def underlying(G: OrientedGraph) -> nx.Graph:
    """UN(G) as a networkx Graph on nodes 0..n-1."""
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.arcs)
    return H


def components(G: OrientedGraph, removed: Iterable[int] = ()) -> List[VertexSet]:
    """
    Weakly connected components of G - removed.

    Returns:
        Sorted vertex tuples ordered by their minimum id
    """
    H = underlying(G)
    H.remove_nodes_from(set(removed))
    comps = [tuple(sorted(c)) for c in nx.connected_components(H)]
    return sorted(comps)


def is_connected(G: OrientedGraph, removed: Iterable[int] = (), allow_empty: bool = False) -> bool:
    """
    True if G - removed is connected.

    Breadth-first search on the adjacency sets; the detection loops call
    this for every candidate set, so it avoids rebuilding UN(G).

    Args:
        G: Graph
        removed: Vertices to delete first
        allow_empty: Whether the empty graph counts as connected
    """
    gone = set(removed)
    remaining = G.n - len(gone)
    if remaining <= 0:
        return allow_empty

    start = next(v for v in range(G.n) if v not in gone)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in G.out_adj[x] | G.in_adj[x]:
            if y not in seen and y not in gone:
                seen.add(y)
                queue.append(y)
    return len(seen) == remaining


def blocks(G: OrientedGraph) -> BlockDecomposition:
    """
    Biconnected blocks of UN(G); isolated vertices are one-vertex blocks.
    """
    H = underlying(G)
    found = [tuple(sorted(b)) for b in nx.biconnected_components(H)]
    found.extend((v,) for v in nx.isolates(H))
    found.sort()

    cuts = tuple(sorted(nx.articulation_points(H)))

    tree = nx.Graph()
    for i, block in enumerate(found):
        tree.add_node(('B', i))
        for v in block:
            if v in cuts:
                tree.add_edge(('B', i), ('C', v))

    return BlockDecomposition(blocks=tuple(found), cut_vertices=cuts, block_cut_tree=tree)


def induced(G: OrientedGraph, S: Iterable[int]) -> InducedSubgraph:
    """
    Subgraph induced by S, densely re-indexed in increasing id order.

    Returns:
        InducedSubgraph with the child graph (labels carried over) and the
        old<->new id maps
    """
    keep = sorted(set(S))
    for v in keep:
        if not 0 <= v < G.n:
            raise VertexOutOfRange(f"Vertex {v} outside [0,{G.n})")

    old_to_new = {old: new for new, old in enumerate(keep)}
    arcs = [
        (old_to_new[u], old_to_new[v])
        for u, v in G.arcs
        if u in old_to_new and v in old_to_new
    ]
    child = build(len(keep), arcs, labels=[G.labels[v] for v in keep])
    return InducedSubgraph(graph=child, old_to_new=old_to_new, new_to_old=tuple(keep))


def remove(G: OrientedGraph, S: Iterable[int]) -> InducedSubgraph:
    """G - S."""
    gone = set(S)
    return induced(G, (v for v in range(G.n) if v not in gone))


def is_directed_triangle(G: OrientedGraph, a: int, b: int, c: int) -> bool:
    """True if G[a,b,c] is a directed 3-cycle."""
    return (
        (G.has_arc(a, b) and G.has_arc(b, c) and G.has_arc(c, a))
        or (G.has_arc(b, a) and G.has_arc(c, b) and G.has_arc(a, c))
    )


def is_clique(G: OrientedGraph, S: Sequence[int]) -> bool:
    """True if every pair in S is joined by an arc (G[S] is a tournament)."""
    members = list(S)
    return all(
        G.adjacent(members[i], members[j])
        for i in range(len(members))
        for j in range(i + 1, len(members))
    )
