"""
Quadratic Kernel

Normalizes an instance with the two-way rules, derives U from the
decomposition, and either answers YES (decomposition certificate, many
non-dangerous U-neighbours, or many all-dangerous components) or returns
the normalized instance with its O(k^2) size report.

A dangerous triangle is a vertex u of U together with a 2-vertex block
{a, b} of G - U such that G[u, a, b] is a directed 3-cycle.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bounds_oracle import Instance, WitnessOrdering
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import NotForestOfCliques, NotTriangle
from .graph_core import (
    Arc,
    OrientedGraph,
    VertexSet,
    blocks,
    components,
    is_clique,
    is_directed_triangle,
    relabel_dense,
    remove,
)
from .reduction_engine import (
    ReductionTrace,
    YesCertificate,
    decompose,
    lift_witness,
    normalize_two_way,
)


@dataclass(frozen=True)
class DangerousTriangle:
    u: int
    block: Tuple[int, int]


@dataclass(frozen=True)
class BlockProfile:
    """
    Leaf-block and path-block counts of a forest of cliques.

    Attributes:
        leaf_blocks: l, blocks with at most one vertex in other blocks
        path_blocks: p, path-blocks that are not leaf-blocks
        n_vertices: |V| of the forest
        classification: (block, 'leaf' | 'path' | 'inner') per block
    """
    leaf_blocks: int
    path_blocks: int
    n_vertices: int
    classification: Tuple[Tuple[VertexSet, str], ...]

    @property
    def vertex_bound(self) -> int:
        return 8 * self.leaf_blocks + 2 * self.path_blocks

    @property
    def within_bound(self) -> bool:
        return self.n_vertices <= self.vertex_bound


@dataclass(frozen=True)
class SizeReport:
    n: int
    m: int
    k: int
    vertex_bound: int
    arc_bound: int

    @property
    def within(self) -> bool:
        return self.n <= self.vertex_bound and self.m <= self.arc_bound


@dataclass
class KernelYes:
    """
    YES answer from the kernelizer.

    Attributes:
        reason: 'reduction', 'degree' or 'danger'
        detail: Human-readable explanation
        witness: Ordering of the input graph (reduction only)
        trace: Normalization trace followed by the decomposition trace
    """
    reason: str
    detail: str
    witness: Optional[WitnessOrdering] = None
    trace: Optional[ReductionTrace] = None


@dataclass
class Kernel:
    """
    Reduced instance and its certified size.

    Attributes:
        instance: Normalized instance with dense ids
        size: Size report against the explicit bounds
        trace: Normalization trace (labels map kernel vertices to input ids)
        U: Labels of the decomposition's deleted set
        profile: Block profile of G - U
        labels: Input id of each kernel vertex (fresh ids for contracted vertices)
    """
    instance: Instance
    size: SizeReport
    trace: ReductionTrace
    U: VertexSet
    profile: BlockProfile
    labels: Tuple[int, ...] = ()


def label_and_pick(
    G: OrientedGraph,
    triangle: Sequence[int],
    labels: Sequence[int],
) -> Tuple[Arc, Arc]:
    """
    Two arcs of a directed 3-cycle with no arc from a 1-labeled to a 0-labeled vertex.

    Arcs are dropped in sorted order and the first valid pair is returned,
    so a labeling without conflicts drops the smallest arc.

    Args:
        G: Graph
        triangle: Three vertices forming a directed 3-cycle
        labels: 0/1 label of each triangle vertex, aligned with triangle

    Returns:
        Two arcs forming an acyclic subgraph

    Raises:
        NotTriangle: If the vertices do not form a directed 3-cycle
    """
    if len(triangle) != 3 or not is_directed_triangle(G, *triangle):
        raise NotTriangle(f"{tuple(triangle)} is not a directed 3-cycle")
    label_of = dict(zip(triangle, labels))
    arcs = sorted((u, v) for u in triangle for v in triangle if G.has_arc(u, v))

    for dropped in arcs:
        kept = [arc for arc in arcs if arc != dropped]
        if all(not (label_of[u] == 1 and label_of[v] == 0) for u, v in kept):
            return kept[0], kept[1]
    raise NotTriangle(f"No valid arc pair for labels {tuple(labels)}")


def dangerous_triangles(G: OrientedGraph, U: Sequence[int]) -> List[DangerousTriangle]:
    """
    Every (u, {a, b}) with {a, b} a 2-block of G - U and G[u, a, b] a directed 3-cycle.
    """
    rest = remove(G, U)
    found = []
    for block in blocks(rest.graph).blocks:
        if len(block) != 2:
            continue
        a, b = (rest.new_to_old[v] for v in block)
        for u in sorted(U):
            if is_directed_triangle(G, u, a, b):
                found.append(DangerousTriangle(u=u, block=(a, b)))
    return found


def _forest_components(G: OrientedGraph, U: Sequence[int]) -> List[VertexSet]:
    rest = remove(G, U)
    return [tuple(rest.new_to_old[v] for v in comp) for comp in components(rest.graph)]


def _dangerous_pairs(G: OrientedGraph, U: Sequence[int]) -> set:
    pairs = set()
    for tri in dangerous_triangles(G, U):
        for x in tri.block:
            pairs.add((tri.u, x))
    return pairs


def t_u_count(G: OrientedGraph, U: Sequence[int], u: int) -> Tuple[int, Dict[VertexSet, int]]:
    """
    Neighbours of u in G - U that are in no dangerous triangle with u.

    Returns:
        Tuple of (t_u, count per component of G - U with a nonzero count)
    """
    gone = set(U)
    dangerous = _dangerous_pairs(G, U)
    counted = {x for x in G.neighbors(u) if x not in gone and (u, x) not in dangerous}

    per_component = {}
    for comp in _forest_components(G, U):
        hits = sum(1 for x in comp if x in counted)
        if hits:
            per_component[comp] = hits
    return len(counted), per_component


def shortcut_degreeU(G: OrientedGraph, U: Sequence[int], k: int) -> Optional[KernelYes]:
    """YES if some u in U has t_u >= 4k."""
    for u in sorted(U):
        t_u, _ = t_u_count(G, U, u)
        if t_u >= 4 * k:
            return KernelYes(
                reason='degree',
                detail=f"t_u={t_u} >= 4k={4 * k} at vertex {G.labels[u]}",
            )
    return None


def shortcut_danger(G: OrientedGraph, U: Sequence[int], k: int) -> Optional[KernelYes]:
    """
    YES if at least k components of G - U are all-dangerous.

    A component counts when it has a U-neighbour and every adjacency between
    one of its vertices and U lies inside a dangerous triangle.
    """
    dangerous = _dangerous_pairs(G, U)
    s = 0
    for comp in _forest_components(G, U):
        incidences = [(u, x) for x in comp for u in U if G.adjacent(u, x)]
        if incidences and all(pair in dangerous for pair in incidences):
            s += 1
    if s >= k:
        return KernelYes(reason='danger', detail=f"s={s} all-dangerous components >= k={k}")
    return None


def profile_from_blocks(block_list: Sequence[Sequence[int]]) -> BlockProfile:
    """
    Classify the blocks of a forest of cliques into leaf, path and inner blocks.

    A block is a leaf-block when at most one of its vertices lies in another
    block. It is a path-block when some other block B' meets it in a vertex
    c that belongs to these two blocks only, at most one of its vertices lies
    in a block other than B', and at most one vertex of B' lies in a block
    other than it.
    """
    block_list = [tuple(sorted(b)) for b in block_list]
    owners: Dict[int, List[int]] = {}
    for idx, block in enumerate(block_list):
        for v in block:
            owners.setdefault(v, []).append(idx)

    def outside(idx: int, excluded: Tuple[int, ...]) -> int:
        """Vertices of block idx lying in some block not in `excluded`."""
        return sum(
            1 for v in block_list[idx]
            if any(o not in excluded for o in owners[v])
        )

    def is_path(idx: int) -> bool:
        for v in block_list[idx]:
            if len(owners[v]) != 2:
                continue
            other = next(o for o in owners[v] if o != idx)
            if outside(idx, (idx, other)) <= 1 and outside(other, (other, idx)) <= 1:
                return True
        return False

    leaf = path = 0
    classification = []
    for idx, block in enumerate(block_list):
        if outside(idx, (idx,)) <= 1:
            kind = 'leaf'
            leaf += 1
        elif is_path(idx):
            kind = 'path'
            path += 1
        else:
            kind = 'inner'
        classification.append((block, kind))

    return BlockProfile(
        leaf_blocks=leaf,
        path_blocks=path,
        n_vertices=len(owners),
        classification=tuple(classification),
    )


def block_profile(forest: OrientedGraph) -> BlockProfile:
    """
    Block profile of a forest of cliques with blocks of at most three vertices.

    Raises:
        NotForestOfCliques: If a block is larger than three or not a clique,
                            or |V| exceeds 8l + 2p
    """
    for block in blocks(forest).blocks:
        if len(block) > 3 or not is_clique(forest, block):
            raise NotForestOfCliques(f"Block {block} is not a clique on at most 3 vertices")
    profile = profile_from_blocks(blocks(forest).blocks)
    if not profile.within_bound:
        raise NotForestOfCliques(
            f"{profile.n_vertices} vertices exceed 8l + 2p = {profile.vertex_bound} "
            f"(l={profile.leaf_blocks}, p={profile.path_blocks})"
        )
    return profile


def size_bounds(k: int) -> Tuple[int, int]:
    """
    Explicit kernel bounds.

    Returns:
        Tuple of (20(12k^2 + 2k) + 3k, 9k^2 + 60(12k^2 + 2k))
    """
    core = 12 * k * k + 2 * k
    return 20 * core + 3 * k, 9 * k * k + 60 * core


def kernelize(
    instance: Instance,
    config: SolverConfig = DEFAULT_CONFIG,
) -> Union[KernelYes, Kernel]:
    """
    Reduce an instance to a kernel with O(k^2) vertices and arcs, or answer YES.

    Steps: apply Rules 1 and 2 exhaustively; decompose the result to get U;
    a decomposition YES wins (its witness is lifted to the input), then the
    two shortcuts are tried; otherwise the normalized instance is the kernel.

    Args:
        instance: Connected instance
        config: Solver configuration (use_shortcuts, verbose)

    Returns:
        KernelYes or Kernel
    """
    k = instance.k
    normalized = normalize_two_way(instance, verbose=config.verbose)
    G = normalized.final_graph
    if config.verbose:
        print(f"Normalized: n {instance.graph.n} -> {G.n}, m {instance.graph.m} -> {G.m}")

    result = decompose(Instance(graph=G, k=k), config)
    if isinstance(result, YesCertificate):
        witness = lift_witness(normalized, result.witness)
        combined = ReductionTrace(
            steps=normalized.steps + result.trace.steps,
            initial=instance,
            final_graph=result.trace.final_graph,
            final_k=result.trace.final_k,
            U=result.trace.U,
        )
        return KernelYes(
            reason='reduction',
            detail=f"decomposition drove k to {result.trace.final_k}",
            witness=witness,
            trace=combined,
        )

    U = [G.vertex_of(label) for label in result.U]
    if config.use_shortcuts:
        for shortcut in (shortcut_degreeU, shortcut_danger):
            answer = shortcut(G, U, k)
            if answer is not None:
                answer.trace = normalized
                if config.verbose:
                    print(f"YES by {answer.reason} shortcut: {answer.detail}")
                return answer

    profile = block_profile(remove(G, U).graph)
    vertex_bound, arc_bound = size_bounds(k)
    size = SizeReport(n=G.n, m=G.m, k=k, vertex_bound=vertex_bound, arc_bound=arc_bound)
    if config.verbose and not size.within:
        print(f"Warning: kernel n={G.n}, m={G.m} exceeds bounds ({vertex_bound}, {arc_bound})")

    return Kernel(
        instance=Instance(graph=relabel_dense(G), k=k),
        size=size,
        trace=normalized,
        U=result.U,
        profile=profile,
        labels=G.labels,
    )
