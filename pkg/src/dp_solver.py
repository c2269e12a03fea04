"""
Block-Peeling Dynamic Program

Exact ASAPT solver on top of the decomposition: for every ordering of U,
vertices of the forest of cliques G - U are assigned to gaps between
consecutive U vertices, and leaf blocks are peeled one at a time, folding
each block's best contribution into its anchor vertex's gap vector.

The maximum over all U-orderings equals a(G), and the recorded per-gap
choices rebuild a full vertex ordering attaining it.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .bounds_oracle import Instance, WitnessOrdering, count_forward, decide_threshold
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import NotLeafBlock, PreconditionViolated
from .graph_core import OrientedGraph, VertexSet, blocks, remove
from .reduction_engine import Decomposition, ReductionTrace, YesCertificate, decompose


@dataclass(frozen=True)
class GapVector:
    """
    Best arc count for `owner`'s subtree, per gap of the owner.

    values[i] is the count when owner sits in gap i (between u_i and
    u_{i+1}; gap 0 is before u_1, gap t after u_t).
    """
    owner: int
    values: np.ndarray = field(compare=False)


@dataclass(frozen=True)
class UOrdering:
    """A permutation of U and Q, the number of its forward arcs inside G[U]."""
    order: Tuple[int, ...]
    Q: int

    @property
    def gaps(self) -> int:
        return len(self.order) + 1


@dataclass(frozen=True)
class PeelRecord:
    """
    Choices made when a block was folded into its anchor.

    Attributes:
        block: Block vertices
        anchor: Vertex that stays in the forest
        others: Remaining block vertices in the order gaps are reported
        choice: Per anchor gap i, (gaps of `others`, best internal order)
    """
    block: VertexSet
    anchor: int
    others: Tuple[int, ...]
    choice: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]


@dataclass
class DPState:
    """Working state of one U-ordering run."""
    graph: OrientedGraph
    u_order: UOrdering
    vectors: Dict[int, np.ndarray]
    blocks: List[VertexSet]
    records: List[PeelRecord] = field(default_factory=list)


@dataclass
class DPResult:
    """
    Outcome of the DP for one U-ordering.

    Attributes:
        value: Q plus the best gap value of every component representative
        u_order: The U-ordering used
        gap_of: Gap of every vertex of G - U in the optimal assignment
        records: Peel records in peel order
        order: Full vertex ordering attaining value
    """
    value: int
    u_order: UOrdering
    gap_of: Dict[int, int]
    records: List[PeelRecord]
    order: Tuple[int, ...]


@dataclass
class SolveResult:
    """
    Final answer of the pipeline.

    Attributes:
        decision: True for YES
        witness: Ordering of the input graph
        a_restricted: Forward arcs of the witness
        exact: True when a_restricted is a(G) (DP path)
        certificate: 'reduction' or 'dp'
        trace: Reduction trace of the decomposition
        U: Labels of the deleted vertex set
        orderings: Number of U-orderings evaluated
    """
    decision: bool
    witness: WitnessOrdering
    a_restricted: int
    exact: bool
    certificate: str
    trace: ReductionTrace
    U: VertexSet
    orderings: int = 0


def make_u_ordering(G: OrientedGraph, order: Sequence[int]) -> UOrdering:
    """Wrap an ordering of U with its count Q of forward arcs inside G[U]."""
    order = tuple(order)
    position = {u: i for i, u in enumerate(order)}
    Q = sum(
        1 for u, v in G.arcs
        if u in position and v in position and position[u] < position[v]
    )
    return UOrdering(order=order, Q=Q)


def init_gap_vector(G: OrientedGraph, U_order: UOrdering, x: int) -> GapVector:
    """
    Arcs between x and U that are forward when x sits in each gap.

    values[i] = |{j <= i : u_j -> x}| + |{j > i : x -> u_j}| with u 1-indexed.

    Raises:
        PreconditionViolated: If x is in U
    """
    if x in U_order.order:
        raise PreconditionViolated(f"Vertex {x} belongs to U")

    values = np.zeros(U_order.gaps, dtype=np.int64)
    for j, u in enumerate(U_order.order, start=1):
        if G.has_arc(u, x):
            values[j:] += 1
        elif G.has_arc(x, u):
            values[:j] += 1
    return GapVector(owner=x, values=values)


def _best_internal(G: OrientedGraph, block: Sequence[int], gaps: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Best gap-consistent internal order of a block; first maximum in permutation order."""
    gap_of = dict(zip(block, gaps))
    best_count, best_order = -1, tuple(block)
    for perm in permutations(block):
        if any(gap_of[perm[p]] > gap_of[perm[p + 1]] for p in range(len(perm) - 1)):
            continue
        pos = {v: p for p, v in enumerate(perm)}
        count = sum(
            1 for a in block for b in block
            if a != b and G.has_arc(a, b) and pos[a] < pos[b]
        )
        if count > best_count:
            best_count, best_order = count, perm
    return best_count, best_order


def block_beta(
    G: OrientedGraph,
    block: Sequence[int],
    gap_assignment: Dict[int, int],
    U_order: Optional[UOrdering] = None,
) -> int:
    """
    Most block-internal arcs that can be forward under a gap assignment.

    An arc v -> w can only be forward when gap(v) <= gap(w); vertices in the
    same gap may be ordered freely.

    Args:
        G: Graph
        block: Block of G - U with two or three vertices
        gap_assignment: Gap of every block vertex
        U_order: The U-ordering the gaps refer to (only used for range checks)

    Returns:
        β, the maximum number of forward satisfiable arcs
    """
    if len(block) not in (2, 3):
        raise PreconditionViolated(f"Blocks of a forest of cliques have 2 or 3 vertices, got {block}")
    gaps = [gap_assignment[v] for v in block]
    if U_order is not None and any(not 0 <= g < U_order.gaps for g in gaps):
        raise PreconditionViolated(f"Gap outside [0,{U_order.gaps}) in {gaps}")
    return _best_internal(G, block, gaps)[0]


def _rank_pattern(gaps: Sequence[int]) -> Tuple[int, ...]:
    levels = sorted(set(gaps))
    return tuple(levels.index(g) for g in gaps)


def peel_block(state: DPState, block: VertexSet, anchor: int) -> DPState:
    """
    Fold a leaf block into its anchor.

    For a 3-block with others y, z:
    alpha_i = max_{j,h} x_i + y_j + z_h + β(i, j, h), and for a 2-block the h
    index is dropped. The anchor's vector becomes alpha; the other vertices
    leave the forest.

    Args:
        state: DP state (updated in place)
        block: A remaining block
        anchor: The only block vertex that may belong to other blocks

    Returns:
        The updated state

    Raises:
        NotLeafBlock: If block is unknown, anchor is not in it, or another
                      block vertex lies in a remaining block
    """
    block = tuple(block)
    if block not in state.blocks:
        raise NotLeafBlock(f"{block} is not a remaining block")
    if anchor not in block:
        raise NotLeafBlock(f"Anchor {anchor} is not in block {block}")

    others = tuple(v for v in block if v != anchor)
    for other_block in state.blocks:
        if other_block != block and any(v in other_block for v in others):
            raise NotLeafBlock(f"{block} shares a non-anchor vertex with {other_block}")

    T = state.u_order.gaps
    members = (anchor,) + others
    shape = (T,) * len(members)

    beta = np.zeros(shape, dtype=np.int64)
    internal: Dict[Tuple[int, ...], Tuple[int, ...]] = {}
    cache: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}
    for gaps in product(range(T), repeat=len(members)):
        pattern = _rank_pattern(gaps)
        if pattern not in cache:
            cache[pattern] = _best_internal(state.graph, members, pattern)
        beta[gaps], internal[gaps] = cache[pattern]

    total = beta.astype(np.int64)
    total += state.vectors[anchor].reshape((T,) + (1,) * len(others))
    for axis, v in enumerate(others, start=1):
        view = [1] * len(members)
        view[axis] = T
        total += state.vectors[v].reshape(view)

    flat = total.reshape(T, -1)
    best_idx = flat.argmax(axis=1)
    alpha = flat[np.arange(T), best_idx]

    choice = []
    for i in range(T):
        rest = np.unravel_index(int(best_idx[i]), shape[1:])
        other_gaps = tuple(int(g) for g in rest)
        choice.append((other_gaps, internal[(i,) + other_gaps]))

    state.vectors[anchor] = alpha
    for v in others:
        del state.vectors[v]
    state.blocks.remove(block)
    state.records.append(PeelRecord(block=block, anchor=anchor, others=others, choice=tuple(choice)))
    return state


def forest_blocks(G: OrientedGraph, U: Sequence[int]) -> List[VertexSet]:
    """Blocks of G - U in G's vertex ids (isolated vertices as one-vertex blocks)."""
    rest = remove(G, U)
    return [tuple(rest.new_to_old[v] for v in block) for block in blocks(rest.graph).blocks]


def _next_leaf(state: DPState) -> Tuple[VertexSet, int]:
    """First remaining block with at most one vertex in other blocks, and its anchor."""
    for block in sorted(state.blocks):
        shared = [
            v for v in block
            if any(v in other for other in state.blocks if other != block)
        ]
        if len(shared) <= 1:
            return block, (shared[0] if shared else block[0])
    raise NotLeafBlock("Forest of cliques has no leaf block")


def _run(G: OrientedGraph, U_order: UOrdering, forest: Sequence[VertexSet]) -> DPState:
    vertices = sorted({v for block in forest for v in block})
    state = DPState(
        graph=G,
        u_order=U_order,
        vectors={x: init_gap_vector(G, U_order, x).values for x in vertices},
        blocks=[tuple(b) for b in forest if len(b) > 1],
    )
    while state.blocks:
        block, anchor = _next_leaf(state)
        peel_block(state, block, anchor)
    return state


def reconstruct_order(state: DPState) -> Tuple[Dict[int, int], Tuple[int, ...]]:
    """
    Place every forest vertex in its chosen gap and order each gap.

    Representatives take their first best gap; peel records are replayed
    newest first so each anchor's gap is known before its block is expanded.
    Inside a gap, the internal orders chosen for the blocks form an acyclic
    precedence relation, resolved by a lexicographic topological sort.

    Returns:
        Tuple of (gap of each forest vertex, full ordering of G)
    """
    gap_of = {x: int(np.argmax(values)) for x, values in state.vectors.items()}
    precedence = nx.DiGraph()
    precedence.add_nodes_from(gap_of)

    for record in reversed(state.records):
        other_gaps, internal = record.choice[gap_of[record.anchor]]
        for v, g in zip(record.others, other_gaps):
            gap_of[v] = g
            precedence.add_node(v)
        for p, a in enumerate(internal):
            for b in internal[p + 1:]:
                if gap_of[a] == gap_of[b]:
                    precedence.add_edge(a, b)

    u_order = state.u_order.order
    order: List[int] = []
    for gap in range(state.u_order.gaps):
        members = precedence.subgraph([v for v, g in gap_of.items() if g == gap])
        order.extend(nx.lexicographical_topological_sort(members))
        if gap < len(u_order):
            order.append(u_order[gap])
    return gap_of, tuple(order)


def solve_for_ordering_detailed(
    G: OrientedGraph,
    U_order: UOrdering,
    forest: Sequence[VertexSet],
) -> DPResult:
    """
    Run the DP for one U-ordering and rebuild the ordering it certifies.

    Args:
        G: Graph
        U_order: Ordering of U
        forest: Blocks of G - U in G's ids

    Returns:
        DPResult whose order has exactly value forward arcs
    """
    state = _run(G, U_order, forest)
    value = U_order.Q + int(sum(int(values.max()) for values in state.vectors.values()))
    gap_of, order = reconstruct_order(state)
    return DPResult(value=value, u_order=U_order, gap_of=gap_of, records=state.records, order=order)


def solve_for_ordering(G: OrientedGraph, U_order: UOrdering, forest: Sequence[VertexSet]) -> int:
    """Q + sum over component representatives of their best gap value."""
    state = _run(G, U_order, forest)
    return U_order.Q + int(sum(int(values.max()) for values in state.vectors.values()))


def _ordering_value(args) -> int:
    G, order, forest = args
    return solve_for_ordering(G, make_u_ordering(G, order), forest)


def _best_ordering(G: OrientedGraph, U: Sequence[int], forest: Sequence[VertexSet], config: SolverConfig):
    """Value of every U-ordering (lexicographic), reduced to the first maximum."""
    orderings = list(permutations(sorted(U)))
    if config.jobs > 1 and len(orderings) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunk = max(1, len(orderings) // (4 * config.jobs))
            values = list(pool.map(_ordering_value, [(G, o, forest) for o in orderings], chunksize=chunk))
    else:
        values = [_ordering_value((G, o, forest)) for o in orderings]

    best = int(np.argmax(values))
    return orderings[best], values[best], len(orderings)


def solve(instance: Instance, config: SolverConfig = DEFAULT_CONFIG) -> SolveResult:
    """
    Decide ASAPT exactly.

    Runs decompose(); a YES certificate is returned with its lifted witness.
    Otherwise every ordering of U is evaluated by the block-peeling DP, the
    best one is rebuilt into a full ordering (whose forward count is a(G))
    and the threshold decides.

    Args:
        instance: Connected instance
        config: Solver configuration

    Returns:
        SolveResult
    """
    result = decompose(instance, config)
    if isinstance(result, YesCertificate):
        return SolveResult(
            decision=True,
            witness=result.witness,
            a_restricted=result.witness.forward_arcs,
            exact=False,
            certificate='reduction',
            trace=result.trace,
            U=result.trace.U,
        )

    G = instance.graph
    U = [G.vertex_of(label) for label in result.U]
    forest = forest_blocks(G, U)

    if config.verbose:
        print(f"DP over {len(U)}! U-orderings, {len(forest)} blocks in G - U")

    best_order, best_value, evaluated = _best_ordering(G, U, forest, config)
    detailed = solve_for_ordering_detailed(G, make_u_ordering(G, best_order), forest)
    forward = count_forward(G, detailed.order)
    if forward != detailed.value and config.verbose:
        print(f"Warning: rebuilt ordering has {forward} forward arcs, DP claimed {detailed.value}")

    witness = WitnessOrdering(order=detailed.order, forward_arcs=forward)
    decision = decide_threshold(G, instance.k, best_value)
    if config.verbose:
        print(f"a(G) = {best_value}, decision {'YES' if decision else 'NO'}")

    return SolveResult(
        decision=decision,
        witness=witness,
        a_restricted=best_value,
        exact=True,
        certificate='dp',
        trace=result.trace,
        U=result.U,
        orderings=evaluated,
    )
