"""
Reduction Engine

Detection and application of the five reduction rules, the ordering
combiner for a set S and its complement, trace recording with exact
parameter accounting, witness lifting, and the decomposition that either
certifies YES or returns the vertex set U whose removal leaves a forest of
cliques.

Rules (k is reduced by k_delta):
- R1 SmallClique:    two vertices hanging off x as a directed 3-cycle; delete them   (0)
- R2 BridgeTriangles: two triangles sharing c, only a and e attached; contract  (0)
- R3 Degree:         non-cut vertex with d+ != d-; delete it           (2|d+ - d-| - 1)
- R4 BigClique:      tournament S, |S| >= 4, G - S connected; delete S (2|S|-4 / 2|S|-7)
- R5 Triplet:        S inducing P3 in UN(G), G - S connected; delete S (1)

Vertices are tracked by their original labels throughout, so a trace can be
replayed against the input graph.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations, product
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .bounds_oracle import Instance, WitnessOrdering, count_forward
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (
    EmptySet,
    InstanceParseError,
    NotPermutation,
    PreconditionViolated,
    ReductionStalled,
    TraceMismatch,
)
from .graph_core import (
    OrientedGraph,
    VertexSet,
    blocks,
    build,
    components,
    cut_degrees,
    degrees,
    induced,
    is_clique,
    is_connected,
    is_directed_triangle,
    remove,
)
from .tournament_order import tournament_ordering


class Rule(Enum):
    R1_SmallClique = 1
    R2_BridgeTriangles = 2
    R3_Degree = 3
    R4_BigClique = 4
    R5_Triplet = 5


ONE_WAY_RULES = (Rule.R3_Degree, Rule.R4_BigClique, Rule.R5_Triplet)


@dataclass(frozen=True)
class RuleApplication:
    """
    One rule application in original-label space.

    Attributes:
        rule: Which rule fired
        removed: Labels of deleted vertices (R2 keeps the order b, c, d)
        added: Label of R2's new vertex, else empty
        k_delta: Amount k was reduced by
        lift_data: Rule-specific data for witness lifting
        before: Graph the rule was applied to
    """
    rule: Rule
    removed: Tuple[int, ...]
    added: Tuple[int, ...]
    k_delta: int
    lift_data: Dict[str, Any] = field(default_factory=dict, compare=False)
    before: Optional[OrientedGraph] = field(default=None, repr=False, compare=False)


@dataclass
class ReductionTrace:
    """
    Ordered rule applications from an initial instance.

    Attributes:
        steps: Rule applications in order
        initial: Instance the reduction started from
        final_graph: Graph after the last step
        final_k: initial.k minus the sum of k_delta
        U: Labels removed by the one-way rules R3/R4/R5, sorted
    """
    steps: List[RuleApplication]
    initial: Instance
    final_graph: OrientedGraph
    final_k: int
    U: VertexSet = ()

    @property
    def total_k_delta(self) -> int:
        return sum(step.k_delta for step in self.steps)


@dataclass(frozen=True)
class ForestReport:
    """The four structural properties of G - U, checked directly."""
    small_blocks: bool          # every block has at most three vertices
    triangles_directed: bool    # every 3-block is a directed 3-cycle
    one_pair_per_component: bool  # at most one 2-block per component
    one_isolated_vertex: bool   # at most one isolated vertex overall
    block_count: int
    component_count: int

    @property
    def holds(self) -> bool:
        return (
            self.small_blocks
            and self.triangles_directed
            and self.one_pair_per_component
            and self.one_isolated_vertex
        )


@dataclass
class YesCertificate:
    """The reduction drove k to zero or below; the witness is lifted to the input."""
    trace: ReductionTrace
    witness: WitnessOrdering


@dataclass
class Decomposition:
    """k stayed positive; G - U is a forest of cliques described by forest_report."""
    trace: ReductionTrace
    U: VertexSet
    forest_report: ForestReport


class Reduced(NamedTuple):
    graph: OrientedGraph
    k: int


# ---------------------------------------------------------------------------
# Rule 1

def detect_rule1(G: OrientedGraph) -> Optional[Tuple[int, VertexSet]]:
    """
    Find x and a 2-vertex component S of G - x with G[S + x] a directed 3-cycle.

    Returns:
        (x, S) with the smallest x, or None
    """
    for x in range(G.n):
        if len(G.neighbors(x)) < 2:
            continue
        for comp in components(G, [x]):
            if len(comp) == 2 and is_directed_triangle(G, x, comp[0], comp[1]):
                return x, comp
    return None


def _check_rule1(G: OrientedGraph, x: int, S: Sequence[int]) -> Tuple[int, int]:
    S = tuple(sorted(S))
    if len(S) != 2 or x in S:
        raise PreconditionViolated(f"Rule 1 needs two vertices other than x={x}, got {S}")
    a, b = S
    if not is_directed_triangle(G, x, a, b):
        raise PreconditionViolated(f"Rule 1: G[{x},{a},{b}] is not a directed 3-cycle")
    if not (G.neighbors(a) | G.neighbors(b)) <= {x, a, b}:
        raise PreconditionViolated(f"Rule 1: {S} is not a component of G - {x}")
    return a, b


def apply_rule1(G: OrientedGraph, x: int, S: Sequence[int]) -> OrientedGraph:
    """
    Delete the pendant triangle pair S; a(G) = a(G') + 2 and k is unchanged.

    Raises:
        PreconditionViolated: If (x, S) does not satisfy Rule 1
    """
    _check_rule1(G, x, S)
    return remove(G, S).graph


def _rule1_step(G: OrientedGraph, x: int, S: Sequence[int]) -> Tuple[OrientedGraph, RuleApplication]:
    a, b = _check_rule1(G, x, S)
    first, second = (a, b) if G.has_arc(x, a) else (b, a)
    step = RuleApplication(
        rule=Rule.R1_SmallClique,
        removed=tuple(sorted((G.labels[a], G.labels[b]))),
        added=(),
        k_delta=0,
        lift_data={'cycle': (G.labels[x], G.labels[first], G.labels[second])},
        before=G,
    )
    return apply_rule1(G, x, S), step


# ---------------------------------------------------------------------------
# Rule 2

def detect_rule2(G: OrientedGraph) -> Optional[Tuple[int, int, int, int, int]]:
    """
    Find two directed 3-cycles abc and cde sharing only c, with no other arcs
    among the five vertices, where only a and e have outside neighbours.

    Returns:
        (a, b, c, d, e) for the smallest c, or None
    """
    for c in range(G.n):
        hood = sorted(G.neighbors(c))
        if len(hood) != 4:
            continue
        first = hood[0]
        for partner in hood[1:]:
            pair1 = (first, partner)
            pair2 = tuple(v for v in hood if v not in pair1)
            hit = _match_rule2(G, c, pair1, pair2)
            if hit is not None:
                return hit
    return None


def _pick_inner(G: OrientedGraph, c: int, pair: Sequence[int]) -> Optional[Tuple[int, int]]:
    """Return (outer, inner) where inner has no neighbours beyond the triangle."""
    p, q = pair
    for inner, outer in ((p, q), (q, p)):
        if G.neighbors(inner) <= {p, q, c}:
            return outer, inner
    return None


def _match_rule2(G: OrientedGraph, c: int, pair1: Sequence[int], pair2: Sequence[int]):
    if not (is_directed_triangle(G, c, *pair1) and is_directed_triangle(G, c, *pair2)):
        return None
    if any(G.adjacent(p, q) for p in pair1 for q in pair2):
        return None
    side1 = _pick_inner(G, c, pair1)
    side2 = _pick_inner(G, c, pair2)
    if side1 is None or side2 is None:
        return None
    a, b = side1
    e, d = side2
    return a, b, c, d, e


def _check_rule2(G: OrientedGraph, a: int, b: int, c: int, d: int, e: int) -> None:
    five = {a, b, c, d, e}
    if len(five) != 5:
        raise PreconditionViolated(f"Rule 2 needs five distinct vertices, got {(a, b, c, d, e)}")
    if not (is_directed_triangle(G, a, b, c) and is_directed_triangle(G, c, d, e)):
        raise PreconditionViolated("Rule 2: G[a,b,c] and G[c,d,e] must be directed 3-cycles")
    if any(G.adjacent(p, q) for p in (a, b) for q in (d, e)):
        raise PreconditionViolated("Rule 2: G[a,b,c,d,e] has arcs beyond the two triangles")
    for inner in (b, c, d):
        if not G.neighbors(inner) <= five:
            raise PreconditionViolated(f"Rule 2: vertex {inner} has a neighbour outside the five")


def apply_rule2(
    G: OrientedGraph,
    a: int, b: int, c: int, d: int, e: int,
    new_label: Optional[int] = None,
) -> OrientedGraph:
    """
    Replace b, c, d by one vertex x forming the directed 3-cycle a -> x -> e -> a.

    Args:
        G: Graph
        a, b, c, d, e: Vertices as returned by detect_rule2
        new_label: Original-space label for x (default max label + 1)

    Returns:
        G' with n - 2 vertices and m - 3 arcs; x is the last vertex

    Raises:
        PreconditionViolated: If the five vertices do not satisfy Rule 2
    """
    _check_rule2(G, a, b, c, d, e)
    if new_label is None:
        new_label = max(G.labels) + 1

    rest = remove(G, (b, c, d))
    child = rest.graph
    x = child.n
    a2, e2 = rest.old_to_new[a], rest.old_to_new[e]
    arcs = list(child.arcs) + [(a2, x), (x, e2), (e2, a2)]
    return build(child.n + 1, arcs, labels=list(child.labels) + [new_label])


def _rule2_step(G: OrientedGraph, hit: Sequence[int], new_label: int) -> Tuple[OrientedGraph, RuleApplication]:
    a, b, c, d, e = hit
    reduced = apply_rule2(G, a, b, c, d, e, new_label=new_label)
    five = {a, b, c, d, e}
    inner_arcs = tuple(
        (G.labels[u], G.labels[v]) for u, v in G.arcs if u in five and v in five
    )
    step = RuleApplication(
        rule=Rule.R2_BridgeTriangles,
        removed=(G.labels[b], G.labels[c], G.labels[d]),
        added=(new_label,),
        k_delta=0,
        lift_data={
            'a': G.labels[a],
            'e': G.labels[e],
            'x': new_label,
            'inner_arcs': inner_arcs,
        },
        before=G,
    )
    return reduced, step


# ---------------------------------------------------------------------------
# Rule 3

def rule3_delta(G: OrientedGraph, x: int) -> int:
    out_deg, in_deg = degrees(G, x)
    return 2 * abs(out_deg - in_deg) - 1


def detect_rule3(G: OrientedGraph) -> Optional[int]:
    """
    Smallest non-cut vertex with d+(x) != d-(x), or None.
    """
    if G.n < 2:
        return None
    for x in range(G.n):
        out_deg, in_deg = degrees(G, x)
        if out_deg != in_deg and is_connected(G, [x]):
            return x
    return None


def apply_rule3(G: OrientedGraph, x: int, k: int) -> Reduced:
    """
    Delete an unbalanced non-cut vertex and reduce k by 2|d+ - d-| - 1.

    Raises:
        PreconditionViolated: If x is balanced or a cut vertex
    """
    out_deg, in_deg = degrees(G, x)
    if out_deg == in_deg:
        raise PreconditionViolated(f"Rule 3: vertex {x} is balanced ({out_deg},{in_deg})")
    if G.n < 2 or not is_connected(G, [x]):
        raise PreconditionViolated(f"Rule 3: G - {x} is not connected")
    return Reduced(remove(G, [x]).graph, k - rule3_delta(G, x))


# ---------------------------------------------------------------------------
# Rule 4

def rule4_delta(size: int) -> int:
    """2|S| - 4 for even |S|, 2|S| - 7 for odd |S|."""
    return 2 * size - 4 if size % 2 == 0 else 2 * size - 7


def _rule4_ok(G: OrientedGraph, S: Sequence[int], allow_empty: bool) -> bool:
    return (
        len(S) >= 4
        and is_clique(G, S)
        and is_connected(G, S, allow_empty=allow_empty)
    )


def _rule4_candidates(G: OrientedGraph) -> Iterable[VertexSet]:
    """Tournament components of G - v and of G - {x, y} for non-adjacent x, y, extended."""
    for v in range(G.n):
        for comp in components(G, [v]):
            if is_clique(G, comp):
                yield comp
                yield tuple(sorted(comp + (v,)))

    for x in range(G.n):
        for y in range(x + 1, G.n):
            if G.adjacent(x, y):
                continue
            for comp in components(G, [x, y]):
                if is_clique(G, comp):
                    yield comp
                    yield tuple(sorted(comp + (x,)))
                    yield tuple(sorted(comp + (y,)))


def detect_rule4(G: OrientedGraph, config: SolverConfig = DEFAULT_CONFIG) -> Optional[VertexSet]:
    """
    First qualifying tournament S (|S| >= 4, G - S connected) in scan order, or None.
    """
    seen = set()
    for S in _rule4_candidates(G):
        if S in seen:
            continue
        seen.add(S)
        if _rule4_ok(G, S, config.allow_empty_remainder):
            return S
    return None


def apply_rule4(G: OrientedGraph, S: Sequence[int], k: int, config: SolverConfig = DEFAULT_CONFIG) -> Reduced:
    """
    Delete a tournament S and reduce k by 2|S| - 4 (|S| even) or 2|S| - 7 (|S| odd).

    Raises:
        PreconditionViolated: If S is not a qualifying tournament
    """
    S = tuple(sorted(set(S)))
    if not _rule4_ok(G, S, config.allow_empty_remainder):
        raise PreconditionViolated(f"Rule 4 does not apply to {S}")
    return Reduced(remove(G, S).graph, k - rule4_delta(len(S)))


# ---------------------------------------------------------------------------
# Rule 5

def _is_p3(G: OrientedGraph, S: Sequence[int]) -> bool:
    a, b, c = S
    edges = int(G.adjacent(a, b)) + int(G.adjacent(b, c)) + int(G.adjacent(a, c))
    return edges == 2


def detect_rule5(G: OrientedGraph, config: SolverConfig = DEFAULT_CONFIG) -> Optional[VertexSet]:
    """
    Lexicographically first triple inducing P3 in UN(G) with G - S connected, or None.
    """
    triples = set()
    for middle in range(G.n):
        hood = sorted(G.neighbors(middle))
        for i, p in enumerate(hood):
            for q in hood[i + 1:]:
                if not G.adjacent(p, q):
                    triples.add(tuple(sorted((p, middle, q))))

    for S in sorted(triples):
        if is_connected(G, S, allow_empty=config.allow_empty_remainder):
            return S
    return None


def apply_rule5(G: OrientedGraph, S: Sequence[int], k: int, config: SolverConfig = DEFAULT_CONFIG) -> Reduced:
    """
    Delete a P3 triple and reduce k by 1.

    Raises:
        PreconditionViolated: If S is not a P3 or G - S is disconnected
    """
    S = tuple(sorted(set(S)))
    if len(S) != 3 or not _is_p3(G, S):
        raise PreconditionViolated(f"Rule 5: {S} does not induce P3")
    if not is_connected(G, S, allow_empty=config.allow_empty_remainder):
        raise PreconditionViolated(f"Rule 5: G - {S} is not connected")
    return Reduced(remove(G, S).graph, k - 1)


def _best_local_order(G: OrientedGraph, S: Sequence[int]) -> Tuple[int, ...]:
    """Ordering of S (as labels) maximizing forward arcs inside G[S]."""
    sub = induced(G, S).graph
    best, best_count = None, -1
    for perm in permutations(range(sub.n)):
        forward = count_forward(sub, perm)
        if forward > best_count:
            best, best_count = perm, forward
    return tuple(sub.labels[v] for v in best)


# ---------------------------------------------------------------------------
# Combiner and lifting

def combine(
    order_rest: WitnessOrdering,
    order_S: WitnessOrdering,
    G: OrientedGraph,
    S: Iterable[int],
) -> WitnessOrdering:
    """
    Join orderings of G - S and G[S] so every arc of the heavier cut direction is forward.

    If d+(S) >= d-(S) the S part goes first, else last. Concatenation keeps
    all part-internal forward arcs, so the result has exactly
    order_S.forward + order_rest.forward + max(d+(S), d-(S)) forward arcs.

    Args:
        order_rest: Ordering in the dense ids of G - S
        order_S: Ordering in the dense ids of G[S]
        G: Whole graph
        S: Nonempty proper vertex subset of G

    Returns:
        WitnessOrdering on G
    """
    members = sorted(set(S))
    if not members:
        raise EmptySet("combine() needs a nonempty S")
    leaving, entering = cut_degrees(G, members)

    rest_ids = remove(G, members).new_to_old
    s_ids = induced(G, members).new_to_old
    s_part = [s_ids[v] for v in order_S.order]
    rest_part = [rest_ids[v] for v in order_rest.order]

    order = s_part + rest_part if leaving >= entering else rest_part + s_part
    return WitnessOrdering(order=tuple(order), forward_arcs=count_forward(G, order))


def _to_labels(G: OrientedGraph, witness: WitnessOrdering) -> List[int]:
    return [G.labels[v] for v in witness.order]


def _from_labels(G: OrientedGraph, labels: Sequence[int]) -> WitnessOrdering:
    try:
        order = tuple(G.vertex_of(label) for label in labels)
        return WitnessOrdering(order=order, forward_arcs=count_forward(G, order))
    except (KeyError, NotPermutation) as exc:
        raise TraceMismatch(f"Ordering does not fit graph with n={G.n}: {exc}") from exc


def _lift_two_triangles(step: RuleApplication, seq: List[int]) -> List[int]:
    """Replace R2's contracted vertex by b, c, d, realizing four of the six inner arcs."""
    data = step.lift_data
    a, e, x = data['a'], data['e'], data['x']
    b, c, d = step.removed
    inner = data['inner_arcs']

    seq = [label for label in seq if label != x]
    i, j = sorted((seq.index(a), seq.index(e)))
    left, right = seq[i], seq[j]

    best_local, best_score = None, -1
    for regions in product(range(3), repeat=3):
        groups: List[List[int]] = [[], [], []]
        for label, region in zip((b, c, d), regions):
            groups[region].append(label)
        for g0, g1, g2 in product(*(permutations(g) for g in groups)):
            local = list(g0) + [left] + list(g1) + [right] + list(g2)
            pos = {label: p for p, label in enumerate(local)}
            score = sum(1 for u, v in inner if pos[u] < pos[v])
            if score > best_score:
                best_local, best_score = (g0, g1, g2), score

    g0, g1, g2 = best_local
    return seq[:i] + list(g0) + seq[i:j] + list(g1) + [right] + list(g2) + seq[j + 1:]


def _lift_step(step: RuleApplication, after: OrientedGraph, witness: WitnessOrdering) -> WitnessOrdering:
    before = step.before
    if before is None:
        raise TraceMismatch(f"{step.rule.name} step carries no source graph")

    if step.rule == Rule.R1_SmallClique:
        x, first, second = step.lift_data['cycle']
        seq = _to_labels(after, witness)
        if x not in seq:
            raise TraceMismatch(f"Anchor {x} of R1 step missing from ordering")
        pos = seq.index(x) + 1
        return _from_labels(before, seq[:pos] + [first, second] + seq[pos:])

    if step.rule == Rule.R2_BridgeTriangles:
        seq = _to_labels(after, witness)
        if step.lift_data['x'] not in seq:
            raise TraceMismatch("Contracted vertex of R2 step missing from ordering")
        return _from_labels(before, _lift_two_triangles(step, seq))

    S = [before.vertex_of(label) for label in step.removed]
    part = induced(before, S).graph
    order_S = _from_labels(part, step.lift_data['order'])
    return combine(witness, order_S, before, S)


def lift_witness(trace: ReductionTrace, base: WitnessOrdering) -> WitnessOrdering:
    """
    Replay a trace backwards to turn a witness on trace.final_graph into one on the input.

    Every one-way step is undone with combine() (R3 singleton, R4 tournament
    ordering, R5 two-arc P3 ordering); R1 re-inserts its pair right after x
    in cycle order; R2 re-inserts b, c, d around a and e.

    Raises:
        TraceMismatch: If base or an intermediate ordering does not fit
    """
    final = trace.final_graph
    if len(base.order) != final.n or sorted(base.order) != list(range(final.n)):
        raise TraceMismatch(f"Base ordering is not a permutation of the final graph (n={final.n})")

    witness = WitnessOrdering(order=tuple(base.order), forward_arcs=count_forward(final, base.order))
    after = final
    for step in reversed(trace.steps):
        witness = _lift_step(step, after, witness)
        after = step.before
    return witness


def trivial_witness(G: OrientedGraph) -> WitnessOrdering:
    """Identity ordering (the natural base once a trace ends at one vertex)."""
    order = tuple(range(G.n))
    return WitnessOrdering(order=order, forward_arcs=count_forward(G, order))


# ---------------------------------------------------------------------------
# Drivers

def _one_way_step(G: OrientedGraph, k: int, config: SolverConfig):
    """Try R3, R1, R4, R5 in that order; return (graph, k, step) or None."""
    x = detect_rule3(G)
    if x is not None:
        reduced = apply_rule3(G, x, k)
        out_deg, in_deg = degrees(G, x)
        step = RuleApplication(
            rule=Rule.R3_Degree,
            removed=(G.labels[x],),
            added=(),
            k_delta=k - reduced.k,
            lift_data={'order': (G.labels[x],), 'sign': 1 if out_deg > in_deg else -1},
            before=G,
        )
        return reduced.graph, reduced.k, step

    hit1 = detect_rule1(G)
    if hit1 is not None:
        graph, step = _rule1_step(G, *hit1)
        return graph, k, step

    S = detect_rule4(G, config)
    if S is not None:
        reduced = apply_rule4(G, S, k, config)
        order = tournament_ordering(induced(G, S).graph)
        step = RuleApplication(
            rule=Rule.R4_BigClique,
            removed=tuple(G.labels[v] for v in S),
            added=(),
            k_delta=k - reduced.k,
            lift_data={'order': order.labelled(induced(G, S).graph)},
            before=G,
        )
        return reduced.graph, reduced.k, step

    S = detect_rule5(G, config)
    if S is not None:
        reduced = apply_rule5(G, S, k, config)
        step = RuleApplication(
            rule=Rule.R5_Triplet,
            removed=tuple(G.labels[v] for v in S),
            added=(),
            k_delta=1,
            lift_data={'order': _best_local_order(G, S)},
            before=G,
        )
        return reduced.graph, reduced.k, step

    return None


def check_forest_properties(G: OrientedGraph, U: Iterable[int]) -> ForestReport:
    """
    Check the four forest-of-cliques properties of G - U.

    Args:
        G: Graph
        U: Dense vertex ids of G to delete
    """
    forest = remove(G, U).graph
    decomposition = blocks(forest)
    comp_of = {}
    comps = components(forest)
    for idx, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = idx

    pairs_per_comp = [0] * len(comps)
    isolated = 0
    small = True
    directed = True
    for block in decomposition.blocks:
        if len(block) > 3:
            small = False
        elif len(block) == 3 and not is_directed_triangle(forest, *block):
            directed = False
        elif len(block) == 2:
            pairs_per_comp[comp_of[block[0]]] += 1
        elif len(block) == 1:
            isolated += 1

    return ForestReport(
        small_blocks=small,
        triangles_directed=directed,
        one_pair_per_component=all(count <= 1 for count in pairs_per_comp),
        one_isolated_vertex=isolated <= 1,
        block_count=len(decomposition.blocks),
        component_count=len(comps),
    )


def decompose(
    instance: Instance,
    config: SolverConfig = DEFAULT_CONFIG,
) -> Union[YesCertificate, Decomposition]:
    """
    Apply Rules 1, 3, 4, 5 exhaustively (priority R3, R1, R4, R5).

    Some rule applies to every connected graph with an arc, so the graph is
    reduced to a single vertex (or emptied when empty remainders are
    allowed). If k ends at or below zero the instance is YES and the trivial
    ordering of the final graph is lifted back into a witness. Otherwise the
    vertices removed by R3/R4/R5 form U and G - U is a forest of cliques.

    Args:
        instance: Connected instance
        config: Solver configuration

    Returns:
        YesCertificate or Decomposition

    Raises:
        ReductionStalled: If no rule applies to a graph with two or more vertices
    """
    G = instance.graph
    k = instance.k
    steps: List[RuleApplication] = []
    U: List[int] = []

    while G.n > 1:
        result = _one_way_step(G, k, config)
        if result is None:
            raise ReductionStalled(f"No rule applies to a connected graph with n={G.n}, m={G.m}")
        G_next, k_next, step = result
        if config.verbose:
            print(f"[{step.rule.name}] removed {list(step.removed)}, k {k} -> {k_next}")
        if step.rule in ONE_WAY_RULES:
            U.extend(step.removed)
        steps.append(step)
        G, k = G_next, k_next

    trace = ReductionTrace(
        steps=steps,
        initial=instance,
        final_graph=G,
        final_k=k,
        U=tuple(sorted(U)),
    )

    if k <= 0:
        witness = lift_witness(trace, trivial_witness(G))
        if config.verbose:
            print(f"YES after {len(steps)} steps (final k={k}), witness forward={witness.forward_arcs}")
        return YesCertificate(trace=trace, witness=witness)

    original = instance.graph
    U_dense = [original.vertex_of(label) for label in trace.U]
    report = check_forest_properties(original, U_dense)
    if config.verbose:
        print(f"Decomposition after {len(steps)} steps: |U|={len(U_dense)}, final k={k}")
        if not report.holds:
            print("Warning: G - U violates the forest-of-cliques properties")
    return Decomposition(trace=trace, U=trace.U, forest_report=report)


def normalize_two_way(instance: Instance, verbose: bool = False) -> ReductionTrace:
    """
    Apply Rules 1 and 2 exhaustively; k is unchanged.

    R2's new vertices get fresh labels above every label of the input.

    Returns:
        ReductionTrace whose final_graph is reduced by Rules 1 and 2
    """
    G = instance.graph
    next_label = (max(G.labels) + 1) if G.n else 0
    steps: List[RuleApplication] = []

    while True:
        hit1 = detect_rule1(G)
        if hit1 is not None:
            G_next, step = _rule1_step(G, *hit1)
        else:
            hit2 = detect_rule2(G)
            if hit2 is None:
                break
            G_next, step = _rule2_step(G, hit2, next_label)
            next_label += 1
        if verbose:
            print(f"[{step.rule.name}] removed {list(step.removed)} added {list(step.added)}")
        steps.append(step)
        G = G_next

    return ReductionTrace(steps=steps, initial=instance, final_graph=G, final_k=instance.k, U=())


# ---------------------------------------------------------------------------
# Trace serialization and replay

def _ids(values: Sequence[int]) -> str:
    return ','.join(str(v) for v in values)


def format_trace_line(step: RuleApplication) -> str:
    """`RULE removed=<ids> added=<ids> kdelta=<int>`."""
    return f"{step.rule.name} removed={_ids(step.removed)} added={_ids(step.added)} kdelta={step.k_delta}"


def parse_trace_line(line: str, line_no: Optional[int] = None) -> Tuple[Rule, Tuple[int, ...], Tuple[int, ...], int]:
    """
    Inverse of format_trace_line().

    Raises:
        InstanceParseError: On malformed lines
    """
    parts = line.split()
    if len(parts) != 4:
        raise InstanceParseError(f"Trace line needs 4 fields: {line!r}", line_no)
    try:
        rule = Rule[parts[0]]
    except KeyError:
        raise InstanceParseError(f"Unknown rule {parts[0]!r}", line_no) from None

    fields = {}
    for part in parts[1:]:
        key, _, value = part.partition('=')
        fields[key] = value
    try:
        removed = tuple(int(v) for v in fields['removed'].split(',') if v)
        added = tuple(int(v) for v in fields['added'].split(',') if v)
        k_delta = int(fields['kdelta'])
    except (KeyError, ValueError):
        raise InstanceParseError(f"Malformed trace fields: {line!r}", line_no) from None
    return rule, removed, added, k_delta


def replay_trace_k(
    G: OrientedGraph,
    k: int,
    steps: Sequence[Tuple[Rule, Tuple[int, ...], Tuple[int, ...], int]],
    config: SolverConfig = DEFAULT_CONFIG,
) -> Tuple[bool, int, str]:
    """
    Recompute every k_delta by replaying the removals on the input graph.

    Each step is re-applied through its rule, so a step whose precondition
    does not hold on the current graph makes the trace inconsistent.

    Args:
        G: Input graph (labels are the ids used in the trace)
        k: Input parameter
        steps: Parsed trace lines
        config: Solver configuration (remainder-connectivity convention)

    Returns:
        Tuple of (consistent, final_k, message)
    """
    current = G
    for idx, (rule, removed, added, k_delta) in enumerate(steps, start=1):
        try:
            dense = [current.vertex_of(label) for label in removed]
        except KeyError:
            return False, k, f"step {idx}: removed vertex no longer present"
        if len(set(dense)) != len(dense) or not dense:
            return False, k, f"step {idx}: bad removed set {removed}"

        if rule in (Rule.R1_SmallClique, Rule.R2_BridgeTriangles):
            expected = 0
        elif rule == Rule.R3_Degree:
            if len(dense) != 1:
                return False, k, f"step {idx}: R3 removes exactly one vertex"
            expected = rule3_delta(current, dense[0])
        elif rule == Rule.R4_BigClique:
            expected = rule4_delta(len(dense))
        else:
            expected = 1

        if k_delta != expected:
            return False, k, f"step {idx}: {rule.name} kdelta={k_delta}, expected {expected}"

        try:
            current = _replay_step(current, rule, dense, added, k, config)
        except PreconditionViolated as exc:
            return False, k, f"step {idx}: {exc}"
        k -= k_delta

    return True, k, 'ok'


def _outside_neighbor(G: OrientedGraph, v: int, inside: Sequence[int], rule: Rule) -> int:
    outside = G.neighbors(v) - set(inside)
    if len(outside) != 1:
        raise PreconditionViolated(f"{rule.name}: vertex {G.labels[v]} has {len(outside)} outside neighbours")
    return next(iter(outside))


def _replay_step(
    G: OrientedGraph,
    rule: Rule,
    dense: Sequence[int],
    added: Tuple[int, ...],
    k: int,
    config: SolverConfig,
) -> OrientedGraph:
    """Re-apply one trace step; raises PreconditionViolated when the rule does not fire."""
    if rule == Rule.R1_SmallClique:
        if len(dense) != 2:
            raise PreconditionViolated("R1 removes exactly two vertices")
        x = _outside_neighbor(G, dense[0], dense, rule)
        return apply_rule1(G, x, dense)
    if rule == Rule.R2_BridgeTriangles:
        if len(dense) != 3 or len(added) != 1:
            raise PreconditionViolated("R2 removes three vertices and adds one")
        b, c, d = dense
        a = _outside_neighbor(G, b, dense, rule)
        e = _outside_neighbor(G, d, dense, rule)
        return apply_rule2(G, a, b, c, d, e, new_label=added[0])
    if rule == Rule.R3_Degree:
        return apply_rule3(G, dense[0], k).graph
    if rule == Rule.R4_BigClique:
        return apply_rule4(G, dense, k, config).graph
    return apply_rule5(G, dense, k, config).graph
