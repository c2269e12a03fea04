"""
Instance Generators

Seeded, reproducible oriented graphs for tests and benchmarks: the tight
family H_t, tournaments, random connected graphs, forests of cliques with
ground-truth block profiles, and exhaustive small-n enumerators.

All randomness comes from SplitMix64 so the same (parameters, seed) give the
same arc list on every platform:

    state = (state + 0x9E3779B97F4A7C15) mod 2^64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    return z ^ (z >> 31)
"""

from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import InvalidPlan
from .graph_core import OrientedGraph, build, is_connected
from .kernelizer import BlockProfile, profile_from_blocks

MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix generator."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def bit(self) -> int:
        return self.next_u64() >> 63

    def below(self, bound: int) -> int:
        """Integer in [0, bound) (modulo reduction)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return self.next_u64() % bound

    def random(self) -> float:
        """Float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / float(1 << 53)


def _orient(rng: SplitMix64, u: int, v: int) -> Tuple[int, int]:
    return (u, v) if rng.bit() else (v, u)


def gen_Ht(t: int) -> OrientedGraph:
    """
    Path x1 -> x2 -> ... -> x_{2t+1} plus back arcs x3 -> x1, x5 -> x3, ...

    Vertex x_i has id i - 1; n = 2t + 1, m = 3t and a(H_t) = 2t.
    """
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    n = 2 * t + 1
    arcs = [(i, i + 1) for i in range(n - 1)]
    arcs += [(2 * s, 2 * s - 2) for s in range(1, t + 1)]
    return build(n, arcs)


def gen_transitive_tournament(n: int) -> OrientedGraph:
    """Arcs i -> j for every i < j."""
    return build(n, list(combinations(range(n), 2)))


def gen_tournament(n: int, seed: int) -> OrientedGraph:
    """Random tournament; pairs are visited in lexicographic order, one bit each."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = SplitMix64(seed)
    return build(n, [_orient(rng, u, v) for u, v in combinations(range(n), 2)])


def gen_connected_oriented(n: int, arc_density: float, seed: int) -> OrientedGraph:
    """
    Random connected oriented graph.

    A random spanning tree (vertex v attaches to a uniform earlier vertex)
    comes first, then every other pair gets an arc with probability
    arc_density. Each edge is oriented by one random bit.

    Args:
        n: Vertex count (>= 1)
        arc_density: Probability of each non-tree pair, in [0, 1]
        seed: PRNG seed
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0.0 <= arc_density <= 1.0:
        raise ValueError(f"arc_density must be in [0, 1], got {arc_density}")

    rng = SplitMix64(seed)
    tree = {(rng.below(v), v) for v in range(1, n)}
    arcs = [_orient(rng, u, v) for u, v in sorted(tree)]
    for u, v in combinations(range(n), 2):
        if (u, v) in tree:
            continue
        if rng.random() < arc_density:
            arcs.append(_orient(rng, u, v))
    return build(n, arcs)


def gen_forest_of_cliques(
    block_sizes: Sequence[int],
    attach: Sequence[Optional[int]],
    seed: int,
    cyclic: bool = True,
    strict: bool = True,
) -> Tuple[OrientedGraph, BlockProfile]:
    """
    Glue cliques of size 1-3 into a forest following a plan.

    Block i either starts a new component (attach[i] is None) or shares the
    existing vertex attach[i]; its other vertices get the next free ids.

    Args:
        block_sizes: Size of each block, each in {1, 2, 3}
        attach: Existing vertex to glue each block to, or None
        seed: PRNG seed for orientations
        cyclic: Orient 3-blocks as directed 3-cycles (else random)
        strict: Enforce at most one 2-block per component and at most one
                isolated vertex overall

    Returns:
        Tuple of (graph, ground-truth BlockProfile)

    Raises:
        InvalidPlan: On a malformed or (in strict mode) non-conforming plan
    """
    if len(block_sizes) != len(attach):
        raise InvalidPlan(f"{len(block_sizes)} block sizes but {len(attach)} attachments")

    rng = SplitMix64(seed)
    n = 0
    arcs: List[Tuple[int, int]] = []
    plan_blocks: List[Tuple[int, ...]] = []
    component_of: List[int] = []
    pairs_in: List[int] = []
    singletons = set()

    for idx, (size, anchor) in enumerate(zip(block_sizes, attach)):
        if size not in (1, 2, 3):
            raise InvalidPlan(f"Block {idx} has size {size}, expected 1, 2 or 3")
        if anchor is None:
            comp = len(pairs_in)
            pairs_in.append(0)
            members = list(range(n, n + size))
        else:
            if size == 1:
                raise InvalidPlan(f"Block {idx}: a one-vertex block cannot be attached")
            if not 0 <= anchor < n:
                raise InvalidPlan(f"Block {idx} attaches to unknown vertex {anchor}")
            if anchor in singletons:
                raise InvalidPlan(f"Block {idx} attaches to isolated vertex {anchor}")
            comp = component_of[anchor]
            members = [anchor] + list(range(n, n + size - 1))

        new_count = len(members) - (0 if anchor is None else 1)
        component_of.extend([comp] * new_count)
        n += new_count

        if size == 1:
            singletons.add(members[0])
            if strict and len(singletons) > 1:
                raise InvalidPlan("More than one isolated vertex")
        elif size == 2:
            pairs_in[comp] += 1
            if strict and pairs_in[comp] > 1:
                raise InvalidPlan(f"Component {comp} has more than one 2-block")
            arcs.append(_orient(rng, members[0], members[1]))
        else:
            a, b, c = members
            if cyclic:
                arcs.extend(_cycle_arcs(rng, a, b, c))
            else:
                arcs.extend(_orient(rng, u, v) for u, v in ((a, b), (b, c), (a, c)))
        plan_blocks.append(tuple(sorted(members)))

    return build(n, arcs), profile_from_blocks(plan_blocks)


def gen_random_forest_plan(
    n_blocks: int,
    seed: int,
    strict: bool = True,
    new_component_rate: float = 0.2,
) -> Tuple[List[int], List[Optional[int]]]:
    """
    Random plan for gen_forest_of_cliques.

    Mostly 3-blocks glued to uniformly chosen earlier vertices; 2-blocks and
    the isolated vertex appear only where strict mode still allows them.

    Returns:
        Tuple of (block_sizes, attach)
    """
    rng = SplitMix64(seed)
    sizes: List[int] = []
    attach: List[Optional[int]] = []
    component_of: List[int] = []
    has_pair: List[bool] = []
    attachable: List[int] = []
    have_singleton = False

    for idx in range(n_blocks):
        if idx == 0 or not attachable or rng.random() < new_component_rate:
            choices = [3, 2] + ([] if (strict and have_singleton) else [1])
            size = choices[rng.below(len(choices))]
            comp = len(has_pair)
            has_pair.append(size == 2)
            start = len(component_of)
            component_of.extend([comp] * size)
            if size == 1:
                have_singleton = True
            else:
                attachable.extend(range(start, start + size))
            sizes.append(size)
            attach.append(None)
            continue

        anchor = attachable[rng.below(len(attachable))]
        comp = component_of[anchor]
        choices = [3] + ([] if (strict and has_pair[comp]) else [2])
        size = choices[rng.below(len(choices))]
        if size == 2:
            has_pair[comp] = True
        start = len(component_of)
        component_of.extend([comp] * (size - 1))
        attachable.extend(range(start, start + size - 1))
        sizes.append(size)
        attach.append(anchor)

    return sizes, attach


def _cycle_arcs(rng: SplitMix64, a: int, b: int, c: int) -> List[Tuple[int, int]]:
    cycle = [(a, b), (b, c), (c, a)]
    return cycle if rng.bit() else [(v, u) for u, v in cycle]


def gen_rule1_fixture(n: int, arc_density: float, seed: int) -> Tuple[OrientedGraph, Tuple[int, Tuple[int, int]]]:
    """
    Random connected graph on n - 2 vertices with a pendant directed 3-cycle.

    The cycle runs through a random host vertex x and the two new vertices
    n - 2 and n - 1, so (x, (n-2, n-1)) is a Rule 1 application.

    Returns:
        Tuple of (graph, (x, S))
    """
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    rng = SplitMix64(seed)
    host = gen_connected_oriented(n - 2, arc_density, rng.next_u64())
    x = rng.below(n - 2)
    arcs = list(host.arcs) + _cycle_arcs(rng, x, n - 2, n - 1)
    return build(n, arcs), (x, (n - 2, n - 1))


def gen_rule2_fixture(
    n: int,
    arc_density: float,
    seed: int,
    attempts: int = 50,
) -> Optional[Tuple[OrientedGraph, Tuple[int, int, int, int, int]]]:
    """
    Random connected graph on n - 3 vertices with two directed 3-cycles
    a-b-c and c-d-e hung between two non-adjacent host vertices a and e.

    Hosts are redrawn until a non-adjacent pair exists.

    Returns:
        Tuple of (graph, (a, b, c, d, e)), or None if every attempt drew
        a host without a non-adjacent pair
    """
    if n < 5:
        raise ValueError(f"n must be at least 5, got {n}")
    rng = SplitMix64(seed)
    h = n - 3
    for _ in range(attempts):
        host = gen_connected_oriented(h, arc_density, rng.next_u64())
        free = [(u, v) for u, v in combinations(range(h), 2) if not host.adjacent(u, v)]
        if not free:
            continue
        a, e = free[rng.below(len(free))]
        b, c, d = h, h + 1, h + 2
        arcs = list(host.arcs) + _cycle_arcs(rng, a, b, c) + _cycle_arcs(rng, c, d, e)
        return build(n, arcs), (a, b, c, d, e)
    return None


def enumerate_tournaments(n: int) -> Iterator[OrientedGraph]:
    """All 2^C(n,2) labelled tournaments on n vertices."""
    pairs = list(combinations(range(n), 2))
    for bits in product((0, 1), repeat=len(pairs)):
        yield build(n, [(u, v) if b else (v, u) for (u, v), b in zip(pairs, bits)])


def enumerate_connected_oriented(n: int) -> Iterator[OrientedGraph]:
    """
    Every connected labelled oriented graph on n vertices.

    Each pair is absent, forward or backward (3^C(n,2) arc sets); the
    disconnected ones are skipped.
    """
    pairs = list(combinations(range(n), 2))
    for states in product((0, 1, 2), repeat=len(pairs)):
        arcs = []
        for (u, v), state in zip(pairs, states):
            if state == 1:
                arcs.append((u, v))
            elif state == 2:
                arcs.append((v, u))
        G = build(n, arcs)
        if is_connected(G):
            yield G
