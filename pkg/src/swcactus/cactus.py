"""Stem/cycle covers built from independent edge sets.

An independent edge set (distinct heads, color-distinct shared tails) gives
every chosen state exactly one incoming edge, so its edges organize into
three kinds of pieces:

* stems: trees of edges grown out of input-rooted edges,
* cycle groups: components in which every vertex has an incoming edge, which
  forces exactly one cycle plus outgoing branches,
* rootless trees: components with one vertex short of an edge and no way to
  anchor them, which are dropped.

A cover retains stems plus those cycle groups whose vertices are all
input-reachable.  The covered states lower-bound the generic dimension of
the controllable subspace; the walk machinery at the bottom of this module
turns a cover into concrete input-to-state walks whose layered-graph paths
can be made vertex-disjoint, which is the shape of that bound's witness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .mdg import mdg_path_vertices, walks_provably_disjoint
from .model import ModelError
from .unigraph import (
    ColoredEdge,
    InputStateWalk,
    InputVertex,
    StateVertex,
    UnionGraph,
    edge_sort_key,
    max_independent_edges,
    reachable_states,
    restrict_to_color,
)

DEFAULT_MAX_LOOPS = 3
DEFAULT_LENGTH_CAP = 32


@dataclass(frozen=True)
class Decomposition:
    """Partition of an independent edge set into stems, cycle groups, drops."""

    stems: tuple[ColoredEdge, ...]
    cycle_groups: tuple[tuple[ColoredEdge, ...], ...]
    dropped: tuple[ColoredEdge, ...]

    @property
    def retained(self) -> tuple[ColoredEdge, ...]:
        group_edges = [e for group in self.cycle_groups for e in group]
        return tuple(sorted((*self.stems, *group_edges), key=edge_sort_key))

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(e.head for e in self.retained)


def _check_independent(edges: tuple[ColoredEdge, ...]) -> None:
    heads = [e.head for e in edges]
    if len(set(heads)) != len(heads):
        raise ModelError("edge set is not independent: repeated head")
    tails = [(e.tail, e.color) for e in edges]
    if len(set(tails)) != len(tails):
        raise ModelError("edge set is not independent: repeated tail and color")


def decompose(edges, reachable: frozenset[int]) -> Decomposition:
    """Split an independent edge set into its cover pieces.

    Stems absorb every edge whose tail is a stem head, starting from the
    input-rooted edges; a cycle can never be absorbed because its entry
    vertex would need a second incoming edge.  Remaining components keep
    their vertex count in edges (cycle group) or fall one short (rootless,
    dropped); cycle groups with any unreachable vertex are dropped too,
    since no walk from an input could ever wind through them.
    """
    edges = tuple(sorted(edges, key=edge_sort_key))
    _check_independent(edges)

    stems: list[ColoredEdge] = []
    by_state_tail: dict[int, list[ColoredEdge]] = {}
    for e in edges:
        if isinstance(e.tail, StateVertex):
            by_state_tail.setdefault(e.tail.index, []).append(e)
    absorbed: set[ColoredEdge] = set()
    frontier: deque[int] = deque()
    for e in edges:
        if isinstance(e.tail, InputVertex):
            stems.append(e)
            absorbed.add(e)
            frontier.append(e.head)
    while frontier:
        v = frontier.popleft()
        for e in by_state_tail.get(v, ()):
            if e not in absorbed:
                absorbed.add(e)
                stems.append(e)
                frontier.append(e.head)

    remainder = [e for e in edges if e not in absorbed]
    cycle_groups: list[tuple[ColoredEdge, ...]] = []
    dropped: list[ColoredEdge] = []
    for comp in _weak_components(remainder):
        verts = {e.head for e in comp} | {e.tail.index for e in comp}
        assert len(comp) in (len(verts) - 1, len(verts))
        if len(comp) == len(verts) and verts <= reachable:
            cycle_groups.append(comp)
        else:
            dropped.extend(comp)

    return Decomposition(
        stems=tuple(sorted(stems, key=edge_sort_key)),
        cycle_groups=tuple(sorted(cycle_groups,
                                  key=lambda grp: edge_sort_key(grp[0]))),
        dropped=tuple(sorted(dropped, key=edge_sort_key)),
    )


def _weak_components(edges) -> list[tuple[ColoredEdge, ...]]:
    # remainder edges have state tails only; group by shared endpoints
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        for v in (e.tail.index, e.head):
            parent.setdefault(v, v)
        a, b = find(e.tail.index), find(e.head)
        if a != b:
            parent[max(a, b)] = min(a, b)

    groups: dict[int, list[ColoredEdge]] = {}
    for e in edges:
        groups.setdefault(find(e.head), []).append(e)
    return [tuple(sorted(groups[root], key=edge_sort_key))
            for root in sorted(groups)]


def component_cycle(group) -> tuple[ColoredEdge, ...]:
    """The unique cycle of a cycle group, forward order, min vertex first."""
    pred = {e.head: e for e in group}
    if len(pred) != len(tuple(group)):
        raise ModelError("cycle group has a repeated head")
    start = min(pred)
    seen: dict[int, int] = {}
    v = start
    while v not in seen:
        seen[v] = len(seen)
        if v not in pred:
            raise ModelError(f"no cycle: vertex x{v + 1} has no incoming edge")
        v = pred[v].tail.index
    backward = []
    w = v
    while True:
        backward.append(pred[w])
        w = pred[w].tail.index
        if w == v:
            break
    cycle = tuple(reversed(backward))
    low = min(range(len(cycle)), key=lambda i: cycle[i].tail.index)
    return cycle[low:] + cycle[:low]


@dataclass(frozen=True)
class CactusCover:
    """A dropped-edge-free decomposition reached by the cover iteration.

    ``restricted_color`` is None when all colors were available and the
    color index when the cover was built inside one subsystem's subgraph.
    """

    decomposition: Decomposition
    restricted_color: int | None

    @property
    def covered(self) -> frozenset[int]:
        return self.decomposition.covered


def _cover_fixpoint(g: UnionGraph) -> Decomposition:
    """Iterate matching and decomposition until nothing is dropped.

    Dropped edges show their heads cannot be covered by the current
    selection; banning those heads and re-matching lets the matching spend
    its edges elsewhere.  The allowed set shrinks every round, so this
    terminates.
    """
    reachable = reachable_states(g)
    allowed = set(reachable)
    while True:
        edges = max_independent_edges(g, allowed_heads=allowed)
        decomp = decompose(edges, reachable)
        if not decomp.dropped:
            return decomp
        allowed -= {e.head for e in decomp.dropped}


def best_cactus_cover(g: UnionGraph) -> CactusCover:
    """Largest cover found across the all-color and per-color iterations.

    The all-color iteration can talk itself into a smaller cover than a
    single subsystem would reach alone, because a larger matching is not
    always a more coverable one.  Running every single-color iteration as
    well and keeping the best makes the result at least as large as any
    per-subsystem cover; ties prefer the all-color run.
    """
    candidates: list[CactusCover] = [
        CactusCover(_cover_fixpoint(g), None)
    ]
    for c in range(g.colors):
        candidates.append(CactusCover(_cover_fixpoint(restrict_to_color(g, c)), c))
    return max(candidates, key=lambda cover: len(cover.covered))


def conventional_cactus_cover(g: UnionGraph) -> CactusCover:
    """Best cover achievable inside a single subsystem's subgraph."""
    candidates = [
        CactusCover(_cover_fixpoint(restrict_to_color(g, c)), c)
        for c in range(g.colors)
    ]
    return max(candidates, key=lambda cover: len(cover.covered))


def shortest_walk_tree(g: UnionGraph) -> tuple[dict[int, ColoredEdge], dict[int, int]]:
    """Deterministic BFS parents and distances from the input vertices."""
    parents: dict[int, ColoredEdge] = {}
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for u in g.input_vertices:
        for e in g.edges_from(u):
            if e.head not in parents:
                parents[e.head] = e
                dist[e.head] = 1
                queue.append(e.head)
    while queue:
        v = queue.popleft()
        for e in g.edges_from(StateVertex(v)):
            if e.head not in parents:
                parents[e.head] = e
                dist[e.head] = dist[v] + 1
                queue.append(e.head)
    return parents, dist


def _chain_to_walk(chain: list[ColoredEdge]) -> InputStateWalk:
    source = chain[0].tail
    assert isinstance(source, InputVertex)
    return InputStateWalk(
        source=source,
        states=tuple(e.head for e in chain),
        colors=tuple(e.color for e in chain),
    )


def cactus_walks_for_stem(decomposition: Decomposition) -> dict[int, InputStateWalk]:
    """One walk per stem-covered state, along the stem edges themselves."""
    pred = {e.head: e for e in decomposition.stems}
    walks: dict[int, InputStateWalk] = {}
    for head in sorted(pred):
        chain: list[ColoredEdge] = []
        v = head
        while True:
            e = pred[v]
            chain.append(e)
            if isinstance(e.tail, InputVertex):
                break
            v = e.tail.index
        walks[head] = _chain_to_walk(list(reversed(chain)))
    return walks


def cactus_walks_for_bud(group, g: UnionGraph, loops: int) -> dict[int, InputStateWalk]:
    """Walks onto every vertex of one cycle group.

    Each walk runs from an input to the group's entry vertex along shortest
    walks, circles the cycle ``loops`` times, and follows the group's unique
    edge path to the target.  The loop count is the degree of freedom used to
    pull different groups' walks apart in the layered graph.
    """
    parents, dist = shortest_walk_tree(g)
    cycle = component_cycle(group)
    cycle_tails = [e.tail.index for e in cycle]
    for v in cycle_tails:
        if v not in dist:
            raise ModelError(f"cycle vertex x{v + 1} is not input-reachable")
    entry = min(cycle_tails, key=lambda v: (dist[v], v))

    prefix: list[ColoredEdge] = []
    v = entry
    while True:
        e = parents[v]
        prefix.append(e)
        if isinstance(e.tail, InputVertex):
            break
        v = e.tail.index
    prefix.reverse()

    at = cycle_tails.index(entry)
    rotation = cycle[at:] + cycle[:at]
    pred = {e.head: e for e in group}

    walks: dict[int, InputStateWalk] = {}
    targets = sorted({e.head for e in group} | {e.tail.index for e in group})
    for target in targets:
        tail_path: list[ColoredEdge] = []
        v = target
        while v != entry:
            e = pred[v]
            tail_path.append(e)
            v = e.tail.index
        tail_path.reverse()
        walks[target] = _chain_to_walk(prefix + list(rotation) * loops + tail_path)
    return walks


def verify_cactus_walking(cover: CactusCover, g: UnionGraph, *,
                          max_loops: int = DEFAULT_MAX_LOOPS,
                          length_cap: int = DEFAULT_LENGTH_CAP
                          ) -> tuple[InputStateWalk, ...] | None:
    """Search for one walk per covered state with pairwise disjoint paths.

    Disjointness is in the layered graph, checked exactly on the materialized
    path vertex sets; the cheap suffix test prunes first.  Stem walks are
    fixed, cycle-group walks may take 0..``max_loops`` extra turns around
    their cycle, and the search backtracks over those choices.  Returns the
    walk family, or None when no combination under the length cap works.
    """
    decomp = cover.decomposition
    options: list[list[InputStateWalk]] = []
    for head, walk in sorted(cactus_walks_for_stem(decomp).items()):
        if walk.length <= length_cap:
            options.append([walk])
        else:
            return None
    for group in decomp.cycle_groups:
        per_target: dict[int, list[InputStateWalk]] = {}
        for loops in range(max_loops + 1):
            for target, walk in cactus_walks_for_bud(group, g, loops).items():
                if walk.length <= length_cap:
                    per_target.setdefault(target, []).append(walk)
        for target in sorted({e.head for e in group}):
            if target not in per_target:
                return None
            options.append(per_target[target])

    chosen: list[InputStateWalk] = []
    chosen_paths: list[frozenset] = []

    def disjoint(walk: InputStateWalk, path: frozenset) -> bool:
        for other, other_path in zip(chosen, chosen_paths):
            if walks_provably_disjoint(walk, other) is True:
                continue
            if path & other_path:
                return False
        return True

    def search(idx: int) -> bool:
        if idx == len(options):
            return True
        for walk in options[idx]:
            path = frozenset(mdg_path_vertices(walk, g.colors))
            if disjoint(walk, path):
                chosen.append(walk)
                chosen_paths.append(path)
                if search(idx + 1):
                    return True
                chosen.pop()
                chosen_paths.pop()
        return False

    if not search(0):
        return None
    return tuple(chosen)
