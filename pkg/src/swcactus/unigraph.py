"""Colored union graph of a switched structure.

Every subsystem contributes one color of directed edges over a shared vertex
set: state vertices ``x_1 .. x_n`` plus one input vertex per column of each
``B_i``.  A state edge of color ``i`` runs from ``x_k`` to ``x_j`` exactly
when ``A_i[j, k]`` is structurally nonzero, and an input edge of color ``i``
runs from the ``k``-th input of subsystem ``i`` to ``x_j`` exactly when
``B_i[j, k]`` is structurally nonzero.  All edges leaving one input vertex
therefore share that vertex's color.

The central combinatorial primitive here is :func:`max_independent_edges`:
the largest edge set whose heads are pairwise distinct and whose same-tail
edges carry pairwise distinct colors.  Its size equals the generic rank of
the row-concatenation of all system matrices, which is why it drives both
the controllability test and the cover construction downstream.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .model import ModelError, SwitchedStructure


@dataclass(frozen=True, order=True)
class StateVertex:
    index: int


@dataclass(frozen=True, order=True)
class InputVertex:
    subsystem: int
    index: int


Vertex = Union[StateVertex, InputVertex]


@dataclass(frozen=True)
class ColoredEdge:
    """One directed edge; ``head`` is always a state index."""

    tail: Vertex
    head: int
    color: int


def vertex_sort_key(vertex: Vertex) -> tuple[int, int, int]:
    if isinstance(vertex, InputVertex):
        return (0, vertex.subsystem, vertex.index)
    return (1, vertex.index, 0)


def edge_sort_key(edge: ColoredEdge) -> tuple:
    return (edge.color, vertex_sort_key(edge.tail), edge.head)


def format_vertex(vertex: Vertex) -> str:
    """1-based display form: states as ``x3``, inputs as ``u2.1``."""
    if isinstance(vertex, InputVertex):
        return f"u{vertex.subsystem + 1}.{vertex.index + 1}"
    return f"x{vertex.index + 1}"


class UnionGraph:
    """Immutable colored multigraph with precomputed adjacency.

    ``input_counts`` keeps one entry per subsystem even when that subsystem
    has no inputs, so downstream layer-size arithmetic stays aligned with the
    original structure.
    """

    def __init__(self, n: int, input_counts: tuple[int, ...],
                 edges: Iterable[ColoredEdge]) -> None:
        if n < 1:
            raise ModelError(f"graph needs a positive state count, got {n}")
        if not input_counts:
            raise ModelError("graph needs at least one color")
        self.n = int(n)
        self.input_counts = tuple(int(m) for m in input_counts)
        self.colors = len(self.input_counts)
        self.edges: tuple[ColoredEdge, ...] = tuple(sorted(edges, key=edge_sort_key))
        for e in self.edges:
            self._check_edge(e)
        self.input_vertices: tuple[InputVertex, ...] = tuple(
            InputVertex(i, k)
            for i, m in enumerate(self.input_counts)
            for k in range(m)
        )
        self._out: dict[Vertex, list[ColoredEdge]] = {}
        self._into: dict[int, list[ColoredEdge]] = {h: [] for h in range(self.n)}
        for e in self.edges:
            self._out.setdefault(e.tail, []).append(e)
            self._into[e.head].append(e)

    def _check_edge(self, e: ColoredEdge) -> None:
        if not (0 <= e.color < self.colors):
            raise ModelError(f"edge color {e.color + 1} outside 1..{self.colors}")
        if not (0 <= e.head < self.n):
            raise ModelError(f"edge head {e.head + 1} outside 1..{self.n}")
        t = e.tail
        if isinstance(t, InputVertex):
            if t.subsystem != e.color:
                raise ModelError(
                    f"input edge from {format_vertex(t)} must carry color "
                    f"{t.subsystem + 1}, got {e.color + 1}")
            if not (0 <= t.index < self.input_counts[t.subsystem]):
                raise ModelError(f"input vertex {format_vertex(t)} does not exist")
        elif not (0 <= t.index < self.n):
            raise ModelError(f"state tail {format_vertex(t)} outside 1..{self.n}")

    def edges_from(self, vertex: Vertex) -> tuple[ColoredEdge, ...]:
        return tuple(self._out.get(vertex, ()))

    def edges_into(self, head: int) -> tuple[ColoredEdge, ...]:
        return tuple(self._into.get(head, ()))

    @property
    def state_edge_count(self) -> int:
        return sum(1 for e in self.edges if isinstance(e.tail, StateVertex))

    @property
    def input_edge_count(self) -> int:
        return sum(1 for e in self.edges if isinstance(e.tail, InputVertex))


def build_union_graph(structure: SwitchedStructure) -> UnionGraph:
    edges: list[ColoredEdge] = []
    for i, (a, b) in enumerate(structure.subsystems):
        for r, c in a.nonzeros:
            edges.append(ColoredEdge(StateVertex(c), r, i))
        for r, c in b.nonzeros:
            edges.append(ColoredEdge(InputVertex(i, c), r, i))
    return UnionGraph(structure.n, structure.input_counts, edges)


def restrict_to_color(g: UnionGraph, color: int) -> UnionGraph:
    """Subgraph keeping only the given color's edges (state set unchanged)."""
    if not (0 <= color < g.colors):
        raise ModelError(f"color {color + 1} outside 1..{g.colors}")
    return UnionGraph(g.n, g.input_counts,
                      (e for e in g.edges if e.color == color))


def input_edges_only(g: UnionGraph) -> UnionGraph:
    return UnionGraph(g.n, g.input_counts,
                      (e for e in g.edges if isinstance(e.tail, InputVertex)))


def reachable_states(g: UnionGraph) -> frozenset[int]:
    """States reachable from at least one input vertex, any edge colors."""
    seen: set[int] = set()
    queue: deque[int] = deque()
    for u in g.input_vertices:
        for e in g.edges_from(u):
            if e.head not in seen:
                seen.add(e.head)
                queue.append(e.head)
    while queue:
        k = queue.popleft()
        for e in g.edges_from(StateVertex(k)):
            if e.head not in seen:
                seen.add(e.head)
                queue.append(e.head)
    return frozenset(seen)


def _matching_left_side(g: UnionGraph, heads_ok: frozenset[int]):
    # One left vertex per (tail, color) pair; all edges out of an input vertex
    # share its color, so inputs contribute one left vertex each.
    by_tail: dict[tuple[Vertex, int], list[int]] = {}
    for e in g.edges:
        if e.head in heads_ok:
            by_tail.setdefault((e.tail, e.color), []).append(e.head)

    def left_key(item: tuple[Vertex, int]) -> tuple:
        tail, color = item
        if isinstance(tail, InputVertex):
            return (color, 0, tail.subsystem, tail.index)
        return (color, 1, tail.index, 0)

    lefts = sorted(by_tail, key=left_key)
    adjacency = [tuple(sorted(set(by_tail[key]))) for key in lefts]
    return lefts, adjacency


def max_independent_edges(g: UnionGraph,
                          allowed_heads: Iterable[int] | None = None
                          ) -> tuple[ColoredEdge, ...]:
    """Largest set of edges with distinct heads and color-distinct shared tails.

    Equivalently a maximum matching between rows of the concatenated system
    matrices and their structurally nonzero columns, so the returned size is
    the generic rank of ``[A_1 .. A_N, B_1 .. B_N]`` (restricted to
    ``allowed_heads`` when given).  Fully deterministic: ties are broken by
    color, then input tails before state tails, then tail and head order.
    """
    if allowed_heads is None:
        heads_ok = frozenset(range(g.n))
    else:
        heads_ok = frozenset(h for h in allowed_heads if 0 <= h < g.n)
    lefts, adjacency = _matching_left_side(g, heads_ok)
    size = len(lefts)
    match_left: list[int | None] = [None] * size
    match_right: dict[int, int] = {}
    INF = size + 1
    dist: list[int] = [INF] * size

    def bfs_layers() -> bool:
        queue: deque[int] = deque()
        for idx in range(size):
            dist[idx] = INF if match_left[idx] is not None else 0
            if dist[idx] == 0:
                queue.append(idx)
        found = False
        while queue:
            idx = queue.popleft()
            for head in adjacency[idx]:
                other = match_right.get(head)
                if other is None:
                    found = True
                elif dist[other] == INF:
                    dist[other] = dist[idx] + 1
                    queue.append(other)
        return found

    def try_augment(idx: int) -> bool:
        for head in adjacency[idx]:
            other = match_right.get(head)
            if other is None or (dist[other] == dist[idx] + 1
                                 and try_augment(other)):
                match_left[idx] = head
                match_right[head] = idx
                return True
        dist[idx] = INF
        return False

    while bfs_layers():
        for idx in range(size):
            if match_left[idx] is None:
                try_augment(idx)

    chosen = [
        ColoredEdge(tail, match_left[idx], color)
        for idx, (tail, color) in enumerate(lefts)
        if match_left[idx] is not None
    ]
    return tuple(sorted(chosen, key=edge_sort_key))


def generic_rank(g: UnionGraph) -> int:
    """Generic rank of the row-concatenation of all system matrices."""
    return len(max_independent_edges(g))


@dataclass(frozen=True)
class InputStateWalk:
    """A walk that starts at an input vertex and then moves through states.

    ``states[j]`` is the head of the ``j``-th edge and ``colors[j]`` its
    color; the first edge leaves ``source``, so ``colors[0]`` always equals
    the source's subsystem.
    """

    source: InputVertex
    states: tuple[int, ...]
    colors: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(int(s) for s in self.states))
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if not self.states:
            raise ModelError("a walk needs at least one edge")
        if len(self.states) != len(self.colors):
            raise ModelError(
                f"walk has {len(self.states)} states but {len(self.colors)} colors")
        if self.colors[0] != self.source.subsystem:
            raise ModelError(
                f"first walk edge leaves {format_vertex(self.source)} and must "
                f"carry color {self.source.subsystem + 1}, got {self.colors[0] + 1}")

    @property
    def length(self) -> int:
        return len(self.states)

    @property
    def end(self) -> int:
        return self.states[-1]

    def describe(self) -> str:
        parts = [format_vertex(self.source)]
        for s, c in zip(self.states, self.colors):
            parts.append(f"-[{c + 1}]-> x{s + 1}")
        return " ".join(parts)


def walk_violations(walk: InputStateWalk, g: UnionGraph) -> tuple[str, ...]:
    """Every reason the walk is not realizable in ``g``; empty means valid."""
    problems: list[str] = []
    tail: Vertex = walk.source
    for pos, (head, color) in enumerate(zip(walk.states, walk.colors), start=1):
        if not (0 <= head < g.n):
            problems.append(f"step {pos}: state x{head + 1} outside 1..{g.n}")
            tail = StateVertex(head)
            continue
        edge = ColoredEdge(tail, head, color)
        if not (0 <= color < g.colors):
            problems.append(f"step {pos}: color {color + 1} outside 1..{g.colors}")
        elif edge not in g.edges_from(tail):
            problems.append(
                f"step {pos}: no color-{color + 1} edge from "
                f"{format_vertex(tail)} to x{head + 1}")
        tail = StateVertex(head)
    return tuple(problems)
