"""Layered dynamic graph of a switched structure.

The graph unrolls mode products into layers.  Layer 0 holds one copy of every
state and every input.  Layer ``i >= 1`` holds ``N^i`` blocks, one per word of
``i`` colors; a block is addressed as ``(k, t)`` where ``k`` is the first
color of its word and ``t`` packs the remaining ``i - 1`` colors big-endian
in base ``N``.  Every block contains all ``n`` states and all ``M`` inputs.

Vertices are plain tuples so they hash, sort, and print without ceremony:

* ``("x", layer, k, t, j)`` is the copy of state ``j`` in block ``(k, t)``.
* ``("u", layer, k, t, l, q)`` is the copy of input ``q`` of subsystem ``l``.

Layer 0 uses ``k = t = 0``.  Edges point toward layer 0.  Inside a block,
input copies feed state copies through their own ``B_l`` pattern; a state
copy in block ``(k, t)`` at layer ``i`` feeds layer ``i - 1`` through the
``A_k`` pattern, landing in the block addressed by the remainder of the word.
Each edge carries the key of the structural entry it represents, so one
realization assigns consistent weights to all copies of an entry.

A vertex-disjoint path family from input copies onto layer-0 states bounds
the generic rank of the depth-limited product stack; maximum families are
computed here by unit-capacity max-flow with vertex splitting.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .model import ModelError, Realization, SwitchedStructure
from .unigraph import InputStateWalk

DEFAULT_VERTEX_CAP = 2_000_000

WeightKey = tuple[int, str, int, int]
MdgVertex = tuple


class MdgSizeError(RuntimeError):
    """The requested unrolling is too large to materialize."""


def _fold_word(word: Sequence[int], base: int) -> int:
    value = 0
    for c in word:
        value = value * base + c
    return value


def _block_address(word: Sequence[int], base: int) -> tuple[int, int]:
    if not word:
        return (0, 0)
    return (word[0], _fold_word(word[1:], base))


def mdg_path_vertices(walk: InputStateWalk, colors: int) -> tuple[MdgVertex, ...]:
    """The layered-graph path a union-graph walk traces, without the graph.

    A walk of ``k`` edges starts at the input copy in layer ``k - 1`` whose
    block word is the walk's color sequence after the first edge, then steps
    down one layer per edge, shedding the leading color each time, and ends
    at the walk's final state in layer 0.
    """
    k = walk.length
    blk, t = _block_address(walk.colors[1:], colors)
    path: list[MdgVertex] = [
        ("u", k - 1, blk, t, walk.source.subsystem, walk.source.index)
    ]
    for i, state in enumerate(walk.states):
        word = walk.colors[i + 1:]
        blk, t = _block_address(word, colors)
        path.append(("x", len(word), blk, t, state))
    return tuple(path)


def walks_provably_disjoint(w1: InputStateWalk, w2: InputStateWalk) -> bool | None:
    """Fast vertex-disjointness test for the layered paths of two walks.

    Copies of the two paths can only coincide at equal distance from the
    walk ends, and then only if the color sequences covering that distance
    agree.  Scanning from the ends, the first place the underlying walks
    occupy the same vertex decides everything: differing color suffixes
    there rule out a collision at every later distance as well.  Returns
    ``True`` when the layered paths are provably vertex-disjoint and
    ``None`` when they are not (the caller confirms with materialized
    paths).
    """
    k1, k2 = w1.length, w2.length

    def at(walk: InputStateWalk, q: int):
        if q < walk.length:
            return ("x", walk.states[walk.length - 1 - q])
        return ("u", walk.source.subsystem, walk.source.index)

    for q in range(min(k1, k2) + 1):
        if at(w1, q) == at(w2, q):
            if w1.colors[k1 - q:] == w2.colors[k2 - q:]:
                return None
            return True
    return True


class Mdg:
    """Materialized layered graph down from ``depth`` to layer 0."""

    def __init__(self, structure: SwitchedStructure, depth: int, *,
                 vertex_cap: int = DEFAULT_VERTEX_CAP) -> None:
        if depth < 0:
            raise ModelError(f"depth may not be negative, got {depth}")
        self.structure = structure
        self.depth = depth
        self.n = structure.n
        self.colors = structure.subsystem_count
        self.input_counts = structure.input_counts
        self.total_inputs = structure.total_inputs
        self.b_offsets: tuple[int, ...] = tuple(
            sum(self.input_counts[:l]) for l in range(self.colors)
        )

        blocks = [1]
        for _ in range(depth):
            blocks.append(blocks[-1] * self.colors)
        per_block = self.n + self.total_inputs
        total = per_block * sum(blocks)
        if total > vertex_cap:
            raise MdgSizeError(
                f"unrolling to depth {depth} needs {total} vertices "
                f"(block count grows as {self.colors}^layer); cap is {vertex_cap}")
        self._blocks_at = blocks

        self._out: dict[MdgVertex, list[tuple[MdgVertex, WeightKey]]] = {}
        self._build_edges()

    def _build_edges(self) -> None:
        n, N = self.n, self.colors
        for layer in range(self.depth + 1):
            for k, t in self._block_ids(layer):
                for l, (_, b) in enumerate(self.structure.subsystems):
                    for r, c in sorted(b.nonzeros):
                        u = ("u", layer, k, t, l, c)
                        x = ("x", layer, k, t, r)
                        self._out.setdefault(u, []).append((x, (l, "B", r, c)))
                if layer == 0:
                    continue
                if layer == 1:
                    down_k, down_t = 0, 0
                else:
                    span = N ** (layer - 2)
                    down_k, down_t = t // span, t % span
                a = self.structure.subsystems[k][0]
                for r, c in sorted(a.nonzeros):
                    tail = ("x", layer, k, t, c)
                    head = ("x", layer - 1, down_k, down_t, r)
                    self._out.setdefault(tail, []).append((head, (k, "A", r, c)))
        for targets in self._out.values():
            targets.sort()

    def _block_ids(self, layer: int) -> Iterator[tuple[int, int]]:
        if layer == 0:
            yield (0, 0)
            return
        for k in range(self.colors):
            for t in range(self.colors ** (layer - 1)):
                yield (k, t)

    @property
    def vertex_count(self) -> int:
        return (self.n + self.total_inputs) * sum(self._blocks_at)

    def state_vertices(self, layer: int) -> Iterator[MdgVertex]:
        for k, t in self._block_ids(layer):
            for j in range(self.n):
                yield ("x", layer, k, t, j)

    def input_vertices(self, layer: int) -> Iterator[MdgVertex]:
        for k, t in self._block_ids(layer):
            for l in range(self.colors):
                for q in range(self.input_counts[l]):
                    yield ("u", layer, k, t, l, q)

    def all_input_vertices(self) -> Iterator[MdgVertex]:
        for layer in range(self.depth + 1):
            yield from self.input_vertices(layer)

    def edges_from(self, vertex: MdgVertex) -> tuple[tuple[MdgVertex, WeightKey], ...]:
        return tuple(self._out.get(vertex, ()))

    def input_column_index(self, vertex: MdgVertex) -> int:
        """Position of this input copy's column in the depth-stacked products.

        Layer-``i`` columns are the ``i``-fold products; inside layer ``i``
        the block index is the vertex's word reversed, because the last
        color applied is the outermost product factor.
        """
        kind, layer, k, t, l, q = vertex
        if kind != "u":
            raise ModelError(f"not an input vertex: {vertex!r}")
        word = self.word_of(layer, k, t)
        m = self.total_inputs
        offset = sum(m * self._blocks_at[i] for i in range(layer))
        r = _fold_word(tuple(reversed(word)), self.colors)
        return offset + r * m + self.b_offsets[l] + q

    def word_of(self, layer: int, k: int, t: int) -> tuple[int, ...]:
        if layer == 0:
            return ()
        digits = []
        value = t
        for _ in range(layer - 1):
            digits.append(value % self.colors)
            value //= self.colors
        return (k, *reversed(digits))


def build_mdg(structure: SwitchedStructure, depth: int, *,
              vertex_cap: int = DEFAULT_VERTEX_CAP) -> Mdg:
    mdg = Mdg(structure, depth, vertex_cap=vertex_cap)
    assert sum(1 for _ in mdg.state_vertices(depth)) == structure.n * structure.subsystem_count ** depth
    return mdg


@dataclass(frozen=True)
class Linking:
    """A maximum family of vertex-disjoint paths onto layer-0 states."""

    paths: tuple[tuple[MdgVertex, ...], ...]

    @property
    def size(self) -> int:
        return len(self.paths)

    def tails(self) -> tuple[MdgVertex, ...]:
        return tuple(path[0] for path in self.paths)

    def heads(self) -> tuple[int, ...]:
        return tuple(path[-1][4] for path in self.paths)


def max_linking(mdg: Mdg) -> Linking:
    """Maximum vertex-disjoint linking from all input copies to layer 0.

    Unit-capacity max-flow with every graph vertex split into an in/out pair,
    so disjointness is on vertices, not just edges.  Vertex ids are assigned
    in a fixed enumeration order and arcs inserted deterministically; equal
    inputs always produce the identical linking.
    """
    order: list[MdgVertex] = []
    for layer in range(mdg.depth + 1):
        order.extend(mdg.input_vertices(layer))
        order.extend(mdg.state_vertices(layer))
    ids: dict[MdgVertex, int] = {v: i for i, v in enumerate(order)}

    count = len(order)
    source = 2 * count
    sink = 2 * count + 1
    flow = _Dinic(2 * count + 2)
    for v in order:
        vid = ids[v]
        flow.add(2 * vid, 2 * vid + 1, 1)
        if v[0] == "u":
            flow.add(source, 2 * vid, 1)
        elif v[1] == 0:
            flow.add(2 * vid + 1, sink, 1)
        for head, _ in mdg.edges_from(v):
            flow.add(2 * vid + 1, 2 * ids[head], 1)
    flow.max_flow(source, sink)

    paths: list[tuple[MdgVertex, ...]] = []
    for v in order:
        if v[0] != "u":
            continue
        vid = ids[v]
        if not flow.is_saturated(source, 2 * vid):
            continue
        path = [v]
        current = vid
        while True:
            vertex = order[current]
            if vertex[0] == "x" and vertex[1] == 0:
                break
            nxt = flow.saturated_successor(2 * current + 1)
            if nxt == sink:
                break
            current = nxt // 2
            path.append(order[current])
        paths.append(tuple(path))
    return Linking(paths=tuple(paths))


class _Dinic:
    def __init__(self, size: int) -> None:
        self.size = size
        self.heads: list[int] = []
        self.caps: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(size)]

    def add(self, tail: int, head: int, cap: int) -> None:
        self.adj[tail].append(len(self.heads))
        self.heads.append(head)
        self.caps.append(cap)
        self.adj[head].append(len(self.heads))
        self.heads.append(tail)
        self.caps.append(0)

    def max_flow(self, source: int, sink: int) -> int:
        total = 0
        while True:
            level = [-1] * self.size
            level[source] = 0
            queue = deque([source])
            while queue:
                v = queue.popleft()
                for eid in self.adj[v]:
                    if self.caps[eid] and level[self.heads[eid]] < 0:
                        level[self.heads[eid]] = level[v] + 1
                        queue.append(self.heads[eid])
            if level[sink] < 0:
                return total
            progress = [0] * self.size

            def dfs(v: int) -> bool:
                if v == sink:
                    return True
                while progress[v] < len(self.adj[v]):
                    eid = self.adj[v][progress[v]]
                    head = self.heads[eid]
                    if self.caps[eid] and level[head] == level[v] + 1 and dfs(head):
                        self.caps[eid] -= 1
                        self.caps[eid ^ 1] += 1
                        return True
                    progress[v] += 1
                return False

            while dfs(source):
                total += 1

    def is_saturated(self, tail: int, head: int) -> bool:
        for eid in self.adj[tail]:
            if eid % 2 == 0 and self.heads[eid] == head:
                return self.caps[eid] == 0
        return False

    def saturated_successor(self, tail: int) -> int:
        for eid in self.adj[tail]:
            if eid % 2 == 0 and self.caps[eid] == 0:
                # consume so shared endpoints are never walked twice
                self.caps[eid] = 1
                self.caps[eid ^ 1] = 0
                return self.heads[eid]
        raise AssertionError("flow conservation violated during path extraction")


def linking_determinant_expansion(mdg: Mdg, realization: Realization,
                                  rows: Sequence[int],
                                  tails: Sequence[MdgVertex]) -> int:
    """Signed sum over all disjoint path families from ``tails`` onto ``rows``.

    Enumerates every family of vertex-disjoint layered paths that starts at
    exactly the given input copies and ends onto exactly the given layer-0
    states, multiplying each family's edge weights and signing it by the
    parity of the head arrangement.  Equals the minor of the product stack on
    those rows and columns; exponential, so gated to small instances.
    """
    if realization.kind != "finite":
        raise ModelError("determinant expansion requires a finite-field realization")
    if mdg.n > 4 or mdg.colors > 2 or mdg.depth > 3:
        raise ModelError(
            "instance too large for exhaustive path enumeration "
            f"(n={mdg.n}, colors={mdg.colors}, depth={mdg.depth}; "
            "need n<=4, colors<=2, depth<=3)")
    rows = sorted(rows)
    tails = sorted(tails)
    if len(rows) != len(tails):
        raise ModelError(f"{len(tails)} tails cannot match {len(rows)} rows")
    p = realization.prime
    assert p is not None

    def all_paths(v: MdgVertex) -> list[tuple[tuple[MdgVertex, ...], int, int]]:
        # (vertices, weight product, final row)
        if v[0] == "x" and v[1] == 0:
            return [((v,), 1, v[4])]
        out = []
        for head, key in mdg.edges_from(v):
            w = realization.values[key]
            for rest, prod, end in all_paths(head):
                out.append(((v, *rest), w * prod % p, end))
        return out

    options = [
        [(path, prod, end) for path, prod, end in all_paths(t) if end in rows]
        for t in tails
    ]
    total = 0
    used: set[MdgVertex] = set()
    chosen_ends: list[int] = []

    def recurse(idx: int, weight: int) -> None:
        nonlocal total
        if idx == len(tails):
            perm = [rows.index(e) for e in chosen_ends]
            sign = _permutation_sign(perm)
            total = (total + sign * weight) % p
            return
        for path, prod, end in options[idx]:
            if end in chosen_ends or used.intersection(path):
                continue
            used.update(path)
            chosen_ends.append(end)
            recurse(idx + 1, weight * prod % p)
            chosen_ends.pop()
            used.difference_update(path)

    recurse(0, 1)
    return total % p


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
