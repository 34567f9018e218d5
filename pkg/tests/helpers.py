"""Shared test utilities: brute-force oracles and instance generators.

The oracles re-derive quantities by exhaustive enumeration so the production
algorithms are checked against definitions, not against themselves.
"""

from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import numpy as np

from swcactus import (
    InputVertex,
    StateVertex,
    StructuredMatrix,
    SwitchedStructure,
    UnionGraph,
    parse_system,
    reachable_states,
    sample_realization,
)
from swcactus.rankcore import rank_ff

DATA_DIR = Path(__file__).parent / "data"

BRUTE_EDGE_LIMIT = 16


def load_system(name: str) -> SwitchedStructure:
    return parse_system((DATA_DIR / f"{name}.json").read_text())


def is_independent(edges) -> bool:
    heads = [e.head for e in edges]
    if len(set(heads)) != len(heads):
        return False
    tails = [(e.tail, e.color) for e in edges]
    return len(set(tails)) == len(tails)


def brute_max_independent(g: UnionGraph) -> int:
    """Largest independent edge set by subset enumeration."""
    edges = g.edges
    if len(edges) > BRUTE_EDGE_LIMIT:
        raise ValueError(f"too many edges for enumeration: {len(edges)}")
    for size in range(len(edges), 0, -1):
        for subset in combinations(edges, size):
            if is_independent(subset):
                return size
    return 0


def _vertex_key(v):
    if isinstance(v, InputVertex):
        return ("u", v.subsystem, v.index)
    return ("x", v.index)


def _components(edges):
    parent = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    for e in edges:
        for key in (_vertex_key(e.tail), ("x", e.head)):
            parent.setdefault(key, key)
        a, b = find(_vertex_key(e.tail)), find(("x", e.head))
        if a != b:
            parent[a] = b
    groups = {}
    for e in edges:
        groups.setdefault(find(("x", e.head)), []).append(e)
    return list(groups.values())


def is_valid_cover_config(edges, reachable) -> bool:
    """Validity per definition: input-rooted trees plus reachable cycles.

    Deliberately does not call the production decomposition.
    """
    if not is_independent(edges):
        return False
    for comp in _components(edges):
        rooted = [e for e in comp if isinstance(e.tail, InputVertex)]
        if rooted:
            absorbed = set(rooted)
            frontier = [e.head for e in rooted]
            while frontier:
                v = frontier.pop()
                for e in comp:
                    if e not in absorbed and isinstance(e.tail, StateVertex) \
                            and e.tail.index == v:
                        absorbed.add(e)
                        frontier.append(e.head)
            if len(absorbed) != len(comp):
                return False
        else:
            verts = {e.head for e in comp} | {e.tail.index for e in comp}
            if len(comp) != len(verts):
                return False
            if not verts <= reachable:
                return False
    return True


def brute_best_cover(g: UnionGraph) -> int:
    """Maximum states coverable by any valid configuration, by enumeration."""
    edges = g.edges
    if len(edges) > 12:
        raise ValueError(f"too many edges for enumeration: {len(edges)}")
    reachable = reachable_states(g)
    best = 0
    for size in range(len(edges), 0, -1):
        if size <= best:
            break
        for subset in combinations(edges, size):
            if is_valid_cover_config(subset, reachable):
                best = size
                break
    return best


def random_structure(rng: np.random.Generator, *, max_n: int = 5,
                     max_colors: int = 3, density: float = 0.3) -> SwitchedStructure:
    n = int(rng.integers(1, max_n + 1))
    colors = int(rng.integers(1, max_colors + 1))
    subsystems = []
    for _ in range(colors):
        a_mask = rng.random((n, n)) < density
        a = StructuredMatrix(n, n, frozenset(
            (int(r), int(c)) for r in range(n) for c in range(n) if a_mask[r, c]))
        m = int(rng.integers(0, 3))
        b_mask = rng.random((n, m)) < density if m else None
        b = StructuredMatrix(n, m, frozenset(
            (int(r), int(c)) for r in range(n) for c in range(m)
            if b_mask[r, c]) if m else frozenset())
        subsystems.append((a, b))
    return SwitchedStructure(n=n, subsystems=tuple(subsystems))


def sparse_structure(rng: np.random.Generator, *, max_n: int, max_colors: int,
                     max_edges: int) -> SwitchedStructure:
    """Random structure with a hard cap on total nonzeros (for enumeration)."""
    while True:
        s = random_structure(rng, max_n=max_n, max_colors=max_colors, density=0.2)
        total = sum(a.nnz + b.nnz for a, b in s.subsystems)
        if 0 < total <= max_edges:
            return s


def concat_rank(structure: SwitchedStructure, seed: int) -> int:
    """Rank of one realized ``[A_1 .. A_N, B_1 .. B_N]``; grank cross-check."""
    realization = sample_realization(structure, seed=seed)
    n = structure.n
    cols = []
    for idx, (a, b) in enumerate(structure.subsystems):
        for c in range(n):
            col = [0] * n
            for r in range(n):
                if (r, c) in a.nonzeros:
                    col[r] = realization.values[(idx, "A", r, c)]
            cols.append(col)
        for c in range(b.cols):
            col = [0] * n
            for r in range(n):
                if (r, c) in b.nonzeros:
                    col[r] = realization.values[(idx, "B", r, c)]
            cols.append(col)
    return rank_ff(cols, n, realization.prime)
