"""Numeric rank probes for switched structures.

Generic ranks are sampled by realizing every structural nonzero with a random
scalar and doing exact linear algebra over a large prime field.  A random
realization achieves the generic rank except on a vanishing variety, so the
probability that a trial undershoots is at most ``degree / p``; with the
default 61-bit prime and a handful of trials the failure odds are negligible,
and taking the maximum over trials only ever helps.

Everything in the finite-field path uses plain Python integers: products of
61-bit values do not fit a machine word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import (
    DEFAULT_PRIME,
    ModelError,
    Realization,
    SwitchedStructure,
    realized_dense,
    sample_realization,
)

_REAL_RANK_REL_TOL = 1e-9


class ColumnReducer:
    """Incremental column-echelon basis over GF(p).

    ``add`` reduces a column against the basis and absorbs it when it is
    independent.  Basis columns are normalized to pivot value 1 so each
    reduction is one multiply-subtract sweep.
    """

    def __init__(self, n: int, prime: int) -> None:
        self.n = n
        self.prime = prime
        self._pivots: list[int] = []
        self._basis: list[list[int]] = []

    @property
    def rank(self) -> int:
        return len(self._basis)

    def basis_columns(self) -> list[list[int]]:
        return [list(col) for col in self._basis]

    def add(self, column: Sequence[int]) -> bool:
        p = self.prime
        col = [int(v) % p for v in column]
        if len(col) != self.n:
            raise ModelError(f"column length {len(col)} does not match n={self.n}")
        for pivot, vec in zip(self._pivots, self._basis):
            factor = col[pivot]
            if factor:
                col = [(a - factor * b) % p for a, b in zip(col, vec)]
        for row, value in enumerate(col):
            if value:
                inv = pow(value, p - 2, p)
                self._pivots.append(row)
                self._basis.append([v * inv % p for v in col])
                return True
        return False


def rank_ff(columns: Iterable[Sequence[int]], n: int, prime: int = DEFAULT_PRIME) -> int:
    reducer = ColumnReducer(n, prime)
    for col in columns:
        reducer.add(col)
    return reducer.rank


def det_ff(columns: Sequence[Sequence[int]], prime: int = DEFAULT_PRIME) -> int:
    """Determinant of a square matrix given by columns, over GF(p)."""
    n = len(columns)
    mat = [[int(v) % prime for v in col] for col in columns]
    for col in mat:
        if len(col) != n:
            raise ModelError("determinant needs a square matrix")
    det = 1
    for i in range(n):
        pivot_col = next((j for j in range(i, n) if mat[j][i]), None)
        if pivot_col is None:
            return 0
        if pivot_col != i:
            mat[i], mat[pivot_col] = mat[pivot_col], mat[i]
            det = prime - det
        inv = pow(mat[i][i], prime - 2, prime)
        det = det * mat[i][i] % prime
        for j in range(i + 1, n):
            factor = mat[j][i] * inv % prime
            if factor:
                mat[j] = [(a - factor * b) % prime for a, b in zip(mat[j], mat[i])]
    return det


def _sparse_matrices(structure: SwitchedStructure, realization: Realization,
                     which: str) -> list[list[tuple[int, int, int]]]:
    out = []
    for idx, (a, b) in enumerate(structure.subsystems):
        mat = a if which == "A" else b
        out.append(sorted(
            (r, c, realization.values[(idx, which, r, c)])
            for r, c in mat.nonzeros
        ))
    return out


def _apply_sparse(entries: list[tuple[int, int, int]], column: Sequence[int],
                  n: int, prime: int) -> list[int]:
    out = [0] * n
    for r, c, v in entries:
        x = column[c]
        if x:
            out[r] = (out[r] + v * x) % prime
    return out


def _input_columns(structure: SwitchedStructure, realization: Realization) -> list[list[int]]:
    cols = []
    for idx, (_, b) in enumerate(structure.subsystems):
        for q in range(b.cols):
            col = [0] * structure.n
            for r in b.column_rows(q):
                col[r] = realization.values[(idx, "B", r, q)]
            cols.append(col)
    return cols


def reachable_space_dim(structure: SwitchedStructure,
                        realization: Realization) -> tuple[int, int]:
    """Dimension of the smallest A-invariant space containing all B columns.

    Returns ``(dim, layers_used)`` where ``layers_used`` is the first depth at
    which adding another round of products stops growing the span.  For this
    realization, ``dim`` is the rank of the full controllability stack.
    """
    if realization.kind == "real":
        return _reachable_space_dim_real(structure, realization)
    n, p = structure.n, realization.prime
    assert p is not None
    a_sparse = _sparse_matrices(structure, realization, "A")
    reducer = ColumnReducer(n, p)
    for col in _input_columns(structure, realization):
        reducer.add(col)
    layers = 0
    while reducer.rank < n:
        before = reducer.rank
        for basis_col in reducer.basis_columns():
            for entries in a_sparse:
                reducer.add(_apply_sparse(entries, basis_col, n, p))
        if reducer.rank == before:
            break
        layers += 1
    return reducer.rank, layers


def _reachable_space_dim_real(structure: SwitchedStructure,
                              realization: Realization) -> tuple[int, int]:
    n = structure.n
    a_mats = [np.array(realized_dense(structure, realization, i, "A"), dtype=float)
              for i in range(structure.subsystem_count)]
    b_cols = [np.array(realized_dense(structure, realization, i, "B"), dtype=float)
              for i in range(structure.subsystem_count)]
    stack = np.hstack([b for b in b_cols if b.size] or [np.zeros((n, 0))])
    if stack.size == 0:
        return 0, 0

    def rank_of(mat: np.ndarray) -> int:
        if mat.size == 0:
            return 0
        norms = np.linalg.norm(mat, axis=0)
        top = norms.max()
        if top == 0.0:
            return 0
        return int(np.linalg.matrix_rank(mat, tol=_REAL_RANK_REL_TOL * top))

    rank = rank_of(stack)
    layers = 0
    while rank < n:
        grown = np.hstack([stack] + [a @ stack for a in a_mats])
        new_rank = rank_of(grown)
        if new_rank == rank:
            break
        stack, rank = grown, new_rank
        layers += 1
    return rank, layers


@dataclass(frozen=True)
class ControllabilityProbe:
    """Outcome of repeated randomized rank trials.

    ``dim`` is the best (largest) reachable-space dimension seen; undershoot
    is possible only on a vanishing-variety draw, so the maximum over trials
    is the right aggregate.  ``layers_used`` comes from the first trial that
    attained ``dim``.
    """

    dim: int
    layers_used: int
    trial_dims: tuple[int, ...]
    trial_layers: tuple[int, ...]
    seed: int
    prime: int

    @property
    def trials(self) -> int:
        return len(self.trial_dims)


def controllable_dim(structure: SwitchedStructure, *, seed: int = 0,
                     trials: int = 3, prime: int = DEFAULT_PRIME) -> ControllabilityProbe:
    """Probe the generic controllable-subspace dimension.

    Runs ``trials`` independent realizations seeded ``seed, seed+1, ...`` and
    keeps the maximum dimension.  A result of ``n`` certifies structural
    controllability up to the (astronomically small) chance that every trial
    landed on the degenerate variety.
    """
    if trials < 1:
        raise ModelError(f"need at least one trial, got {trials}")
    dims: list[int] = []
    layer_counts: list[int] = []
    for t in range(trials):
        realization = sample_realization(structure, field_kind="finite",
                                         seed=seed + t, prime=prime)
        dim, layers = reachable_space_dim(structure, realization)
        dims.append(dim)
        layer_counts.append(layers)
    best = max(dims)
    first = dims.index(best)
    return ControllabilityProbe(
        dim=best,
        layers_used=layer_counts[first],
        trial_dims=tuple(dims),
        trial_layers=tuple(layer_counts),
        seed=seed,
        prime=prime,
    )


def layered_product_columns(structure: SwitchedStructure, realization: Realization,
                            depth: int) -> tuple[list[list[int]], list[int]]:
    """All product columns up to the given depth, with layer offsets.

    Layer 0 holds the columns of every ``B_l`` in subsystem order; layer
    ``i`` holds, block by block, each ``A_j`` applied to the whole previous
    layer.  Returns ``(columns, offsets)`` where ``offsets[i]`` is the index
    of the first column of layer ``i`` and ``offsets[depth + 1]`` the total
    count.  Column order inside a layer is the block order itself, which is
    what ties these indices to layered-graph vertices elsewhere.
    """
    if depth < 0:
        raise ModelError(f"depth may not be negative, got {depth}")
    if realization.kind != "finite":
        raise ModelError("layered product columns require a finite-field realization")
    n, p = structure.n, realization.prime
    assert p is not None
    a_sparse = _sparse_matrices(structure, realization, "A")
    current = _input_columns(structure, realization)
    columns: list[list[int]] = list(current)
    offsets = [0, len(current)]
    for _ in range(depth):
        nxt: list[list[int]] = []
        for entries in a_sparse:
            nxt.extend(_apply_sparse(entries, col, n, p) for col in current)
        columns.extend(nxt)
        offsets.append(len(columns))
        current = nxt
    return columns, offsets


def averaged_pair_rank(structure: SwitchedStructure, realization: Realization,
                       weights: Sequence) -> int:
    """Rank of the single pair obtained by mixing all modes with weights.

    The state matrix is the weighted sum of the realized ``A_i``; input
    column ``k`` is the weighted sum of column ``k`` of every ``B_i`` that
    has one.  Structures can be controllable under switching while every
    such mixed pair is rank deficient, and this function measures exactly
    that deficit.
    """
    if len(weights) != structure.subsystem_count:
        raise ModelError(
            f"need {structure.subsystem_count} weights, got {len(weights)}")
    n = structure.n
    max_m = max(structure.input_counts, default=0)
    if realization.kind == "finite":
        p = realization.prime
        assert p is not None
        w = [int(x) % p for x in weights]
        mixed_a = [[0] * n for _ in range(n)]
        mixed_b = [[0] * max_m for _ in range(n)]
        for idx, (a, b) in enumerate(structure.subsystems):
            for r, c in a.nonzeros:
                mixed_a[r][c] = (mixed_a[r][c]
                                 + w[idx] * realization.values[(idx, "A", r, c)]) % p
            for r, c in b.nonzeros:
                mixed_b[r][c] = (mixed_b[r][c]
                                 + w[idx] * realization.values[(idx, "B", r, c)]) % p
        cols = [[mixed_a[r][c] for r in range(n)] for c in range(n)]
        cols += [[mixed_b[r][c] for r in range(n)] for c in range(max_m)]
        return rank_ff(cols, n, p)
    w = [float(x) for x in weights]
    mixed_a = np.zeros((n, n))
    mixed_b = np.zeros((n, max_m))
    for idx in range(structure.subsystem_count):
        mixed_a += w[idx] * np.array(realized_dense(structure, realization, idx, "A"),
                                     dtype=float)
        dense_b = np.array(realized_dense(structure, realization, idx, "B"), dtype=float)
        if dense_b.size:
            mixed_b[:, :dense_b.shape[1]] += w[idx] * dense_b
    stacked = np.hstack([mixed_a, mixed_b])
    top = np.linalg.norm(stacked, axis=0).max()
    if top == 0.0:
        return 0
    return int(np.linalg.matrix_rank(stacked, tol=_REAL_RANK_REL_TOL * top))
