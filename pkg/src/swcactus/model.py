"""Structured models of switched linear systems.

A system is stored purely as zero/nonzero patterns: one pattern pair
``(A_i, B_i)`` per operating mode (subsystem).  Realizations assign concrete
scalars, drawn from a large prime field or from the reals, to the nonzero
positions so that generic rank properties can be probed numerically.

Indices are 0-based internally and 1-based in every serialized document and
error message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

import numpy as np

DEFAULT_PRIME = (1 << 61) - 1
# Realization values must stay exact; primes this large force Python-int
# arithmetic downstream (int64 products would overflow).
_MIN_PRIME_EXCLUSIVE = 1 << 31

_UINT64_MASK = (1 << 64) - 1

_MILLER_RABIN_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ModelError(ValueError):
    """A malformed system document or invalid model argument."""


def is_prime(value: int) -> bool:
    """Deterministic Miller-Rabin primality test, exact for 64-bit integers."""
    n = int(value)
    if n < 2:
        return False
    for p in _MILLER_RABIN_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MILLER_RABIN_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class StructuredMatrix:
    """A zero/nonzero pattern with explicit dimensions.

    Only the positions of the structurally nonzero entries are stored; the
    entries themselves are free parameters.
    """

    rows: int
    cols: int
    nonzeros: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        entries = frozenset((int(r), int(c)) for r, c in self.nonzeros)
        object.__setattr__(self, "nonzeros", entries)
        if self.rows < 1:
            raise ModelError(f"matrix needs at least one row, got {self.rows}")
        if self.cols < 0:
            raise ModelError(f"matrix column count may not be negative, got {self.cols}")
        for r, c in entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ModelError(
                    f"nonzero position ({r + 1}, {c + 1}) lies outside a "
                    f"{self.rows}x{self.cols} matrix"
                )

    @property
    def nnz(self) -> int:
        return len(self.nonzeros)

    def columns_with_entries(self) -> frozenset[int]:
        return frozenset(c for _, c in self.nonzeros)

    def column_rows(self, col: int) -> tuple[int, ...]:
        """Row indices of the nonzeros in one column, ascending."""
        return tuple(sorted(r for r, c in self.nonzeros if c == col))


@dataclass(frozen=True)
class SwitchedStructure:
    """Patterns of all subsystems of a switched linear system.

    Every ``A_i`` is ``n x n`` and every ``B_i`` is ``n x m_i`` where the
    input counts ``m_i`` may differ per subsystem (including zero).  A system
    whose ``B_i`` are all empty is representable; it is simply uncontrollable.
    """

    n: int
    subsystems: tuple[tuple[StructuredMatrix, StructuredMatrix], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ModelError(f"state dimension must be positive, got {self.n}")
        subs = tuple(tuple(pair) for pair in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        if not subs:
            raise ModelError("a switched system needs at least one subsystem")
        for idx, (a, b) in enumerate(subs):
            if a.rows != self.n or a.cols != self.n:
                raise ModelError(
                    f"subsystem {idx + 1}: state matrix must be {self.n}x{self.n}, "
                    f"got {a.rows}x{a.cols}"
                )
            if b.rows != self.n:
                raise ModelError(
                    f"subsystem {idx + 1}: input matrix must have {self.n} rows, "
                    f"got {b.rows}"
                )

    @property
    def subsystem_count(self) -> int:
        return len(self.subsystems)

    @property
    def input_counts(self) -> tuple[int, ...]:
        return tuple(b.cols for _, b in self.subsystems)

    @property
    def total_inputs(self) -> int:
        return sum(self.input_counts)

    def has_input_nonzeros(self) -> bool:
        return any(b.nnz for _, b in self.subsystems)


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ModelError(message)


def _parse_positions(raw: Any, *, where: str, rows: int, cols: int) -> frozenset[tuple[int, int]]:
    _expect(isinstance(raw, list), f"{where}: expected a list of [row, col] pairs")
    seen: set[tuple[int, int]] = set()
    for item in raw:
        _expect(
            isinstance(item, list) and len(item) == 2,
            f"{where}: each nonzero must be a [row, col] pair, got {item!r}",
        )
        r, c = item
        _expect(
            isinstance(r, int) and isinstance(c, int) and not isinstance(r, bool) and not isinstance(c, bool),
            f"{where}: row and column must be integers, got {item!r}",
        )
        _expect(
            1 <= r <= rows and 1 <= c <= cols,
            f"{where}: entry ({r}, {c}) does not fit a {rows}x{cols} matrix",
        )
        pos = (r - 1, c - 1)
        _expect(pos not in seen, f"{where}: duplicate nonzero entry ({r}, {c})")
        seen.add(pos)
    return frozenset(seen)


def system_from_dict(doc: Any) -> SwitchedStructure:
    """Build a :class:`SwitchedStructure` from a parsed JSON document."""
    _expect(isinstance(doc, dict), "top level must be a JSON object")
    extra = set(doc) - {"n", "subsystems"}
    _expect(not extra, f"unknown top-level keys: {sorted(extra)}")
    _expect("n" in doc, "missing required key 'n'")
    _expect("subsystems" in doc, "missing required key 'subsystems'")
    n = doc["n"]
    _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 1,
            f"'n' must be a positive integer, got {n!r}")
    raw_subs = doc["subsystems"]
    _expect(isinstance(raw_subs, list) and raw_subs,
            "'subsystems' must be a non-empty list")

    pairs = []
    for idx, sub in enumerate(raw_subs, start=1):
        where = f"subsystem {idx}"
        _expect(isinstance(sub, dict), f"{where}: expected an object")
        extra = set(sub) - {"A", "B"}
        _expect(not extra, f"{where}: unknown keys {sorted(extra)}")
        _expect("A" in sub and "B" in sub, f"{where}: needs both 'A' and 'B'")

        a_entries = _parse_positions(sub["A"], where=f"{where}, matrix A", rows=n, cols=n)
        b_raw = sub["B"]
        _expect(isinstance(b_raw, dict), f"{where}: 'B' must be an object with 'cols' and 'nonzeros'")
        extra = set(b_raw) - {"cols", "nonzeros"}
        _expect(not extra, f"{where}, matrix B: unknown keys {sorted(extra)}")
        _expect("cols" in b_raw and "nonzeros" in b_raw,
                f"{where}: 'B' needs both 'cols' and 'nonzeros'")
        m = b_raw["cols"]
        _expect(isinstance(m, int) and not isinstance(m, bool) and m >= 0,
                f"{where}: B column count must be a non-negative integer, got {m!r}")
        b_entries = _parse_positions(b_raw["nonzeros"], where=f"{where}, matrix B", rows=n, cols=m)

        pairs.append((StructuredMatrix(n, n, a_entries), StructuredMatrix(n, m, b_entries)))
    return SwitchedStructure(n=n, subsystems=tuple(pairs))


def parse_system(text: str | bytes) -> SwitchedStructure:
    """Parse a JSON system document.

    The schema is ``{"n": int, "subsystems": [{"A": [[r, c], ...],
    "B": {"cols": int, "nonzeros": [[r, c], ...]}}, ...]}`` with 1-based
    positions.  Raises :class:`ModelError` with the offending position on any
    schema violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"input is not valid JSON: {exc}") from exc
    return system_from_dict(doc)


def system_to_dict(structure: SwitchedStructure) -> dict:
    subs = []
    for a, b in structure.subsystems:
        subs.append({
            "A": [[r + 1, c + 1] for r, c in sorted(a.nonzeros)],
            "B": {
                "cols": b.cols,
                "nonzeros": [[r + 1, c + 1] for r, c in sorted(b.nonzeros)],
            },
        })
    return {"n": structure.n, "subsystems": subs}


def serialize_system(structure: SwitchedStructure) -> str:
    """Serialize to canonical JSON; ``parse_system`` round-trips exactly."""
    return json.dumps(system_to_dict(structure), indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True, eq=True)
class Realization:
    """Concrete values for every structural nonzero of one system.

    ``values`` maps ``(subsystem, "A"|"B", row, col)`` to a scalar: an integer
    in ``[1, prime - 1]`` for the finite-field kind, a nonzero float in
    ``[-1, 1]`` for the real kind.
    """

    kind: str
    prime: int | None
    seed: int
    values: Mapping[tuple[int, str, int, int], Any]

    def value(self, subsystem: int, which: str, row: int, col: int, default: Any = 0) -> Any:
        return self.values.get((subsystem, which, row, col), default)


def realized_dense(structure: SwitchedStructure, realization: Realization,
                   subsystem: int, which: str) -> list[list[Any]]:
    """Materialize one realized matrix as nested lists (zeros filled in)."""
    a, b = structure.subsystems[subsystem]
    mat = a if which == "A" else b
    zero = 0 if realization.kind == "finite" else 0.0
    out = [[zero] * mat.cols for _ in range(mat.rows)]
    for r, c in mat.nonzeros:
        out[r][c] = realization.values[(subsystem, which, r, c)]
    return out


def realization_to_dict(realization: Realization) -> dict:
    entries = [
        {
            "subsystem": key[0] + 1,
            "matrix": key[1],
            "row": key[2] + 1,
            "col": key[3] + 1,
            "value": value,
        }
        for key, value in sorted(realization.values.items())
    ]
    return {
        "field": realization.kind,
        "prime": realization.prime,
        "seed": realization.seed,
        "values": entries,
    }


def sample_realization(structure: SwitchedStructure, *, field_kind: str = "finite",
                       seed: int = 0, prime: int = DEFAULT_PRIME) -> Realization:
    """Draw one realization, deterministically from ``seed``.

    Finite-field values are uniform on ``[1, prime - 1]``; zero is excluded so
    that the realized pattern matches the structural pattern exactly.  Real
    values are uniform on ``[-1, 1]`` with zero rejected.  Positions are
    visited in sorted order, so equal seeds give identical value maps.
    """
    if field_kind not in ("finite", "real"):
        raise ModelError(f"unknown field kind {field_kind!r}; expected 'finite' or 'real'")
    p: int | None = None
    if field_kind == "finite":
        p = int(prime)
        if p <= _MIN_PRIME_EXCLUSIVE:
            raise ModelError(f"prime must exceed 2**31 for reliable generic ranks, got {p}")
        if not is_prime(p):
            raise ModelError(f"{p} is not prime")
    seed = int(seed) & _UINT64_MASK
    rng = np.random.default_rng(seed)
    values: dict[tuple[int, str, int, int], Any] = {}
    for idx, (a, b) in enumerate(structure.subsystems):
        for tag, mat in (("A", a), ("B", b)):
            for r, c in sorted(mat.nonzeros):
                if field_kind == "finite":
                    values[(idx, tag, r, c)] = int(rng.integers(1, p))
                else:
                    x = float(rng.uniform(-1.0, 1.0))
                    while x == 0.0:
                        x = float(rng.uniform(-1.0, 1.0))
                    values[(idx, tag, r, c)] = x
    return Realization(kind=field_kind, prime=p, seed=seed, values=values)
