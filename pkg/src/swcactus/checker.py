"""Structural controllability decision with cross-checked evidence.

The decisive test is cheap: every state reachable from the inputs in the
colored union graph, and a full-size independent edge set.  Everything else
computed here corroborates that verdict from an unrelated direction: a
randomized rank probe over a prime field, a stem/cycle cover certificate,
and linking-based dimension bounds.  The three views are provably equivalent,
so any disagreement means a bug, a malformed input, or an astronomically
unlucky random draw; it is reported loudly as :class:`ConsistencyError` with
the full instance attached rather than silently reconciled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cactus import (
    CactusCover,
    Decomposition,
    best_cactus_cover,
    conventional_cactus_cover,
    decompose,
)
from .mdg import DEFAULT_VERTEX_CAP, MdgSizeError, build_mdg, max_linking
from .model import DEFAULT_PRIME, SwitchedStructure, system_to_dict
from .rankcore import ControllabilityProbe, controllable_dim
from .unigraph import (
    UnionGraph,
    build_union_graph,
    format_vertex,
    input_edges_only,
    max_independent_edges,
    reachable_states,
)

DEFAULT_SEED = 1729
DEFAULT_TRIALS = 3
DEFAULT_LAYER_CAP = 12


class ConsistencyError(RuntimeError):
    """Two provably equivalent computations disagreed."""


@dataclass(frozen=True)
class DimBounds:
    """Sandwich on the generic controllable-subspace dimension.

    ``lower`` counts a cover's states, ``upper`` is the smaller of the
    reachable-state count and a depth-limited linking size.  When the depth
    needed for a sound linking bound is out of reach (layer cap or vertex
    cap), ``used_linking_bound`` is False and ``upper`` falls back to the
    reachable count alone.
    """

    lower: int
    upper: int
    used_linking_bound: bool
    linking_layers: int | None


@dataclass(frozen=True)
class CheckReport:
    structure: SwitchedStructure
    graph: UnionGraph
    reachable: frozenset[int]
    generic_rank: int
    controllable: bool
    certificate: Decomposition | None
    probe: ControllabilityProbe
    cover: CactusCover
    bounds: DimBounds


def _dump(structure: SwitchedStructure, facts: dict) -> str:
    body = {"system": system_to_dict(structure), "facts": facts}
    return json.dumps(body, sort_keys=True, indent=2)


def _inconsistent(message: str, structure: SwitchedStructure, **facts) -> ConsistencyError:
    return ConsistencyError(f"{message}\n{_dump(structure, facts)}")


def input_rank(g: UnionGraph) -> int:
    """Generic rank of the stacked input patterns alone."""
    return len(max_independent_edges(input_edges_only(g)))


def _linking_upper(structure: SwitchedStructure, g: UnionGraph,
                   reachable_count: int, layer_cap: int,
                   vertex_cap: int) -> tuple[int, bool, int | None]:
    depth_needed = structure.n - input_rank(g)
    if depth_needed > layer_cap:
        # a shallower linking can undershoot the true dimension, so it is
        # not a sound upper bound; fall back to reachability alone
        return reachable_count, False, None
    try:
        mdg = build_mdg(structure, depth_needed, vertex_cap=vertex_cap)
    except MdgSizeError:
        return reachable_count, False, None
    linking = max_linking(mdg)
    return min(reachable_count, linking.size), True, depth_needed


def dim_bounds(structure: SwitchedStructure, *, conventional: bool = False,
               layer_cap: int = DEFAULT_LAYER_CAP,
               vertex_cap: int = DEFAULT_VERTEX_CAP,
               graph: UnionGraph | None = None) -> DimBounds:
    """Cover and linking bounds on the generic dimension.

    With ``conventional=True`` the lower bound only uses covers drawn inside
    a single subsystem, which is how a per-mode analysis would bound the
    dimension; the default may mix colors and is never smaller.
    """
    g = graph if graph is not None else build_union_graph(structure)
    cover = conventional_cactus_cover(g) if conventional else best_cactus_cover(g)
    reachable_count = len(reachable_states(g))
    upper, used_linking, layers = _linking_upper(
        structure, g, reachable_count, layer_cap, vertex_cap)
    return DimBounds(
        lower=len(cover.covered),
        upper=upper,
        used_linking_bound=used_linking,
        linking_layers=layers,
    )


def check(structure: SwitchedStructure, *, seed: int = DEFAULT_SEED,
          trials: int = DEFAULT_TRIALS, prime: int = DEFAULT_PRIME,
          layer_cap: int = DEFAULT_LAYER_CAP,
          vertex_cap: int = DEFAULT_VERTEX_CAP) -> CheckReport:
    """Decide structural controllability and cross-validate every view.

    The verdict comes from reachability plus generic rank.  The rank probe,
    the cover certificate, and the dimension bounds must all agree with it;
    a contradiction raises :class:`ConsistencyError` carrying the instance.
    """
    n = structure.n
    g = build_union_graph(structure)
    reachable = reachable_states(g)
    independent = max_independent_edges(g)
    grank = len(independent)
    controllable = len(reachable) == n and grank == n

    certificate: Decomposition | None = None
    if controllable:
        certificate = decompose(independent, reachable)
        if certificate.dropped or certificate.covered != frozenset(range(n)):
            raise _inconsistent(
                "verdict says controllable but the full independent set "
                "does not decompose into a total cover",
                structure,
                covered=sorted(v + 1 for v in certificate.covered),
                dropped=[edge_to_dict(e) for e in certificate.dropped],
            )

    probe = controllable_dim(structure, seed=seed, trials=trials, prime=prime)
    if controllable and probe.dim != n:
        raise _inconsistent(
            "graph criteria say controllable but the rank probe disagrees",
            structure, probe_dim=probe.dim, trial_dims=list(probe.trial_dims),
            seed=seed, prime=prime)
    if not controllable and probe.dim == n:
        raise _inconsistent(
            "rank probe reached full dimension on a structure the graph "
            "criteria reject",
            structure, reachable=sorted(v + 1 for v in reachable),
            generic_rank=grank, seed=seed, prime=prime)

    cover = best_cactus_cover(g)
    reachable_count = len(reachable)
    upper, used_linking, layers = _linking_upper(
        structure, g, reachable_count, layer_cap, vertex_cap)
    bounds = DimBounds(lower=len(cover.covered), upper=upper,
                       used_linking_bound=used_linking, linking_layers=layers)

    if not bounds.lower <= probe.dim <= bounds.upper:
        raise _inconsistent(
            "rank probe escaped the cover/linking sandwich",
            structure, lower=bounds.lower, dim=probe.dim, upper=bounds.upper,
            seed=seed, prime=prime)
    if controllable and (bounds.lower != n or bounds.upper != n):
        raise _inconsistent(
            "controllable structure must pinch the bounds at n",
            structure, lower=bounds.lower, upper=bounds.upper)

    return CheckReport(
        structure=structure,
        graph=g,
        reachable=reachable,
        generic_rank=grank,
        controllable=controllable,
        certificate=certificate,
        probe=probe,
        cover=cover,
        bounds=bounds,
    )


def edge_to_dict(edge) -> dict:
    return {
        "from": format_vertex(edge.tail),
        "to": f"x{edge.head + 1}",
        "color": edge.color + 1,
    }


def decomposition_to_dict(decomposition: Decomposition) -> dict:
    return {
        "stems": [edge_to_dict(e) for e in decomposition.stems],
        "cycles": [[edge_to_dict(e) for e in group]
                   for group in decomposition.cycle_groups],
        "dropped": [edge_to_dict(e) for e in decomposition.dropped],
        "covered": sorted(v + 1 for v in decomposition.covered),
    }


def report_to_dict(report: CheckReport) -> dict:
    """JSON-ready view of a check, 1-based and fully deterministic."""
    out = {
        "n": report.structure.n,
        "subsystems": report.structure.subsystem_count,
        "reachable": sorted(v + 1 for v in report.reachable),
        "generic_rank": report.generic_rank,
        "controllable": report.controllable,
        "dimension": {
            "value": report.probe.dim,
            "layers_used": report.probe.layers_used,
            "trial_dims": list(report.probe.trial_dims),
            "seed": report.probe.seed,
            "prime": report.probe.prime,
        },
        "bounds": {
            "lower": report.bounds.lower,
            "upper": report.bounds.upper,
            "used_linking_bound": report.bounds.used_linking_bound,
            "linking_layers": report.bounds.linking_layers,
        },
        "cover": {
            "restricted_color": (None if report.cover.restricted_color is None
                                 else report.cover.restricted_color + 1),
            **decomposition_to_dict(report.cover.decomposition),
        },
        "certificate": (None if report.certificate is None
                        else decomposition_to_dict(report.certificate)),
    }
    return out
