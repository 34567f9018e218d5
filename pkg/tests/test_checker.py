import json

import numpy as np
import pytest

import helpers
import swcactus.checker as checker_mod
from swcactus import (
    CheckReport,
    ConsistencyError,
    build_union_graph,
    check,
    dim_bounds,
    input_rank,
    report_to_dict,
)
from swcactus.rankcore import ControllabilityProbe


def test_check_example1(example1):
    report = check(example1)
    assert report.controllable
    assert report.generic_rank == 3
    assert report.reachable == frozenset({0, 1, 2})
    assert report.probe.dim == 3
    assert report.bounds.lower == 3 and report.bounds.upper == 3
    assert report.certificate is not None
    assert report.certificate.covered == frozenset({0, 1, 2})


def test_check_boost(boost):
    report = check(boost)
    assert report.controllable
    assert report.certificate is not None
    assert len(report.certificate.cycle_groups) == 1


def test_check_chain10(chain10):
    report = check(chain10)
    assert not report.controllable
    assert report.certificate is None
    assert report.generic_rank == 9
    assert len(report.reachable) == 10
    assert report.probe.dim == 8
    assert report.bounds == checker_mod.DimBounds(8, 8, True, 9)


def test_conventional_bounds_chain10(chain10):
    report = check(chain10)
    conv = dim_bounds(chain10, conventional=True, graph=report.graph)
    assert conv.lower == 6
    assert conv.upper == 8


def test_layer_cap_fallback(chain10):
    bounds = dim_bounds(chain10, layer_cap=3)
    assert not bounds.used_linking_bound
    assert bounds.linking_layers is None
    assert bounds.upper == 10
    assert bounds.lower == 8


def test_vertex_cap_fallback(chain10):
    bounds = dim_bounds(chain10, vertex_cap=50)
    assert not bounds.used_linking_bound
    assert bounds.upper == 10


def test_input_rank(example1, chain10):
    assert input_rank(build_union_graph(example1)) == 1
    assert input_rank(build_union_graph(chain10)) == 1


def test_consistency_error_carries_instance(example1, monkeypatch):
    def broken(structure, *, seed, trials, prime):
        return ControllabilityProbe(
            dim=1, layers_used=1, trial_dims=(1,) * trials,
            trial_layers=(1,) * trials, seed=seed, prime=prime)

    monkeypatch.setattr(checker_mod, "controllable_dim", broken)
    with pytest.raises(ConsistencyError) as err:
        check(example1)
    text = str(err.value)
    assert '"system"' in text
    payload = json.loads(text[text.index("\n") + 1:])
    assert payload["system"]["n"] == 3


def test_consistency_error_on_impossible_dim(chain10, monkeypatch):
    def inflated(structure, *, seed, trials, prime):
        return ControllabilityProbe(
            dim=10, layers_used=9, trial_dims=(10,) * trials,
            trial_layers=(9,) * trials, seed=seed, prime=prime)

    monkeypatch.setattr(checker_mod, "controllable_dim", inflated)
    with pytest.raises(ConsistencyError):
        check(chain10)


def test_report_to_dict_round_trips(example1, chain10):
    for structure in (example1, chain10):
        report = check(structure)
        obj = report_to_dict(report)
        json.dumps(obj)
        assert obj["n"] == structure.n
        assert obj["controllable"] == report.controllable
        assert obj["generic_rank"] == report.generic_rank
        assert obj["dimension"]["value"] == report.probe.dim
        assert obj["bounds"]["lower"] == report.bounds.lower
        assert sorted(obj["reachable"]) == sorted(
            i + 1 for i in report.reachable)


def test_mini_harness_is_consistent():
    rng = np.random.default_rng(97)
    for _ in range(50):
        s = helpers.random_structure(rng)
        report = check(s, seed=1729)
        assert isinstance(report, CheckReport)
        assert report.bounds.lower <= report.probe.dim <= report.bounds.upper
        if report.controllable:
            assert report.certificate is not None
        else:
            assert report.certificate is None
