import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swcactus import (
    DEFAULT_PRIME,
    ModelError,
    StructuredMatrix,
    SwitchedStructure,
    parse_system,
    sample_realization,
    serialize_system,
    system_from_dict,
    system_to_dict,
)
from swcactus.model import is_prime, realization_to_dict, realized_dense


def test_structured_matrix_bounds():
    m = StructuredMatrix(2, 3, frozenset({(0, 0), (1, 2)}))
    assert m.nnz == 2
    assert m.columns_with_entries() == frozenset({0, 2})
    assert m.column_rows(0) == (0,)
    assert m.column_rows(1) == ()
    with pytest.raises(ModelError):
        StructuredMatrix(2, 2, frozenset({(2, 0)}))
    with pytest.raises(ModelError):
        StructuredMatrix(2, 2, frozenset({(0, -1)}))
    with pytest.raises(ModelError):
        StructuredMatrix(0, 2)


def test_zero_column_matrix_allowed():
    m = StructuredMatrix(3, 0)
    assert m.nnz == 0


def test_switched_structure_shape_checks():
    a = StructuredMatrix(2, 2)
    b = StructuredMatrix(2, 1)
    s = SwitchedStructure(n=2, subsystems=((a, b),))
    assert s.subsystem_count == 1
    assert s.input_counts == (1,)
    assert s.total_inputs == 1
    with pytest.raises(ModelError):
        SwitchedStructure(n=2, subsystems=())
    with pytest.raises(ModelError):
        SwitchedStructure(n=3, subsystems=((a, b),))
    with pytest.raises(ModelError):
        SwitchedStructure(n=2, subsystems=((a, StructuredMatrix(3, 1)),))


def test_parse_example1(example1):
    assert example1.n == 3
    assert example1.subsystem_count == 2
    a1, b1 = example1.subsystems[0]
    assert a1.nonzeros == frozenset({(1, 0)})
    assert b1.nonzeros == frozenset({(0, 0)})
    a2, b2 = example1.subsystems[1]
    assert a2.nonzeros == frozenset({(2, 0)})
    assert b2.cols == 1 and b2.nnz == 0


@pytest.mark.parametrize("doc, fragment", [
    ("not json", "not valid JSON"),
    ('[]', "top level"),
    ('{"n": 2}', "subsystems"),
    ('{"subsystems": []}', "'n'"),
    ('{"n": 0, "subsystems": [{"A": [], "B": {"cols": 0, "nonzeros": []}}]}', "positive"),
    ('{"n": true, "subsystems": [{"A": [], "B": {"cols": 0, "nonzeros": []}}]}', "positive"),
    ('{"n": 2, "subsystems": []}', "non-empty"),
    ('{"n": 2, "subsystems": [{"A": []}]}', "both 'A' and 'B'"),
    ('{"n": 2, "subsystems": [{"A": [], "B": {"cols": 1, "nonzeros": []}, "C": 1}]}', "unknown keys"),
    ('{"n": 2, "extra": 1, "subsystems": [{"A": [], "B": {"cols": 0, "nonzeros": []}}]}', "unknown top-level"),
    ('{"n": 2, "subsystems": [{"A": [[3, 1]], "B": {"cols": 0, "nonzeros": []}}]}', "(3, 1)"),
    ('{"n": 2, "subsystems": [{"A": [[0, 1]], "B": {"cols": 0, "nonzeros": []}}]}', "(0, 1)"),
    ('{"n": 2, "subsystems": [{"A": [[1, 1], [1, 1]], "B": {"cols": 0, "nonzeros": []}}]}', "duplicate"),
    ('{"n": 2, "subsystems": [{"A": [[1]], "B": {"cols": 0, "nonzeros": []}}]}', "pair"),
    ('{"n": 2, "subsystems": [{"A": [[1.5, 1]], "B": {"cols": 0, "nonzeros": []}}]}', "integers"),
    ('{"n": 2, "subsystems": [{"A": [], "B": {"cols": -1, "nonzeros": []}}]}', "non-negative"),
    ('{"n": 2, "subsystems": [{"A": [], "B": {"cols": 1, "nonzeros": [[1, 2]]}}]}', "(1, 2)"),
    ('{"n": 2, "subsystems": [{"A": [], "B": [[1, 1]]}]}', "'cols'"),
])
def test_parse_rejects(doc, fragment):
    with pytest.raises(ModelError) as err:
        parse_system(doc)
    assert fragment in str(err.value)


def test_error_names_subsystem():
    doc = {"n": 2, "subsystems": [
        {"A": [], "B": {"cols": 0, "nonzeros": []}},
        {"A": [[9, 1]], "B": {"cols": 0, "nonzeros": []}},
    ]}
    with pytest.raises(ModelError) as err:
        system_from_dict(doc)
    assert "subsystem 2" in str(err.value)


def test_roundtrip(example1, boost, chain10):
    for s in (example1, boost, chain10):
        text = serialize_system(s)
        again = parse_system(text)
        assert again == s
        assert serialize_system(again) == text


def test_system_to_dict_sorted(chain10):
    doc = system_to_dict(chain10)
    positions = doc["subsystems"][0]["A"]
    assert positions == sorted(positions)


def test_is_prime_known_values():
    for p in (2, 3, 5, 7, 31, 2 ** 31 - 1, (1 << 61) - 1):
        assert is_prime(p)
    for c in (0, 1, 4, 9, 25, 2 ** 32 + 1, (1 << 61) + 1, 561, 41041):
        assert not is_prime(c)


def test_sample_realization_deterministic(example1):
    r1 = sample_realization(example1, seed=7)
    r2 = sample_realization(example1, seed=7)
    r3 = sample_realization(example1, seed=8)
    assert r1.values == r2.values
    assert r1.values != r3.values
    assert set(r1.values) == {(0, "A", 1, 0), (0, "B", 0, 0), (1, "A", 2, 0)}
    for v in r1.values.values():
        assert 1 <= v < DEFAULT_PRIME


def test_sample_realization_real(example1):
    r = sample_realization(example1, field_kind="real", seed=3)
    assert r.kind == "real" and r.prime is None
    for v in r.values.values():
        assert -1.0 <= v <= 1.0 and v != 0.0


def test_sample_realization_validates(example1):
    with pytest.raises(ModelError):
        sample_realization(example1, field_kind="complex")
    with pytest.raises(ModelError):
        sample_realization(example1, prime=97)
    with pytest.raises(ModelError):
        sample_realization(example1, prime=(1 << 61) + 1)


def test_realized_dense(example1):
    r = sample_realization(example1, seed=1)
    a = realized_dense(example1, r, 0, "A")
    assert len(a) == 3 and len(a[0]) == 3
    assert a[1][0] == r.values[(0, "A", 1, 0)]
    assert a[0][0] == 0
    b = realized_dense(example1, r, 1, "B")
    assert b == [[0], [0], [0]]


def test_realization_to_dict(example1):
    r = sample_realization(example1, seed=2)
    doc = realization_to_dict(r)
    assert doc["field"] == "finite"
    assert doc["seed"] == 2
    assert len(doc["values"]) == 3
    assert doc["values"][0]["subsystem"] == 1
    json.dumps(doc)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 63))
def test_seed_mask_accepts_any(seed):
    import helpers
    sample_realization(helpers.load_system("example1"), seed=seed)
