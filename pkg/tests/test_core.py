import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hmd.core import (
    Hypergraph,
    build,
    edge_extrema,
    from_normalized,
    inner_w,
    load_hypergraph,
    load_vector,
    norm_w,
    to_density,
    to_measure,
    to_normalized,
)
from hmd.errors import (
    BetaSumMismatch,
    EmptyEdge,
    IsolatedVertex,
    LengthMismatch,
    NegativeBeta,
    NonPositiveEdgeWeight,
    ValidationError,
)
from strategies import graph_and_vector


def test_single_edge_weights():
    H = build({"n": 2, "edges": [{"vertices": [0, 1], "w": 1.0, "beta0": 1.0}]})
    assert H.vertex_weights.tolist() == [1.0, 1.0]


def test_mediator_edge_valid(H1):
    assert H1.vertex_weights.tolist() == [1.0, 1.0, 1.0]
    assert H1.edges[0].beta_of(2) == 0.5 and H1.edges[0].beta0 == 0.5


def test_beta0_defaults_to_remainder():
    H = build({"n": 3, "edges": [{"vertices": [0, 1, 2], "w": 2, "beta": {"2": 0.25}}]})
    assert H.edges[0].beta0 == pytest.approx(0.75)


@pytest.mark.parametrize(
    "edge, exc",
    [
        ({"vertices": [0, 1], "beta0": 0.7, "beta": {"0": 0.7}}, BetaSumMismatch),
        ({"vertices": [], "beta0": 1.0}, EmptyEdge),
        ({"vertices": [0, 1], "w": 0.0, "beta0": 1.0}, NonPositiveEdgeWeight),
        ({"vertices": [0, 1], "w": -1.0, "beta0": 1.0}, NonPositiveEdgeWeight),
        ({"vertices": [0, 1], "beta0": 1.5, "beta": {"0": -0.5}}, NegativeBeta),
        ({"vertices": [0, 5], "beta0": 1.0}, ValidationError),
        ({"vertices": [0, 0], "beta0": 1.0}, ValidationError),
        ({"vertices": [0, 1], "beta0": 0.5, "beta": {"2": 0.5}}, ValidationError),
    ],
)
def test_build_rejects(edge, exc):
    with pytest.raises(exc):
        build({"n": 3, "edges": [edge, {"vertices": [1, 2], "beta0": 1.0}]})


def test_isolated_vertex():
    with pytest.raises(IsolatedVertex):
        build({"n": 3, "edges": [{"vertices": [0, 1], "beta0": 1.0}]})


def test_beta_sum_tolerance():
    build({"n": 2, "edges": [{"vertices": [0, 1], "beta0": 0.5 + 5e-10, "beta": {"0": 0.5}}]})
    with pytest.raises(BetaSumMismatch):
        build({"n": 2, "edges": [{"vertices": [0, 1], "beta0": 0.5 + 5e-9, "beta": {"0": 0.5}}]})


def test_labels_must_be_distinct():
    with pytest.raises(ValidationError):
        build({"n": 2, "labels": ["a", "a"], "edges": [{"vertices": [0, 1]}]})


def test_transforms_examples(H0, H2):
    assert to_measure(H0, [1, -1]).tolist() == [1, -1]
    assert to_measure(H2, [1, 0, -1]).tolist() == [1, 0, -1]
    np.testing.assert_allclose(to_normalized(H2, [1, 1, 1]), [1, math.sqrt(2), 1])


def test_inner_examples(H0, H2):
    assert inner_w(H2, [1, 0, -1], [1, 1, 1]) == 0.0
    assert norm_w(H2, [0, 0, 0]) == 0.0
    assert norm_w(H0, [1, -1]) == pytest.approx(math.sqrt(2))


def test_length_mismatch(H2):
    for fn in (to_measure, to_density, to_normalized, from_normalized, norm_w):
        with pytest.raises(LengthMismatch):
            fn(H2, [1.0, 2.0])
    with pytest.raises(LengthMismatch):
        inner_w(H2, [1, 2, 3], [1, 2])


def test_edge_extrema_examples():
    e = (0, 1, 2)
    ext = edge_extrema(e, [1, -1, 0])
    assert ext.max_set == {0} and ext.min_set == {1}
    ext = edge_extrema((0, 1), [5, 5])
    assert ext.max_set == ext.min_set == {0, 1}
    ext = edge_extrema(e, [2, 2, 0])
    assert ext.max_set == {0, 1} and ext.min_set == {2}


@given(graph_and_vector())
def test_transform_roundtrips(Hf):
    H, f = Hf
    g = np.linspace(-1, 1, H.n)
    x, y = to_normalized(H, f), to_normalized(H, g)
    assert abs(float(x @ y) - inner_w(H, f, g)) <= 1e-12 * max(1.0, abs(inner_w(H, f, g)))
    np.testing.assert_allclose(to_density(H, to_measure(H, f)), f, rtol=1e-15, atol=0)
    np.testing.assert_allclose(from_normalized(H, x), f, rtol=1e-15, atol=1e-300)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
def test_extrema_sets_nonempty(vals):
    verts = tuple(range(len(vals)))
    ext = edge_extrema(verts, vals)
    assert ext.max_set and ext.min_set
    assert ext.max_set <= set(verts) and ext.min_set <= set(verts)
    if ext.fmax != ext.fmin:
        assert not ext.max_set & ext.min_set


def test_json_roundtrip(H1, tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps(H1.to_dict()))
    H = load_hypergraph(str(p))
    assert H.to_dict() == H1.to_dict()
    f = load_vector(H, io.StringIO('{"values": [1, -1, 0]}'))
    assert f.tolist() == [1.0, -1.0, 0.0]


def test_bad_json(tmp_path):
    p = tmp_path / "h.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError):
        load_hypergraph(str(p))


def test_with_beta0_one(H1):
    H = H1.with_beta0_one()
    assert H.edges[0].beta0 == 1.0 and not H.edges[0].beta
    assert isinstance(H, Hypergraph) and H.labels == H1.labels


def test_index_of(H2):
    assert H2.index_of("b") == 1 and H2.index_of("2") == 2
    with pytest.raises(ValidationError):
        H2.index_of("z")
