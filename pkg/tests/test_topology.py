import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusharmonic import (
    EdgeWeights,
    InvalidComplexError,
    ParseError,
    ToroidalComplex,
    complex_from_dict,
    complex_to_dict,
    load_json,
    one_vertex_triangulation,
    random_instance,
    square_grid,
    triangulated_grid,
    validate_complex,
)
from torusharmonic.topology import (
    DualComplex,
    flip_edge,
    lifted_edge_keys,
    relabel,
    vertex_degrees,
    vertex_rotations,
)

from conftest import DATA, named_complexes


def _canon(face):
    face = list(face)
    k = face.index(min(face))
    return tuple(face[k:] + face[:k])


def _kinds(report):
    return {i.kind for i in report.issues}


# -- validation --------------------------------------------------------------


def test_one_vertex_triangulation_is_valid():
    cx = one_vertex_triangulation()
    rep = validate_complex(cx)
    assert rep.valid, rep.summary()
    assert (cx.num_vertices, cx.num_edges, cx.num_faces) == (1, 3, 2)
    assert cx.labels.tolist() == [[1, 0], [1, 1], [0, 1]]
    assert rep.marking_degree == 1


def test_two_by_two_grid_is_valid():
    cx = square_grid(2)
    assert (cx.num_vertices, cx.num_edges, cx.num_faces) == (4, 8, 4)
    assert all(len(f) == 4 for f in cx.faces)
    assert validate_complex(cx).valid


def test_broken_diagonal_label_is_reported_per_face():
    cx = relabel(one_vertex_triangulation(), [(1, 0), (1, 0), (0, 1)])
    rep = validate_complex(cx)
    assert not rep.valid
    assert "face-label-sum" in _kinds(rep)
    assert "face label sum ≠ 0" in rep.summary()
    assert {i.face for i in rep.issues if i.kind == "face-label-sum"} == {0, 1}
    with pytest.raises(InvalidComplexError):
        cx.require_valid()


def test_duplicate_edge_id():
    d = complex_to_dict(one_vertex_triangulation())
    d["edges"][1]["id"] = 0
    cx, _ = complex_from_dict(d)
    assert "duplicate-edge-id" in _kinds(validate_complex(cx))


def test_unknown_edge_reference():
    d = complex_to_dict(one_vertex_triangulation())
    d["faces"][0][0] = 9
    cx, _ = complex_from_dict(d)
    assert "unknown-edge" in _kinds(validate_complex(cx))


def test_non_manifold_edge():
    d = complex_to_dict(one_vertex_triangulation())
    d["faces"][1][0] = 1  # edge 1 now used twice in the same direction
    cx, _ = complex_from_dict(d)
    rep = validate_complex(cx)
    assert "edge-incidence" in _kinds(rep)
    assert any(i.edge == 1 for i in rep.issues)


def test_disconnected_or_wrong_euler_characteristic():
    d = complex_to_dict(one_vertex_triangulation())
    d["num_vertices"] = 2  # isolated vertex
    cx, _ = complex_from_dict(d)
    kinds = _kinds(validate_complex(cx))
    assert "disconnected" in kinds or "euler" in kinds


def test_wrong_marking_is_rejected():
    # labels (2,0),(2,1),(0,1) close on faces but only span an index-2 sublattice
    cx = relabel(one_vertex_triangulation(), [(2, 0), (2, 1), (0, 1)])
    rep = validate_complex(cx)
    assert "marking" in _kinds(rep)
    # swapping the generators reverses orientation
    cx = relabel(one_vertex_triangulation(), [(0, 1), (1, 1), (1, 0)])
    assert "marking" in _kinds(validate_complex(cx))


@pytest.mark.parametrize("name", list(named_complexes()))
def test_euler_characteristic_exact(name):
    cx = named_complexes()[name]
    assert cx.num_vertices - cx.num_edges + cx.num_faces == 0
    assert validate_complex(cx).euler_characteristic == 0


@pytest.mark.parametrize("name", list(named_complexes()))
def test_label_forms_close_on_faces(name):
    cx = named_complexes()[name]
    for idx, sg in cx.face_edges:
        assert (cx.labels[idx] * sg[:, None]).sum(axis=0).tolist() == [0, 0]


# -- JSON --------------------------------------------------------------------


def test_json_round_trip(tmp_path):
    cx, w = random_instance(7, seed=3)
    d = complex_to_dict(cx, w)
    back, w2 = complex_from_dict(json.loads(json.dumps(d)))
    assert np.array_equal(back.tails, cx.tails)
    assert np.array_equal(back.heads, cx.heads)
    assert np.array_equal(back.labels, cx.labels)
    assert back.faces == cx.faces
    assert np.array_equal(w2.values, w.values)


def test_weight_defaults_to_one():
    d = complex_to_dict(one_vertex_triangulation())
    for e in d["edges"]:
        del e["weight"]
    _, w = complex_from_dict(d)
    assert w.values.tolist() == [1.0, 1.0, 1.0]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("faces"),
        lambda d: d["faces"][0].__setitem__(0, 0),
        lambda d: d["edges"][0].__setitem__("tail", "a"),
        lambda d: d["edges"][0].__setitem__("weight", "heavy"),
        lambda d: d.__setitem__("edges", {}),
    ],
)
def test_parse_errors(mutate):
    d = complex_to_dict(one_vertex_triangulation())
    mutate(d)
    with pytest.raises(ParseError):
        complex_from_dict(d)


def test_malformed_file():
    with pytest.raises(ParseError):
        load_json(DATA / "malformed.json")


def test_data_files_load():
    cx, w = load_json(DATA / "one_vertex.json")
    assert cx.report.valid and w.values.tolist() == [1.0, 1.0, 1.0]
    cx, w = load_json(DATA / "grid4x4.json")
    assert cx.report.valid and cx.num_vertices == 16 and np.all(w.values == 1.0)


# -- dual --------------------------------------------------------------------


def test_dual_of_one_vertex_triangulation():
    dual = one_vertex_triangulation().dual
    assert isinstance(dual, DualComplex)
    assert (dual.num_vertices, dual.num_edges, dual.num_faces) == (2, 3, 1)
    assert len(dual.faces[0]) == 6
    assert dual.report.valid, dual.report.summary()


def test_dual_of_two_by_two_grid_is_a_grid():
    dual = square_grid(2).dual
    assert (dual.num_vertices, dual.num_edges, dual.num_faces) == (4, 8, 4)
    assert all(len(f) == 4 for f in dual.faces)
    assert vertex_degrees(dual).tolist() == [4, 4, 4, 4]
    assert dual.report.valid


@pytest.mark.parametrize("name", list(named_complexes()))
def test_dual_invariants(name):
    cx = named_complexes()[name]
    dual = cx.dual
    assert dual.report.valid, dual.report.summary()
    assert dual.num_edges == cx.num_edges
    assert dual.num_vertices - dual.num_edges + dual.num_faces == 0
    # dual vertex degrees equal primal face sizes
    assert vertex_degrees(dual).tolist() == [len(f) for f in cx.faces]
    left, right = cx.left_right
    assert np.array_equal(dual.tails, right) and np.array_equal(dual.heads, left)


@pytest.mark.parametrize("name", list(named_complexes()))
def test_double_dual_reverses_edges(name):
    cx = named_complexes()[name]
    dd = cx.dual.dual
    assert dd.num_vertices == cx.num_vertices
    assert dd.edge_ids == cx.edge_ids
    assert np.array_equal(dd.tails, cx.heads)
    assert np.array_equal(dd.heads, cx.tails)
    assert np.array_equal(dd.labels, -cx.labels)
    flipped = sorted(_canon([(e, -s) for e, s in f]) for f in dd.faces)
    assert flipped == sorted(_canon(f) for f in cx.faces)


def test_vertex_rotations_cover_every_half_edge():
    cx = triangulated_grid(3)
    rot = vertex_rotations(cx)
    seen = sorted(h for orbit in rot for h in orbit)
    assert seen == sorted((e, s) for e in range(cx.num_edges) for s in (1, -1))
    assert [len(o) for o in rot] == vertex_degrees(cx).tolist()


# -- builders ----------------------------------------------------------------


def test_triangulated_grid_counts():
    cx = triangulated_grid(4)
    assert (cx.num_vertices, cx.num_edges, cx.num_faces) == (16, 48, 32)
    assert cx.report.valid


def test_flip_keeps_validity():
    cx = triangulated_grid(3)
    new = flip_edge(cx, 2)
    assert new is not None and new.report.valid


def test_random_instance_one_vertex():
    cx, w = random_instance(1, seed=4)
    ref = one_vertex_triangulation()
    assert np.array_equal(cx.labels, ref.labels) and cx.faces == ref.faces
    assert w.positive and np.all((w.values >= 0.1) & (w.values <= 10))


def test_random_instance_sixteen_is_valid():
    cx, _ = random_instance(16, seed=0)
    assert cx.num_vertices == 16 and cx.report.valid


def test_random_instance_is_reproducible():
    a, wa = random_instance(14, seed=9)
    b, wb = random_instance(14, seed=9)
    assert a.faces == b.faces and np.array_equal(a.labels, b.labels)
    assert np.array_equal(wa.values, wb.values)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 25), seed=st.integers(0, 10_000))
def test_random_instances_are_simple_valid_triangulations(n, seed):
    cx, w = random_instance(n, seed=seed)
    assert cx.num_vertices == n
    assert cx.report.valid
    assert cx.dual.report.valid
    if n > 1:
        keys = lifted_edge_keys(cx)
        assert len(set(keys)) == len(keys)
        assert vertex_degrees(cx).min() >= 3
    assert len(w) == cx.num_edges and w.positive


def test_edge_weights_helpers():
    w = EdgeWeights([1.0, -0.5, 2.0])
    assert not w.positive and not w.has_zero
    assert w.scaled(2).values.tolist() == [2.0, -1.0, 4.0]
    assert np.allclose(w.reciprocal().values, [1.0, -2.0, 0.5])
    assert EdgeWeights.uniform(4).values.tolist() == [1.0] * 4
    assert EdgeWeights([0.0, 1.0]).has_zero


def test_complex_is_immutable_in_practice():
    cx = one_vertex_triangulation()
    assert isinstance(cx, ToroidalComplex)
    with pytest.raises(Exception):
        cx.num_vertices = 5
