import math

import numpy as np
import pytest

from spectral_uncertainty import structures as st
from spectral_uncertainty.speccore import eigendecompose


def test_torus_size_and_degree():
    s = st.build_cycle_torus(2, 3)
    assert s.vertex_count == 9
    assert np.all(s.degree == 4)


def test_four_cycle(frozen):
    s = st.build_cycle_torus(1, 4)
    assert s.distance.tolist() == [0, 1, 2, 1]
    w = eigendecompose(st.adjacency_laplacian(s)).eigenvalues
    assert np.allclose(w, frozen["four_cycle"]["laplacian"], atol=1e-12)


def test_triangle_spectrum():
    w = eigendecompose(st.adjacency_laplacian(st.build_cycle_torus(1, 3))).eigenvalues
    assert np.allclose(w, [0, 3, 3], atol=1e-12)


def test_tree_ball_sizes(frozen):
    for R, size in frozen["tree_ball_sizes_n3"].items():
        assert st.tree_ball_size(3, int(R)) == size
        assert st.build_tree_ball(3, int(R)).vertex_count == size


def test_tree_single_vertex():
    s = st.build_tree_ball(3, 0)
    assert s.vertex_count == 1


def test_tree_ball_volume_levels():
    s = st.build_tree_ball(3, 3)
    assert st.ball_volume(s, 2.5) == 10


def test_capacity():
    with pytest.raises(st.CapacityError):
        st.build_tree_ball(3, 20)
    with pytest.raises(st.CapacityError):
        st.build_cycle_torus(3, 64, size_cap=1000)


def test_transforms():
    tr = st.exp_scaled_transform(math.log(2) / 3)
    assert math.isclose(float(tr(np.array([3.0]))[0]), 2.0, rel_tol=1e-14)
    ps = st.power_shift_transform(0.5)
    assert math.isclose(float(ps(np.array([3.0]))[0]), 6.0, rel_tol=1e-14)
    assert st.transform_from_dict({"kind": "exp_scaled", "parameters": [1.0, 1]}).to_dict() == {
        "kind": "exp_scaled",
        "parameters": [1.0, 1],
    }
    with pytest.raises(st.TransformError):
        st.exp_scaled_transform(1.0, 2)
    with pytest.raises(st.TransformError):
        st.transform_from_dict({"kind": "nope"})


def test_symmetric_space_transform_vanishes_at_origin():
    tr = st.symmetric_space_transform(2, 1, 1.0)
    assert abs(float(tr(np.array([0.0]))[0])) < 1e-15
    with pytest.raises(st.TransformError):
        tr.to_dict()


def test_dirichlet_laplacian_on_tree_ball_exceeds_gap():
    s = st.build_tree_ball(3, 4)
    w = eigendecompose(st.adjacency_laplacian(s, boundary="dirichlet")).eigenvalues
    assert w[0] > 3 - 2 * math.sqrt(2)


def test_transition_laplacian_spectrum_in_0_2():
    s = st.build_tree_ball(3, 3)
    w = eigendecompose(st.transition_laplacian(s)).eigenvalues
    assert w[0] > -1e-12 and w[-1] < 2 + 1e-12


def test_custom_disconnected():
    adj = np.zeros((3, 3), dtype=int)
    adj[0, 1] = adj[1, 0] = 1
    with pytest.raises(st.StructureError):
        st.build_custom(adj)


def test_json_roundtrip():
    s = st.build_tree_ball(3, 2)
    back = st.structure_from_json(st.structure_to_json(s))
    assert np.array_equal(back.adjacency, s.adjacency)
    assert np.array_equal(back.distance, s.distance)
    assert back.root_index == s.root_index


def test_torus_ball_volume_matches_lattice_count():
    from spectral_uncertainty.analytics import lattice_ball_volume

    s = st.build_cycle_torus(2, 20)
    for r in (1, 2.5, 4, 7, 10):
        assert st.ball_volume(s, r) == lattice_ball_volume(2, r)


def test_kappa():
    assert math.isclose(st.kappa(3), math.log(2))
