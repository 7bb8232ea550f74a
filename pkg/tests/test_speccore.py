import math

import numpy as np
import pytest

from spectral_uncertainty import speccore as sc
from spectral_uncertainty.structures import adjacency_laplacian, build_path

P3 = np.array([[1.0, -1, 0], [-1, 2, -1], [0, -1, 1]])


@pytest.fixture
def p3():
    return sc.eigendecompose(P3)


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
def test_path3_eigenvalues(method):
    dec = sc.eigendecompose(P3, method=method)
    assert np.allclose(dec.eigenvalues, [0, 1, 3], atol=1e-12)
    assert np.allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(3), atol=1e-12)


def test_builder_laplacian_matches_hand_matrix():
    assert np.array_equal(adjacency_laplacian(build_path(3)).entries, P3)


def test_sign_convention(p3):
    q = p3.eigenvectors
    for k in range(3):
        col = q[:, k]
        assert col[np.flatnonzero(np.abs(col) > 1e-8)[0]] > 0


def test_reconstruction(p3):
    assert np.allclose(p3.matrix(), P3, atol=1e-12)


def test_jacobi_agrees_with_lapack():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((40, 40))
    a = a + a.T
    j = sc.eigendecompose(a, method="jacobi")
    l = sc.eigendecompose(a, method="lapack")
    assert np.allclose(j.eigenvalues, l.eigenvalues, atol=1e-10)
    assert np.allclose(np.abs(j.eigenvectors.T @ l.eigenvectors), np.eye(40), atol=1e-6)


def test_half_open_projector_excludes_boundary_eigenvalue(p3):
    e = sc.spectral_projector(p3, 1.0).entries
    assert np.allclose(e, np.full((3, 3), 1 / 3), atol=1e-12)
    assert np.allclose(sc.spectral_projector(p3, 1.0 + 1e-6).entries @ np.ones(3), np.ones(3))


def test_projector_at_zero_is_zero(p3):
    assert np.allclose(sc.spectral_projector(p3, 0.0).entries, 0)


def test_projector_negative_lambda(p3):
    with pytest.raises(sc.DomainError):
        sc.spectral_projector(p3, -1)


def test_band_projector_open_interval(p3):
    e = sc.band_projector(p3, 3.5, lower=0.0).entries
    assert math.isclose(np.trace(e), 2, abs_tol=1e-12)


def test_apply_function_square(p3):
    g = sc.apply_function(p3, lambda x: x**2)
    assert np.allclose(np.linalg.eigvalsh(g.entries), [0, 1, 9], atol=1e-10)
    assert np.allclose(g.entries, P3 @ P3, atol=1e-10)


def test_apply_function_not_finite():
    dec = sc.eigendecompose(np.diag([0.0, 1.0]))
    with pytest.raises(sc.DomainError):
        sc.apply_function(dec, lambda x: 1 / x)


def test_pseudo_power(p3):
    op, k = sc.pseudo_power(p3, 0.5)
    assert k == 1
    assert np.allclose(np.linalg.eigvalsh(op.entries), [0, 1, math.sqrt(3)], atol=1e-10)


def test_pseudo_power_rejects_negative():
    with pytest.raises(sc.PositivityError):
        sc.pseudo_power(sc.eigendecompose(np.diag([-1.0, 1.0])), 0.5)


def test_kernel_basis(p3):
    b = sc.kernel_basis(p3)
    assert b.shape == (3, 1)
    assert np.allclose(np.abs(b[:, 0]), 1 / math.sqrt(3))


def test_couple_norm_examples(frozen):
    v = np.ones(3) / math.sqrt(3)
    assert math.isclose(sc.norm_1_to_inf(np.outer(v, v)).value, 1 / 3, rel_tol=1e-14)
    for text, expected in frozen["inf_to_one"].items():
        m = np.array(eval(text), dtype=float)
        got = sc.norm_inf_to_1(m)
        assert got.exact
        assert math.isclose(got.value, expected, rel_tol=1e-14)
    assert math.isclose(sc.norm_1_to_2(np.array([[1.0, 0], [1, 0]])), math.sqrt(2), rel_tol=1e-15)


def test_inf_to_one_beyond_cutoff_is_upper_bound():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((6, 6))
    exact = sc.norm_inf_to_1(m).value
    bound = sc.norm_inf_to_1(m, exact_cutoff=3)
    assert not bound.exact
    assert bound.value >= exact


def test_nonnegative_entry_sum_is_exact():
    m = np.abs(np.random.default_rng(1).standard_normal((30, 30)))
    got = sc.norm_inf_to_1(m)
    assert got.exact and math.isclose(got.value, m.sum())


def test_symmetry_error():
    with pytest.raises(sc.SymmetryError):
        sc.SymmetricOperator(np.array([[0.0, 1], [0, 0]]))
    with pytest.raises(sc.SymmetryError):
        sc.SymmetricOperator(np.array([[np.nan]]))


def test_jacobi_sweep_budget():
    a = np.random.default_rng(2).standard_normal((20, 20))
    with pytest.raises(sc.EigenConvergenceError):
        sc.eigendecompose(a + a.T, method="jacobi", max_sweeps=1)


@pytest.mark.parametrize("writer,reader", [(sc.matrix_to_csv, sc.matrix_from_csv), (sc.matrix_to_json, sc.matrix_from_json)])
def test_matrix_roundtrip(writer, reader):
    m = np.random.default_rng(5).standard_normal((4, 4))
    assert np.allclose(reader(writer(m)), m, rtol=1e-14)


def test_matrix_csv_header_mismatch():
    with pytest.raises(ValueError):
        sc.matrix_from_csv("dim=3\n1,2\n3,4\n")


def test_format_number():
    assert sc.format_number(1 / 3) == "0.333333333333333"
