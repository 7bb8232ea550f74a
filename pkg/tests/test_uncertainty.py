import math

import numpy as np
import pytest

from spectral_uncertainty import growth, uncertainty as u
from spectral_uncertainty.speccore import DomainError, eigendecompose
from spectral_uncertainty.structures import adjacency_laplacian, build_cycle_torus

INF = math.inf


def four_cycle_pair(restriction="complement_of_kernel_T"):
    L = eigendecompose(adjacency_laplacian(build_cycle_torus(1, 4)))
    T = eigendecompose(np.diag([0.0, 1.0, 2.0, 1.0]))
    return u.OperatorPair(L, T, restriction=restriction)


PHI = growth.power_growth(2.0, 3.0)


@pytest.fixture(scope="module")
def micro():
    pair = four_cycle_pair()
    t_grid = u.default_t_grid(pair.L_eff, interval_A=(0, INF))
    bundle = u.verify_hypotheses(pair, PHI, 1.0, 1.0, 0.5, (0, INF), t_grid)
    return pair, bundle, t_grid


def brute_K(pair, phi, t_grid, exclude_ker_L):
    # explicit projector matrices from eigh, no profile bookkeeping
    w, q = np.linalg.eigh(pair.L.matrix())
    best = 0.0
    for t in t_grid:
        keep = (w < 1 / t - 1e-9) & ((w > 1e-9) if exclude_ker_L else True)
        e = q[:, keep] @ q[:, keep].T
        best = max(best, np.abs(e).max() * float(phi(t)))
    return math.sqrt(best)


def test_micro_hypotheses_match_brute_force(micro):
    pair, bundle, t_grid = micro
    assert bundle.M == pytest.approx(1.0, rel=1e-9)
    assert bundle.K == pytest.approx(brute_K(pair, PHI, t_grid, False), rel=1e-12)
    assert bundle.ip0_exact


def test_micro_local_passes(micro):
    pair, bundle, t_grid = micro
    rep = u.verify_local(pair, bundle, t_grid)
    assert rep.all_pass and not rep.violations
    assert rep.paper_constant == pytest.approx(u.local_constant(0.5, 1, bundle.K, 1.0))
    assert np.all(rep.extra["sharp_scaled"] <= rep.paper_constant)
    # every eigenvector in H0 plus 100 random vectors at each t
    ids = {row.vector_id for row in rep.rows}
    assert sum(i.startswith("rand_") for i in ids) == 100
    assert len(rep.rows) == len(ids) * len(t_grid)


def test_micro_sharp_constant_by_brute_force(micro):
    pair, bundle, t_grid = micro
    rep = u.verify_local(pair, bundle, t_grid)
    # H0 = vectors with f(0) = 0; maximise ||E f|| / ||T^g f|| by a generalized eigenproblem
    tvals = np.array([0, 1, 2, 1.0]) ** 0.5
    w, q = np.linalg.eigh(pair.L.matrix())
    for t, sharp in zip(t_grid[::7], rep.extra["sharp_scaled"][::7] / t_grid[::7] ** 0.5):
        keep = w < 1 / t - 1e-9
        e = q[:, keep] @ q[:, keep].T
        b = np.eye(4)[:, 1:]
        a_mat = b.T @ e @ b
        m_mat = b.T @ np.diag(tvals**2) @ b
        top = float(np.max(np.linalg.eigvalsh(np.linalg.solve(np.linalg.cholesky(m_mat), np.linalg.solve(np.linalg.cholesky(m_mat), a_mat).T))))
        assert sharp == pytest.approx(math.sqrt(max(top, 0.0)), rel=1e-9, abs=1e-12)


def test_micro_both_kernels_local_and_global():
    pair = four_cycle_pair("complement_of_both_kernels")
    t_grid = u.default_t_grid(pair.L_eff, interval_A=(0, INF))
    bundle = u.verify_hypotheses(pair, PHI, 1.0, 1.0, 0.5, (0, INF), t_grid)
    assert bundle.K == pytest.approx(brute_K(pair, PHI, t_grid, True), rel=1e-12)
    local = u.verify_local(pair, bundle, t_grid)
    assert local.all_pass
    ids, vecs = u.generate_test_vectors(pair)
    glob = u.verify_global(pair, 1.0, 1.0, 0.5, 1.0, local.paper_constant, vecs, ids)
    assert glob.all_pass
    assert glob.max_ratio <= 1 + 1e-9
    # test space is orthogonal to constants and to delta_0
    assert np.allclose(vecs.sum(axis=0), 0, atol=1e-12)
    assert np.allclose(vecs[0], 0, atol=1e-12)


def test_ip0_failure_is_named():
    pair = four_cycle_pair()
    with pytest.raises(u.HypothesisError) as ei:
        u.verify_hypotheses(pair, growth.power_growth(2.0, 0.5), 1.0, 1.0, 0.5, (0, INF))
    assert ei.value.name == "ip0"
    assert ei.value.value > ei.value.bound


def test_linear_phi_passes_ip0_but_not_ip1(frozen):
    pair = four_cycle_pair()
    phi = growth.power_growth(1.0, 2.0)
    jumps, norms, _ = u.ip0_profile(pair)
    assert np.all(norms <= 2 * jumps)
    # F((0, r)) counts vertices with 0 < rho < r
    vols = frozen["four_cycle"]["ball_volumes"]
    for r in (1.5, 2.5):
        assert u._profile_at(*u.projector_norm_profile(pair.T_eff, "inf->1", True)[:2], u._count_below(pair.T_eff, np.array([r])))[0] == vols[str(r)] - 1
    with pytest.raises(u.HypothesisError) as ei:
        u.verify_hypotheses(pair, phi, 1.0, 1.0, 0.5, (0, INF))
    assert ei.value.name == "ip1"


def test_zero_projector_gives_K_zero():
    L = eigendecompose(np.diag([5.0, 6.0]))
    T = eigendecompose(np.diag([1.0, 2.0]))
    pair = u.OperatorPair(L, T)
    # 1/t < 5 on A, below the spectrum of L, so E_{1/t} = 0
    t = np.geomspace(0.21, 0.3, 5)
    b = u.verify_hypotheses(pair, growth.power_growth(2.0, 3.0), 1.0, 1.0, 0.5, (0.2, 0.31), t)
    assert b.K == 0.0


def test_local_constant_oracle(frozen):
    assert u.local_constant(0.5, 1.0, 2.0, 1.0) == pytest.approx(frozen["local_constant_half_1_2_1"], rel=1e-15)
    with pytest.raises(DomainError):
        u.local_constant(0, 1, 1, 1)


def test_global_constant_oracles(frozen):
    D, K = u.global_constants(1.0, 2.0, 1.0, 1.0, 2.0)
    assert D == pytest.approx(frozen["global_D_gamma1_beta2_C2"], rel=1e-14)
    assert K == 1.0
    D, K = u.global_constants(1.0, 1.0, 1.0, 1.0, 3.5)
    assert D == 4.5 and K == 1.0
    _, K = u.global_constants(1.0, 1.0, 0.5, 1.0, 1.0)
    assert K == 1.0
    with pytest.raises(DomainError):
        u.global_constants(0.4, 1.0, 0.5, 1.0, 1.0)


def test_derived_constant_at_equal_exponents():
    assert u.derived_global_constant(1.0, 1.0, 1.0, 3.0) == pytest.approx(8.0)


def test_interpolation_alpha_2gamma_passes_bruteforce():
    T = eigendecompose(np.diag([1.0, 2.0, 3.0]))
    a, b = np.meshgrid(np.linspace(-1, 1, 50), np.linspace(-1, 1, 50))
    F = np.vstack([a.ravel(), b.ravel(), np.full(a.size, 0.3)])
    rep = u.verify_interpolation(T, 2.0, 1.0, F)
    assert rep.all_pass and rep.paper_constant == 1.0


def test_interpolation_closed_form_constant_fails_on_eigenvectors():
    # the closed-form K_{alpha,gamma} is below 1 for alpha != 2 gamma,
    # while an eigenvector needs constant exactly 1
    T = eigendecompose(np.diag([1.0, 2.0, 3.0]))
    rep = u.verify_interpolation(T, 4.0, 1.0, np.eye(3))
    assert rep.paper_constant < 1
    assert not rep.all_pass
    assert rep.sharp_constant == pytest.approx(1.0, rel=1e-12)
    assert u.verify_interpolation(T, 4.0, 1.0, np.eye(3), constant=1.0).all_pass


def test_simultaneous_eigenvector_scalar_check():
    L = eigendecompose(np.diag([2.0, 3.0]))
    T = eigendecompose(np.diag([5.0, 0.5]))
    pair = u.OperatorPair(L, T)
    rep = u.verify_global(pair, 1.0, 1.0, 1.0, 1.0, 1.0, np.eye(2))
    for j, (lam, mu) in enumerate([(5.0, 2.0), (0.5, 3.0)]):
        mean = lam**0.5 * mu**0.5
        assert rep.rows[j].sharp_constant == pytest.approx(1 / mean)


def test_semigroup_sandwich_scalar(frozen):
    L = eigendecompose(np.diag([0.5, 1.0, 2.0]))
    for j, q in enumerate((0.5, 1, 2)):
        res = u.semigroup_sandwich(L, 1.0, np.eye(3)[:, j])
        lo, mid = frozen["sandwich_scalar"][str(q)]
        assert res.lower == pytest.approx(lo, abs=1e-15)
        assert res.middle == pytest.approx(mid, rel=1e-14)
        assert res.lower_ok and res.upper_ok


def test_semigroup_sandwich_bad_args():
    L = eigendecompose(np.eye(2))
    with pytest.raises(DomainError):
        u.semigroup_sandwich(L, 0.0, [1, 0])


def test_exp_constant_oracles(frozen):
    assert u.exp_constant(1.0, 1.0, 1.0) == pytest.approx(frozen["exp_constant_gd1_C1"], rel=1e-13)
    for key, want in frozen["exp_constant_series"].items():
        g, d = map(float, key.split(","))
        assert u.exp_constant(1.0, g, d) == pytest.approx(want, rel=1e-13)


def test_stieltjes_and_tail_examples():
    left, right = u.stieltjes_identity([0.5, 1.0, 4.0], [1.0, 2.0, 0.5], 0.75, 2.0)
    assert left == pytest.approx(right, rel=1e-10)
    T = eigendecompose(np.diag([0.0, 1.0, 2.0, 8.0]))
    assert u.tail_estimate(T, 0.5, 1.5) == pytest.approx(2**-0.5)
    assert u.tail_estimate(T, 0.5, 10.0) == 0.0
    with pytest.raises(DomainError):
        u.stieltjes_identity([0.0, 1.0], [1, 1], 0.5, 2.0)


def test_report_csv_empty_and_full(micro):
    assert u.report_to_csv(None) == "t,vector_id,lhs,rhs,ratio,sharp_constant\n"
    pair, bundle, t_grid = micro
    rep = u.verify_local(pair, bundle, t_grid)
    text = u.report_to_csv(rep)
    assert text.count("\n") == len(rep.rows) + 1
    assert text == u.report_to_csv(u.verify_local(pair, bundle, t_grid))


def test_operator_pair_validation():
    a = eigendecompose(np.eye(2))
    with pytest.raises(ValueError):
        u.OperatorPair(a, eigendecompose(np.eye(3)))
    with pytest.raises(ValueError):
        u.OperatorPair(a, a, restriction="nope")
    with pytest.raises(ValueError):
        u.OperatorPair(a, a, shift_b=2.0)


def test_h0_basis_orthonormal():
    pair = four_cycle_pair("complement_of_both_kernels")
    b = pair.h0_basis()
    assert b.shape == (4, 2)
    assert np.allclose(b.T @ b, np.eye(2), atol=1e-12)
