import math

import numpy as np
import pytest

from spectral_uncertainty import analytics as an
from spectral_uncertainty.speccore import DomainError


def test_lattice_closed_form_oracle(frozen):
    for r, want in frozen["lattice_measure_n1"].items():
        assert an.lattice_projector_measure(1, float(r)) == pytest.approx(want, rel=1e-13)


def test_lattice_grid_n2_oracle(frozen):
    for r, want in frozen["lattice_measure_n2"].items():
        v, err = an.lattice_projector_measure_with_error(2, float(r))
        assert abs(v - want) < 1e-4
        assert abs(v - want) <= 10 * err + 1e-12


def test_lattice_measure_edges():
    assert an.lattice_projector_measure(2, 0.0) == 0.0
    assert an.lattice_projector_measure(3, 12.0) == 1.0
    assert an.lattice_projector_measure(1, 2.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        an.lattice_projector_measure(4, 1.0)
    with pytest.raises(DomainError):
        an.lattice_projector_measure(2, 1.0, method="closed")


def test_n3_grid_symmetry():
    # the map x -> x + 1/2 sends the sublevel set at r to the complement at 4n - r
    v = an.lattice_projector_measure(3, 6.0, 1 << 7)
    assert v == pytest.approx(0.5, abs=1e-3)


def test_four_cycle_matches_symbol_between_levels():
    # levels of the 4-cycle are 0, 2, 4; between them the count/N equals the symbol measure
    res = an.cycle_vs_symbol_check(4, 1, [1.0, 3.0])
    assert np.allclose(res.projector_norms, [0.25, 0.75])
    assert np.allclose(res.symbol_measures, [1 / 3, 2 / 3])


def test_cycle_levels():
    assert np.allclose(an.cycle_eigenvalue_levels(4), [0, 2, 4])


def test_tree_gap_values(frozen):
    for n, want in frozen["tree_gap"].items():
        assert an.tree_gap(int(n)) == pytest.approx(want, abs=1e-12)
    with pytest.raises(DomainError):
        an.tree_gap(2)


def test_star(frozen):
    (row,) = an.tree_truncation_convergence(3, [1])
    assert row.lambda_max == pytest.approx(frozen["star_lambda_max"], rel=1e-12)


def test_truncation_monotone():
    rows = an.tree_truncation_convergence(3, range(1, 7))
    lam = [r.lambda_max for r in rows]
    assert all(b > a for a, b in zip(lam, lam[1:]))
    assert all(r.gap_to_edge > 0 for r in rows)


def test_dirichlet_gap_trend():
    trend = an.tree_dirichlet_gap_trend(3, range(1, 6))
    vals = [v for _, v in trend]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > an.tree_gap(3)


def test_volume_check_small():
    fit = an.transformed_volume_check(3, 12)
    assert fit.within(0.15)
    assert fit.constant <= 3.0


def test_fit_exponent_exact_power():
    fit = an.fit_exponent([(x, 2 * x**1.5) for x in (1, 2, 4, 8, 16)], 1.5)
    assert fit.within(1e-12) and fit.constant == pytest.approx(2.0)
    assert fit.to_dict()["samples"] == 5
    with pytest.raises(DomainError):
        an.fit_exponent([(1, 1)] * 4, 1.0)
    with pytest.raises(DomainError):
        an.fit_exponent([(1, 1), (2, 0), (3, 1), (4, 1), (5, 1)], 1.0)


def test_lattice_ball_volume():
    assert an.lattice_ball_volume(2, 1) == 1
    assert an.lattice_ball_volume(2, 2) == 5
    assert an.lattice_ball_volume(1, 3.5) == 7
    assert an.lattice_ball_volume(3, 2) == 7


def test_lattice_ball_slope():
    rs = np.geomspace(10, 100, 8)
    fit = an.fit_exponent([(r, an.lattice_ball_volume(2, r)) for r in rs], 2.0)
    assert fit.within(0.1)
