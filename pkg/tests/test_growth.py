import math

import numpy as np
import pytest

from spectral_uncertainty import growth as g


@pytest.mark.parametrize("key", ["2,1", "3,0.5", "1,0.9", "2.01,2"])
def test_power_constants(frozen, key):
    d, a = map(float, key.split(","))
    cert = g.check_admissibility(g.power_growth(d), a, (0, math.inf))
    assert cert.verdict == "holds"
    assert math.isclose(cert.constant, frozen["admissibility_power"][key], rel_tol=1e-9)


def test_power_on_bounded_interval():
    cert = g.check_admissibility(g.power_growth(2.0), 1.0, (0.5, 3.0))
    assert math.isclose(cert.constant, 1.0, rel_tol=1e-9)


def test_divergent_at_zero():
    cert = g.check_admissibility(g.power_growth(1.5), 1.5, (0, math.inf))
    assert cert.verdict == "divergent_at_zero" and math.isinf(cert.constant)


def test_glued_ratio_matches_oracle(frozen):
    phi = g.glued_exp_growth(2.0, 1.0)
    for r, want in frozen["glued_ratio_2_1_alpha1"].items():
        got, err = g.admissibility_ratio(phi, 1.0, float(r))
        assert math.isclose(got, want, rel_tol=1e-10), r
        assert err <= 1e-9 * got


def test_glued_admissible_on_half_line():
    cert = g.check_admissibility(g.glued_exp_growth(2.0, 1.0), 1.0, (0, math.inf))
    assert cert.verdict == "holds"
    assert 1.0 <= cert.constant < 2.0


def test_log_density_values(frozen):
    phi = g.log_density_growth(1.0)
    for r, want in frozen["log_density_phi_1"].items():
        assert math.isclose(float(phi(float(r))), want, rel_tol=1e-12), r


def test_log_density_admissible():
    cert = g.check_admissibility(g.log_density_growth(1.0), 0.5, (0, math.inf))
    assert cert.verdict == "holds"
    assert cert.tail_slope < g.SLOPE_TOL


def test_capped_power_fails_on_half_line():
    cert = g.check_admissibility(g.capped_power_growth(2.0), 1.0, (0, math.inf))
    assert cert.verdict == "fails"
    assert math.isinf(cert.constant)


def test_capped_power_holds_on_bounded_interval():
    cert = g.check_admissibility(g.capped_power_growth(2.0), 1.0, (0, 10.0))
    assert cert.verdict == "holds"


def test_lower_bound_consistency():
    phi = g.power_growth(2.0)
    cert = g.check_admissibility(phi, 1.0, (0, math.inf))
    assert g.necessary_lower_bound_check(phi, 1.0, 1.0, cert).satisfied
    capped = g.capped_power_growth(2.0)
    fake = g.AdmissibilityCertificate(1.0, (0.0, math.inf), 1.0, 0, 0.0, "holds")
    res = g.necessary_lower_bound_check(capped, 1.0, 1.0, fake)
    assert not res.satisfied
    assert res.infimum < res.witness_constant


def test_alpha_monotonicity():
    phi = g.power_growth(2.0)
    assert g.alpha_monotonicity_check(phi, 1.5, 0.5, (0, math.inf))
    hi = g.check_admissibility(phi, 1.5, (0, math.inf)).constant
    lo = g.check_admissibility(phi, 0.5, (0, math.inf)).constant
    assert math.isclose(hi, 2.0, rel_tol=1e-9) and math.isclose(lo, 2 / 3, rel_tol=1e-9)
    assert g.alpha_monotonicity_check(g.glued_exp_growth(2.0, 1.0), 1.0, 0.5, (0, math.inf))


def test_monotone_density_criterion():
    grid = np.geomspace(1, 100, 50)
    res = g.monotone_density_criterion(lambda s: s**2, 1.0, 1.0, grid)
    assert res.holds and res.constant_bound == 4.0
    assert not g.monotone_density_criterion(lambda s: np.ones_like(s), 1.0, 1.0, grid).holds


def test_misdeclared_exponent():
    bad = g.GrowthFunction(lambda s: s**2, 1.0, "s^2 declared as s^1")
    with pytest.raises(g.MisdeclaredExponentError):
        g.check_admissibility(bad, 0.5, (0, 1))


def test_validate_and_errors():
    with pytest.raises(g.GrowthError):
        g.GrowthFunction(lambda s: s, 0.0, "bad")
    with pytest.raises(g.GrowthError):
        g.GrowthFunction(lambda s: -s, 1.0, "neg").validate()
    with pytest.raises(g.GrowthError):
        g.GrowthFunction(lambda s: 0 * s, 1.0, "zero").validate()
    with pytest.raises(g.GrowthError):
        g.check_admissibility(g.power_growth(2), 0.0, (0, 1))
    with pytest.raises(g.GrowthError):
        g.admissibility_grid((2, 1))


def test_growth_from_dict_roundtrip():
    for spec in (
        {"kind": "power", "d": 2.0, "c": 3.0},
        {"kind": "glued_exp", "delta": 2.0, "kappa": 1.0},
        {"kind": "log_density", "delta": 1.0},
        {"kind": "capped_power", "d": 2.0, "knee": 1.0},
    ):
        phi = g.growth_from_dict(spec)
        again = g.growth_from_dict(phi.to_dict())
        s = np.geomspace(1e-3, 1e3, 13)
        assert np.allclose(phi(s), again(s), rtol=1e-14)
    with pytest.raises(g.GrowthError):
        g.growth_from_dict({"kind": "power"})
    with pytest.raises(g.GrowthError):
        g.growth_from_dict({"kind": "mystery"})


def test_power_scale_key():
    phi = g.growth_from_dict({"kind": "power", "d": 2.0, "c": 3.0, "scale": 2.0})
    assert math.isclose(float(phi(1.0)), 6.0)


def test_table_growth_interpolates_log_log():
    phi = g.table_growth([1.0, 10.0, 100.0], [1.0, 100.0, 10000.0], d0=2.0)
    assert math.isclose(float(phi(np.array([3.0]))[0]), 9.0, rel_tol=1e-12)
    assert math.isclose(float(phi(np.array([0.1]))[0]), 0.01, rel_tol=1e-12)
    cert = g.check_admissibility(phi, 1.0, (0, math.inf))
    assert math.isclose(cert.constant, 1.0, rel_tol=1e-8)


def test_scaled_leaves_constant_unchanged():
    phi = g.glued_exp_growth(2.0, 1.0)
    a = g.check_admissibility(phi, 1.0, (0, 100.0)).constant
    b = g.check_admissibility(phi.scaled(7.5), 1.0, (0, 100.0)).constant
    assert math.isclose(a, b, rel_tol=1e-12)


def test_extra_points_are_certified():
    grid = g.admissibility_grid((0.5, 2.0), extra_points=[1.2345])
    assert 1.2345 in grid
    assert grid[0] < 0.5 and grid[-1] > 2.0


def test_certificate_dict():
    d = g.check_admissibility(g.power_growth(2.0), 1.0, (0, math.inf)).to_dict()
    assert d["interval"] == [0.0, "inf"] and d["verdict"] == "holds"
