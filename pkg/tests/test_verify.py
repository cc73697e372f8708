import math

import pytest

from pseudoheat.geometry import HoricyclicPoint, geodesic_distance, normalize_pair
from pseudoheat.kernels import EvalParams, kernel
from pseudoheat.verify import (
    VerificationReport,
    abel_residual,
    chapman_kolmogorov,
    chapman_kolmogorov_many,
    gfunc_reports,
    horicyclic_pde_residual,
    mass_multiplicativity,
    radial_pde_residual,
    total_mass,
)


def test_report_invariant():
    r = VerificationReport.make("x", 3, 1e-7, 1e-6, {})
    assert r.passed
    r2 = VerificationReport.make("x", 3, 2e-6, 1e-6, {})
    assert not r2.passed
    r3 = VerificationReport.make("x", 3, math.inf, 1e-6, {})
    assert not r3.passed
    d = r.to_json_dict()
    assert set(d) == {"check", "D", "residual", "tolerance", "passed", "details"}


def test_abel_residual_d4():
    rep = abel_residual(EvalParams(4, 1.0))
    assert rep.passed and rep.residual <= 1e-6
    # l = 1 is the first grid entry (the s = 0 endpoint of the equation)
    assert rep.details["points"][0]["l"] == 1.0


def test_abel_residual_d3():
    rep = abel_residual(EvalParams(3, 1.0))
    assert rep.passed and rep.residual <= 1e-5


def test_abel_residual_d7_single_point():
    rep = abel_residual(EvalParams(7, 1.0), l_grid=(math.cosh(1.0),))
    assert rep.passed and rep.residual <= 1e-5


def test_abel_residual_rejects_bad_grid():
    with pytest.raises(ValueError):
        abel_residual(EvalParams(4, 1.0), l_grid=(0.5,))


def test_radial_pde_d4():
    rep = radial_pde_residual(EvalParams(4, 1.0))
    assert rep.passed and rep.residual <= 1e-7
    assert rep.details["fitted_c"] == pytest.approx(0.25, abs=1e-7)
    assert rep.details["c_spread"] <= 1e-6


def test_radial_pde_d3():
    rep = radial_pde_residual(EvalParams(3, 1.0), s_grid=(0.3, 1.0, 3.0), tau_grid=(0.3, 1.0))
    assert rep.passed and rep.residual <= 1e-5
    assert rep.details["fitted_c"] == pytest.approx(0.25, abs=1e-5)


def test_radial_pde_general_units():
    # kappa = hbar/2m = 2; fitted constant should scale to kappa/4
    rep = radial_pde_residual(
        EvalParams(4, 0.5, m=0.5, hbar=2.0), s_grid=(0.5, 1.5), tau_grid=(0.4, 0.8)
    )
    assert rep.passed
    assert rep.details["fitted_c"] == pytest.approx(rep.details["kappa"] / 4.0, abs=1e-6)


def test_horicyclic_pde_d3_and_d4():
    for d in (3, 4):
        pairs = [
            (HoricyclicPoint(1.0, (0.0,) * (d - 2)), HoricyclicPoint(2.0, (1.0,) * (d - 2))),
            (HoricyclicPoint(0.8, (0.5,) * (d - 2)), HoricyclicPoint(1.4, (-0.3,) * (d - 2))),
            (HoricyclicPoint(1.1, (0.2,) * (d - 2)), HoricyclicPoint(0.9, (0.9,) * (d - 2))),
        ]
        rep = horicyclic_pde_residual(EvalParams(d, 0.5), pairs)
        assert rep.passed, rep
        radial = radial_pde_residual(
            EvalParams(d, 0.5), s_grid=(geodesic_distance(*pairs[0]),), tau_grid=(0.5,)
        )
        assert rep.details["fitted_c"] == pytest.approx(radial.details["fitted_c"], abs=1e-5)


def test_horicyclic_pde_invariant_under_normalization():
    # the kernel depends on the distance alone, so normalizing the pair
    # changes neither the distance nor the kernel value
    d = 3
    q1, q2 = HoricyclicPoint(1.0, (0.0,)), HoricyclicPoint(2.0, (1.0,))
    p1, p2, _ = normalize_pair(q1, q2)
    s_before = geodesic_distance(q1, q2)
    s_after = geodesic_distance(p1, p2)
    assert s_after == pytest.approx(s_before, rel=1e-12)
    params = EvalParams(d, 0.5)
    assert kernel(params, s_after).value == pytest.approx(kernel(params, s_before).value, rel=1e-10)
    rep = horicyclic_pde_residual(params, [(p1, p2)])
    assert rep.passed


def test_horicyclic_pde_rejects_large_dimension():
    with pytest.raises(ValueError):
        horicyclic_pde_residual(EvalParams(5, 0.5), [])


def test_chapman_kolmogorov_d4():
    half = EvalParams(4, 0.5)
    reports = chapman_kolmogorov_many(half, half, [0.0, 1.0])
    for rep in reports:
        assert rep.passed and rep.residual <= 1e-4, rep


def test_chapman_kolmogorov_validation():
    with pytest.raises(ValueError):
        chapman_kolmogorov(EvalParams(4, 0.5), EvalParams(3, 0.5), 1.0)
    with pytest.raises(ValueError):
        chapman_kolmogorov(EvalParams(6, 0.5), EvalParams(6, 0.5), 1.0)


def test_mass_multiplicativity_d4():
    rep = mass_multiplicativity(EvalParams(4, 1.0), tau_list=(0.25, 0.5))
    assert rep.passed and rep.residual <= 1e-4
    # masses follow exp(c tau) with c equal to the fitted heat-equation shift
    assert rep.details["fitted_mass_rate"] == pytest.approx(0.25, abs=1e-6)


def test_total_mass_matches_exponential_form():
    p = EvalParams(5, 0.5)
    assert total_mass(p) == pytest.approx(math.exp(0.125), rel=1e-8)


def test_gfunc_reports_pass():
    overlap, oracle = gfunc_reports(a_values=(0.25,), n_max=4)
    assert overlap.check == "gfunc-overlap" and overlap.passed
    assert oracle.check == "gfunc-fd-oracle" and oracle.passed
