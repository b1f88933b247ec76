import math

import numpy as np
import pytest

import relmetro as rm


def test_scenario_defaults_and_spectrum():
    sc = rm.CavityScenario()
    assert sc.k == 1 and sc.kprime == 2
    assert rm.mode_frequency(1, sc) == pytest.approx(2 * math.pi * 500)
    assert rm.h_from_acceleration(1e-9, sc) == pytest.approx(1e-9)
    alpha, beta = rm.static_first_order(1, 2)
    assert alpha == pytest.approx(-0.28658, rel=1e-4)
    assert beta == pytest.approx(0.010614, rel=1e-4)


def test_series_and_transform():
    sc = rm.CavityScenario()
    sc.tau_s = 0.0137
    sc.n_max = 10
    series = rm.complete_second_order(rm.build_scenario_series(sc))
    assert series.alpha1.shape == (10, 10)
    assert series.alpha1.dtype == np.complex128
    cov = rm.initial_product_squeezed(0.5, 0.5)
    fast = rm.transform_reduced(cov, series, 1e-3, 1, 2, precise=False)
    slow = rm.transform_full_oracle(cov, series, 1e-3, 1, 2)
    assert np.max(np.abs(fast - slow)) < 1e-12
    assert rm.check_physical(fast)["physical"]


def test_fidelity():
    vac = np.eye(4)
    sq = rm.initial_product_squeezed(1.0, 1.0)
    f = rm.fidelity_two_mode(vac, sq)
    assert f["fidelity"] == pytest.approx(1 / math.cosh(1.0) ** 2, rel=1e-12)
    assert rm.fidelity_two_mode(vac, vac)["fidelity"] == 1.0
    thermal = 2.0 * np.eye(4)
    assert rm.fidelity_two_mode(thermal, thermal)["fidelity"] == pytest.approx(1.0, abs=1e-12)


def test_headline_qfi_and_bounds():
    ev = rm.evaluate_scenario(rm.CavityScenario(), 1e-10, with_numeric=True)
    assert 1e15 < ev["qfi_analytic"] < 1e17
    assert ev["qfi_numeric"] == pytest.approx(ev["qfi_analytic"], rel=1e-6)
    assert 1e-14 <= ev["estimate"]["delta_a"] <= 3e-13
    assert ev["estimate"]["qfi_valid"]
    valid, margin = rm.validity_check(1e16, 1e-10)
    assert valid and margin == pytest.approx(1e-4)
    assert rm.mach_zehnder_qfi(1.6e7, 1) == 2.56e14


def test_errors_map_to_python_exceptions():
    with pytest.raises(rm.NoInformation):
        rm.cramer_rao(0.0, 1e11, 1e-6, 1e-3)
    sc = rm.CavityScenario()
    sc.kprime = 3
    with pytest.raises(rm.InvalidScenario):
        rm.build_scenario_series(sc)
    assert issubclass(rm.ConditioningError, rm.RelmetroError)
    assert rm.NUMERIC_POLICY_ENV == "RELMETRO_NUMERIC_POLICY"
