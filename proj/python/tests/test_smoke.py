import math

import numpy as np
import pytest

import geomag


def test_ab_loop_is_identity():
    w, err = geomag.ab_loop(radius=2.0, steps=10000)
    assert np.max(np.abs(w - np.eye(2))) < 1e-7
    assert err < 1e-7


def test_dipolar_spectrum():
    h, e, defect = geomag.dipolar_spectrum(1.1, 0.4)
    assert np.allclose(np.linalg.eigvalsh(h), np.sort(e), atol=1e-12)
    assert defect < 1e-10


def test_slab_solvers():
    bo = geomag.slab_bo(2.0)
    assert abs(bo["r"]) ** 2 + bo["transmission"] == pytest.approx(1.0, abs=1e-10)
    c = geomag.slab_coupled(0.0, delta=2.0)
    assert not c["open"]
    assert 0.0 < c["transmission"] < 1.0
    f = geomag.flux_functional(0.0, delta=2.0)
    assert f["diabatic"] == pytest.approx(f["adiabatic_current"] + f["gauge_part"], rel=1e-8)
    assert geomag.deflection_angle(2.0, 1.0) == pytest.approx(1 / math.sqrt(3))


def test_errors_map_to_python():
    with pytest.raises(geomag.ThresholdError):
        geomag.slab_bo(1.0)
    with pytest.raises(geomag.Error):
        geomag.deflection_angle(0.5, 1.0)
    with pytest.raises(geomag.ConditioningError):
        geomag.model1d_reflection(1.0, delta=0.0)


def test_model1d_and_ferroslab():
    r, r_bo, cond = geomag.model1d_reflection(0.5, delta=0.0)
    assert abs(r + 1) < 1e-10
    r, t, transmitting = geomag.ferroslab(0.5, 2.0, 0.5)
    assert not transmitting
    assert abs(r) == pytest.approx(1.0, abs=1e-10)


def test_small_tdse_run():
    traj = geomag.tdse_run(k=6.0, delta=50.0, flux=3.0, n=128, dt=1e-3, max_steps=200, xi0=-2.5, sigma=0.6)
    assert np.all(np.abs(traj["norm"] - 1.0) < 1e-10)
    assert traj["xi"][-1] > traj["xi"][0]
    assert abs(geomag.classical_tan_theta(12.0, 6.0)) == pytest.approx(1 / math.sqrt(3), rel=1e-6)


def test_acceptance_subset():
    (row,) = geomag.run_acceptance([12])
    assert row[0] == 12 and row[2]
