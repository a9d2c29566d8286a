"""Smoke tests for the python bindings: model access, certification,
pulse trains, and a small end-to-end transfer."""

import math

import numpy as np
import pytest

import liegal


def test_version():
    assert liegal.__version__


def test_well_model_basics():
    m = liegal.Model.well(1.0)
    assert m.name == "well"
    assert m.controls == 1
    assert m.eigenvalue(1) == pytest.approx(-math.pi**2 / 2)
    assert m.eigenvalue(3) == pytest.approx(-9 * math.pi**2 / 2)
    # closed-form dipole entry <phi_1, i x phi_2> = i * 16/(9 pi^2)
    assert m.coupling(1, 1, 2) == pytest.approx(1j * 16 / (9 * math.pi**2))
    # parity selection rule
    assert m.coupling(1, 1, 3) == 0


def test_rotor_model_basics():
    m = liegal.Model.rotor(1.0)
    assert m.name == "rotor"
    assert m.controls == 3
    # lambda = -l(l+1): levels 1, then 3 copies of -2
    assert m.eigenvalue(1) == pytest.approx(0.0)
    for k in (2, 3, 4):
        assert m.eigenvalue(k) == pytest.approx(-2.0)


def test_truncation_and_gaps():
    sys = liegal.truncate(liegal.Model.well(1.0), 4)
    assert sys.n == 4
    assert sys.drift_diagonal.shape == (4,)
    b = sys.coupling(1)
    assert b.shape == (4, 4)
    # skew-Hermitian
    assert np.allclose(b + b.conj().T, 0, atol=1e-12)
    gaps = liegal.spectral_gaps(sys)
    assert gaps[0] == 0.0
    assert gaps == sorted(gaps)
    # smallest nonzero gap of the well at n=4 is 3 pi^2 / 2
    assert gaps[1] == pytest.approx(3 * math.pi**2 / 2)


def test_model_json_roundtrip():
    m = liegal.Model.well(1.0)
    m2 = liegal.Model.from_json(m.to_json(5))
    for l in range(1, 6):
        assert m2.eigenvalue(l) == pytest.approx(m.eigenvalue(l))
        for k in range(1, 6):
            assert m2.coupling(1, l, k) == pytest.approx(m.coupling(1, l, k))


def test_varpi_bracket():
    v = liegal.varpi()
    assert v.lower <= v.value <= v.upper
    assert v.upper - v.lower < 1e-11
    assert v.value == pytest.approx(0.4297802164379886, abs=1e-10)


def test_condition_reports():
    well = liegal.Model.well(1.0)
    rep = liegal.check_condition(well, 3, "lgsc")
    assert rep["holds"]
    assert rep["closure_dim"] == rep["expected_dim"] == 8
    rep = liegal.check_condition(well, 4, "lgcc")
    assert rep["holds"]
    assert rep["closure_dim"] == 15


def test_convexify_pulses():
    w = liegal.varpi().value
    t = liegal.convexify_pulses(14.8, [24.7, 39.5], xi=1 + 0j, varpi_value=w, tol=0.02)
    assert t.converged
    assert t.active_defect <= 0.02
    assert t.worst_suppressed <= 0.02
    # offsets are strictly increasing and re-evaluation is consistent
    taus = list(t.taus)
    assert taus == sorted(taus)
    assert t.evaluate() <= 0.02 + 1e-12


def test_end_to_end_transfer():
    m = liegal.Model.well(1.0)
    r = liegal.synthesize_transfer(
        m, 2, 1, 2, N=4, seed=11, h=1, tol_steer=1e-3, budget_segments=60
    )
    assert r["n_certified"] == 2
    assert r["condition"]["holds"]
    assert r["steering_converged"]
    assert r["l1_within_bound"]
    assert r["fidelity"] > 0.95
    assert r["max_unitarity_defect"] < 1e-9

    # replay the serialized control on a finer truncation
    s = liegal.simulate_control(m, r["control_json"], initial=1, N=8)
    assert s["final_populations"][1] > 0.95
    assert s["max_unitarity_defect"] < 1e-9
    assert liegal.leakage(s["final_state"], 2) < 0.01
    # moduli agree between the two truncations
    assert (
        liegal.modulus_distance(np.asarray(s["final_state"]), np.asarray(r["final_state"]))
        < 1e-2
    )


def test_determinism():
    m = liegal.Model.well(1.0)
    kwargs = dict(N=4, seed=23, h=1, tol_steer=1e-3, budget_segments=60)
    a = liegal.synthesize_transfer(m, 2, 1, 2, **kwargs)
    b = liegal.synthesize_transfer(m, 2, 1, 2, **kwargs)
    assert a["control_json"] == b["control_json"]
    assert a["fidelity"] == b["fidelity"]
