import math

import numpy as np
import pytest

import witness_forge as wf


def test_bell_reference_values():
    report = wf.evaluate(wf.presets.bell_witness(), wf.presets.bell_state())
    assert report.expectation == pytest.approx(0.275, abs=1e-3)
    assert report.g_min == pytest.approx(0.292, abs=1e-3)
    assert report.entangled
    assert report.to_dict()["entangled"] is True


def test_witness_from_numpy_and_dict_round_trip():
    d = np.array([[1.0 + 0.5j, -0.2j], [0.3, 1.1], [-0.7 - 0.1j, 0.4 + 0.4j]])
    w = wf.WitnessSpec.uniform(wf.PartitionSpec.bipartite(), d)
    assert w.m == 3 and w.n_modes == 2
    back = wf.WitnessSpec.from_dict(w.to_dict())
    np.testing.assert_array_equal(back.displacements, d)
    assert back.lambdas == w.lambdas


def test_trivial_bound_and_collapse():
    d = np.array([[0.5, 1.0j], [-1.0, 0.2]])
    assert wf.solve_sev(wf.WitnessSpec.uniform(wf.PartitionSpec.bipartite(), d)).g_min <= 1e-12
    mean, offset = wf.collapse_single_mode([0.5, 0.5], [1.0, -1.0])
    assert abs(mean) == 0.0 and offset == pytest.approx(1.0)


def test_operator_matrix():
    n = wf.displaced_number_matrix(0.0, 5)
    np.testing.assert_array_equal(np.diag(n).real, np.arange(6))


def test_states_and_baselines():
    tmsv = wf.Tmsv(0.5)
    cov = wf.state_covariance(tmsv)
    assert cov.shape == (4, 4)
    assert wf.simon_criterion(cov).entangled
    assert wf.duan_criterion(cov).value == pytest.approx(2 * math.exp(-1) - 2, abs=1e-6)
    state = wf.state_from_dict(wf.state_to_dict(wf.presets.bell_state()))
    assert wf.mode_count(state) == 2


def test_simulation_is_seeded():
    w = wf.presets.bell_witness()
    s = wf.presets.bell_state()
    a = wf.simulate(w, s, shots=20000, seed=4)
    b = wf.simulate(w, s, shots=20000, seed=4)
    assert a.mean == b.mean and a.per_k_counts == b.per_k_counts
    assert abs(a.mean - wf.expectation_L(s, w)) < 5 * a.std_error


def test_errors_carry_a_code():
    with pytest.raises(wf.WitnessForgeError) as info:
        wf.expectation_L(wf.Tmsv(0.5), wf.presets.cat_witnesses()["four_partition"])
    assert info.value.code == "ModelMismatch"
    with pytest.raises(wf.WitnessForgeError):
        wf.PhotonSubtractedTmsv(0.5, kappa=2.0)


def test_reproduce_case():
    assert "table1" in wf.reproduce_cases()
    out = wf.reproduce("bell")
    assert out["pass"]
    assert any(r["quantity"] == "g_min" for r in out["rows"])
