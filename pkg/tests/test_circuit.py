import math

import numpy as np
import pytest

from fockcode import circuit, coder, source
from fockcode.errors import DomainError, PreconditionError, ValidationError
from fockcode.fock import FockState, fidelity, inner_product

S2 = 1 / math.sqrt(2)


@pytest.fixture(scope="module")
def book():
    eig = source.diagonalize(source.density_matrix(source.reference_ensemble(math.radians(45))))
    return coder.reference_codebook_n2(eig)


def random_message(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def test_prepare_maps_letters_to_photons():
    s = circuit.prepare([0, 0, 1, 0])  # -+
    assert s.state.terms == {"VH.": 1}


def test_swap_on_general_input():
    a, b, c, d = 0.1, 0.2j, -0.3, 0.4
    msg = np.array([a, c, b, d])  # flat order ++, +-, -+, --
    msg = msg / np.linalg.norm(msg)
    a, c, b, d = msg
    out = circuit.conditional_swap_env(circuit.prepare(msg)).state
    assert out.amplitude("H.H") == pytest.approx(a)
    assert out.amplitude("V.H") == pytest.approx(b)
    assert out.amplitude("HV.") == pytest.approx(c)
    assert out.amplitude("VV.") == pytest.approx(d)
    assert len(out) == 4


def test_swap_leaves_v_photon_alone():
    s = circuit.prepare([0, 1, 0, 0])
    assert circuit.conditional_swap_env(s).state == s.state


def test_swap_twice_is_identity():
    s = circuit.prepare(random_message(np.random.default_rng(3)))
    twice = circuit.conditional_swap_env(circuit.conditional_swap_env(s), require_vacuum_env=False)
    assert fidelity(twice.state, s.state) == pytest.approx(1, abs=1e-12)
    assert twice.state.amplitude("HH.") == pytest.approx(s.state.amplitude("HH."))


def test_swap_requires_vacuum_environment():
    s = circuit.CircuitState(FockState.basis("HHH"), "bad")
    with pytest.raises(PreconditionError):
        circuit.conditional_swap_env(s)


def test_env_hadamard_rules():
    out = circuit.env_hadamard(circuit.CircuitState(FockState.basis("H.H"), "x")).state
    assert out.terms == pytest.approx({"H..": S2, "H.H": S2})
    out = circuit.env_hadamard(circuit.CircuitState(FockState.basis("HV."), "x")).state
    assert out.terms == pytest.approx({"HV.": S2, "HVH": -S2})
    with pytest.raises(DomainError):
        circuit.env_hadamard(circuit.CircuitState(FockState.basis("H.V"), "x"))


def test_env_hadamard_squared_is_quarter_turn():
    # this map is a 45-degree rotation, so twice sends vac -> -H and H -> vac
    twice = lambda ket: circuit.env_hadamard(circuit.env_hadamard(circuit.CircuitState(FockState.basis(ket), "x"))).state
    assert twice("HV.").terms == pytest.approx({"HVH": -1})
    assert twice("H.H").terms == pytest.approx({"H..": 1})
    four = circuit.CircuitState(FockState.basis("HV."), "x")
    for _ in range(4):
        four = circuit.env_hadamard(four)
    assert four.state.terms == pytest.approx({"HV.": -1})


def test_env_hadamard_is_unitary():
    rows = []
    for ket in ("HV.", "HVH"):
        out = circuit.env_hadamard(circuit.CircuitState(FockState.basis(ket), "x")).state
        rows.append([out.amplitude("HV."), out.amplitude("HVH")])
    m = np.array(rows).T
    assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12)


def test_measurement_branches_for_general_input():
    msg = np.array([0.5, 0.5j, -0.5, 0.5])  # a=++ , c=+-, b=-+, d=--
    a, c, b, d = msg
    s = circuit.env_hadamard(circuit.conditional_swap_env(circuit.prepare(msg)))
    vac, one = circuit.measure_env(s)
    assert vac.result == circuit.ENV_VACUUM and one.result == circuit.ENV_ONE_PHOTON
    assert vac.probability == pytest.approx(0.5) and one.probability == pytest.approx(0.5)
    expected = FockState({"H.": a, "V.": b, "HV": c, "VV": d}, 2)
    flipped = FockState({"H.": a, "V.": b, "HV": -c, "VV": -d}, 2)
    assert vac.post_state.terms == pytest.approx(dict(expected.terms))
    assert one.post_state.terms == pytest.approx(dict(flipped.terms))


def test_measurement_of_vv():
    s = circuit.env_hadamard(circuit.conditional_swap_env(circuit.prepare([0, 0, 0, 1])))
    vac, one = circuit.measure_env(s)
    assert (vac.probability, one.probability) == pytest.approx((0.5, 0.5))
    assert vac.post_state.terms == pytest.approx({"VV": 1})
    assert one.post_state.terms == pytest.approx({"VV": -1})


def test_phase_correction():
    s = FockState.superposition({"H.": 1, "HV": -1, "VV": -1})
    assert circuit.conditional_phase_correction(s, circuit.ENV_VACUUM) == s
    fixed = circuit.conditional_phase_correction(s, circuit.ENV_ONE_PHOTON)
    assert fixed.amplitude("HV") == pytest.approx(-s.amplitude("HV"))
    assert fixed.amplitude("H.") == s.amplitude("H.")
    with pytest.raises(ValidationError):
        circuit.conditional_phase_correction(s, "maybe")


def test_corrected_branches_agree():
    msg = random_message(np.random.default_rng(11))
    vac, one = circuit.corrected_branches(msg)
    assert fidelity(vac.post_state, one.post_state) == pytest.approx(1, abs=1e-12)
    assert inner_product(vac.post_state, one.post_state) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("mode", ["measured", "coherent"])
@pytest.mark.parametrize(
    "msg,expected",
    [
        ([1, 0, 0, 0], {"H.": 1}),
        ([0, 0, 1, 0], {"V.": 1}),
        ([0, 1, 0, 0], {"HV": 1}),
        ([0, 0, 0, 1], {"VV": 1}),
        ([S2, S2, 0, 0], {"H.": S2, "HV": S2}),
    ],
)
def test_run_circuit_examples(mode, msg, expected, book):
    out = circuit.run_circuit(msg, mode)
    assert out.terms == pytest.approx(expected)
    assert fidelity(out, coder.encode(msg, book, basis="eigen")) == pytest.approx(1, abs=1e-12)


def test_circuit_matches_letter_basis_encoding(book):
    # the same message written in the computational basis, encoded through the eigenbasis rotation
    rng = np.random.default_rng(5)
    hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for _ in range(50):
        pm = random_message(rng)
        letter = np.kron(hadamard, hadamard) @ pm
        assert fidelity(circuit.run_circuit(pm), coder.encode(letter, book)) >= 1 - 1e-10


def test_stagewise_norms():
    msg = random_message(np.random.default_rng(8))
    for stage in circuit.trace_circuit(msg) + [circuit.coherent_state(msg)]:
        assert stage.state.norm() == pytest.approx(1, abs=1e-12)


def test_coherent_restriction_matches_measured_branches():
    msg = random_message(np.random.default_rng(9))
    full = circuit.coherent_state(msg).state
    measured = circuit.corrected_branches(msg)
    for outcome, occ in zip(measured, (".", "H")):
        restricted = FockState({k[:2]: a for k, a in full.terms.items() if k[2] == occ}, 2).normalized()
        assert restricted.terms == pytest.approx(dict(outcome.post_state.terms), abs=1e-12)


def test_run_circuit_input_validation():
    with pytest.raises(ValidationError):
        circuit.run_circuit([1, 0, 0])
    with pytest.raises(ValidationError):
        circuit.run_circuit([1, 1, 0, 0])
    with pytest.raises(ValidationError):
        circuit.run_circuit([1, 0, 0, 0], mode="teleport")
