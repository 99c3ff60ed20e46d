import numpy as np
import pytest

from conftest import kron_circuit
from stablearn.circuit import (Circuit, Gate, TDepth1Target, bits_to_text, random_clifford_circuit,
                               random_t_positions, target_from_json, target_to_json, text_to_bits)
from stablearn.errors import NonCliffordGate


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("CX", (1, 1))
    with pytest.raises(ValueError):
        Gate("H", (0, 1))
    with pytest.raises(ValueError):
        Gate("CCZ", (0,))
    with pytest.raises(ValueError):
        Circuit(2).append("H", 2)


def test_json_roundtrip():
    c = Circuit(3).append("H", 0).append("CX", 0, 2).append("T", 1).append("Sdg", 2)
    d = c.to_json()
    assert d == {"n": 3, "gates": [{"g": "H", "q": [0]}, {"g": "CX", "q": [0, 2]},
                                   {"g": "T", "q": [1]}, {"g": "Sdg", "q": [2]}]}
    assert Circuit.from_json(d) == c


def test_target_json_roundtrip():
    t = TDepth1Target(Circuit(2).append("H", 0).append("CX", 0, 1), 0b10, Circuit(2).append("S", 0))
    d = target_to_json(t)
    assert d["kind"] == "tdepth1" and d["v"] == "01"
    back = target_from_json(d)
    assert back.c1 == t.c1 and back.v == t.v and back.c2 == t.c2
    c = Circuit(1).append("H", 0)
    assert target_to_json(c)["kind"] == "clifford"
    assert target_from_json(target_to_json(c)) == c


def test_bitstrings():
    assert bits_to_text(0b001, 3) == "100"
    assert text_to_bits("100") == 1
    with pytest.raises(ValueError):
        text_to_bits("12")


def test_inverse_is_inverse():
    rng = np.random.default_rng(1)
    c = random_clifford_circuit(3, rng, 40).append("T", 1)
    assert np.allclose(kron_circuit(c.inverse()) @ kron_circuit(c), np.eye(8))


def test_tdepth1_split():
    c = Circuit(2).append("H", 0).append("T", 0).append("H", 1).append("T", 1).append("CX", 0, 1)
    c1, v, c2 = c.tdepth1_split()
    assert v == 0b11 and len(c1) == 2 and len(c2) == 1
    assert np.allclose(kron_circuit(TDepth1Target(c1, v, c2).circuit()), kron_circuit(c))
    # T, H, T on one wire is T-depth two
    assert Circuit(1).append("T", 0).append("H", 0).append("T", 0).tdepth1_split() is None


def test_tdepth1_target_requires_clifford_parts():
    with pytest.raises(NonCliffordGate):
        TDepth1Target(Circuit(1).append("T", 0), 1, Circuit(1))


def test_random_generators_are_seeded():
    a = random_clifford_circuit(4, np.random.default_rng(7))
    b = random_clifford_circuit(4, np.random.default_rng(7))
    assert a == b and len(a) == 20 * 16 and a.is_clifford
    v = random_t_positions(5, 3, np.random.default_rng(2))
    assert bin(v).count("1") == 3
    with pytest.raises(ValueError):
        random_t_positions(3, 5, np.random.default_rng(2))
