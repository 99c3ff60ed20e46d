import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import clifford_circuits, kron_circuit, kron_pauli
from stablearn import dense
from stablearn.circuit import Circuit, random_clifford_circuit
from stablearn.errors import InvalidTableau, NonCliffordGate
from stablearn.synthesis import (GATE_COUNT_C, SYNTH_GATES, Tableau, assemble_tdepth1, complete_tableau,
                                 synthesize, tableau_of, tableaus_equal)
from stablearn.pauli import Pauli, parse_pauli, symplectic_product


def P(text):
    return parse_pauli(text)


def assert_tableau_matches_unitary(tab: Tableau, u: np.ndarray):
    n = tab.n
    for i in range(n):
        for letter, img in (("X", tab.x_images[i]), ("Z", tab.z_images[i])):
            p = Pauli.single(n, i, letter)
            assert np.allclose(u @ kron_pauli(p) @ u.conj().T, kron_pauli(img))


def test_tableau_of_examples():
    h = tableau_of(Circuit(1).append("H", 0))
    assert (str(h.x_images[0]), str(h.z_images[0])) == ("+Z", "+X")
    s = tableau_of(Circuit(1).append("S", 0))
    assert (str(s.x_images[0]), str(s.z_images[0])) == ("+Y", "+Z")
    cx = tableau_of(Circuit(2).append("CX", 0, 1))
    assert [str(p) for p in cx.x_images] == ["+XX", "+IX"]
    assert [str(p) for p in cx.z_images] == ["+ZI", "+ZZ"]
    assert_tableau_matches_unitary(cx, kron_circuit(Circuit(2).append("CX", 0, 1)))
    with pytest.raises(NonCliffordGate):
        tableau_of(Circuit(1).append("T", 0))


def test_synthesize_examples():
    assert len(synthesize(Tableau.identity(4))) == 0
    swap = Tableau(1, (P("Z"),), (P("X"),))
    c = synthesize(swap)
    assert tableaus_equal(tableau_of(c), swap)
    assert dense.compare_unitaries_up_to_phase(dense.reconstruct_unitary(c),
                                               dense.reconstruct_unitary(Circuit(1).append("H", 0)))


def test_synthesize_rejects_invalid():
    with pytest.raises(InvalidTableau):
        synthesize(Tableau(1, (P("X"),), (P("X"),)))
    with pytest.raises(InvalidTableau):
        synthesize(Tableau(2, (P("XI"), P("ZI")), (P("IZ"), P("IX"))))


def test_complete_tableau_examples():
    full = tableau_of(random_clifford_circuit(3, np.random.default_rng(2)))
    assert tableaus_equal(complete_tableau(full.x_images, full.z_images), full)
    assert str(complete_tableau([P("X")], []).z_images[0]) == "+Z"
    with pytest.raises(InvalidTableau):
        complete_tableau([P("XI"), P("ZI")], [])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: clifford_circuits(n, 60)), st.data())
def test_complete_tableau_property(c, data):
    full = tableau_of(c)
    t = data.draw(st.integers(0, c.n))
    done = complete_tableau(full.x_images, full.z_images[:t])
    assert done.x_images == full.x_images and done.z_images[:t] == full.z_images[:t]
    for i in range(c.n):
        for j in range(c.n):
            assert symplectic_product(done.z_images[i], done.x_images[j]) == (i == j)
            assert symplectic_product(done.z_images[i], done.z_images[j]) == 0
    synthesize(done)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: clifford_circuits(n, 80)))
def test_roundtrip_with_signs(c):
    tab = tableau_of(c)
    out = synthesize(tab)
    assert tableaus_equal(tableau_of(out), tab)
    assert all(g.name in SYNTH_GATES for g in out.gates)
    assert len(out) <= GATE_COUNT_C * c.n ** 2


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: clifford_circuits(n, 30)))
def test_synthesized_unitary_equals_original_up_to_phase(c):
    out = synthesize(tableau_of(c))
    assert dense.compare_unitaries_up_to_phase(kron_circuit(out), kron_circuit(c), 1e-9)


def test_assemble_tdepth1():
    c = assemble_tdepth1(Circuit(3), [0, 0, 0], 0)
    assert [g.name for g in c.gates] == ["H", "H", "H"]
    c = assemble_tdepth1(Circuit(2).append("CX", 0, 1), [0, 3], 1)
    assert [g.name for g in c.gates] == ["H", "H", "S", "S", "S", "T", "CX"]
    assert c.tdepth1_split() is not None
    with pytest.raises(ValueError):
        assemble_tdepth1(Circuit(2), [1, 0], 1)
    with pytest.raises(ValueError):
        assemble_tdepth1(Circuit(2), [0, 4], 1)
