import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_paulis, clifford_circuits, kron_gate, kron_pauli, paulis
from stablearn import dense
from stablearn.circuit import CLIFFORD_GATES, TWO_QUBIT, Circuit, Gate
from stablearn.frame import (PauliFrame, apply_gate, canonical_form, conjugate, frame_of_basis_state, frames_equal,
                             group_expectation, measure_pauli, x_rank)
from stablearn.gf2 import gf2_rank
from stablearn.pauli import parse_pauli, symplectic_product


def F(*rows):
    return PauliFrame.from_text(rows)


def state_of(f: PauliFrame) -> np.ndarray:
    """Dense stabilized state: top eigenvector of the projector."""
    proj = np.eye(1 << f.n, dtype=complex)
    for r in f.rows:
        proj = proj @ (np.eye(1 << f.n) + kron_pauli(r)) / 2
    w, v = np.linalg.eigh(proj)
    assert abs(w[-1] - 1) < 1e-9 and (f.n == 0 or abs(w[-2]) < 1e-9)
    return v[:, -1]


def assert_valid(f: PauliFrame):
    f.validate()
    assert gf2_rank([r.row for r in f.rows]) == f.n
    assert all(r.commutes(s) for r, s in itertools.combinations(f.rows, 2))


def test_frame_of_basis_state_examples():
    assert frame_of_basis_state(0, 3).text() == ["+ZII", "+IZI", "+IIZ"]
    assert frame_of_basis_state(0b01, 2).text() == ["-ZI", "+IZ"]
    assert frame_of_basis_state(0b11, 2).text() == ["-ZI", "-IZ"]


def test_apply_gate_examples():
    assert apply_gate(F("+Z"), Gate("H", (0,))).text() == ["+X"]
    assert apply_gate(F("+X"), Gate("S", (0,))).text() == ["+Y"]
    bell = frame_of_basis_state(0, 2).apply_circuit(Circuit(2).append("H", 0).append("CX", 0, 1))
    assert frames_equal(bell, F("+XX", "+ZZ"))
    s = kron_gate("CX", (0, 1), 2) @ kron_gate("H", (0,), 2) @ np.eye(4)[:, 0]
    for r in bell.rows:
        assert np.allclose(kron_pauli(r) @ s, s)


def test_measure_examples(rng):
    assert measure_pauli(F("+Z"), parse_pauli("+Z"), rng) == (1, F("+Z"))
    f = F("-XX", "+ZZ")
    out, post = measure_pauli(f, parse_pauli("-XX"), rng)
    assert out == 1 and post == f
    outs = []
    for _ in range(400):
        out, post = measure_pauli(F("+Z"), parse_pauli("X"), rng)
        assert post.text() == ["+X" if out > 0 else "-X"]
        outs.append(out)
    assert 150 < outs.count(1) < 250


def test_measure_consumes_one_draw_only_when_random():
    r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
    measure_pauli(F("+Z"), parse_pauli("Z"), r1)
    assert r1.random() == r2.random()
    r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
    measure_pauli(F("+Z"), parse_pauli("X"), r1)
    r2.random()
    assert r1.random() == r2.random()


def test_x_rank_examples():
    assert x_rank(frame_of_basis_state(0, 4)) == 0
    assert x_rank(F("+XX", "+ZZ")) == 1
    line = Circuit(3).append("H", 0).append("H", 1).append("H", 2).append("CZ", 0, 1).append("CZ", 1, 2)
    assert x_rank(frame_of_basis_state(0, 3).apply_circuit(line)) == 3


def test_canonical_form_examples():
    f = F("+XX", "+ZZ")
    g = PauliFrame(2, (f.rows[0] * f.rows[1], f.rows[1]))
    assert canonical_form(f) == canonical_form(g)
    assert canonical_form(F("+XX", "+ZZ")) == canonical_form(F("+XX", "-YY"))
    assert canonical_form(frame_of_basis_state(0, 2)) != canonical_form(frame_of_basis_state(0b10, 2))


def test_group_expectation_examples():
    assert group_expectation(F("+Z"), parse_pauli("+Z")) == 1
    assert group_expectation(F("+Z"), parse_pauli("X")) == 0
    assert group_expectation(F("-XX", "+ZZ"), parse_pauli("+YY")) == 1


def test_invalid_frames_rejected():
    from stablearn.errors import InvalidFrame

    with pytest.raises(InvalidFrame):
        F("+XI", "+ZI").validate()
    with pytest.raises(InvalidFrame):
        F("+ZZ", "-ZZ").validate()


def test_conjugation_exhaustive_small():
    """Every gate, every Pauli on up to three qubits, against dense conjugation."""
    for n in (1, 2, 3):
        for name in CLIFFORD_GATES:
            pairs = itertools.permutations(range(n), 2) if name in TWO_QUBIT else ((q,) for q in range(n))
            for qs in pairs:
                u = kron_gate(name, qs, n)
                for p in all_paulis(n):
                    for sign in (1, -1):
                        q = p.with_sign(sign)
                        img = conjugate(q, Gate(name, qs))
                        assert np.allclose(u @ kron_pauli(q) @ u.conj().T, kron_pauli(img)), (name, qs, q)


@st.composite
def random_frames(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    c = draw(clifford_circuits(n))
    v = draw(st.integers(0, (1 << n) - 1))
    return frame_of_basis_state(v, n).apply_circuit(c)


@settings(max_examples=200, deadline=None)
@given(random_frames(), st.data())
def test_measurement_probabilities_match_born(f, data):
    p = data.draw(paulis(f.n))
    s = state_of(f)
    prob = float(np.real(np.vdot(s, kron_pauli(p) @ s)) + 1) / 2
    ge = group_expectation(f, p)
    assert prob == pytest.approx((1 + ge) / 2, abs=1e-9)
    assert min(abs(prob), abs(prob - 0.5), abs(prob - 1)) < 1e-9
    out, post = measure_pauli(f, p, np.random.default_rng(data.draw(st.integers(0, 2 ** 32))))
    assert_valid(post)
    assert group_expectation(post, p) == out


@settings(max_examples=150, deadline=None)
@given(random_frames(), st.data())
def test_canonical_form_iff_same_state(f, data):
    c = data.draw(clifford_circuits(f.n, 6))
    g = f.apply_circuit(c)
    same = abs(np.vdot(state_of(f), state_of(g))) > 1 - 1e-9
    assert frames_equal(f, g) == same
    assert_valid(canonical_form(g))
    assert frames_equal(canonical_form(g), g)


@settings(max_examples=100, deadline=None)
@given(random_frames())
def test_frame_invariants_after_gates(f):
    assert_valid(f)
    s = state_of(f)
    for r in f.rows:
        assert np.allclose(kron_pauli(r) @ s, s)
    for a, b in itertools.combinations(f.rows, 2):
        assert symplectic_product(a, b) == 0
