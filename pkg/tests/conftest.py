import functools

import numpy as np
import pytest
from hypothesis import strategies as st

from stablearn.circuit import CLIFFORD_GATES, TWO_QUBIT, Circuit
from stablearn.pauli import Pauli

_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_pauli(p: Pauli) -> np.ndarray:
    """Brute-force matrix of p, built with explicit Kronecker products.

    Qubit 0 is the least significant bit of the basis index, so it is the
    rightmost factor.
    """
    m = np.eye(1, dtype=complex)
    for q in range(p.n):
        m = np.kron(_MATS[p.letter(q)], m)
    return (1j ** p.phase) * m


_W = np.exp(1j * np.pi / 4)
_ONE = {
    "H": np.array([[1, 1], [1, -1]]) / np.sqrt(2), "S": np.diag([1, 1j]), "Sdg": np.diag([1, -1j]),
    "T": np.diag([1, _W]), "Tdg": np.diag([1, np.conj(_W)]), **{k: v for k, v in _MATS.items() if k != "I"},
}


def kron_gate(name: str, qubits, n: int) -> np.ndarray:
    """Dense unitary of one gate, written out entry by entry from its definition."""
    N = 1 << n
    if name in _ONE:
        m = np.eye(1, dtype=complex)
        for q in range(n):
            m = np.kron(_ONE[name] if q == qubits[0] else np.eye(2), m)
        return m
    a, b = qubits
    u = np.zeros((N, N), dtype=complex)
    for v in range(N):
        ba, bb = (v >> a) & 1, (v >> b) & 1
        if name == "CX":
            u[v ^ (ba << b), v] = 1
        elif name == "CZ":
            u[v, v] = -1 if ba and bb else 1
        elif name == "SWAP":
            w = v & ~((1 << a) | (1 << b)) | (bb << a) | (ba << b)
            u[w, v] = 1
    return u


def kron_circuit(c) -> np.ndarray:
    u = np.eye(1 << c.n, dtype=complex)
    for g in c.gates:
        u = kron_gate(g.name, g.qubits, c.n) @ u
    return u


@functools.lru_cache(maxsize=None)
def all_paulis(n: int) -> tuple[Pauli, ...]:
    return tuple(Pauli(n, z, x) for z in range(1 << n) for x in range(1 << n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def paulis(n: int, hermitian: bool = True):
    phases = st.sampled_from([0, 2]) if hermitian else st.integers(0, 3)
    return st.builds(Pauli, st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1), phases)


@st.composite
def clifford_circuits(draw, n: int, max_len: int = 30):
    names = list(CLIFFORD_GATES) if n > 1 else [g for g in CLIFFORD_GATES if g not in TWO_QUBIT]
    c = Circuit(n)
    for _ in range(draw(st.integers(0, max_len))):
        name = draw(st.sampled_from(names))
        if name in TWO_QUBIT:
            a = draw(st.integers(0, n - 1))
            b = draw(st.integers(0, n - 2))
            c.append(name, a, b if b < a else b + 1)
        else:
            c.append(name, draw(st.integers(0, n - 1)))
    return c


# Acceptance verdicts, one line per criterion, repeated in the terminal summary.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
