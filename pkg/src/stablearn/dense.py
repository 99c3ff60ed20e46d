"""Exact statevector reference.

Amplitude index is ``sum_i x_i 2**i``: qubit i is bit i (little-endian).  A
state is a plain complex numpy vector of length ``2**n``.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate
from .errors import DimensionMismatch, GuardExceeded
from .pauli import Pauli

MAX_STATE_QUBITS = 14
MAX_BELL_QUBITS = 7
MAX_UNITARY_QUBITS = 3

_S2 = 1 / np.sqrt(2)
OMEGA = np.exp(1j * np.pi / 4)
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

ONE_QUBIT = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.diag([1, 1j]),
    "Sdg": np.diag([1, -1j]),
    "X": X,
    "Y": Y,
    "Z": Z,
    "T": np.diag([1, OMEGA]),
    "Tdg": np.diag([1, np.conj(OMEGA)]),
}
# two-qubit matrices in the (first, second) qubit basis |a b> -> index 2a + b
TWO_QUBIT = {
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def _nqubits(s: np.ndarray) -> int:
    n = int(s.shape[0]).bit_length() - 1
    if 1 << n != s.shape[0]:
        raise DimensionMismatch("state length is not a power of two")
    return n


def basis_state(v: int, n: int) -> np.ndarray:
    if n > MAX_STATE_QUBITS:
        raise GuardExceeded(f"dense simulation limited to {MAX_STATE_QUBITS} qubits")
    s = np.zeros(1 << n, dtype=complex)
    s[v] = 1
    return s


def apply_gate(s: np.ndarray, g: Gate, n: int | None = None) -> np.ndarray:
    n = _nqubits(s) if n is None else n
    t = s.reshape((2,) * n)  # axis a holds qubit n-1-a
    if g.name in ONE_QUBIT:
        ax = n - 1 - g.qubits[0]
        t = np.moveaxis(np.tensordot(ONE_QUBIT[g.name], t, axes=([1], [ax])), 0, ax)
    else:
        a, b = (n - 1 - q for q in g.qubits)
        m = TWO_QUBIT[g.name].reshape(2, 2, 2, 2)
        t = np.tensordot(m, t, axes=([2, 3], [a, b]))
        t = np.moveaxis(t, [0, 1], [a, b])
    return t.reshape(-1)


def apply_matrix(s: np.ndarray, m: np.ndarray, qubit: int) -> np.ndarray:
    n = _nqubits(s)
    ax = n - 1 - qubit
    t = np.tensordot(m, s.reshape((2,) * n), axes=([1], [ax]))
    return np.moveaxis(t, 0, ax).reshape(-1)


def run_circuit(c: Circuit, v: int = 0, state: np.ndarray | None = None) -> np.ndarray:
    """Run ``c`` on basis input ``v`` (or on ``state`` if given)."""
    s = basis_state(v, c.n) if state is None else np.array(state, dtype=complex)
    for g in c.gates:
        s = apply_gate(s, g, c.n)
    return s


def conjugate_state(s: np.ndarray) -> np.ndarray:
    return np.conj(s)


def pauli_matrix(p: Pauli) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a signed Pauli in the little-endian basis."""
    m = np.array([[1]], dtype=complex)
    for q in reversed(range(p.n)):  # most significant qubit first in kron
        m = np.kron(m, PAULI[p.letter(q)])
    return (1j ** p.phase) * m


def apply_pauli(s: np.ndarray, p: Pauli) -> np.ndarray:
    """``p |s>`` without building the full matrix."""
    n = p.n
    idx = np.arange(1 << n)
    # sigma_{z:x} = i^{y count} X^x Z^z (Y = iXZ)
    parity = np.zeros(1 << n, dtype=np.int64)
    zz = p.z
    q = 0
    while zz:
        if zz & 1:
            parity ^= (idx >> q) & 1
        zz >>= 1
        q += 1
    out = np.empty_like(s)
    out[idx ^ p.x] = s * (1 - 2 * parity)
    ny = bin(p.z & p.x).count("1")
    return out * (1j ** ((p.phase + ny) % 4))


def pauli_expectation(s: np.ndarray, p: Pauli) -> float:
    val = np.vdot(s, apply_pauli(s, p))
    if p.is_hermitian and abs(val.imag) > 1e-10:
        raise ValueError(f"imaginary expectation {val} for Hermitian {p}")
    return float(val.real)


def plus_probability(s: np.ndarray, p: Pauli) -> float:
    return (1 + pauli_expectation(s, p)) / 2


def _fwht(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along ``axis``."""
    a = np.moveaxis(np.array(a, dtype=complex), axis, -1)
    shape = a.shape
    n = shape[-1]
    h = 1
    while h < n:
        a = a.reshape(shape[:-1] + (n // (2 * h), 2, h))
        lo, hi = a[..., 0, :], a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return np.moveaxis(a.reshape(shape), -1, axis)


def bell_distribution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Outcome probabilities of pairwise Bell measurements on ``|a>|b>``.

    Entry ``r = z | x << n`` is ``|<Phi+|^n (I (x) sigma_r) |a>|b>|**2``,
    which equals ``|a^T sigma_r b|**2 / 2**n``.
    """
    n = _nqubits(a)
    if _nqubits(b) != n:
        raise DimensionMismatch("states differ in size")
    if n > MAX_BELL_QUBITS:
        raise GuardExceeded(f"Bell tables limited to {MAX_BELL_QUBITS} qubits")
    N = 1 << n
    u = np.arange(N)
    # f[x, u] = a[u ^ x] b[u]; then a^T sigma_{z:x} b = i^{z.x} sum_u (-1)^{z.u} f[x, u]
    f = a[u[None, :] ^ u[:, None]] * b[None, :]
    amp = _fwht(f, axis=1)  # amp[x, z]
    probs = np.abs(amp) ** 2 / N
    # reorder to r = z | x << n, i.e. flat index x * N + z
    return probs.reshape(-1)


def bell_table_psipsi(s: np.ndarray) -> np.ndarray:
    return bell_distribution(s, s)


def bell_table_conj(s: np.ndarray) -> np.ndarray:
    return bell_distribution(np.conj(s), s)


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    if a.shape != b.shape:
        raise DimensionMismatch("states differ in size")
    return abs(np.vdot(a, b)) >= 1 - tol


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)


def reconstruct_unitary(c: Circuit) -> np.ndarray:
    if c.n > MAX_UNITARY_QUBITS:
        raise GuardExceeded(f"full unitaries limited to {MAX_UNITARY_QUBITS} qubits")
    return np.stack([run_circuit(c, v) for v in range(1 << c.n)], axis=1)


def unitary_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min over theta of max |a - e^{i theta} b|`` with theta from tr(b^dag a)."""
    tr = np.trace(b.conj().T @ a)
    theta = np.angle(tr) if abs(tr) > 1e-15 else 0.0
    return float(np.max(np.abs(a - np.exp(1j * theta) * b)))


def compare_unitaries_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    if a.shape != b.shape:
        raise DimensionMismatch("unitaries differ in size")
    return unitary_phase_distance(a, b) <= tol


def density(s: np.ndarray) -> np.ndarray:
    return np.outer(s, np.conj(s))


def stabilizer_projector(rows, n: int) -> np.ndarray:
    """``|phi><phi|`` for the state stabilized by the given frame rows."""
    proj = np.eye(1 << n, dtype=complex)
    for r in rows:
        proj = proj @ (np.eye(1 << n) + pauli_matrix(r)) / 2
    return proj
