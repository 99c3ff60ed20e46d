"""Random target generators."""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, TDepth1Target, random_clifford_circuit, random_t_positions
from .frame import frame_of_basis_state
from .gf2 import gf2_rank
from .pauli import Pauli, symplectic_product

MAX_GENERIC_TRIES = 1000


def random_clifford_target(n: int, rng: np.random.Generator) -> Circuit:
    return random_clifford_circuit(n, rng)


def t_syndrome_rank(c1: Circuit, v: int) -> int:
    """Rank of the Z_q syndromes (q in v) against the frame of C1|0^n>.

    Equal to weight(v) exactly when no product of those Z_q is a stabilizer up
    to sign, i.e. every T gate adds its own primary pair.
    """
    f = frame_of_basis_state(0, c1.n).apply_circuit(c1)
    synd = []
    for q in range(c1.n):
        if (v >> q) & 1:
            zq = Pauli.single(c1.n, q, "Z")
            synd.append(sum(symplectic_product(r, zq) << i for i, r in enumerate(f.rows)))
    return gf2_rank(synd)


def random_tdepth1_target(n: int, k: int, rng: np.random.Generator, generic: bool = True) -> TDepth1Target:
    """Random C2 T^v C1 with weight(v) = k.

    With ``generic`` the C1 draw is repeated until the k T gates act on
    independent Z syndromes, so the output has exactly k primary pairs on
    every basis input.
    """
    v = random_t_positions(n, k, rng)
    for _ in range(MAX_GENERIC_TRIES):
        c1 = random_clifford_circuit(n, rng)
        if not generic or t_syndrome_rank(c1, v) == k:
            break
    else:
        raise RuntimeError("could not draw a generic T-depth-one target")
    return TDepth1Target(c1, v, random_clifford_circuit(n, rng))


def worked_example() -> TDepth1Target:
    """Two qubits: H on both, CZ, then T on both.

    The output has primary pairs (XZ, YZ) and (ZX, ZY); its Bell table on
    psi* (x) psi has II: 1/4, the four primaries at 1/8 and the four
    two-primary products at 1/16.
    """
    c1 = Circuit(2).append("H", 0).append("H", 1).append("CZ", 0, 1)
    return TDepth1Target(c1, 0b11, Circuit(2))


def tdepth2_example() -> Circuit:
    """Two T stages whose output on |00> equals the worked example's.

    The first stage puts T on both wires of |00>, where it only adds phase 1,
    so on that input the circuit acts like H on both, CZ, then T on both.
    """
    c = Circuit(2).append("T", 0).append("T", 1).append("H", 0).append("H", 1)
    return c.append("CZ", 0, 1).append("T", 0).append("T", 1)
