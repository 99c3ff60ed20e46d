"""Learning a hidden Clifford circuit from Bell samples and Pauli measurements.

Each of two passes learns one half of the tableau.  The Z pass works with
inputs |v>: Bell samples on U|0> give the stabilizer group of U|0>, one
measurement per generator fixes its sign, and measuring every generator on
U|e_j> shows which generators flip with input bit j.  Inverting that flip
matrix expresses each U Z_j U^dag in the learned generators.  The X pass does
the same on U H^n |v>, giving U X_j U^dag.  One pass costs
2(2n+1) + n + n^2 copies, so both cost 2n^2 + 10n + 4.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .errors import InconsistentTarget, InvalidTableau, LearnerFailure, RankDeficient, SingularMatrix
from .gf2 import BitMatrix, gf2_invert, gf2_rref
from .oracle import OracleSession
from .pauli import Pauli, multiply
from .synthesis import Tableau, synthesize


def query_budget(n: int) -> int:
    return 2 * n * n + 10 * n + 4


def pass_cost(n: int) -> int:
    return 2 * (2 * n + 1) + n + n * n


def learn_stabilizer_group(session: OracleSession, inp: int, basis: str, rng: np.random.Generator,
                           shots: int = 1) -> list[Pauli]:
    """Signed generators of the stabilizer group of U|inp> (or U H^n |inp>)."""
    n = session.n
    with session.ledger.phase("bell"):
        samples = session.bell_samples(inp, 2 * n + 1, rng, basis)
    words = [s ^ samples[0] for s in samples[1:]]
    rref, rank, _ = gf2_rref(BitMatrix(tuple(words), 2 * n))
    if rank < n:
        raise RankDeficient(f"Bell words span rank {rank} < {n}")
    if rank > n:
        raise InconsistentTarget(f"Bell words span rank {rank} > {n}: target is not Clifford")
    gens = [Pauli.from_row(n, r) for r in rref.rows[:n]]
    signed = []
    with session.ledger.phase("signs"):
        for g in gens:
            plus = session.pauli_counts(inp, g, shots, rng, basis)
            signed.append(g if 2 * plus > shots else -g)
    return signed


def probe_signs(session: OracleSession, gens: Sequence[Pauli], basis: str, rng: np.random.Generator,
                shots: int = 1) -> BitMatrix:
    """B[i][j] = 1 iff generator i reads -1 on the state for input e_j."""
    n = session.n
    rows = [0] * len(gens)
    with session.ledger.phase("probe"):
        for j in range(n):
            for i, g in enumerate(gens):
                plus = session.pauli_counts(1 << j, g, shots, rng, basis)
                if 0 < plus < shots:
                    raise InconsistentTarget(f"generator {g} is not deterministic on input e_{j}")
                if plus == 0:
                    rows[i] |= 1 << j
    return BitMatrix(tuple(rows), n)


def solve_images(gens: Sequence[Pauli], b: BitMatrix) -> list[Pauli]:
    """Image i = product of gens[j] over set bits of row i of B^{-1}."""
    d = gf2_invert(b)
    n = len(gens)
    out = []
    for i in range(n):
        acc = Pauli(n)
        for j in range(n):
            if d.get(i, j):
                acc = multiply(acc, gens[j])
        if not acc.is_hermitian:
            raise InconsistentTarget("learned generators do not commute")
        out.append(acc)
    return out


def learn_images(session: OracleSession, basis: str, rng: np.random.Generator, shots: int = 1) -> list[Pauli]:
    gens = learn_stabilizer_group(session, 0, basis, rng, shots)
    b = probe_signs(session, gens, basis, rng, shots)
    try:
        return solve_images(gens, b)
    except SingularMatrix as exc:
        raise InconsistentTarget("probe matrix is singular") from exc


@dataclass
class CliffordLearnResult:
    circuit: Circuit
    tableau: Tableau
    attempts: dict[str, int] = field(default_factory=dict)
    budgeted_queries: int = 0
    retry_queries: int = 0

    @property
    def single_pass(self) -> bool:
        return all(v == 1 for v in self.attempts.values())


def learn_clifford(session: OracleSession, rng: np.random.Generator, max_retries: int = 3,
                   shots: int = 1) -> CliffordLearnResult:
    """Learn a circuit with the same tableau as the hidden Clifford, signs included.

    A pass that fails (rank deficiency, singular probe matrix) is rerun with
    fresh samples up to ``max_retries`` times; copies spent on failed passes
    are reported as ``retry_queries``, outside the single-run budget.
    """
    n = session.n
    images = {}
    attempts = {}
    retry = 0
    for basis in ("Z", "X"):
        for attempt in range(max_retries + 1):
            before = session.ledger.copies_prepared
            try:
                images[basis] = learn_images(session, basis, rng, shots)
                attempts[basis] = attempt + 1
                break
            except LearnerFailure:
                spent = session.ledger.copies_prepared - before
                retry += spent
                if attempt == max_retries:
                    raise
    tab = Tableau(n, tuple(images["X"]), tuple(images["Z"]))
    try:
        tab.validate()
    except InvalidTableau as exc:
        raise InconsistentTarget(str(exc)) from exc
    return CliffordLearnResult(synthesize(tab), tab, attempts,
                               session.ledger.copies_prepared - retry, retry)
