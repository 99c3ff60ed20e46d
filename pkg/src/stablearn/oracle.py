"""Black-box access to a hidden target circuit.

Learners only see :class:`OracleSession`: they prepare copies of ``U|v>``
(optionally ``U H^n |v>``), then spend them on Bell measurements (two copies)
or Pauli measurements (one copy).  Every prepared copy is one query on the
:class:`QueryLedger`.

Two backends give the same distributions:

* ``frame`` samples from the closed-form expanded-frame description.
* ``dense`` simulates the state vector exactly (n <= 7).
"""
from __future__ import annotations

import contextlib
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import dense
from .circuit import Circuit, TDepth1Target
from .errors import ConsumedHandle, GuardExceeded, ProvenanceMismatch
from .expanded import (ExpandedFrame, bell_shift, build_tdepth1, evolve_tdepth1,
                       exact_bell_table as frame_bell_table, pseudo_expectation, sample_bell)
from .frame import PauliFrame, conjugate_all
from .pauli import Pauli

BACKENDS = ("frame", "dense")
BASES = ("Z", "X")
MAX_DENSE_QUBITS = dense.MAX_BELL_QUBITS
_session_ids = itertools.count()


@dataclass
class QueryLedger:
    """Counts prepared copies, overall and per named phase."""

    copies_prepared: int = 0
    by_phase: dict[str, int] = field(default_factory=dict)
    _phase: str = "unlabelled"

    def record(self, count: int = 1) -> None:
        if count < 0:
            raise ValueError("ledger is monotone")
        self.copies_prepared += count
        self.by_phase[self._phase] = self.by_phase.get(self._phase, 0) + count

    @contextlib.contextmanager
    def phase(self, name: str):
        old, self._phase = self._phase, name
        try:
            yield self
        finally:
            self._phase = old

    def snapshot(self) -> dict:
        return {"total": self.copies_prepared, "by_phase": dict(sorted(self.by_phase.items()))}


@dataclass
class StateCopy:
    """Handle to one prepared copy; consumed by exactly one measurement."""

    session: int
    inp: int
    basis: str
    serial: int
    consumed: bool = False


def _as_target(target):
    if isinstance(target, TDepth1Target):
        return target
    if not isinstance(target, Circuit):
        raise TypeError(f"unsupported target {type(target).__name__}")
    return target


def _frame_target(target) -> TDepth1Target:
    if isinstance(target, TDepth1Target):
        return target
    split = target.tdepth1_split()
    if split is None:
        raise ValueError("frame backend needs a Clifford or T-depth-one target; use the dense backend")
    return TDepth1Target(*split)


class OracleSession:
    """A target plus a ledger.  Operations within a session are serial."""

    def __init__(self, target, backend: str = "frame", ledger: QueryLedger | None = None):
        self._target = _as_target(target)
        self.n = self._target.n
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._id = next(_session_ids)
        self._serial = itertools.count()
        self._cache: dict[tuple[int, str], object] = {}
        self.set_backend(backend)

    def set_backend(self, backend: str) -> None:
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if backend == "dense" and self.n > MAX_DENSE_QUBITS:
            raise GuardExceeded(f"dense backend limited to {MAX_DENSE_QUBITS} qubits")
        if backend == "frame":
            self._frame_target = _frame_target(self._target)
        self.backend = backend
        self._cache.clear()

    # -- hidden state ------------------------------------------------------
    def _model(self, inp: int, basis: str):
        key = (inp, basis)
        if key not in self._cache:
            if self.backend == "dense":
                self._cache[key] = _state_model(self._target, "dense", inp, basis)
            else:
                self._cache[key] = _state_model(self._frame_target, "frame", inp, basis, self._images(basis))
        return self._cache[key]

    def _images(self, basis: str) -> list[Pauli]:
        key = ("images", basis)
        if key not in self._cache:
            t = self._frame_target
            pre = _hadamard_layer(self.n) if basis == "X" else Circuit(self.n)
            self._cache[key] = conjugate_all([Pauli.single(self.n, i, "Z") for i in range(self.n)],
                                             pre + t.c1)
        return self._cache[key]

    # -- queries -----------------------------------------------------------
    def prepare(self, inp: int = 0, basis: str = "Z") -> StateCopy:
        if basis not in BASES:
            raise ValueError("basis must be 'Z' or 'X'")
        if inp >> self.n:
            raise ValueError("input out of range")
        self.ledger.record(1)
        return StateCopy(self._id, inp, basis, next(self._serial))

    def _consume(self, *copies: StateCopy) -> None:
        for c in copies:
            if c.session != self._id:
                raise ProvenanceMismatch("copy was prepared by another session")
            if c.consumed:
                raise ConsumedHandle("copy already measured")
        for c in copies:
            c.consumed = True

    def bell_measure(self, a: StateCopy, b: StateCopy, rng: np.random.Generator) -> int:
        """Bell-basis outcome on two copies, as a row word ``z | x << n``."""
        if a is b or (a.inp, a.basis) != (b.inp, b.basis):
            raise ProvenanceMismatch("Bell measurement needs two copies of the same state")
        self._consume(a, b)
        model = self._model(a.inp, a.basis)
        if self.backend == "frame":
            return sample_bell(model, rng, shift=_frame_shift(self, a.inp, a.basis))
        cdf = _dense_bell_cdf(self, a.inp, a.basis)
        return int(min(np.searchsorted(cdf, rng.random(), side="right"), len(cdf) - 1))

    def pauli_measure(self, a: StateCopy, p: Pauli, rng: np.random.Generator) -> int:
        self._consume(a)
        prob = self._plus_probability(a.inp, a.basis, p)
        if prob >= 1.0 - 1e-12:
            return 1
        if prob <= 1e-12:
            return -1
        return 1 if rng.random() < prob else -1

    # -- batch helpers (same ledger accounting as one call per copy) -------
    def bell_samples(self, inp: int, count: int, rng: np.random.Generator, basis: str = "Z") -> list[int]:
        out = []
        for _ in range(count):
            a, b = self.prepare(inp, basis), self.prepare(inp, basis)
            out.append(self.bell_measure(a, b, rng))
        return out

    def pauli_counts(self, inp: int, p: Pauli, shots: int, rng: np.random.Generator, basis: str = "Z") -> int:
        """Number of +1 outcomes over ``shots`` fresh copies."""
        self.ledger.record(shots)
        prob = self._plus_probability(inp, basis, p)
        if prob >= 1.0 - 1e-12:
            return shots
        if prob <= 1e-12:
            return 0
        return int(rng.binomial(shots, prob))

    def _plus_probability(self, inp: int, basis: str, p: Pauli) -> float:
        if not p.is_hermitian:
            raise ValueError("can only measure Hermitian Paulis")
        model = self._model(inp, basis)
        if self.backend == "frame":
            ev = pseudo_expectation(model, p)
        else:
            ev = dense.pauli_expectation(model, p)
        return min(1.0, max(0.0, (1 + ev) / 2))


def _frame_shift(session: OracleSession, inp: int, basis: str) -> Pauli:
    key = ("shift", inp, basis)
    if key not in session._cache:
        session._cache[key] = bell_shift(session._model(inp, basis))
    return session._cache[key]


def _dense_bell_cdf(session: OracleSession, inp: int, basis: str) -> np.ndarray:
    key = ("cdf", inp, basis)
    if key not in session._cache:
        s = session._model(inp, basis)
        session._cache[key] = np.cumsum(dense.bell_table_psipsi(s))
    return session._cache[key]


def _hadamard_layer(n: int) -> Circuit:
    c = Circuit(n)
    for i in range(n):
        c.append("H", i)
    return c


def _state_model(target, backend: str, inp: int, basis: str, images=None):
    n = target.n
    pre = _hadamard_layer(n) if basis == "X" else Circuit(n)
    if backend == "frame":
        if images is None:
            return build_tdepth1(pre + target.c1, target.v, target.c2, inp)
        # C1 (-1)^{v_i} Z_i C1^dag: flip the signs of the cached images
        rows = tuple(-p if (inp >> i) & 1 else p for i, p in enumerate(images))
        return evolve_tdepth1(PauliFrame(n, rows), target.v, target.c2)
    circ = target.circuit() if isinstance(target, TDepth1Target) else target
    return dense.run_circuit(pre + circ, inp)


# -- verifier-side exact quantities (not part of the learner interface) ------

def exact_state_model(target, backend: str = "frame", inp: int = 0, basis: str = "Z"):
    """ExpandedFrame (frame backend) or state vector (dense backend)."""
    target = _as_target(target)
    if backend == "frame":
        return _state_model(_frame_target(target), "frame", inp, basis)
    if target.n > MAX_DENSE_QUBITS:
        raise GuardExceeded(f"dense backend limited to {MAX_DENSE_QUBITS} qubits")
    return _state_model(target, "dense", inp, basis)


def exact_bell_table(target, backend: str = "frame", inp: int = 0, conj: bool = False) -> np.ndarray:
    """Full Bell outcome table indexed by row word (length 4**n)."""
    model = exact_state_model(target, backend, inp)
    n = _as_target(target).n
    if n > dense.MAX_BELL_QUBITS:
        raise GuardExceeded(f"exact Bell tables limited to {dense.MAX_BELL_QUBITS} qubits")
    if backend == "frame":
        out = np.zeros(4 ** n)
        for r, p in frame_bell_table(model, conj=conj).items():
            out[r] = p
        return out
    return dense.bell_table_conj(model) if conj else dense.bell_table_psipsi(model)


def exact_plus_probability(target, p: Pauli, backend: str = "frame", inp: int = 0) -> float:
    model = exact_state_model(target, backend, inp)
    if isinstance(model, ExpandedFrame):
        return (1 + pseudo_expectation(model, p)) / 2
    return dense.plus_probability(model, p)
