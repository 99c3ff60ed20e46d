"""Gate lists, their JSON form, and random circuit generators."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import NonCliffordGate

ONE_QUBIT = ("H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg")
TWO_QUBIT = ("CX", "CZ", "SWAP")
CLIFFORD_GATES = ("H", "S", "Sdg", "X", "Y", "Z", "CX", "CZ", "SWAP")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        want = 2 if self.name in TWO_QUBIT else 1 if self.name in ONE_QUBIT else None
        if want is None:
            raise ValueError(f"unknown gate {self.name!r}")
        if len(self.qubits) != want:
            raise ValueError(f"{self.name} takes {want} qubit(s), got {self.qubits}")
        if want == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.name} needs distinct qubits")

    @property
    def is_clifford(self) -> bool:
        return self.name in CLIFFORD_GATES

    def to_json(self) -> dict:
        return {"g": self.name, "q": list(self.qubits)}

    def __str__(self) -> str:
        return f"{self.name}{list(self.qubits)}"


def gate(name: str, *qubits: int) -> Gate:
    return Gate(name, qubits)


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        self.gates = [g if isinstance(g, Gate) else Gate(g[0], g[1]) for g in self.gates]
        for g in self.gates:
            if any(q < 0 or q >= self.n for q in g.qubits):
                raise ValueError(f"gate {g} out of range for n={self.n}")

    def append(self, name: str, *qubits: int) -> "Circuit":
        g = Gate(name, qubits)
        if any(q >= self.n for q in qubits):
            raise ValueError(f"gate {g} out of range for n={self.n}")
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g.name, *g.qubits)
        return self

    def __add__(self, other: "Circuit") -> "Circuit":
        """``a + b`` runs a first, then b."""
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        return Circuit(self.n, self.gates + other.gates)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def is_clifford(self) -> bool:
        return all(g.is_clifford for g in self.gates)

    def require_clifford(self) -> None:
        for g in self.gates:
            if not g.is_clifford:
                raise NonCliffordGate(f"non-Clifford gate {g} in a Clifford-only circuit")

    @property
    def t_count(self) -> int:
        return sum(g.name in ("T", "Tdg") for g in self.gates)

    def tdepth1_split(self) -> tuple["Circuit", int, "Circuit"] | None:
        """Split into (C1, v, C2) with self = C2 . T^v . C1, or None.

        A T gate is pushed into the stage if no earlier Clifford gate touching
        its qubit occurs after an earlier T (gates on a qubit before its T go to
        C1).  This is a structural check; it does not look for identities.
        """
        c1: list[Gate] = []
        c2: list[Gate] = []
        v = 0
        frozen = 0  # qubits already touched by a C2 gate
        for g in self.gates:
            mask = sum(1 << q for q in g.qubits)
            if g.name == "T":
                if frozen & mask or v & mask:
                    return None
                v |= mask
            elif g.name == "Tdg":
                return None
            elif v & mask or frozen & mask:
                c2.append(g)
                frozen |= mask
            else:
                c1.append(g)
        return Circuit(self.n, c1), v, Circuit(self.n, c2)

    def inverse(self) -> "Circuit":
        inv = {"S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T"}
        return Circuit(self.n, [Gate(inv.get(g.name, g.name), g.qubits) for g in reversed(self.gates)])

    def to_json(self) -> dict:
        return {"n": self.n, "gates": [g.to_json() for g in self.gates]}

    @classmethod
    def from_json(cls, d: dict) -> "Circuit":
        return cls(int(d["n"]), [Gate(g["g"], tuple(g["q"])) for g in d["gates"]])

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.name] = out.get(g.name, 0) + 1
        return out

    def __str__(self) -> str:
        return " ".join(str(g) for g in self.gates)


def bits_to_text(v: int, n: int) -> str:
    """Bitstring with character j = bit j."""
    return "".join("1" if (v >> j) & 1 else "0" for j in range(n))


def text_to_bits(s: str) -> int:
    if any(c not in "01" for c in s):
        raise ValueError(f"bad bitstring {s!r}")
    return sum(1 << j for j, c in enumerate(s) if c == "1")


@dataclass
class TDepth1Target:
    """U = C2 . T^v . C1."""

    c1: Circuit
    v: int
    c2: Circuit

    def __post_init__(self):
        self.c1.require_clifford()
        self.c2.require_clifford()
        if self.c1.n != self.c2.n or self.v >> self.c1.n:
            raise ValueError("inconsistent T-depth-one parts")

    @property
    def n(self) -> int:
        return self.c1.n

    @property
    def k(self) -> int:
        return bin(self.v).count("1")

    def circuit(self) -> Circuit:
        mid = [Gate("T", (q,)) for q in range(self.n) if (self.v >> q) & 1]
        return Circuit(self.n, self.c1.gates + mid + self.c2.gates)


def target_to_json(target) -> dict:
    if isinstance(target, TDepth1Target):
        d = target.circuit().to_json()
        d.update(kind="tdepth1", c1=target.c1.to_json()["gates"], v=bits_to_text(target.v, target.n),
                 c2=target.c2.to_json()["gates"])
        return d
    d = target.to_json()
    d["kind"] = "clifford" if target.is_clifford else "circuit"
    return d


def target_from_json(d: dict):
    n = int(d["n"])
    if "c1" in d:
        return TDepth1Target(Circuit.from_json({"n": n, "gates": d["c1"]}), text_to_bits(d["v"]),
                             Circuit.from_json({"n": n, "gates": d["c2"]}))
    return Circuit.from_json(d)


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


def random_clifford_circuit(n: int, rng: np.random.Generator, length: int | None = None) -> Circuit:
    """Uniform random word of ``20 n^2`` elementary Clifford gates.

    Not uniform over the Clifford group; good enough to exercise the learners.
    """
    length = 20 * n * n if length is None else length
    names = list(CLIFFORD_GATES) if n > 1 else [g for g in CLIFFORD_GATES if g not in TWO_QUBIT]
    c = Circuit(n)
    picks = rng.integers(len(names), size=length)
    for i in picks:
        name = names[int(i)]
        if name in TWO_QUBIT:
            a, b = rng.choice(n, size=2, replace=False)
            c.append(name, int(a), int(b))
        else:
            c.append(name, int(rng.integers(n)))
    return c


def random_t_positions(n: int, k: int, rng: np.random.Generator) -> int:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return sum(1 << int(q) for q in rng.choice(n, size=k, replace=False))

