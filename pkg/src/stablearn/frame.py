"""Stabilizer states as Pauli frames (stabilizer rows only, no destabilizers)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .errors import InvalidFrame, NonCliffordGate
from .gf2 import SpanSolver, gf2_rank
from .pauli import Pauli, format_pauli, multiply, parse_pauli, symplectic_product


def conjugate(p: Pauli, g: Gate) -> Pauli:
    """Return ``g p g^dagger`` with the exact phase."""
    z, x, ph = p.z, p.x, p.phase
    name = g.name
    if name in ("H", "S", "Sdg", "X", "Y", "Z"):
        q = g.qubits[0]
        xb, zb = (x >> q) & 1, (z >> q) & 1
        if name == "H":
            if xb & zb:
                ph += 2
            if xb != zb:
                z ^= 1 << q
                x ^= 1 << q
        elif name == "S":
            if xb & zb:
                ph += 2
            z ^= xb << q
        elif name == "Sdg":
            if xb & (1 - zb):
                ph += 2
            z ^= xb << q
        elif name == "X":
            ph += 2 * zb
        elif name == "Z":
            ph += 2 * xb
        else:
            ph += 2 * (xb ^ zb)
    elif name == "CX":
        c, t = g.qubits
        xc, zc, xt, zt = (x >> c) & 1, (z >> c) & 1, (x >> t) & 1, (z >> t) & 1
        if xc & zt & (xt ^ zc ^ 1):
            ph += 2
        x ^= xc << t
        z ^= zt << c
    elif name == "CZ":
        a, b = g.qubits
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        if xa & xb & (za ^ zb):
            ph += 2
        z ^= (xb << a) | (xa << b)
    elif name == "SWAP":
        a, b = g.qubits
        for attr in (0, 1):
            v = z if attr == 0 else x
            ba, bb = (v >> a) & 1, (v >> b) & 1
            if ba != bb:
                v ^= (1 << a) | (1 << b)
            if attr == 0:
                z = v
            else:
                x = v
    else:
        raise NonCliffordGate(f"cannot conjugate by {name}")
    return Pauli(p.n, z, x, ph % 4)


def conjugate_circuit(p: Pauli, c: Circuit) -> Pauli:
    """``C p C^dagger`` where C runs the gates of ``c`` in order."""
    return conjugate_all([p], c)[0]


def conjugate_all(ps: Sequence[Pauli], c: Circuit) -> list[Pauli]:
    """Conjugate many Paulis through ``c`` at once.

    Column j of the batch is kept as bitmasks over the Paulis (one for X bits,
    one for Z bits, one for signs), so each gate costs a few big-int
    operations regardless of how many Paulis there are.  The odd part of the
    phase (a factor of i) is unchanged by conjugation and carried through.
    """
    if not ps:
        return []
    n = ps[0].n
    m = len(ps)
    full = (1 << m) - 1
    xs = [0] * n
    zs = [0] * n
    r = 0
    for i, p in enumerate(ps):
        bit = 1 << i
        if p.phase & 2:
            r |= bit
        x, z = p.x, p.z
        j = 0
        while x or z:
            if x & 1:
                xs[j] |= bit
            if z & 1:
                zs[j] |= bit
            x >>= 1
            z >>= 1
            j += 1
    for g in c.gates:
        name, qs = g.name, g.qubits
        if name == "H":
            q = qs[0]
            r ^= xs[q] & zs[q]
            xs[q], zs[q] = zs[q], xs[q]
        elif name == "S":
            q = qs[0]
            r ^= xs[q] & zs[q]
            zs[q] ^= xs[q]
        elif name == "Sdg":
            q = qs[0]
            r ^= xs[q] & ~zs[q] & full
            zs[q] ^= xs[q]
        elif name == "X":
            r ^= zs[qs[0]]
        elif name == "Z":
            r ^= xs[qs[0]]
        elif name == "Y":
            r ^= xs[qs[0]] ^ zs[qs[0]]
        elif name == "CX":
            a, b = qs
            r ^= xs[a] & zs[b] & ~(xs[b] ^ zs[a]) & full
            xs[b] ^= xs[a]
            zs[a] ^= zs[b]
        elif name == "CZ":
            a, b = qs
            r ^= xs[a] & xs[b] & (zs[a] ^ zs[b])
            za = zs[a] ^ xs[b]
            zs[b] ^= xs[a]
            zs[a] = za
        elif name == "SWAP":
            a, b = qs
            xs[a], xs[b] = xs[b], xs[a]
            zs[a], zs[b] = zs[b], zs[a]
        else:
            raise NonCliffordGate(f"cannot conjugate by {name}")
    out = []
    for i, p in enumerate(ps):
        x = z = 0
        for j in range(n):
            x |= ((xs[j] >> i) & 1) << j
            z |= ((zs[j] >> i) & 1) << j
        out.append(Pauli(n, z, x, 2 * ((r >> i) & 1) + (p.phase & 1)))
    return out


def conjugate_circuit_inverse(p: Pauli, c: Circuit) -> Pauli:
    """``C^dagger p C``."""
    return conjugate_circuit(p, c.inverse())


@dataclass(frozen=True)
class PauliFrame:
    n: int
    rows: tuple[Pauli, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @classmethod
    def from_text(cls, lines: Iterable[str]) -> "PauliFrame":
        rows = [parse_pauli(s) for s in lines]
        return cls(rows[0].n, tuple(rows))

    def validate(self) -> "PauliFrame":
        if len(self.rows) != self.n or any(r.n != self.n for r in self.rows):
            raise InvalidFrame("a frame needs n rows on n qubits")
        if any(not r.is_hermitian for r in self.rows):
            raise InvalidFrame("frame rows must be Hermitian")
        if gf2_rank([r.row for r in self.rows]) != self.n:
            raise InvalidFrame("frame rows are dependent")
        for i, a in enumerate(self.rows):
            for b in self.rows[i + 1:]:
                if symplectic_product(a, b):
                    raise InvalidFrame(f"rows {a} and {b} anticommute")
        # independent commuting Hermitian rows cannot generate -I
        return self

    def text(self) -> list[str]:
        return [format_pauli(r) for r in self.rows]

    def matrix_text(self) -> list[str]:
        """Rows as ``(sign | W | V)`` with W the Z part and V the X part."""
        out = []
        for r in self.rows:
            w = "".join(str((r.z >> j) & 1) for j in range(self.n))
            v = "".join(str((r.x >> j) & 1) for j in range(self.n))
            out.append(f"{'+' if r.sign > 0 else '-'} {w} | {v}")
        return out

    def __str__(self) -> str:
        return "{" + ", ".join(self.text()) + "}"

    def apply_gate(self, g: Gate) -> "PauliFrame":
        return apply_gate(self, g)

    def apply_circuit(self, c: Circuit) -> "PauliFrame":
        return PauliFrame(self.n, tuple(conjugate_all(self.rows, c)))


def frame_of_basis_state(v: int, n: int) -> PauliFrame:
    """Row i is ``(-1)**v_i Z_i``."""
    return PauliFrame(n, tuple(Pauli(n, 1 << i, 0, 2 * ((v >> i) & 1)) for i in range(n)))


def apply_gate(f: PauliFrame, g: Gate) -> PauliFrame:
    if any(q >= f.n for q in g.qubits):
        raise ValueError(f"gate {g} out of range")
    return PauliFrame(f.n, tuple(conjugate(r, g) for r in f.rows))


def x_rank(f: PauliFrame) -> int:
    return gf2_rank([r.x for r in f.rows])


def decompose(rows: Sequence[Pauli], p: Pauli) -> tuple[int, Pauli] | None:
    """Express the word of ``p`` as a product of ``rows``.

    Returns (bitmask over rows, signed product) or None if outside the span.
    """
    combo = SpanSolver([r.row for r in rows]).solve(p.row)
    if combo is None:
        return None
    acc = Pauli(p.n)
    for i, r in enumerate(rows):
        if (combo >> i) & 1:
            acc = multiply(acc, r)
    return combo, acc


def group_expectation(f: PauliFrame, p: Pauli) -> int:
    """+1 if p is in the stabilizer group, -1 if -p is, 0 otherwise."""
    if not p.is_hermitian:
        raise ValueError("group_expectation expects a Hermitian Pauli")
    if any(symplectic_product(r, p) for r in f.rows):
        return 0
    hit = decompose(f.rows, p)
    if hit is None:  # cannot happen for a full frame
        return 0
    prod = hit[1]
    return 1 if prod.phase == p.phase else -1


def measure_pauli(f: PauliFrame, p: Pauli, rng: np.random.Generator) -> tuple[int, PauliFrame]:
    """Measure Hermitian ``p``; one RNG draw only when the outcome is random."""
    if not p.is_hermitian:
        raise ValueError("can only measure Hermitian Paulis")
    anti = [i for i, r in enumerate(f.rows) if symplectic_product(r, p)]
    if not anti:
        return group_expectation(f, p), f
    outcome = 1 if rng.random() < 0.5 else -1
    first = f.rows[anti[0]]
    rows = list(f.rows)
    for i in anti[1:]:
        rows[i] = multiply(rows[i], first)
    rows[anti[0]] = p if outcome == 1 else -p
    return outcome, PauliFrame(f.n, tuple(rows))


def canonical_rows(rows: Sequence[Pauli], n: int) -> tuple[Pauli, ...]:
    """Signed reduced echelon form, pivoting on X bits first, then Z bits."""
    work = list(rows)
    key = lambda p: p.x | (p.z << n)  # noqa: E731
    r = 0
    for c in range(2 * n):
        bit = 1 << c
        piv = next((i for i in range(r, len(work)) if key(work[i]) & bit), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(len(work)):
            if i != r and key(work[i]) & bit:
                work[i] = multiply(work[i], work[r])
        r += 1
    return tuple(work)


def canonical_form(f: PauliFrame) -> PauliFrame:
    """Unique frame per stabilizer group (hence per state)."""
    return PauliFrame(f.n, canonical_rows(f.rows, f.n))


def frames_equal(a: PauliFrame, b: PauliFrame) -> bool:
    return canonical_form(a).rows == canonical_form(b).rows
