"""Clifford tableaus and their synthesis into gate lists."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, Gate
from .errors import InvalidTableau
from .expanded import solve_commutation
from .frame import conjugate, conjugate_all
from .gf2 import gf2_rank
from .pauli import Pauli, format_pauli, symplectic_product

SYNTH_GATES = ("H", "S", "Sdg", "X", "Z", "CX")
# Each column costs at most 4n gates to fix its x-image and 4n for its z-image,
# plus two sign-fix Paulis, so synthesize() emits at most 8n^2 + 2n <= 10 n^2.
GATE_COUNT_C = 10


@dataclass(frozen=True)
class Tableau:
    """Images of X_i and Z_i under conjugation by a Clifford C."""

    n: int
    x_images: tuple[Pauli, ...]
    z_images: tuple[Pauli, ...]

    def __post_init__(self):
        object.__setattr__(self, "x_images", tuple(self.x_images))
        object.__setattr__(self, "z_images", tuple(self.z_images))

    @classmethod
    def identity(cls, n: int) -> "Tableau":
        return cls(n, tuple(Pauli.single(n, i, "X") for i in range(n)),
                   tuple(Pauli.single(n, i, "Z") for i in range(n)))

    def validate(self) -> "Tableau":
        xs, zs = self.x_images, self.z_images
        if len(xs) != self.n or len(zs) != self.n:
            raise InvalidTableau("need n x-images and n z-images")
        if any(not p.is_hermitian or p.n != self.n for p in xs + zs):
            raise InvalidTableau("images must be Hermitian n-qubit Paulis")
        _check_relations(xs, zs)
        return self

    def text(self) -> list[str]:
        return [f"X{i} -> {format_pauli(a)}   Z{i} -> {format_pauli(b)}"
                for i, (a, b) in enumerate(zip(self.x_images, self.z_images))]


def _check_relations(xs: Sequence[Pauli], zs: Sequence[Pauli | None]) -> None:
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            if symplectic_product(xs[i], xs[j]):
                raise InvalidTableau(f"x-images {i}, {j} anticommute")
    for i in range(n):
        if zs[i] is None:
            continue
        for j in range(n):
            want = 1 if i == j else 0
            if symplectic_product(zs[i], xs[j]) != want:
                raise InvalidTableau(f"z-image {i} vs x-image {j} has the wrong commutation")
            if j > i and zs[j] is not None and symplectic_product(zs[i], zs[j]):
                raise InvalidTableau(f"z-images {i}, {j} anticommute")


def tableau_of(c: Circuit) -> Tableau:
    c.require_clifford()
    n = c.n
    imgs = conjugate_all([Pauli.single(n, i, "X") for i in range(n)]
                         + [Pauli.single(n, i, "Z") for i in range(n)], c)
    return Tableau(n, tuple(imgs[:n]), tuple(imgs[n:]))


def complete_tableau(x_images: Sequence[Pauli], z_images: Sequence[Pauli | None]) -> Tableau:
    """Fill missing z-images (None entries, or a short list) with symplectic partners.

    Each missing z_j is the deterministic solution of: anticommute with x_j,
    commute with every other x-image and every z-image already present.
    """
    n = len(x_images)
    zs: list[Pauli | None] = list(z_images) + [None] * (n - len(z_images))
    _check_relations(x_images, zs)
    if gf2_rank([p.row for p in x_images]) != n:
        raise InvalidTableau("x-images are dependent")
    for j in range(n):
        if zs[j] is not None:
            continue
        targets = list(x_images) + [z for z in zs if z is not None]
        rhs = [1 if i == j else 0 for i in range(n)] + [0] * (len(targets) - n)
        zs[j] = solve_commutation(targets, rhs, n)
    return Tableau(n, tuple(x_images), tuple(zs)).validate()


class _Sweep:
    """Conjugate all images by gates while recording them."""

    def __init__(self, tab: Tableau):
        self.n = tab.n
        self.imgs = list(tab.x_images) + list(tab.z_images)
        self.gates: list[Gate] = []

    def apply(self, name: str, *qubits: int) -> None:
        g = Gate(name, qubits)
        self.gates.append(g)
        self.imgs = [conjugate(p, g) for p in self.imgs]

    def cz(self, a: int, b: int) -> None:
        self.apply("H", b)
        self.apply("CX", a, b)
        self.apply("H", b)

    def x(self, i: int) -> Pauli:
        return self.imgs[i]

    def z(self, i: int) -> Pauli:
        return self.imgs[self.n + i]


def _bits(v: int, skip: int) -> list[int]:
    out, q = [], 0
    while v:
        if v & 1 and q != skip:
            out.append(q)
        v >>= 1
        q += 1
    return out


def synthesize(tab: Tableau) -> Circuit:
    """A circuit C (gates from H, S, Sdg, X, Z, CX) with the given tableau, signs included.

    The images are swept to +-X_i, +-Z_i column by column with gates G; then
    G C is a Pauli P fixed by the signs, and C = G^dag P.
    """
    tab.validate()
    n = tab.n
    sw = _Sweep(tab)
    for i in range(n):
        # x-image of column i -> X_i
        p = sw.x(i)
        if not p.x:
            sw.apply("H", (p.z & -p.z).bit_length() - 1)
            p = sw.x(i)
        if not (p.x >> i) & 1:
            q = (p.x & -p.x).bit_length() - 1
            sw.apply("CX", q, i)
            p = sw.x(i)
        for q in _bits(p.x, i):
            sw.apply("CX", i, q)
        p = sw.x(i)
        if (p.z >> i) & 1:
            sw.apply("S", i)
        for q in _bits(sw.x(i).z, i):
            sw.cz(i, q)
        # z-image of column i -> Z_i, keeping X_i
        if sw.z(i).word == Pauli.single(n, i, "Z"):
            continue
        sw.apply("H", i)
        for q in _bits(sw.z(i).x, i):
            sw.apply("CX", i, q)
        for q in _bits(sw.z(i).z, i):
            sw.cz(i, q)
        if (sw.z(i).z >> i) & 1:
            sw.apply("S", i)
        sw.apply("H", i)
    fix = Circuit(n)
    for i in range(n):
        xi, zi = sw.x(i), sw.z(i)
        assert xi.word == Pauli.single(n, i, "X") and zi.word == Pauli.single(n, i, "Z"), "sweep failed"
        if xi.sign < 0:
            fix.append("Z", i)
        if zi.sign < 0:
            fix.append("X", i)
    return fix + Circuit(n, sw.gates).inverse()


def tableaus_equal(a: Tableau, b: Tableau) -> bool:
    return a.x_images == b.x_images and a.z_images == b.z_images


def assemble_tdepth1(c: Circuit, s: Sequence[int], k: int, prefix: Circuit | None = None) -> Circuit:
    """H on every wire, then S^{s_i}, then T on the last k wires, then C.

    ``prefix`` (a Clifford acting first) is used for the computational-basis
    relabelling found by probing.
    """
    n = c.n
    if len(s) != n or any(v not in (0, 1, 2, 3) for v in s):
        raise ValueError("s must list one value in {0,1,2,3} per qubit")
    if any(s[i] for i in range(n - k)):
        raise ValueError("s must vanish on the first n - k wires")
    out = Circuit(n) if prefix is None else Circuit(n, list(prefix.gates))
    for i in range(n):
        out.append("H", i)
    for i in range(n):
        for _ in range(s[i]):
            out.append("S", i)
    for i in range(n - k, n):
        out.append("T", i)
    return out + c
