"""GF(2) linear algebra on rows packed into Python ints.

Bit c of a row is column c.  "Leftmost" means lowest column index, and
elimination always pivots on the leftmost available column using the
lowest-index candidate row, so every routine here is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DependentGenerators, DimensionMismatch, SingularMatrix
from .pauli import Pauli, hermitian, multiply, symplectic_product


@dataclass(frozen=True)
class BitMatrix:
    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        lim = 1 << self.ncols
        if any(r < 0 or r >= lim for r in self.rows):
            raise ValueError("row wider than ncols")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) & 1
        rows = [sum(int(b) << c for c, b in enumerate(r)) for r in a]
        return cls(tuple(rows), a.shape[1])

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for c in range(self.ncols):
                out[i, c] = (r >> c) & 1
        return out

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            c = 0
            while r:
                if r & 1:
                    cols[c] |= 1 << i
                r >>= 1
                c += 1
        return BitMatrix(tuple(cols), self.nrows)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return gf2_matmul(self, other)


def gf2_rref(m: BitMatrix) -> tuple[BitMatrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns.

    Zero rows are moved to the bottom; the row count is unchanged.
    """
    rows = list(m.rows)
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        bit = 1 << c
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return BitMatrix(tuple(rows), m.ncols), r, pivots


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank of a list of int rows (no column count needed)."""
    basis: list[int] = []  # kept sorted by leading bit, high to low
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def gf2_matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise DimensionMismatch(f"{a.nrows}x{a.ncols} @ {b.nrows}x{b.ncols}")
    out = []
    for r in a.rows:
        acc = 0
        j = 0
        while r:
            if r & 1:
                acc ^= b.rows[j]
            r >>= 1
            j += 1
        out.append(acc)
    return BitMatrix(tuple(out), b.ncols)


def gf2_invert(m: BitMatrix) -> BitMatrix:
    """Inverse over GF(2); raises SingularMatrix."""
    n = m.nrows
    if m.ncols != n:
        raise DimensionMismatch("gf2_invert needs a square matrix")
    aug = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    for c in range(n):
        bit = 1 << c
        piv = next((i for i in range(c, n) if aug[i] & bit), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over GF(2)")
        aug[c], aug[piv] = aug[piv], aug[c]
        for i in range(n):
            if i != c and aug[i] & bit:
                aug[i] ^= aug[c]
    return BitMatrix(tuple(r >> n for r in aug), n)


def gf2_solve(a: BitMatrix, b: int) -> int | None:
    """Some x with A x = b (x bit j pairs with column j), or None.

    ``b`` bit i is the right-hand side of row i.  Free variables are set to 0,
    which makes the answer deterministic.
    """
    n = a.nrows
    aug = [a.rows[i] | (((b >> i) & 1) << a.ncols) for i in range(n)]
    rref, rank, pivots = gf2_rref(BitMatrix(tuple(aug), a.ncols + 1))
    if pivots and pivots[-1] == a.ncols:
        return None
    x = 0
    for i, c in enumerate(pivots):
        if (rref.rows[i] >> a.ncols) & 1:
            x |= 1 << c
    return x


class SpanSolver:
    """Precomputed elimination for repeated membership queries."""

    def __init__(self, basis: Sequence[int]):
        self.basis = list(basis)
        self._reduced: list[tuple[int, int, int]] = []
        for i, v in enumerate(self.basis):
            combo = 1 << i
            for lead, bv, bc in self._reduced:
                if v & lead:
                    v ^= bv
                    combo ^= bc
            if v:
                lead = v & -v
                self._reduced = [
                    (l2, bv ^ v, bc ^ combo) if bv & lead else (l2, bv, bc)
                    for l2, bv, bc in self._reduced
                ]
                self._reduced.append((lead, v, combo))

    @property
    def rank(self) -> int:
        return len(self._reduced)

    def solve(self, target: int) -> int | None:
        combo = 0
        for lead, bv, bc in self._reduced:
            if target & lead:
                target ^= bv
                combo ^= bc
        return combo if target == 0 else None


def express_in_span(basis: Sequence[int], target: int) -> int | None:
    """Bitmask s with XOR of basis[i] over set bits of s equal to target, or None."""
    return SpanSolver(basis).solve(target)


def words_rank(ps: Sequence[Pauli]) -> int:
    return gf2_rank([p.row for p in ps])


def symplectic_gram_schmidt(gens: Sequence[Pauli]) -> tuple[list[Pauli], list[tuple[Pauli, Pauli]]]:
    """Split independent words into isotropic words and symplectic pairs.

    Greedy: take the first (i, j) in lexicographic order with anticommuting
    words, make them a pair, then multiply the remaining words by pair members
    so they commute with both.  Whatever is left when no anticommuting pair
    remains is isotropic.  Outputs are phase-free words.
    """
    if not gens:
        return [], []
    n = gens[0].n
    if words_rank(gens) != len(gens):
        raise DependentGenerators("generators are not independent over GF(2)")
    work = [g.word for g in gens]
    pairs: list[tuple[Pauli, Pauli]] = []
    while True:
        hit = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                if symplectic_product(work[i], work[j]):
                    hit = (i, j)
                    break
            if hit:
                break
        if hit is None:
            break
        i, j = hit
        a, b = work[i], work[j]
        pairs.append((a, b))
        rest = []
        for k, c in enumerate(work):
            if k in hit:
                continue
            if symplectic_product(c, b):
                c = hermitian(multiply(c, a)).word
            if symplectic_product(c, a):
                c = hermitian(multiply(c, b)).word
            rest.append(c)
        work = rest
    assert all(p.n == n for p in work)
    return work, pairs
