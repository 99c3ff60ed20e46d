"""Pauli operators in binary symplectic form.

An n-qubit Pauli is stored as two integers used as bitsets, ``z`` and ``x``.
Bit j of each integer belongs to qubit j.  The operator is

    i**phase * sigma_{z:x},    sigma_{z:x} = (x) over j of sigma_{z_j x_j}

with sigma_{00} = I, sigma_{01} = X, sigma_{10} = Z and sigma_{11} = Y, so
every sigma is Hermitian and the phase alone decides Hermiticity (phase 0 or
2 means a sign of +1 or -1).

In text form the leftmost letter is qubit 0: ``"XZ"`` is X on qubit 0 and Z
on qubit 1.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatch, MalformedPauli

_LETTERS = "IXZY"  # index = x | (z << 1)
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_PHASE = {"": 0, "+": 0, "+i": 1, "-": 2, "-i": 3, "i": 1}


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=True)
class Pauli:
    """Signed Pauli ``i**phase * sigma_{z:x}`` on ``n`` qubits."""

    n: int
    z: int = 0
    x: int = 0
    phase: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.n < 0 or self.z & ~mask or self.x & ~mask:
            raise MalformedPauli(f"bits out of range for n={self.n}")
        if not 0 <= self.phase < 4:
            object.__setattr__(self, "phase", self.phase % 4)

    # -- constructors ---------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Pauli":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, sign: int = 1) -> "Pauli":
        """``letter`` acting on ``qubit``, identity elsewhere."""
        k = _LETTERS.index(letter)
        return cls(n, ((k >> 1) & 1) << qubit, (k & 1) << qubit, 0 if sign > 0 else 2)

    @classmethod
    def from_row(cls, n: int, row: int, phase: int = 0) -> "Pauli":
        """Inverse of :meth:`row`."""
        mask = (1 << n) - 1
        return cls(n, row & mask, row >> n, phase)

    # -- views ----------------------------------------------------------
    @property
    def row(self) -> int:
        """The 2n-bit word packed as ``z | x << n`` (column j < n is z_j)."""
        return self.z | (self.x << self.n)

    @property
    def word(self) -> "Pauli":
        """Same operator with the phase dropped."""
        return Pauli(self.n, self.z, self.x, 0) if self.phase else self

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase == 0 else -1

    @property
    def is_identity_word(self) -> bool:
        return not (self.z or self.x)

    @property
    def weight(self) -> int:
        return popcount(self.z | self.x)

    def letter(self, qubit: int) -> str:
        return _LETTERS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    # -- algebra --------------------------------------------------------
    def __mul__(self, other: "Pauli") -> "Pauli":
        return multiply(self, other)

    def __neg__(self) -> "Pauli":
        return Pauli(self.n, self.z, self.x, self.phase + 2)

    def times_i(self, power: int = 1) -> "Pauli":
        return Pauli(self.n, self.z, self.x, self.phase + power)

    def commutes(self, other: "Pauli") -> bool:
        return symplectic_product(self, other) == 0

    def with_sign(self, sign: int) -> "Pauli":
        return Pauli(self.n, self.z, self.x, 0 if sign > 0 else 2)

    def __str__(self) -> str:
        return format_pauli(self)

    def __repr__(self) -> str:
        return f"Pauli({format_pauli(self)!r})"


def _check(a: Pauli, b: Pauli) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} qubits")


def symplectic_product(a: Pauli, b: Pauli) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    _check(a, b)
    return popcount((a.z & b.x) ^ (a.x & b.z)) & 1


def product_phase(az: int, ax: int, bz: int, bx: int) -> int:
    """Power of i picked up by sigma_a * sigma_b (mod 4)."""
    ya, xa, za = ax & az, ax & ~az, az & ~ax
    yb, xb, zb = bx & bz, bx & ~bz, bz & ~bx
    plus = (ya & zb) | (xa & yb) | (za & xb)  # YZ = iX, XY = iZ, ZX = iY
    minus = (ya & xb) | (xa & zb) | (za & yb)
    return (popcount(plus) - popcount(minus)) % 4


def multiply(a: Pauli, b: Pauli) -> Pauli:
    """Exact product ``a * b`` including the phase."""
    _check(a, b)
    ph = a.phase + b.phase + product_phase(a.z, a.x, b.z, b.x)
    return Pauli(a.n, a.z ^ b.z, a.x ^ b.x, ph % 4)


def multiply_all(ps, n: int) -> Pauli:
    acc = Pauli(n)
    for p in ps:
        acc = multiply(acc, p)
    return acc


def y_count(p: Pauli) -> int:
    return popcount(p.z & p.x)


def conjugate_negates(p: Pauli) -> bool:
    """True iff the entrywise complex conjugate of ``p`` equals ``-p``.

    Only Y is imaginary among I, X, Y, Z, so this is the parity of the Y count.
    """
    if not p.is_hermitian:
        raise ValueError("conjugate_negates expects a Hermitian Pauli")
    return bool(y_count(p) & 1)


def hermitian(p: Pauli) -> Pauli:
    """Drop a factor of i from an odd-phase Pauli, keeping the word.

    Used where only the word matters (Bell-sample words, Gram-Schmidt).
    """
    return p if p.is_hermitian else Pauli(p.n, p.z, p.x, p.phase - 1)


def parse_pauli(text: str, n: int | None = None) -> Pauli:
    """Parse ``[+|-|+i|-i]LETTERS``, e.g. ``"-XX"`` or ``"+iYZ"``."""
    s = text.strip()
    i = 0
    while i < len(s) and s[i] in "+-i":
        i += 1
    prefix, letters = s[:i], s[i:]
    if prefix not in _PREFIX_PHASE or not letters:
        raise MalformedPauli(f"cannot parse Pauli {text!r}")
    if n is not None and len(letters) != n:
        raise MalformedPauli(f"{text!r} has {len(letters)} letters, expected {n}")
    z = x = 0
    for j, ch in enumerate(letters.upper()):
        k = _LETTERS.find(ch)
        if k < 0:
            raise MalformedPauli(f"bad letter {ch!r} in {text!r}")
        x |= (k & 1) << j
        z |= ((k >> 1) & 1) << j
    return Pauli(len(letters), z, x, _PREFIX_PHASE[prefix])


def format_pauli(p: Pauli, plus: bool = True) -> str:
    letters = "".join(p.letter(j) for j in range(p.n))
    prefix = _PHASE_PREFIX[p.phase]
    if prefix == "+" and not plus:
        prefix = ""
    return prefix + letters


def word_text(p: Pauli) -> str:
    """Letters only, no sign."""
    return format_pauli(p.word, plus=False)
