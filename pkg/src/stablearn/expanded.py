"""Expanded Pauli frames: output states of T-depth-one circuits.

A single T gate acts on any density matrix as

    T rho T^dag = a1 rho + a2 Z rho Z + a3 S rho S^dag,
    a1 = 1/2, a2 = (1 - sqrt2)/2, a3 = sqrt2/2,

so a stabilizer state hit by T becomes an affine combination of three
stabilizer states.  If g is the unique frame row anticommuting with Z, the
three states keep the other rows and swap g for g, -g and h = -i Z g.  For
k such gates the state is a 3**k term combination described by

* isotropic rows, shared by every term, and
* one pair (g, h) per effective T gate; term j picks g, -g or h per pair.

g and h anticommute with each other and commute with everything else listed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .errors import GuardExceeded, InvalidFrame, NonCliffordCollapse
from .frame import PauliFrame, conjugate, conjugate_all, decompose, frame_of_basis_state, group_expectation
from .gf2 import SpanSolver, gf2_rank
from .pauli import Pauli, conjugate_negates, format_pauli, multiply, symplectic_product

MAX_COMPONENT_PAIRS = 12


@dataclass(frozen=True)
class QSqrt2:
    """Exact number ``a + b * sqrt(2)`` with rational a, b."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __add__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __mul__(self, o: "QSqrt2") -> "QSqrt2":
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt2"


ONE = QSqrt2(Fraction(1))
ALPHA = (
    QSqrt2(Fraction(1, 2)),
    QSqrt2(Fraction(1, 2), Fraction(-1, 2)),
    QSqrt2(Fraction(0), Fraction(1, 2)),
)
ALPHA_FLOAT = tuple(float(a) for a in ALPHA)
PRIMARY_EXPECTATION = 2 ** -0.5  # a1 - a2 = a3


@dataclass(frozen=True)
class ExpandedFrame:
    n: int
    isotropic: tuple[Pauli, ...]
    pairs: tuple[tuple[Pauli, Pauli], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "isotropic", tuple(self.isotropic))
        object.__setattr__(self, "pairs", tuple((g, h) for g, h in self.pairs))

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def elements(self) -> list[Pauli]:
        out = list(self.isotropic)
        for g, h in self.pairs:
            out += [g, h]
        return out

    @classmethod
    def from_frame(cls, f: PauliFrame) -> "ExpandedFrame":
        return cls(f.n, f.rows, ())

    def to_frame(self) -> PauliFrame:
        if self.pairs:
            raise InvalidFrame("frame has primary pairs; it is not a single stabilizer state")
        return PauliFrame(self.n, self.isotropic)

    def validate(self) -> "ExpandedFrame":
        els = self.elements
        if any(p.n != self.n or not p.is_hermitian for p in els):
            raise InvalidFrame("elements must be Hermitian Paulis on n qubits")
        if len(self.isotropic) + self.k != self.n:
            raise InvalidFrame("need n - k isotropic rows and k pairs")
        if gf2_rank([p.row for p in els]) != len(els):
            raise InvalidFrame("elements are dependent")
        for a, b in itertools.combinations(range(len(els)), 2):
            want = 1 if (a >= len(self.isotropic) and b == a + 1 and (a - len(self.isotropic)) % 2 == 0) else 0
            if symplectic_product(els[a], els[b]) != want:
                raise InvalidFrame(f"commutation relations violated by {els[a]}, {els[b]}")
        return self

    def apply_gate(self, g: Gate) -> "ExpandedFrame":
        return ExpandedFrame(
            self.n,
            tuple(conjugate(p, g) for p in self.isotropic),
            tuple((conjugate(a, g), conjugate(b, g)) for a, b in self.pairs),
        )

    def apply_circuit(self, c: Circuit) -> "ExpandedFrame":
        c.require_clifford()
        k = self.k
        out = conjugate_all(self.isotropic + tuple(p for pair in self.pairs for p in pair), c)
        niso = len(self.isotropic)
        pairs = tuple((out[niso + 2 * i], out[niso + 2 * i + 1]) for i in range(k))
        return ExpandedFrame(self.n, tuple(out[:niso]), pairs)

    def text(self) -> list[str]:
        lines = [format_pauli(p) for p in self.isotropic]
        lines += [f"PAIR {i}: g={format_pauli(g)}, h={format_pauli(h)}" for i, (g, h) in enumerate(self.pairs)]
        lines.append(f"k={self.k}")
        return lines

    def __str__(self) -> str:
        return "\n".join(self.text())


def _as_expanded(f) -> ExpandedFrame:
    return f if isinstance(f, ExpandedFrame) else ExpandedFrame.from_frame(f)


def _t_pair(zq: Pauli, g: Pauli) -> tuple[Pauli, Pauli]:
    """Pair created when T along ``zq`` hits the row ``g``: (g, -i zq g)."""
    h = multiply(zq, g).times_i(-1)
    assert h.is_hermitian
    return g, h


def expand_t_gate(f, qubit: int) -> ExpandedFrame:
    """Apply one T gate on ``qubit`` to a frame or expanded frame.

    Three situations occur:

    * an isotropic row anticommutes with Z_q: it becomes the g of a new pair
      (other anticommuting elements are first multiplied by it);
    * everything commutes with Z_q: +-Z_q is in the isotropic group and T
      only contributes a global phase;
    * only the two members of one pair anticommute: Z_q equals +-(i h g) on
      the state, so this T merges with the one that made the pair.  The pair
      collapses to h (the two gates make an S) or to g (they cancel).

    Any other pattern leaves the expanded-frame family and raises
    NonCliffordCollapse.
    """
    e = _as_expanded(f)
    n = e.n
    zq = Pauli.single(n, qubit, "Z")
    iso = list(e.isotropic)
    anti = [i for i, p in enumerate(iso) if symplectic_product(p, zq)]
    if anti:
        g = iso[anti[0]]
        new_iso = []
        for i, p in enumerate(iso):
            if i == anti[0]:
                continue
            new_iso.append(multiply(p, g) if i in anti else p)
        pairs = []
        for a, b in e.pairs:
            if symplectic_product(a, zq):
                a = multiply(a, g)
            if symplectic_product(b, zq):
                b = multiply(b, g)
            pairs.append((a, b))
        pairs.append(_t_pair(zq, g))
        return ExpandedFrame(n, tuple(new_iso), tuple(pairs))

    hit = [i for i, (a, b) in enumerate(e.pairs) if symplectic_product(a, zq) or symplectic_product(b, zq)]
    if not hit:
        return e
    bad = [i for i in hit if not (symplectic_product(e.pairs[i][0], zq) and symplectic_product(e.pairs[i][1], zq))]
    if bad or len(hit) > 1:
        raise NonCliffordCollapse(
            f"T on qubit {qubit} couples {len(hit)} primary pairs; the result is not an expanded frame")
    i = hit[0]
    g, h = e.pairs[i]
    j = multiply(h, g).times_i(1)  # i h g, Hermitian
    rest = multiply(zq, j)
    found = decompose(iso, rest)
    if found is None:
        raise NonCliffordCollapse("Z_q is not a pair axis times an isotropic element")
    a = found[1]
    sign = 1 if multiply(j, a).phase == zq.phase else -1
    keep = h if sign > 0 else g
    pairs = tuple(p for t, p in enumerate(e.pairs) if t != i)
    return ExpandedFrame(n, tuple(iso) + (keep,), pairs)


@dataclass(frozen=True)
class StageReduction:
    """The T stage on a given frame, rewritten as diagonal Cliffords plus T gates.

    ``cliffords`` act first (they commute with the T gates); ``t_qubits`` is a
    bitmask of wires that still carry one T each, with independent Z syndromes.
    """

    cliffords: tuple[Gate, ...]
    t_qubits: int


def reduce_t_stage(f: PauliFrame, v: int) -> StageReduction:
    """Rewrite T^v acting on the state of ``f``.

    On the state, each Z_q with q in v is a fixed sign times a product of Z_p
    over "pivot" wires p whose Z syndromes against the frame are independent.
    Then sum_q x_q (mod 8) is a polynomial in the pivot bits.  Linear terms give
    T^a = T^(a mod 2) S^(a>>1 & 1) Z^(a>>2 & 1), quadratic terms with
    coefficient 4 give CZ, and any other nonlinear term means the stage is not
    equivalent to Cliffords plus independent T gates.
    """
    n = f.n
    qs = [q for q in range(n) if (v >> q) & 1]
    synd = {}
    for q in qs:
        zq = Pauli.single(n, q, "Z")
        synd[q] = sum(symplectic_product(r, zq) << i for i, r in enumerate(f.rows))
    pivots: list[int] = []
    deps: dict[int, tuple[int, int]] = {}  # q -> (pivot bitmask, constant bit)
    for q in qs:
        combo = SpanSolver([synd[p] for p in pivots]).solve(synd[q]) if pivots else (0 if synd[q] == 0 else None)
        if combo is None:
            pivots.append(q)
            deps[q] = (1 << q, 0)
            continue
        dset = sum(1 << pivots[i] for i in range(len(pivots)) if (combo >> i) & 1)
        word = Pauli(n, dset | (1 << q), 0)
        ev = group_expectation(f, word)
        if ev == 0:
            raise AssertionError("dependent syndrome but Z product not in group")
        deps[q] = (dset, 0 if ev > 0 else 1)

    coef: dict[int, int] = {}
    for q in qs:
        dset, c = deps[q]
        members = [p for p in range(n) if (dset >> p) & 1]
        for size in (1, 2, 3):
            for sub in itertools.combinations(members, size):
                key = sum(1 << p for p in sub)
                coef[key] = (coef.get(key, 0) + (1 - 2 * c) * (-2) ** (size - 1)) % 8

    gates: list[Gate] = []
    tmask = 0
    for key in sorted(coef):
        a = coef[key]
        if a == 0:
            continue
        bits = [p for p in range(n) if (key >> p) & 1]
        if len(bits) == 1:
            p = bits[0]
            if a & 1:
                tmask |= 1 << p
            if a & 2:
                gates.append(Gate("S", (p,)))
            if a & 4:
                gates.append(Gate("Z", (p,)))
        elif len(bits) == 2 and a == 4:
            gates.append(Gate("CZ", tuple(bits)))
        else:
            raise NonCliffordCollapse(
                f"T stage leaves a degree-{len(bits)} phase term {a}/8 on qubits {bits}; "
                "the state is not an expanded stabilizer frame")
    return StageReduction(tuple(gates), tmask)


def build_tdepth1(c1: Circuit, v: int, c2: Circuit, inp: int = 0) -> ExpandedFrame:
    """Expanded frame of ``C2 T^v C1 |inp>``."""
    c1.require_clifford()
    return evolve_tdepth1(frame_of_basis_state(inp, c1.n).apply_circuit(c1), v, c2)


def evolve_tdepth1(f: PauliFrame, v: int, c2: Circuit) -> ExpandedFrame:
    """Expanded frame of ``C2 T^v |f>`` for a stabilizer frame ``f``."""
    c2.require_clifford()
    n = f.n
    red = reduce_t_stage(f, v)
    for g in red.cliffords:
        f = f.apply_gate(g)
    e = ExpandedFrame.from_frame(f)
    for q in range(n):
        if (red.t_qubits >> q) & 1:
            e = expand_t_gate(e, q)
    return e.apply_circuit(c2)


def build_sequential(c1: Circuit, v: int, c2: Circuit, inp: int = 0) -> ExpandedFrame:
    """Same as :func:`build_tdepth1` but one :func:`expand_t_gate` per T.

    Handles fewer dependency patterns; kept as an independent construction.
    """
    e = ExpandedFrame.from_frame(frame_of_basis_state(inp, c1.n).apply_circuit(c1))
    for q in range(c1.n):
        if (v >> q) & 1:
            e = expand_t_gate(e, q)
    return e.apply_circuit(c2)


def component_weights(k: int) -> list[QSqrt2]:
    """Exact beta_j for j in {1,2,3}^k, first pair varying fastest."""
    out = []
    for digits in _digits(k):
        w = ONE
        for d in digits:
            w = w * ALPHA[d]
        out.append(w)
    return out


def _digits(k: int) -> Iterable[tuple[int, ...]]:
    for t in itertools.product(range(3), repeat=k):
        yield tuple(reversed(t))


def component_states(e: ExpandedFrame) -> list[tuple[float, PauliFrame]]:
    """All 3**k terms (beta_j, frame_j); pair i contributes g, -g or h."""
    if e.k > MAX_COMPONENT_PAIRS:
        raise GuardExceeded(f"3^{e.k} components exceed the guard k <= {MAX_COMPONENT_PAIRS}")
    out = []
    for digits, w in zip(_digits(e.k), component_weights(e.k)):
        rows = list(e.isotropic)
        for d, (g, h) in zip(digits, e.pairs):
            rows.append(g if d == 0 else -g if d == 1 else h)
        out.append((float(w), PauliFrame(e.n, tuple(rows))))
    return out


def pseudo_expectation(e: ExpandedFrame, p: Pauli) -> float:
    """<p> on the state, from the closed form.

    p must be (up to sign) an isotropic element times primaries from distinct
    pairs; with m primaries the value is +-2**(-m/2).  Otherwise it is 0.
    """
    if not p.is_hermitian:
        raise ValueError("pseudo_expectation expects a Hermitian Pauli")
    m, sign = classify_element(e, p)
    if sign == 0:
        return 0.0
    return sign * PRIMARY_EXPECTATION ** m


def classify_element(e: ExpandedFrame, p: Pauli) -> tuple[int, int]:
    """(m, sign) with sign 0 when p is not a signed group element of any kind."""
    els = e.elements
    combo = SpanSolver([q.row for q in els]).solve(p.row)
    if combo is None:
        return 0, 0
    niso = len(e.isotropic)
    m = 0
    for i in range(e.k):
        bits = (combo >> (niso + 2 * i)) & 3
        if bits == 3:
            return 0, 0
        m += bits != 0
    acc = Pauli(e.n)
    for i, q in enumerate(els):
        if (combo >> i) & 1:
            acc = multiply(acc, q)
    return m, (1 if acc.phase == p.phase else -1)


def brute_expectation(e: ExpandedFrame, p: Pauli) -> float:
    """Sum over components of beta_j <p>_j (independent oracle)."""
    return sum(w * group_expectation(f, p) for w, f in component_states(e))


def bell_shift(e: ExpandedFrame) -> Pauli:
    """Word r0 with Pr_{psi psi}(r) = Pr_{psi* psi}(r XOR r0).

    Conjugation maps each listed element p to -p exactly when p has an odd
    number of Y letters; r0 must anticommute with exactly those elements.
    If an isotropic element is negated, the others are first made real by
    multiplying with it and r0 is its symplectic partner; otherwise r0 is the
    product of h_i over pairs whose g_i is negated and g_l over pairs whose
    h_l is negated.
    """
    n = e.n
    iso = list(e.isotropic)
    neg_iso = [i for i, p in enumerate(iso) if conjugate_negates(p)]
    if not neg_iso:
        r = Pauli(n)
        for g, h in e.pairs:
            if conjugate_negates(g):
                r = multiply(r, h)
            if conjugate_negates(h):
                r = multiply(r, g)
        return r.word
    g0 = iso[neg_iso[0]]
    fixed = []
    for i, p in enumerate(iso):
        if i != neg_iso[0]:
            fixed.append(multiply(p, g0) if conjugate_negates(p) else p)
    for a, b in e.pairs:
        fixed.append(multiply(a, g0) if conjugate_negates(a) else a)
        fixed.append(multiply(b, g0) if conjugate_negates(b) else b)
    return symplectic_partner(g0, fixed)


def symplectic_partner(g: Pauli, others: Sequence[Pauli]) -> Pauli:
    """A word anticommuting with g and commuting with every element of others."""
    targets = [g] + list(others)
    rhs = [1] + [0] * len(others)
    return solve_commutation(targets, rhs, g.n)


def solve_commutation(targets: Sequence[Pauli], rhs: Sequence[int], n: int) -> Pauli:
    """Word r with symplectic_product(r, t_i) = rhs_i; lowest free bits zero."""
    from .gf2 import BitMatrix, gf2_solve

    # <r, t> = r.z . t.x + r.x . t.z ; unknown r packed as z | x << n
    rows = [t.x | (t.z << n) for t in targets]
    b = sum(int(v) << i for i, v in enumerate(rhs))
    sol = gf2_solve(BitMatrix(tuple(rows), 2 * n), b)
    if sol is None:
        raise InvalidFrame("no word satisfies the commutation constraints")
    return Pauli.from_row(n, sol)


def exact_bell_table(e: ExpandedFrame, conj: bool = False) -> dict[int, float]:
    """Exact Bell outcome distribution keyed by ``row = z | x << n``.

    ``conj=True`` gives the psi* (x) psi table, otherwise psi (x) psi.  A word w
    of class m (m primaries) has probability 2**-(n+m) before the shift.
    """
    n = e.n
    shift = 0 if conj else bell_shift(e).row
    iso_rows = [p.row for p in e.isotropic]
    table: dict[int, float] = {}
    iso_words = [0]
    for r in iso_rows:
        iso_words += [w ^ r for w in iso_words]
    for choice in itertools.product(range(3), repeat=e.k):
        w0 = 0
        m = 0
        for c, (g, h) in zip(choice, e.pairs):
            if c == 1:
                w0 ^= g.row
            elif c == 2:
                w0 ^= h.row
            m += c != 0
        prob = 2.0 ** -(n + m)
        for w in iso_words:
            table[w ^ w0 ^ shift] = prob
    return table


def sample_bell(e: ExpandedFrame, rng: np.random.Generator, shift: Pauli | None = None) -> int:
    """One psi (x) psi Bell outcome as a row word."""
    r = (bell_shift(e) if shift is None else shift).row
    for p in e.isotropic:
        if rng.random() < 0.5:
            r ^= p.row
    for g, h in e.pairs:
        u = rng.random()
        if u < 0.25:
            r ^= g.row
        elif u < 0.5:
            r ^= h.row
    return r


def density_matrix(e: ExpandedFrame) -> np.ndarray:
    """Dense sum of beta_j |phi_j><phi_j| (small n only)."""
    from .dense import stabilizer_projector

    rho = np.zeros((1 << e.n, 1 << e.n), dtype=complex)
    for w, f in component_states(e):
        rho += w * stabilizer_projector(f.rows, e.n)
    return rho
