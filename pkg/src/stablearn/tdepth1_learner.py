"""Learning a T-depth-one circuit on computational-basis inputs.

Outline of :func:`learn_tdepth1`:

1. 8n+1 Bell samples on U|0^n>.  XORed with the first one they span the
   n + k dimensional space of isotropic and primary words.
2. Symplectic Gram-Schmidt splits a basis of that space into n - k isotropic
   words and k anticommuting candidate pairs.
3. One measurement per isotropic word fixes its sign.
4. Products of candidate-pair members are measured 3200n times each; the
   fraction of +1 outcomes identifies the 2k primaries, (2 +- sqrt2)/4.
   Classes that occur often among pairwise differences of the Bell samples
   are tried first, which usually finds the primaries in about 2k rounds.
5. Probing each input e_j shows how the signs of the isotropic words and of
   the primaries flip with the input bits.  This gives an invertible GF(2)
   matrix B with U|v> equal (up to phase) to U0|Bv>, where U0 is the circuit
   learned from U|0^n>.
6. A Clifford C maps X_i to the isotropic words and X, Y on the last k wires
   to the primary pairs.  The hypothesis is
   C . T(last k wires) . S^s . H^n . L_B, with L_B |v> = |Bv>.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .errors import (GuardExceeded, InconsistentTarget, InvalidTableau, LearnerFailure, NonCliffordCollapse,
                     RankDeficient, SearchFailed, SingularMatrix)
from .gf2 import BitMatrix, SpanSolver, gf2_invert, gf2_rref, symplectic_gram_schmidt
from .expanded import PRIMARY_EXPECTATION, ExpandedFrame, evolve_tdepth1, pseudo_expectation
from .frame import PauliFrame, conjugate_all
from .oracle import OracleSession
from .pauli import Pauli, multiply, symplectic_product
from .synthesis import Tableau, assemble_tdepth1, complete_tableau, synthesize

SQRT2 = math.sqrt(2)
DELTA = (SQRT2 - 1) / 4
P_PRIMARY = (2 + SQRT2) / 4
SHOTS_PER_QUBIT = 3200
PROBE_SHOTS = 31
MAX_PHASE_QUBITS = 4
LABELS = ("NonMember", "IsotropicPlus", "IsotropicMinus", "PrimaryPlus", "PrimaryMinus", "ProductM")


@dataclass(frozen=True)
class OperatorClassification:
    label: str
    empirical_mean: float
    shots: int
    m: int = 0
    sign: int = 0
    ambiguous: bool = False


def classify_mean(r: float, shots: int) -> OperatorClassification:
    """Label an observed +1 frequency ``r``.

    Targets: 1 and 0 (isotropic), (2 +- sqrt2)/4 (primary), 1/2 (not in any
    component group), (1 +- 2^{-m/2})/2 (product of m primaries).  Each test
    uses a window of half the smallest gap delta = (sqrt2 - 1)/4.
    """
    half = DELTA / 2
    if r >= 1 - half:
        return OperatorClassification("IsotropicPlus", r, shots, sign=1)
    if r <= half:
        return OperatorClassification("IsotropicMinus", r, shots, sign=-1)
    if abs(r - P_PRIMARY) < half:
        return OperatorClassification("PrimaryPlus", r, shots, m=1, sign=1)
    if abs(r - (1 - P_PRIMARY)) < half:
        return OperatorClassification("PrimaryMinus", r, shots, m=1, sign=-1)
    if abs(r - 0.5) < half:
        return OperatorClassification("NonMember", r, shots)
    bias = 2 * r - 1
    m = round(-2 * math.log2(abs(bias)))
    if m < 2:
        return OperatorClassification("NonMember", r, shots, ambiguous=True)
    return OperatorClassification("ProductM", r, shots, m=m, sign=1 if bias > 0 else -1)


def default_shots(n: int) -> int:
    return SHOTS_PER_QUBIT * n


def classify_operator(session: OracleSession, p: Pauli, rng: np.random.Generator, shots: int | None = None,
                      inp: int = 0, basis: str = "Z") -> OperatorClassification:
    shots = default_shots(session.n) if shots is None else shots
    plus = session.pauli_counts(inp, p, shots, rng, basis)
    return classify_mean(plus / shots, shots)


def harvest_bell(session: OracleSession, rng: np.random.Generator, count: int | None = None,
                 basis: str = "Z") -> list[int]:
    """``count`` (default 8n+1) Bell outcomes on U|0>, XORed with the first."""
    count = 8 * session.n + 1 if count is None else count
    samples = session.bell_samples(0, count, rng, basis)
    return [s ^ samples[0] for s in samples[1:]]


def split_generators(words: Sequence[int], n: int) -> tuple[list[Pauli], list[tuple[Pauli, Pauli]]]:
    """Basis of the sampled span, split into isotropic words and candidate pairs."""
    rref, rank, _ = gf2_rref(BitMatrix(tuple(words), 2 * n))
    if rank < n:
        raise RankDeficient(f"Bell words span rank {rank} < {n}")
    basis = [Pauli.from_row(n, r) for r in rref.rows[:rank]]
    iso, pairs = symplectic_gram_schmidt(basis)
    k = rank - n
    if len(pairs) != k or len(iso) != n - k:
        raise InconsistentTarget(f"span of rank {rank} has {len(iso)} isotropic words, expected {n - k}")
    return iso, pairs


def _mixed_radix(k: int, radix: int):
    for idx in range(1, radix ** k):
        yield tuple((idx // radix ** u) % radix for u in range(k))


class ClassKeys:
    """Digits of a word of the sampled span modulo the isotropic words.

    Digit u is 0, 1, 2, 3 for I, a_u, b_u, a_u b_u of candidate pair u.
    """

    def __init__(self, pairs: Sequence[tuple[Pauli, Pauli]], isotropic: Sequence[Pauli]):
        self.k = len(pairs)
        basis = [p.row for ab in pairs for p in ab] + [p.row for p in isotropic]
        self._solver = SpanSolver(basis)

    def digits(self, row: int) -> tuple[int, ...] | None:
        combo = self._solver.solve(row)
        if combo is None:
            return None
        return tuple((combo >> (2 * u)) & 3 for u in range(self.k))


def ranked_classes(words: Sequence[int], keys: ClassKeys) -> list[tuple[int, ...]]:
    """Classes seen among pairwise differences of Bell words, most frequent first.

    The differences cancel the unknown Bell shift.  Per primary pair the
    digit of a difference is I, g, h, gh with probabilities 3/8, 1/4, 1/4,
    1/8, so single primaries are the most frequent non-identity classes.
    """
    digits = [keys.digits(w) for w in [0, *words]]
    counts: Counter = Counter()
    for i, a in enumerate(digits):
        if a is None:
            continue
        for b in digits[i + 1:]:
            if b is not None:
                counts[tuple(x ^ y for x, y in zip(a, b))] += 1
    zero = (0,) * keys.k
    return sorted((d for d in counts if d != zero), key=lambda d: (-counts[d], d))


@dataclass
class PrimarySearch:
    pairs: list[tuple[Pauli, Pauli]]
    measured: int
    fallback_used: bool
    classifications: list[tuple[str, OperatorClassification]] = field(default_factory=list)


def find_primaries(session: OracleSession, pairs: Sequence[tuple[Pauli, Pauli]], isotropic: Sequence[Pauli],
                   rng: np.random.Generator, shots: int | None = None,
                   hints: Sequence[tuple[int, ...]] = (), max_products: int | None = None,
                   basis: str = "Z") -> PrimarySearch:
    """Classify products of candidate-pair members until 2k primaries are found.

    Classes listed in ``hints`` go first, then the mixed-radix products with
    digits I, a, b (first pair fastest), then products that use a*b for some
    pair.  A class that a measured product of m primaries and m - 1 found
    primaries pin down as a primary jumps the queue.  No class is measured
    twice, and classes that cannot hold a primary given those already found
    are skipped.  At most
    ``max_products`` (default 3^k) classes are measured.  Found primaries are
    signed and grouped into anticommuting pairs.
    """
    k = len(pairs)
    n = session.n
    if k == 0:
        return PrimarySearch([], 0, False)
    found: list[Pauli] = []
    partner: dict[int, int] = {}
    span = SpanSolver([])
    span_rows: list[int] = []
    log = []
    seen: set[tuple[int, ...]] = set()
    iso_rows = [p.row for p in isotropic]
    measured = 0
    cap = 3 ** k if max_products is None else max_products

    def word(digits):
        row = 0
        for d, (a, b) in zip(digits, pairs):
            if d & 1:
                row ^= a.row
            if d & 2:
                row ^= b.row
        return Pauli.from_row(n, row)

    def possible(p: Pauli) -> bool:
        # a new primary commutes with every completed pair, anticommutes with
        # at most one unpaired primary (its partner) and lies outside the
        # span of the primaries found so far (modulo isotropic words)
        unpaired = 0
        for i, q in enumerate(found):
            if symplectic_product(p, q):
                if i in partner:
                    return False
                unpaired += 1
        return unpaired <= 1 and span.solve(p.row) is None

    products: list[tuple[tuple[int, ...], Pauli, int]] = []
    found_digits: list[tuple[int, ...]] = []
    urgent: deque = deque()

    def infer() -> None:
        # a product of m primaries times m - 1 known primaries from other
        # pairs leaves one primary; queue those classes ahead of the rest
        for digits, prod, m in products:
            usable = [i for i, q in enumerate(found) if not symplectic_product(q, prod)]
            for subset in itertools.combinations(usable, m - 1):
                d = digits
                for i in subset:
                    d = tuple(x ^ y for x, y in zip(d, found_digits[i]))
                if d not in seen and any(d):
                    urgent.append(d)

    def scan(digit_seq) -> bool:
        nonlocal measured, span
        it = iter(digit_seq)
        while len(found) < 2 * k:
            digits = urgent.popleft() if urgent else next(it, None)
            if digits is None:
                break
            if digits in seen:
                continue
            seen.add(digits)
            p = word(digits)
            if not possible(p):
                continue
            if measured == cap:
                raise SearchFailed(f"classification cap of {cap} products reached")
            cls = classify_operator(session, p, rng, shots, basis=basis)
            measured += 1
            log.append((str(p), cls))
            if cls.label == "ProductM" and cls.m <= k:
                products.append((digits, p, cls.m))
                infer()
                continue
            if cls.label not in ("PrimaryPlus", "PrimaryMinus"):
                continue
            p = p if cls.label == "PrimaryPlus" else -p
            j = next((j for j, q in enumerate(found) if j not in partner and symplectic_product(p, q)), None)
            found.append(p)
            found_digits.append(digits)
            if j is not None:
                partner[j] = len(found) - 1
                partner[len(found) - 1] = j
            span_rows.append(p.row)
            span = SpanSolver(span_rows + iso_rows)
            infer()
        return len(found) == 2 * k

    fallback = False
    if not scan(hints) and not scan(_mixed_radix(k, 3)):
        fallback = True
        scan(d for d in _mixed_radix(k, 4) if 3 in d)
    if len(found) < 2 * k:
        raise SearchFailed(f"found {len(found)} of {2 * k} primaries")

    paired: list[tuple[Pauli, Pauli]] = []
    for i, p in enumerate(found):
        j = partner.get(i)
        if j is None:
            raise SearchFailed(f"primary {p} has no anticommuting partner")
        if i < j:
            paired.append((p, found[j]))
    for u, (g, h) in enumerate(paired):
        for v, (g2, h2) in enumerate(paired):
            if u != v and any(symplectic_product(a, b) for a in (g, h) for b in (g2, h2)):
                raise SearchFailed("primaries from different pairs anticommute")
        if any(symplectic_product(a, t) for a in (g, h) for t in isotropic):
            raise SearchFailed("a primary anticommutes with an isotropic word")
    return PrimarySearch(paired, measured, fallback, log)


def pair_sign_code(g: Pauli, h: Pauli) -> int:
    """s in {0,1,2,3} for T S^s |+> having primaries (sign_g X, sign_h Y)."""
    return {(1, 1): 0, (-1, 1): 1, (-1, -1): 2, (1, -1): 3}[(g.sign, h.sign)]


def probe_flips(session: OracleSession, isotropic: Sequence[Pauli], pairs: Sequence[tuple[Pauli, Pauli]],
                rng: np.random.Generator, shots: int = PROBE_SHOTS) -> tuple[list[int], list[int], list[int]]:
    """Flip masks over inputs e_j for each isotropic word and each pair member."""
    n = session.n
    f_iso = [0] * len(isotropic)
    f_g = [0] * len(pairs)
    f_h = [0] * len(pairs)
    for j in range(n):
        e = 1 << j
        for i, p in enumerate(isotropic):
            if session.pauli_counts(e, p, 1, rng) == 0:
                f_iso[i] |= 1 << j
        for u, (g, h) in enumerate(pairs):
            if 2 * session.pauli_counts(e, g, shots, rng) < shots:
                f_g[u] |= 1 << j
            if 2 * session.pauli_counts(e, h, shots, rng) < shots:
                f_h[u] |= 1 << j
    return f_iso, f_g, f_h


def relabel_circuit(b: BitMatrix) -> Circuit:
    """Clifford with |v> -> |Bv> (up to one global phase)."""
    n = b.nrows
    binv = gf2_invert(b)
    xs = [Pauli(n, 0, sum(b.get(i, j) << i for i in range(n))) for j in range(n)]
    zs = [Pauli(n, binv.rows[i], 0) for i in range(n)]
    return synthesize(Tableau(n, tuple(xs), tuple(zs)))


def query_budget(n: int, k: int, shots: int | None = None, probe_shots: int = PROBE_SHOTS) -> int:
    """Copies used at most: harvest + isotropic signs + classification + probes.

    Classification is capped at 3^k products of 3200n shots each, so the
    total is at most 2(8n+1) + (n-k) + 3^k 3200n + n(n-k) + 62nk.
    """
    shots = default_shots(n) if shots is None else shots
    products = 3 ** k if k else 0
    return 2 * (8 * n + 1) + (n - k) + products * shots + n * (n - k) + n * 2 * k * probe_shots


@dataclass
class OutputStructure:
    """Signed isotropic words and signed primary pairs of one output state."""

    isotropic: list[Pauli]
    pairs: list[tuple[Pauli, Pauli]]
    search: PrimarySearch

    @property
    def k(self) -> int:
        return len(self.pairs)


def learn_output_structure(session: OracleSession, rng: np.random.Generator, shots: int | None = None,
                           basis: str = "Z") -> OutputStructure:
    """Isotropic words and signed primary pairs of U|0^n> (``basis="X"``: of U H^n |0^n>)."""
    n = session.n
    ledger = session.ledger
    with ledger.phase("bell"):
        words = harvest_bell(session, rng, basis=basis)
    cand_iso, cand_pairs = split_generators(words, n)
    with ledger.phase("signs"):
        iso = [p if session.pauli_counts(0, p, 1, rng, basis) == 1 else -p for p in cand_iso]
    with ledger.phase("classify"):
        hints = ranked_classes(words, ClassKeys(cand_pairs, cand_iso))
        search = find_primaries(session, cand_pairs, iso, rng, shots, hints, basis=basis)
    return OutputStructure(iso, search.pairs, search)


def diagonal_clifford(n: int, a: Sequence[int], b: int) -> Circuit:
    """S^{a_j} on each wire and CZ on the wire pairs listed by the bits of ``b``."""
    c = Circuit(n)
    for j, aj in enumerate(a):
        for _ in range(aj % 4):
            c.append("S", j)
    for bit, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        if (b >> bit) & 1:
            c.append("CZ", i, j)
    return c


def _structure_matches(e: ExpandedFrame, target: OutputStructure) -> bool:
    if e.k != target.k:
        return False
    if any(abs(pseudo_expectation(e, p) - 1) > 1e-9 for p in target.isotropic):
        return False
    return all(abs(pseudo_expectation(e, p) - PRIMARY_EXPECTATION) < 1e-9 for ab in target.pairs for p in ab)


def fit_phase_correction(n: int, parts: tuple[Circuit, int, Circuit], observed: OutputStructure) -> Circuit:
    """The diagonal Clifford D with U_hat D H^n |0> matching ``observed``.

    ``parts`` is (pre, v, C) with U_hat = C T^v pre.  Every (a, b) with
    a in Z_4^n and b a set of wire pairs is tried; D is unique because D|+^n>
    determines D once D|0^n> has phase 1.
    """
    if n > MAX_PHASE_QUBITS:
        raise GuardExceeded(f"phase completion enumerates diagonal Cliffords only up to {MAX_PHASE_QUBITS} qubits")
    pre, v, c = parts
    npairs = n * (n - 1) // 2
    xs = conjugate_all([Pauli.single(n, j, "X") for j in range(n)], pre)
    zs = conjugate_all([Pauli.single(n, j, "Z") for j in range(n)], pre)
    # S^a X S^-a for a = 0..3 is X, Y, -X, -Y, and Y = i X Z
    a_images = [[x, multiply(x, z).times_i(1), -x, multiply(x, z).times_i(-1)] for x, z in zip(xs, zs)]
    for a in itertools.product(range(4), repeat=n):
        for b in range(1 << npairs):
            # rows of D|+^n>: S^{a_j} X_j S^{-a_j} times Z_i for each CZ partner i
            rows = []
            for j in range(n):
                row = a_images[j][a[j]]
                for bit, (p, q) in enumerate(itertools.combinations(range(n), 2)):
                    if (b >> bit) & 1 and j in (p, q):
                        row = multiply(row, zs[q if j == p else p])
                rows.append(row)
            try:
                e = evolve_tdepth1(PauliFrame(n, tuple(rows)), v, c)
            except NonCliffordCollapse:
                continue
            if _structure_matches(e, observed):
                return diagonal_clifford(n, a, b)
    raise InconsistentTarget("no diagonal Clifford reproduces the X-basis output")


@dataclass
class TDepth1LearnResult:
    circuit: Circuit
    k: int
    isotropic: list[Pauli]
    pairs: list[tuple[Pauli, Pauli]]
    s: list[int]
    relabel: BitMatrix | None
    products_measured: int
    fallback_used: bool
    queries: int
    budget: int
    phases: dict[str, int] = field(default_factory=dict)
    phase_correction: Circuit | None = None
    attempts: int = 1
    retry_queries: int = 0


def learn_tdepth1(session: OracleSession, rng: np.random.Generator, shots: int | None = None,
                  probe_shots: int = PROBE_SHOTS, basis_probe: bool = True, full_unitary: bool = False,
                  max_retries: int = 3) -> TDepth1LearnResult:
    """Learn U_hat with U_hat|v> = U|v> up to phase for every basis input v.

    ``basis_probe=False`` skips the probing step and only guarantees the
    |0^n> output.  ``full_unitary=True`` also learns the structure of
    U H^n |0^n> and prepends the diagonal Clifford that fixes the relative
    phases between basis inputs, so U_hat equals U up to one global phase.

    A failed attempt is rerun from scratch up to ``max_retries`` times; its
    copies are reported as ``retry_queries``, outside the per-attempt budget.
    """
    retry = 0
    for attempt in range(max_retries + 1):
        before = session.ledger.copies_prepared
        try:
            res = _learn_once(session, rng, shots, probe_shots, basis_probe, full_unitary)
        except LearnerFailure:
            retry += session.ledger.copies_prepared - before
            if attempt == max_retries:
                raise
            continue
        res.attempts = attempt + 1
        res.retry_queries = retry
        return res
    raise AssertionError("unreachable")


def _learn_once(session: OracleSession, rng: np.random.Generator, shots: int | None, probe_shots: int,
                basis_probe: bool, full_unitary: bool) -> TDepth1LearnResult:
    n = session.n
    ledger = session.ledger
    start = ledger.copies_prepared
    out = learn_output_structure(session, rng, shots)
    iso, pairs, k = out.isotropic, out.pairs, out.k

    bmat = None
    if basis_probe:
        with ledger.phase("probe"):
            f_iso, f_g, f_h = probe_flips(session, iso, pairs, rng, probe_shots)
        solver = SpanSolver(f_iso)
        fixed = []
        for u, (g, h) in enumerate(pairs):
            combo = solver.solve(f_g[u] ^ f_h[u])
            if combo is None:
                raise InconsistentTarget("pair signs flip in a way no isotropic product explains")
            for i, a in enumerate(iso):
                if (combo >> i) & 1:
                    h = multiply(h, a)
            fixed.append((g, h))
        pairs = fixed
        bmat = BitMatrix(tuple(f_iso) + tuple(f_g), n)
        try:
            gf2_invert(bmat)
        except SingularMatrix as exc:
            raise InconsistentTarget("basis relabelling matrix is singular") from exc

    x_images = list(iso) + [g.word for g, _ in pairs]
    z_images: list[Pauli | None] = [None] * (n - k)
    for g, h in pairs:
        z_images.append(multiply(g.word, h.word).times_i(-1))
    try:
        tab = complete_tableau(x_images, z_images)
    except InvalidTableau as exc:
        raise InconsistentTarget(str(exc)) from exc
    c = synthesize(tab)
    s = [0] * (n - k) + [pair_sign_code(g, h) for g, h in pairs]
    prefix = None
    if bmat is not None and bmat != BitMatrix.identity(n):
        prefix = relabel_circuit(bmat)
    budget = query_budget(n, k, shots, probe_shots if basis_probe else 0)

    correction = None
    if full_unitary:
        with ledger.phase("xbasis"):
            xout = learn_output_structure(session, rng, shots, basis="X")
        budget += query_budget(n, xout.k, shots, 0) - n * (n - xout.k)
        pre = Circuit(n) if prefix is None else Circuit(n, list(prefix.gates))
        for q in range(n):
            pre.append("H", q)
        for q in range(n):
            for _ in range(s[q]):
                pre.append("S", q)
        v = sum(1 << q for q in range(n - k, n))
        correction = fit_phase_correction(n, (pre, v, c), xout)
        prefix = correction if prefix is None else correction + prefix
    circuit = assemble_tdepth1(c, s, k, prefix)
    return TDepth1LearnResult(
        circuit=circuit, k=k, isotropic=iso, pairs=pairs, s=s, relabel=bmat,
        products_measured=out.search.measured, fallback_used=out.search.fallback_used,
        queries=ledger.copies_prepared - start, budget=budget,
        phases=ledger.snapshot()["by_phase"], phase_correction=correction,
    )
