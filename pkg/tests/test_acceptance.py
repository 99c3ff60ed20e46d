"""Acceptance checks, one per criterion.

Each check returns (passed, detail). Under pytest the verdict lines are
collected into the terminal summary; run this file directly to get the same
lines on stdout:

    python3 tests/test_acceptance.py
"""
from __future__ import annotations

import sys
import time

import numpy as np

from stablearn import dense
from stablearn.circuit import Circuit, random_clifford_circuit
from stablearn.cli import make_rng, run_bench
from stablearn.errors import LearnerFailure
from stablearn.expanded import ALPHA_FLOAT, ONE, QSqrt2, build_tdepth1, component_states, component_weights, \
    density_matrix
from stablearn.gf2 import gf2_rank
from stablearn.oracle import OracleSession, exact_bell_table, exact_plus_probability
from stablearn.pauli import Pauli, parse_pauli
from stablearn.synthesis import GATE_COUNT_C, synthesize, tableau_of, tableaus_equal
from stablearn.targets import random_tdepth1_target, worked_example
from stablearn.tdepth1_learner import harvest_bell, learn_tdepth1

SEED = 20240611

WORKED_CONJ = {"II": 1 / 4, "XX": 1 / 16, "XY": 1 / 16, "XZ": 1 / 8, "YX": 1 / 16, "YY": 1 / 16, "YZ": 1 / 8,
               "ZX": 1 / 8, "ZY": 1 / 8}


def table_array(words: dict[str, float], n: int, shift: int = 0) -> np.ndarray:
    out = np.zeros(4 ** n)
    for w, p in words.items():
        out[parse_pauli(w).row ^ shift] = p
    return out


# -- the ten criteria ------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    t = worked_example()
    want_conj = table_array(WORKED_CONJ, 2)
    want_psipsi = table_array(WORKED_CONJ, 2, parse_pauli("YY").row)
    frame_err = max(np.max(np.abs(exact_bell_table(t, "frame", conj=True) - want_conj)),
                    np.max(np.abs(exact_bell_table(t, "frame", conj=False) - want_psipsi)))
    dense_err = max(np.max(np.abs(exact_bell_table(t, "dense", conj=True) - want_conj)),
                    np.max(np.abs(exact_bell_table(t, "dense", conj=False) - want_psipsi)))
    secs = time.perf_counter() - start
    ok = frame_err <= 1e-12 and dense_err <= 1e-10 and secs < 1
    return ok, f"frame err {frame_err:.1e}, dense err {dense_err:.1e}, {secs:.3f} s"


def criterion_2():
    t = worked_example()
    primaries = [parse_pauli(w) for w in ("ZX", "ZY", "XZ", "YZ")]
    cases = [(p, (2 + np.sqrt(2)) / 4) for p in primaries]
    cases += [(g * h, 0.75) for g in primaries[:2] for h in primaries[2:]]
    cases += [(parse_pauli(w), 0.5) for w in ("IX", "XI", "ZZ", "IY", "YI", "IZ")]
    err = max(abs(exact_plus_probability(t, p, backend) - want) for p, want in cases for backend in ("frame", "dense"))
    return err <= 1e-12, f"{len(cases)} operators, max err {err:.1e}"


def criterion_3():
    start = time.perf_counter()
    report = run_bench("clifford", list(range(2, 9)), [0], 100, SEED)
    secs = time.perf_counter() - start
    ok = secs < 60
    parts = []
    for c in report["cells"]:
        ok = ok and c["success_rate"] >= c["bound"] and c["within_budget"] == c["trials"]
        parts.append(f"n={c['n']} {c['success_rate']:.2f}/{c['first_attempt_rate']:.2f} (bound {c['bound']:.3f})")
    return ok, f"success/single-pass: {', '.join(parts)}; {secs:.1f} s"


def criterion_4():
    start = time.perf_counter()
    report = run_bench("tdepth1", list(range(2, 7)), [0, 1, 2, 3], 50, SEED)
    secs = time.perf_counter() - start
    ok = secs < 15 * 60
    worst = min(report["cells"], key=lambda c: c["success_rate"])
    for c in report["cells"]:
        ok = ok and c["success_rate"] >= 0.95 and c["within_budget"] == c["completed"]
    theory = ", ".join(f"n={n}: {max(0.0, 1 - 3 * np.exp(-n)):.3f}" for n in range(2, 7))
    return ok, (f"{len(report['cells'])} cells, worst n={worst['n']} k={worst['k']} at {worst['success_rate']:.2f}; "
                f"stated bound {theory}; {secs:.0f} s")


def criterion_5():
    n, k, trials = 6, 2, 1000
    root = make_rng(SEED, 5)
    fails = 0
    for trial in range(trials):
        t = random_tdepth1_target(n, k, root)
        words = harvest_bell(OracleSession(t), root)
        fails += gf2_rank(words) != n + k
    return fails / trials <= 0.01, f"{fails}/{trials} rank failures"


def criterion_6():
    rng = make_rng(SEED, 6)
    tv = pdiff = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 6))
        t = random_tdepth1_target(n, int(rng.integers(0, min(n, 2) + 1)), rng)
        for conj in (False, True):
            a, b = exact_bell_table(t, "frame", conj=conj), exact_bell_table(t, "dense", conj=conj)
            tv = max(tv, 0.5 * float(np.abs(a - b).sum()))
        e = build_tdepth1(t.c1, t.v, t.c2)
        ops = list(e.elements) + [Pauli(n, int(rng.integers(1 << n)), int(rng.integers(1 << n))) for _ in range(10)]
        for p in ops:
            pdiff = max(pdiff, abs(exact_plus_probability(t, p, "frame") - exact_plus_probability(t, p, "dense")))
    return tv <= 1e-10 and pdiff <= 1e-10, f"max TV {tv:.1e}, max Pauli diff {pdiff:.1e}"


def criterion_7():
    rng = make_rng(SEED, 7)
    ok, ratio = True, 0.0
    for _ in range(500):
        n = int(rng.integers(1, 9))
        tab = tableau_of(random_clifford_circuit(n, rng))
        out = synthesize(tab)
        ok = ok and tableaus_equal(tableau_of(out), tab) and len(out) <= GATE_COUNT_C * n * n
        ratio = max(ratio, len(out) / n ** 2)
    return ok, f"500 tableaus, c = {GATE_COUNT_C}, worst gates/n^2 = {ratio:.2f}"


def criterion_8():
    rng = make_rng(SEED, 8)
    derr = werr = 0.0
    exact = True
    for _ in range(50):
        n = int(rng.integers(1, 5))
        t = random_tdepth1_target(n, int(rng.integers(0, min(n, 3) + 1)), rng)
        e = build_tdepth1(t.c1, t.v, t.c2)
        derr = max(derr, float(np.max(np.abs(density_matrix(e) - dense.density(dense.run_circuit(t.circuit()))))))
        werr = max(werr, abs(sum(w for w, _ in component_states(e)) - 1))
        total = QSqrt2(0)
        for w in component_weights(e.k):
            total = total + w
        exact = exact and total == ONE
    ok = derr <= 1e-10 and werr <= 1e-14 and exact
    return ok, f"max density err {derr:.1e}, weight-sum err {werr:.1e}, exact sums {exact}"


def criterion_9():
    rng = make_rng(SEED, 9)
    good = 0
    for trial in range(50):
        n = int(rng.integers(1, 4))
        t = random_tdepth1_target(n, int(rng.integers(0, n + 1)), rng)
        try:
            res = learn_tdepth1(OracleSession(t, "dense"), make_rng(SEED, 9, trial), full_unitary=True)
        except LearnerFailure:
            continue
        good += dense.compare_unitaries_up_to_phase(dense.reconstruct_unitary(t.circuit()),
                                                   dense.reconstruct_unitary(res.circuit), 1e-9)
    return good >= 0.95 * 50, f"{good}/50 unitaries equal up to one global phase"


def _ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def _proj(v):
    return np.outer(v, v.conj())


def criterion_10():
    a1, a2, a3 = ALPHA_FLOAT
    w = np.exp(1j * np.pi / 4)
    zero, one = _ket(1, 0), _ket(0, 1)
    plus, minus = _ket(1, 1), _ket(1, -1)
    plus_i, minus_i = _ket(1, 1j), _ket(1, -1j)
    target = _proj(_ket(1, w))
    e1 = np.max(np.abs(a1 * _proj(plus) + a2 * _proj(minus) + a3 * _proj(plus_i) - target))
    e2 = np.max(np.abs(a1 * _proj(plus_i) + a2 * _proj(minus_i) + a3 * _proj(plus) - target))
    tht = dense.run_circuit(Circuit(1).append("H", 0).append("T", 0).append("H", 0).append("T", 0))
    five = (a1 * _proj(zero) + a2 * _proj(one) + a3 * a1 * _proj(minus_i) + a3 * a2 * _proj(plus_i)
            + a3 * a3 * _proj(plus))
    e3 = np.max(np.abs(five - _proj(tht)))
    ok = e1 <= 1e-14 and e2 <= 1e-14 and e3 <= 1e-12
    return ok, f"three-term errs {e1:.1e}, {e2:.1e}; five-term err {e3:.1e}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def verdict(i: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[i]()
    return ok, f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


# -- pytest wrappers -------------------------------------------------------------

def _check(i: int) -> None:
    from conftest import ACCEPTANCE_LINES

    ok, line = verdict(i)
    ACCEPTANCE_LINES[i] = line
    print(line)
    assert ok, line


def test_criterion_1():
    _check(1)


def test_criterion_2():
    _check(2)


def test_criterion_3():
    _check(3)


def test_criterion_4():
    _check(4)


def test_criterion_5():
    _check(5)


def test_criterion_6():
    _check(6)


def test_criterion_7():
    _check(7)


def test_criterion_8():
    _check(8)


def test_criterion_9():
    _check(9)


def test_criterion_10():
    _check(10)


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or list(CRITERIA)
    results = [verdict(i) for i in wanted]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
