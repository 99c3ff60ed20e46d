"""Command-line driver: targets, learning runs, verification, exact tables, benchmarks.

Exit codes: 0 success, 1 learner or verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import jsonschema
import numpy as np

from . import dense
from .circuit import Circuit, TDepth1Target, dumps, target_from_json, target_to_json
from .clifford_learner import learn_clifford
from .clifford_learner import query_budget as clifford_budget
from .errors import GuardExceeded, LearnerFailure, MalformedPauli, NonCliffordCollapse, StablearnError
from .oracle import OracleSession, exact_bell_table, exact_plus_probability
from .pauli import Pauli, parse_pauli, word_text
from .synthesis import tableau_of, tableaus_equal
from .targets import random_clifford_target, random_tdepth1_target, worked_example
from .tdepth1_learner import learn_tdepth1

RNG_NAME = "numpy.PCG64"
DEFAULT_TOL = 1e-9


class UsageError(Exception):
    pass


_QUERIES = {
    "type": "object",
    "required": ["total", "by_phase", "budget", "retry", "attempts"],
    "properties": {
        "total": {"type": "integer", "minimum": 0},
        "by_phase": {"type": "object", "additionalProperties": {"type": "integer"}},
        "budget": {"type": "integer"},
        "retry": {"type": "integer", "minimum": 0},
        "attempts": {"type": "integer", "minimum": 0},
    },
}

LEARN_SCHEMA = {
    "type": "object",
    "required": ["target_digest", "n", "k", "seed", "rng", "backend", "algo", "queries", "success",
                 "fidelities", "verified_inputs", "error", "wall_time"],
    "properties": {
        "target_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": ["integer", "null"]},
        "seed": {"type": "integer"},
        "rng": {"const": RNG_NAME},
        "backend": {"enum": ["frame", "dense"]},
        "algo": {"enum": ["clifford", "tdepth1"]},
        "queries": _QUERIES,
        "success": {"type": "boolean"},
        "fidelities": {"type": "array", "items": {"type": "number"}},
        "verified_inputs": {"enum": ["all", "zero", "none"]},
        "tableau_equal": {"type": ["boolean", "null"]},
        "error": {"type": ["string", "null"]},
        "wall_time": {"type": ["number", "null"]},
    },
}

BENCH_SCHEMA = {
    "type": "object",
    "required": ["suite", "seed", "rng", "backend", "trials", "cells"],
    "properties": {
        "suite": {"enum": ["clifford", "tdepth1"]},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "k", "trials", "successes", "completed", "success_rate", "first_attempt_rate",
                             "bound", "queries", "budget", "within_budget"],
            },
        },
    },
}


def target_digest(target) -> str:
    text = json.dumps(target_to_json(target), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_target(path: str):
    try:
        return target_from_json(load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a circuit description: {exc}") from exc


def load_circuit(path: str) -> Circuit:
    t = load_target(path)
    return t.circuit() if isinstance(t, TDepth1Target) else t


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def basis_fidelities(target, hypothesis: Circuit, inputs) -> list[float]:
    tc = target.circuit() if isinstance(target, TDepth1Target) else target
    return [dense.fidelity(dense.run_circuit(tc, v), dense.run_circuit(hypothesis, v)) for v in inputs]


def target_k(target) -> int | None:
    if isinstance(target, TDepth1Target):
        return target.k
    if target.is_clifford:
        return 0
    return None


# -- gen-target ----------------------------------------------------------------

def cmd_gen_target(args) -> int:
    if args.worked_example:
        write_text(args.out, dumps(target_to_json(worked_example())) + "\n")
        return 0
    if args.n is None:
        raise UsageError("--n is required")
    if args.n < 1:
        raise UsageError("--n must be positive")
    rng = make_rng(args.seed)
    if args.kind == "clifford":
        target = random_clifford_target(args.n, rng)
    else:
        if args.k is None:
            raise UsageError("--kind tdepth1 needs --k")
        if not 0 <= args.k <= args.n:
            raise UsageError(f"need 0 <= k <= n, got k={args.k}, n={args.n}")
        target = random_tdepth1_target(args.n, args.k, rng)
    write_text(args.out, dumps(target_to_json(target)) + "\n")
    return 0


# -- learn ---------------------------------------------------------------------

def run_learn(target, algo: str, seed: int, backend: str, tol: float = DEFAULT_TOL,
              full_unitary: bool = False, timing: bool = False) -> tuple[dict, Circuit | None]:
    """One learning run plus dense verification; returns (report, hypothesis)."""
    n = target.n
    k = target_k(target)
    if algo == "clifford" and k != 0:
        raise UsageError("the Clifford learner needs a Clifford target")
    if backend == "frame" and isinstance(target, Circuit) and target.tdepth1_split() is None:
        raise UsageError("the frame backend needs a Clifford or T-depth-one target; use --backend dense")
    session = OracleSession(target, backend)
    rng = make_rng(seed)
    start = time.perf_counter()
    report = {
        "target_digest": target_digest(target), "n": n, "k": k, "seed": seed, "rng": RNG_NAME,
        "backend": backend, "algo": algo, "error": None, "tableau_equal": None,
    }
    hypothesis = None
    budget = retry = attempts = 0
    try:
        if algo == "clifford":
            res = learn_clifford(session, rng)
            hypothesis = res.circuit
            budget, retry, attempts = clifford_budget(n), res.retry_queries, max(res.attempts.values())
        else:
            zero_only = isinstance(target, Circuit) and target.tdepth1_split() is None
            res = learn_tdepth1(session, rng, basis_probe=not zero_only, full_unitary=full_unitary)
            hypothesis = res.circuit
            budget, retry, attempts = res.budget, res.retry_queries, res.attempts
            report["k"] = res.k
    except (LearnerFailure, NonCliffordCollapse) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        retry = session.ledger.copies_prepared
    total = session.ledger.copies_prepared
    report["queries"] = {"total": total - retry, "by_phase": session.ledger.snapshot()["by_phase"],
                         "budget": budget, "retry": retry, "attempts": attempts}
    fids: list[float] = []
    verified = "none"
    if hypothesis is not None and n <= dense.MAX_STATE_QUBITS:
        zero_only = isinstance(target, Circuit) and target.tdepth1_split() is None
        inputs = [0] if zero_only else range(1 << n)
        verified = "zero" if zero_only else "all"
        fids = basis_fidelities(target, hypothesis, inputs)
    if hypothesis is not None and algo == "clifford":
        report["tableau_equal"] = tableaus_equal(tableau_of(hypothesis), tableau_of(target))
    report["fidelities"] = fids
    report["verified_inputs"] = verified
    ok = hypothesis is not None and all(f >= 1 - tol for f in fids)
    if verified == "none" and report["tableau_equal"] is not None:
        ok = ok and report["tableau_equal"]
    elif verified == "none":
        ok = False
    report["success"] = bool(ok)
    report["wall_time"] = round(time.perf_counter() - start, 6) if timing else None
    jsonschema.validate(report, LEARN_SCHEMA)
    return report, hypothesis


def cmd_learn(args) -> int:
    target = load_target(args.target)
    report, hypothesis = run_learn(target, args.algo, args.seed, args.backend, args.tol,
                                   full_unitary=args.full_unitary, timing=args.timing)
    if hypothesis is not None and args.out:
        write_text(args.out, dumps(hypothesis.to_json()) + "\n")
    write_text(args.report, dumps(report) + "\n")
    return 0 if report["success"] else 1


# -- verify --------------------------------------------------------------------

def cmd_verify(args) -> int:
    target = load_circuit(args.target)
    hyp = load_circuit(args.hypothesis)
    if target.n != hyp.n:
        raise UsageError("target and hypothesis act on different numbers of qubits")
    n = target.n
    out: dict = {"mode": args.mode, "n": n, "tol": args.tol}
    if args.mode == "basis":
        states_t = [dense.run_circuit(target, v) for v in range(1 << n)]
        states_h = [dense.run_circuit(hyp, v) for v in range(1 << n)]
        overlaps = [np.vdot(b, a) for a, b in zip(states_t, states_h)]
        fids = [float(abs(o) ** 2) for o in overlaps]
        out["fidelities"] = fids
        out["pass"] = all(f >= 1 - args.tol for f in fids)
        # do all inputs agree up to one shared phase, or only input by input?
        phases = np.angle(np.array(overlaps))
        spread = float(np.max(np.abs(np.angle(np.exp(1j * (phases - phases[0]))))))
        out["common_phase"] = bool(out["pass"] and spread <= 1e-6)
    else:
        ut = dense.reconstruct_unitary(target)
        uh = dense.reconstruct_unitary(hyp)
        dist = dense.unitary_phase_distance(ut, uh)
        out["phase_distance"] = dist
        out["pass"] = dist <= args.tol
    write_text(None, dumps(out) + "\n")
    return 0 if out["pass"] else 1


# -- dist ----------------------------------------------------------------------

def cmd_dist(args) -> int:
    target = load_target(args.target)
    n = target.n
    rows: list[tuple[str, float]] = []
    deviation = None
    if args.what == "pauli":
        if not args.op:
            raise UsageError("--what pauli needs --op")
        try:
            p = parse_pauli(args.op, n)
        except MalformedPauli as exc:
            raise UsageError(str(exc)) from exc
        prob = exact_plus_probability(target, p, args.backend)
        rows.append((args.op, prob))
        if args.check_dense:
            deviation = abs(prob - exact_plus_probability(target, p, "dense"))
    else:
        conj = args.what == "bell-conj"
        table = exact_bell_table(target, args.backend, 0, conj)
        for r in np.flatnonzero(table > 1e-15):
            rows.append((word_text(Pauli.from_row(n, int(r))), float(table[r])))
        if args.check_dense:
            deviation = float(np.max(np.abs(table - exact_bell_table(target, "dense", 0, conj))))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["pauli_word_text", "probability"])
    for word, prob in rows:
        w.writerow([word, repr(prob)])
    write_text(args.out, buf.getvalue())
    if deviation is not None:
        print(f"max abs deviation from dense: {deviation:.3e}", file=sys.stderr)
        return 0 if deviation <= 1e-10 else 1
    return 0


# -- bench ---------------------------------------------------------------------

def parse_range(text: str) -> list[int]:
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",")]


def bench_trial(spec: tuple[str, int, int, int, int, str]) -> dict:
    """One benchmark trial; its RNG streams depend only on (seed, n, k, trial)."""
    suite, seed, n, k, trial, backend = spec
    trng = make_rng(seed, n, k, trial, 0)
    start = time.perf_counter()
    try:
        if suite == "clifford":
            target = random_clifford_target(n, trng)
            session = OracleSession(target, backend)
            res = learn_clifford(session, make_rng(seed, n, k, trial, 1))
            ok = tableaus_equal(tableau_of(res.circuit), tableau_of(target))
            out = {"success": ok, "first_attempt": ok and res.single_pass, "queries": res.budgeted_queries,
                   "retry": res.retry_queries, "budget": clifford_budget(n)}
        else:
            target = random_tdepth1_target(n, k, trng)
            session = OracleSession(target, backend)
            res = learn_tdepth1(session, make_rng(seed, n, k, trial, 1))
            ok = all(f >= 1 - DEFAULT_TOL for f in basis_fidelities(target, res.circuit, range(1 << n)))
            out = {"success": ok, "first_attempt": ok and res.attempts == 1, "queries": res.queries,
                   "retry": res.retry_queries, "budget": res.budget}
    except (LearnerFailure, NonCliffordCollapse):
        out = {"success": False, "first_attempt": False, "queries": None, "retry": 0, "budget": None}
    out["seconds"] = time.perf_counter() - start
    return out


def success_bound(suite: str, n: int) -> float:
    if suite == "clifford":
        return 1 - 2.0 ** (-n + 1)
    return max(0.0, 1 - 3 * float(np.exp(-n)))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("STABLEARN_THREADS", "1")))
    except ValueError:
        return 1


def run_bench(suite: str, ns: list[int], ks: list[int], trials: int, seed: int, backend: str = "frame",
              timing: bool = False) -> dict:
    specs = [(suite, seed, n, k, t, backend) for n in ns for k in (ks if suite == "tdepth1" else [0])
             if k <= n for t in range(trials)]
    workers = thread_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(bench_trial, specs))
    else:
        results = [bench_trial(s) for s in specs]
    cells = []
    by_cell: dict[tuple[int, int], list[dict]] = {}
    for spec, res in zip(specs, results):
        by_cell.setdefault((spec[2], spec[3]), []).append(res)
    for (n, k), rs in sorted(by_cell.items()):
        qs = [r["queries"] for r in rs if r["queries"] is not None]
        budgets = [r["budget"] for r in rs if r["budget"] is not None]
        cell = {
            "n": n, "k": k, "trials": len(rs),
            "successes": sum(r["success"] for r in rs),
            "completed": len(qs),
            "success_rate": sum(r["success"] for r in rs) / len(rs),
            "first_attempt_rate": sum(r["first_attempt"] for r in rs) / len(rs),
            "bound": success_bound(suite, n),
            "queries": {"min": min(qs), "mean": float(np.mean(qs)), "max": max(qs)} if qs else None,
            "retry_queries": sum(r["retry"] for r in rs),
            "budget": max(budgets) if budgets else None,
            "within_budget": sum(r["queries"] is not None and r["queries"] <= r["budget"] for r in rs),
        }
        if timing:
            secs = [r["seconds"] for r in rs]
            cell["timing"] = {"p50": float(np.percentile(secs, 50)), "p90": float(np.percentile(secs, 90)),
                              "max": max(secs)}
        cells.append(cell)
    report = {"suite": suite, "seed": seed, "rng": RNG_NAME, "backend": backend, "trials": trials,
              "cells": cells}
    jsonschema.validate(report, BENCH_SCHEMA)
    return report


def cmd_bench(args) -> int:
    start = time.perf_counter()
    ks = parse_range(args.k_range) if args.k_range else [0, 1, 2, 3]
    report = run_bench(args.suite, parse_range(args.n_range), ks, args.trials, args.seed, args.backend,
                       args.timing)
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    write_text(args.report, dumps(report) + "\n")
    return 0


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stablearn", description="Learn Clifford and T-depth-one circuits.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-target", help="write a random target circuit as JSON")
    g.add_argument("--kind", choices=["clifford", "tdepth1"], default="clifford")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--worked-example", action="store_true", help="emit the two-qubit worked example instead")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_target)

    lp = sub.add_parser("learn", help="learn a hypothesis for a target and verify it")
    lp.add_argument("--target", required=True)
    lp.add_argument("--algo", choices=["clifford", "tdepth1"], required=True)
    lp.add_argument("--seed", type=int, default=0)
    lp.add_argument("--backend", choices=["frame", "dense"], default="frame")
    lp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    lp.add_argument("--full-unitary", action="store_true",
                    help="also fix relative phases between basis inputs (T-depth-one learner)")
    lp.add_argument("--timing", action="store_true")
    lp.add_argument("--out")
    lp.add_argument("--report")
    lp.set_defaults(func=cmd_learn)

    v = sub.add_parser("verify", help="compare a hypothesis with a target on the dense simulator")
    v.add_argument("--target", required=True)
    v.add_argument("--hypothesis", required=True)
    v.add_argument("--mode", choices=["basis", "unitary"], default="basis")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("dist", help="exact Bell or Pauli outcome probabilities")
    d.add_argument("--target", required=True)
    d.add_argument("--what", choices=["bell-psipsi", "bell-conj", "pauli"], default="bell-psipsi")
    d.add_argument("--op")
    d.add_argument("--format", choices=["csv"], default="csv")
    d.add_argument("--backend", choices=["frame", "dense"], default="frame")
    d.add_argument("--check-dense", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dist)

    b = sub.add_parser("bench", help="success rates and query statistics over seeded random targets")
    b.add_argument("--suite", choices=["clifford", "tdepth1"], required=True)
    b.add_argument("--n-range", default="2..4")
    b.add_argument("--k-range")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=["frame", "dense"], default="frame")
    b.add_argument("--timing", action="store_true", help="include wall-clock timings (not reproducible)")
    b.add_argument("--report")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (UsageError, GuardExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StablearnError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
