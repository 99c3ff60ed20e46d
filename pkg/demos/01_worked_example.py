"""
A two-qubit T-depth-one state, inspected and learned
=====================================================

H on both wires, CZ, then T on both wires. The output is not a stabilizer
state, but its Bell statistics still have a lot of structure: the outcomes
fall into a handful of Pauli classes with dyadic probabilities.
"""

import numpy as np

from stablearn import dense
from stablearn.expanded import bell_shift, build_tdepth1, pseudo_expectation
from stablearn.oracle import OracleSession, exact_bell_table, exact_plus_probability
from stablearn.pauli import Pauli, parse_pauli, word_text
from stablearn.targets import worked_example
from stablearn.tdepth1_learner import learn_tdepth1

target = worked_example()
print(target.circuit())

# The expanded frame: no isotropic generators, two primary pairs.
e = build_tdepth1(target.c1, target.v, target.c2)
for g, h in e.pairs:
    print("pair", g, h, "  <g> =", round(pseudo_expectation(e, g), 6))

# Exact Bell table on conj(psi) (x) psi. II carries 1/4, the primaries 1/8 each,
# and the four products of one g with one h take 1/16.
table = exact_bell_table(target, "frame", conj=True)
for r in np.flatnonzero(table):
    print(f"  {word_text(Pauli.from_row(2, int(r)))}  {table[r]:.4f}")

# Measuring psi (x) psi instead moves every outcome by a fixed word.
print("shift word:", bell_shift(e))
psipsi = exact_bell_table(target, "frame", conj=False)
print("largest psi(x)psi entry:", word_text(Pauli.from_row(2, int(np.argmax(psipsi)))), psipsi.max())

# Pauli statistics separate primaries from products and non-members.
for text in ("ZX", "-ZX", "IX"):
    print(f"Pr(+1 | {text}) = {exact_plus_probability(target, parse_pauli(text)):.6f}")
g, h = e.pairs[0][0], e.pairs[1][0]
print(f"Pr(+1 | {g * h}) = {exact_plus_probability(target, g * h):.6f}")

# Learn the circuit from copies alone and compare on every basis input.
session = OracleSession(target)
result = learn_tdepth1(session, np.random.default_rng(7))
print("learned:", result.circuit)
print("copies used:", result.queries, "of budget", result.budget)
fids = [dense.fidelity(dense.run_circuit(target.circuit(), v), dense.run_circuit(result.circuit, v))
        for v in range(4)]
print("basis fidelities:", np.round(fids, 12))
