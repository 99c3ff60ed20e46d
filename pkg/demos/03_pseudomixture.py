"""
Stabilizer pseudomixtures after a T layer
=========================================

T|+> can be written as a signed combination of three stabilizer projectors.
Applying a layer of k independent T gates gives 3^k components whose weights
are products of those three coefficients; one of them is negative.
"""

import numpy as np

from stablearn import dense
from stablearn.circuit import Circuit
from stablearn.expanded import ALPHA_FLOAT, build_tdepth1, component_states, density_matrix, expand_t_gate
from stablearn.frame import PauliFrame
from stablearn.targets import random_tdepth1_target

a1, a2, a3 = ALPHA_FLOAT
print("weights:", a1, a2, a3, " sum:", a1 + a2 + a3)

e = expand_t_gate(PauliFrame.from_text(["+X"]), 0)
for w, f in component_states(e):
    print(f"  {w:+.6f}  stabilized by {f.text()}")

plus_t = dense.run_circuit(Circuit(1).append("H", 0).append("T", 0))
print("max error vs |+T><+T|:", np.abs(density_matrix(e) - dense.density(plus_t)).max())

# A larger random case: the mixture reproduces the dense density matrix.
t = random_tdepth1_target(4, 3, np.random.default_rng(5))
e = build_tdepth1(t.c1, t.v, t.c2)
comps = component_states(e)
print(f"n=4, k=3: {len(comps)} components, weight sum {sum(w for w, _ in comps):.15f}")
rho = dense.density(dense.run_circuit(t.circuit()))
print("max entry error:", np.abs(density_matrix(e) - rho).max())

# Components are not mutually orthogonal: choosing g in one pair and h in the
# same pair gives overlap 1/2.
(_, p), (_, _), (_, q) = component_states(expand_t_gate(PauliFrame.from_text(["+X"]), 0))
pp, pq = dense.stabilizer_projector(p.rows, 1), dense.stabilizer_projector(q.rows, 1)
print("tr(P_X P_Y) =", np.trace(pp @ pq).real)
