import numpy as np
import pytest

from stablearn.circuit import Circuit
from stablearn.clifford_learner import (learn_clifford, learn_stabilizer_group, pass_cost, probe_signs, query_budget,
                                        solve_images)
from stablearn.errors import InconsistentTarget, RankDeficient, SingularMatrix
from stablearn.frame import PauliFrame, frame_of_basis_state, frames_equal
from stablearn.gf2 import BitMatrix, gf2_invert
from stablearn.oracle import OracleSession
from stablearn.pauli import parse_pauli
from stablearn.synthesis import tableau_of, tableaus_equal
from stablearn.targets import random_clifford_target, worked_example


def test_budget_formula():
    assert query_budget(6) == 2 * 36 + 60 + 4 == 136
    assert 2 * pass_cost(5) == query_budget(5)


def test_identity_group(rng):
    s = OracleSession(Circuit(3))
    gens = learn_stabilizer_group(s, 0, "Z", rng)
    assert frames_equal(PauliFrame(3, tuple(gens)), frame_of_basis_state(0, 3))


def test_bell_pair_group(rng):
    c = Circuit(2).append("H", 0).append("CX", 0, 1)
    gens = learn_stabilizer_group(OracleSession(c), 0, "Z", rng)
    assert frames_equal(PauliFrame(2, tuple(gens)), PauliFrame.from_text(["+XX", "+ZZ"]))


def test_x_basis_group(rng):
    gens = learn_stabilizer_group(OracleSession(Circuit(2)), 0, "X", rng)
    assert frames_equal(PauliFrame(2, tuple(gens)), PauliFrame.from_text(["+XI", "+IX"]))


def test_rank_deficiency_surfaces():
    """A Bell outcome list that repeats the reference word spans nothing."""

    class Stuck(OracleSession):
        def bell_measure(self, a, b, rng):
            self._consume(a, b)
            return 0

    with pytest.raises(RankDeficient):
        learn_stabilizer_group(Stuck(Circuit(2)), 0, "Z", np.random.default_rng(0))


def test_non_clifford_target_detected(rng):
    with pytest.raises(InconsistentTarget):
        learn_clifford(OracleSession(worked_example()), rng, max_retries=0)


def test_probe_signs_examples(rng):
    s = OracleSession(Circuit(3))
    gens = learn_stabilizer_group(s, 0, "Z", rng)
    assert probe_signs(s, gens, "Z", rng) == BitMatrix.identity(3)
    sw = OracleSession(Circuit(2).append("SWAP", 0, 1))
    b = probe_signs(sw, [parse_pauli("ZI"), parse_pauli("IZ")], "Z", rng)
    assert b == BitMatrix((0b10, 0b01), 2)


def test_probe_matrix_invertible_on_random_targets(rng):
    for seed in range(20):
        target = random_clifford_target(4, np.random.default_rng(seed))
        s = OracleSession(target)
        for _ in range(4):  # a rank-deficient harvest (probability about 2^-n) is redrawn
            try:
                gens = learn_stabilizer_group(s, 0, "Z", rng)
                break
            except RankDeficient:
                continue
        gf2_invert(probe_signs(s, gens, "Z", rng))


def test_solve_images_examples():
    gens = [parse_pauli("ZI"), parse_pauli("-IZ")]
    assert solve_images(gens, BitMatrix.identity(2)) == gens
    imgs = solve_images([parse_pauli("XX"), parse_pauli("ZZ")], BitMatrix((0b11, 0b10), 2))
    assert str(imgs[0]) == "-YY"  # g1 g2 with d = B^-1 = B
    with pytest.raises(SingularMatrix):
        solve_images(gens, BitMatrix((0b11, 0b11), 2))


def test_identity_target(rng):
    res = learn_clifford(OracleSession(Circuit(4)), rng)
    assert tableaus_equal(tableau_of(res.circuit), tableau_of(Circuit(4)))


@pytest.mark.parametrize("n", [1, 2, 5, 6])
def test_random_targets_learned_within_budget(n):
    ok = 0
    for trial in range(30):
        target = random_clifford_target(n, np.random.default_rng(1000 + trial))
        s = OracleSession(target)
        res = learn_clifford(s, np.random.default_rng(trial))
        ok += tableaus_equal(tableau_of(res.circuit), tableau_of(target))
        assert res.budgeted_queries <= query_budget(n)
        if res.single_pass:
            assert s.ledger.copies_prepared == query_budget(n)
    assert ok == 30


def test_learned_images_satisfy_commutation(rng):
    from stablearn.pauli import symplectic_product

    target = random_clifford_target(5, np.random.default_rng(77))
    tab = learn_clifford(OracleSession(target), rng).tableau
    for i in range(5):
        for j in range(5):
            assert symplectic_product(tab.x_images[i], tab.z_images[j]) == (i == j)


def test_deterministic_given_seed():
    target = random_clifford_target(4, np.random.default_rng(3))
    a = learn_clifford(OracleSession(target), np.random.default_rng(1))
    b = learn_clifford(OracleSession(target), np.random.default_rng(1))
    assert a.circuit == b.circuit and a.budgeted_queries == b.budgeted_queries


def test_rank_failure_rate_n8():
    """2n words from a uniform group of size 2^n miss full rank with probability below 2^-n."""
    n, trials = 8, 10000
    target = random_clifford_target(n, np.random.default_rng(21))
    s = OracleSession(target)
    rng = np.random.default_rng(22)
    fails = 0
    for _ in range(trials):
        try:
            learn_stabilizer_group(s, 0, "Z", rng)
        except RankDeficient:
            fails += 1
    p = 2.0 ** -n
    assert fails / trials <= p + 3 * np.sqrt(p * (1 - p) / trials)
