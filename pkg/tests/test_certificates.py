import random
from fractions import Fraction

import pytest

from gamesolve import (Leaf, MemorylessStrategy, NoWitness,
                       NpWitness, OddNode, Owner, StrategySpace,
                       enumerate_np_witnesses, extract_p2_optimal, is_finite,
                       make_np_witness, solve_mpp, verify_conp, verify_np,
                       witness_from_dict, witness_node_count, witness_to_dict)
from conftest import payoff_games


def finite_values(values):
    return sorted({v for v in values.values() if is_finite(v)})


def test_witness_accepted_for_fig1_at_value_one(fig1):
    w = make_np_witness(fig1, Fraction(1))
    assert w.top_trap == frozenset({"q1", "q2"})
    assert verify_np(fig1, "q1", Fraction(1), w)
    assert verify_np(fig1, "q2", Fraction(1), w)


def test_witness_roundtrip_through_json(fig1):
    w = make_np_witness(fig1, Fraction(1))
    doc = witness_to_dict(w, fig1)
    again = witness_from_dict(doc)
    assert again == w
    assert verify_np(fig1, "q1", Fraction(1), again)


def test_no_witness_above_max_value(fig1):
    with pytest.raises(NoWitness):
        make_np_witness(fig1, Fraction(2))


def test_malformed_leaf_witness_rejected(fig1):
    w = NpWitness(Fraction(1), frozenset(), Leaf())
    assert verify_np(fig1, "q1", Fraction(1), w).reason == "q0-not-in-trap"
    w2 = NpWitness(Fraction(1), frozenset({"q1", "q2"}), Leaf())
    assert verify_np(fig1, "q1", Fraction(1), w2).reason == "malformed-tree"


def test_witnesses_accepted_at_value_rejected_above():
    for g in payoff_games(40, start_seed=2200):
        vals = solve_mpp(g)
        for x in finite_values(vals):
            w = make_np_witness(g, x)
            assert witness_node_count(w) <= 2 * g.n
            for q in g.names:
                if vals[q] >= x:
                    assert verify_np(g, q, x, w), (q, x)
            above = x + 1
            holders = [q for q in g.names if vals[q] >= above]
            if not holders:
                res = verify_np(g, max(vals, key=lambda q: (is_finite(vals[q]), vals[q])),
                                above, w)
                assert not res.accepted


def test_soundness_fuzz_random_witnesses():
    rng = random.Random(99)
    tried = 0
    for g in payoff_games(40, start_seed=2300, n_max=4):
        vals = solve_mpp(g)
        q0 = g.names[0]
        thresholds = finite_values(vals)[:2] or [Fraction(0)]
        for x in thresholds:
            for w in enumerate_np_witnesses(g, q0, x):
                if rng.random() < 0.3:
                    continue
                tried += 1
                if verify_np(g, q0, x, w):
                    assert vals[q0] >= x
                if tried > 600:
                    return
    assert tried >= 20


def test_rejection_is_complete_on_tiny_games():
    # exhaustive search: no witness certifies more than the true value
    for g in payoff_games(20, start_seed=2400, n_max=3):
        vals = solve_mpp(g)
        for q0 in g.names:
            if not is_finite(vals[q0]):
                continue
            too_high = vals[q0] + Fraction(1, g.n + 1)
            for w in enumerate_np_witnesses(g, q0, too_high):
                assert not verify_np(g, q0, too_high, w).accepted


def test_conp_accepts_above_value_rejects_at_value():
    for g in payoff_games(30, start_seed=2500):
        vals = solve_mpp(g)
        tau = extract_p2_optimal(g)
        for q in g.names:
            if not is_finite(vals[q]):
                continue
            assert not verify_conp(g, q, vals[q], tau).accepted
            assert verify_conp(g, q, vals[q] + 1, tau).accepted


def test_conp_never_accepts_at_or_below_value():
    for g in payoff_games(15, start_seed=2600, n_max=4):
        vals = solve_mpp(g)
        for tau in StrategySpace(g, Owner.P2):
            for q in g.names:
                if is_finite(vals[q]):
                    assert not verify_conp(g, q, vals[q], tau).accepted


def test_np_conp_duality():
    # never both an accepted witness for >= x and a certificate for < x
    for g in payoff_games(15, start_seed=2700, n_max=4):
        vals = solve_mpp(g)
        tau = extract_p2_optimal(g)
        for q in g.names:
            for x in finite_values(vals):
                conp = verify_conp(g, q, x, tau).accepted
                try:
                    np_ok = verify_np(g, q, x, make_np_witness(g, x)).accepted
                except NoWitness:
                    np_ok = False
                assert not (np_ok and conp)


def test_verify_rejects_wrong_parity_shape(fig1):
    sigma = MemorylessStrategy(Owner.P1, {"q1": "q1", "q2": "q1"})
    # fig1's minimal priority is 0 (even) once restricted to the full trap,
    # so an OddNode at the root is the wrong shape
    w = NpWitness(Fraction(1), frozenset({"q1", "q2"}),
                  OddNode(frozenset({"q1"}), Leaf(), Leaf()))
    assert verify_np(fig1, "q1", Fraction(1), w).reason == "wrong-parity-node"
