import random
from fractions import Fraction

import pytest

from gamesolve import (DegreeTooLarge, GameKind, InconsistentPrefix,
                       MismatchedGames, MultiStrategy, NEG_INF, Owner, POS_INF,
                       attractor, bar_sets, eval_multi_strategy, is_subarena,
                       make_game, penalty_of_prefix, reduce_exponential,
                       reduce_polynomial, solve_mpp, solve_penalty, ssolve_mp)
from gamesolve.penalty_solver import bar_name, _bar_subsets

from conftest import penalty_games, reweighted


def negated(values, names):
    out = {}
    for q in names:
        v = values[q]
        out[q] = POS_INF if v == NEG_INF else -v
    return out


def full_multi(g):
    return MultiStrategy({q: frozenset(g.successors(q))
                          for q in g.states_of(Owner.P1)})


# -- penalty accounting ----------------------------------------------------

def test_prefix_penalty_zero_when_nothing_blocked(fig4):
    ms = full_multi(fig4)
    assert penalty_of_prefix(fig4, ms, ["q1", "q1", "q2", "q1"]) == 0


def test_prefix_penalty_blocking_self_loop_once(fig4):
    ms = MultiStrategy({"q1": frozenset({"q2"})})
    assert penalty_of_prefix(fig4, ms, ["q1", "q2"]) == 2


def test_prefix_penalty_inconsistent_step(fig4):
    ms = MultiStrategy({"q1": frozenset({"q2"})})
    with pytest.raises(InconsistentPrefix):
        penalty_of_prefix(fig4, ms, ["q1", "q1"])


def test_prefix_penalty_matches_independent_resummation():
    rng = random.Random(7)
    for g in penalty_games(20, start_seed=100):
        p1 = g.states_of(Owner.P1)
        ms = MultiStrategy({q: frozenset(rng.sample(g.successors(q),
                                                    1 + rng.randrange(len(g.successors(q)))))
                            for q in p1})
        # random consistent walk
        cur = g.names[0]
        walk = [cur]
        for _ in range(12):
            options = [d for d in g.successors(cur)
                       if g.owner(cur) is not Owner.P1 or d in ms.allowed[cur]]
            cur = rng.choice(options)
            walk.append(cur)
        expected = 0
        for q in walk:
            if g.owner(q) is Owner.P1:
                expected += sum(w for d, w in g.succ_pairs(q) if d not in ms.allowed[q])
        assert penalty_of_prefix(g, ms, walk) == expected


def test_multi_strategy_validation(fig4):
    from gamesolve import GameSolveError
    with pytest.raises(GameSolveError):
        eval_multi_strategy(fig4, MultiStrategy({}))  # missing q1
    with pytest.raises(GameSolveError):
        eval_multi_strategy(fig4, MultiStrategy({"q1": frozenset()}))
    with pytest.raises(GameSolveError):
        eval_multi_strategy(fig4, MultiStrategy({"q1": frozenset({"nope"})}))
    with pytest.raises(GameSolveError):
        penalty_of_prefix(fig4, full_multi(fig4), ["q2", "q2"])  # not a path


def test_eval_multi_strategy_examples(fig4):
    assert eval_multi_strategy(fig4, full_multi(fig4)) == {"q1": POS_INF, "q2": POS_INF}
    always_block = MultiStrategy({"q1": frozenset({"q2"})})
    assert eval_multi_strategy(fig4, always_block) == {"q1": Fraction(1), "q2": Fraction(1)}


def test_eval_multi_strategy_upper_bounds_value():
    rng = random.Random(11)
    for g in penalty_games(25, start_seed=200):
        vals = solve_penalty(g)
        for _ in range(3):
            ms = MultiStrategy({q: frozenset(rng.sample(g.successors(q),
                                                        1 + rng.randrange(len(g.successors(q)))))
                                for q in g.states_of(Owner.P1)})
            ev = eval_multi_strategy(g, ms)
            for q in g.names:
                assert ev[q] >= vals[q]


# -- exponential reduction -------------------------------------------------

def test_reduction_counts_and_weights(fig4):
    gp = reduce_exponential(fig4)
    # q1 has 2 successors -> 3 bar states; q2 has 1 -> 1 bar state
    assert gp.n == 2 + 3 + 1
    assert gp.weight("q1", bar_name("q1", ("q2",))) == -4  # blocks the 2-loop
    assert gp.weight("q1", bar_name("q1", ("q1", "q2"))) == 0  # blocks nothing
    assert gp.priority(bar_name("q1", ("q1",))) == 1  # M = max priority
    assert gp.owner(bar_name("q1", ("q1",))) is Owner.P2


def test_reduction_value_link(fig4):
    gp = reduce_exponential(fig4)
    assert negated(solve_mpp(gp), fig4.names) == solve_penalty(fig4)


def test_degree_bound():
    n = 14
    states = [(f"s{i}", Owner.P1, 0) for i in range(n)]
    edges = [(f"s{i}", f"s{j}", 1) for i in range(n) for j in range(n)]
    g = make_game(GameKind.MEAN_PENALTY_PARITY, states, edges)
    with pytest.raises(DegreeTooLarge):
        reduce_exponential(g)


def test_bar_set_identities():
    rng = random.Random(13)
    for g in penalty_games(15, start_seed=300, n_max=4):
        gp = reduce_exponential(g)
        all_prime = set(gp.names)
        for _ in range(4):
            a = {q for q in g.names if rng.random() < 0.5}
            b = {q for q in g.names if rng.random() < 0.5}
            ra = bar_sets(g, gp, a, "rebar")
            rb = bar_sets(g, gp, b, "rebar")
            da = bar_sets(g, gp, a, "drebar")
            db = bar_sets(g, gp, b, "drebar")
            assert bar_sets(g, gp, a & b, "rebar") == ra & rb
            assert bar_sets(g, gp, a | b, "rebar") >= ra | rb
            assert bar_sets(g, gp, a | b, "drebar") == da | db
            assert bar_sets(g, gp, a & b, "drebar") <= da & db
            assert bar_sets(g, gp, set(g.names) - a, "rebar") == all_prime - da
            assert bar_sets(g, gp, set(g.names) - a, "drebar") == all_prime - ra


def test_bar_sets_subarena_lemma():
    rng = random.Random(17)
    checked = 0
    for g in penalty_games(20, start_seed=400, n_max=4):
        gp = reduce_exponential(g)
        for _ in range(5):
            s = {q for q in g.names if rng.random() < 0.6}
            if not s or not is_subarena(g, s):
                continue
            checked += 1
            assert is_subarena(gp, bar_sets(g, gp, s, "rebar"))
            assert is_subarena(gp, bar_sets(g, gp, s, "drebar"))
    assert checked > 10


def test_attractor_commutation_lemma():
    rng = random.Random(19)
    for g in penalty_games(15, start_seed=500, n_max=4):
        gp = reduce_exponential(g)
        for _ in range(3):
            f = {q for q in g.names if rng.random() < 0.4}
            a1 = attractor(g, Owner.P1, f).set
            a2 = attractor(g, Owner.P2, f).set
            assert bar_sets(g, gp, a1, "rebar") == attractor(gp, Owner.P1, f).set
            assert bar_sets(g, gp, a2, "drebar") == attractor(gp, Owner.P2, f).set


def test_bar_sets_rejects_mismatched_game(fig4):
    other = penalty_games(1, start_seed=600)[0]
    gp = reduce_exponential(fig4)
    with pytest.raises(MismatchedGames):
        bar_sets(other, gp, set(), "rebar")


def test_factor_two_calibration():
    # a deterministic multi-strategy's penalty equals the negated payoff of
    # its induced strategy in the exponential game
    rng = random.Random(23)
    for g in penalty_games(15, start_seed=700, n_max=4):
        gp = reduce_exponential(g)
        p1 = g.states_of(Owner.P1)
        for _ in range(3):
            ms = MultiStrategy({q: frozenset(rng.sample(g.successors(q),
                                                        1 + rng.randrange(len(g.successors(q)))))
                                for q in p1})
            pen_vals = eval_multi_strategy(g, ms)
            induced = {q: bar_name(q, tuple(d for d in g.successors(q)
                                            if d in ms.allowed[q]))
                       for q in p1}
            from gamesolve import fix_choices, one_player_value
            fixed = fix_choices(gp, induced)
            payoff = one_player_value(fixed, Owner.P2)
            for q in g.names:
                expected = NEG_INF if pen_vals[q] == POS_INF else -pen_vals[q]
                assert payoff[q] == expected


# -- polynomial reduction ---------------------------------------------------

def expected_gadget_count(g):
    k = max(len(g.successors(q)) for q in g.names)
    total = g.n
    for q in g.names:
        r = len(g.successors(q))
        sel = sum(i for i in range(1, r + 1)) + (k - r) * r + r
        alw = sum(i for i in range(1, r + 1)) + (k - r) * r
        blk = 0
        if g.owner(q) is Owner.P1:
            blk = sum(i for i in range(1, r + 1)) - 1
        total += sel + alw + blk
    return total


def test_polynomial_reduction_state_count():
    for g in penalty_games(15, start_seed=800, n_max=4):
        gpp = reduce_polynomial(g)
        assert gpp.n == expected_gadget_count(g)


def test_polynomial_reduction_uniform_dilation(fig4):
    gpp = reduce_polynomial(fig4)
    k = max(len(fig4.successors(q)) for q in fig4.names)
    # every trip from an original state back to an original state takes
    # exactly 2*(k+1) steps
    for start in fig4.names:
        frontier = {start}
        for _ in range(2 * (k + 1)):
            frontier = {d for q in frontier for d in gpp.successors(q)}
        assert frontier <= set(fig4.names) and frontier


def test_polynomial_reduction_value_link(fig4):
    gpp = reduce_polynomial(fig4)
    assert negated(solve_mpp(gpp), fig4.names) == solve_penalty(fig4)


# -- solvers ----------------------------------------------------------------

def test_ssolve_mp_sole_self_loop():
    g = make_game(GameKind.MEAN_PENALTY_PARITY, [("a", Owner.P1, 0)],
                  [("a", "a", 3)])
    assert ssolve_mp(g) == {"a": Fraction(0)}


def test_ssolve_mp_matches_exponential_reduction():
    from gamesolve import solve_mp
    for g in penalty_games(30, start_seed=900):
        flat = make_game(g.kind, [(s.name, s.owner, 0) for s in g.states],
                         list(g.edges()))
        gp = reduce_exponential(flat)
        expected = {q: -v for q, v in solve_mp(gp).items() if q in set(flat.names)}
        assert ssolve_mp(flat) == expected


def test_solve_penalty_fig4(fig4):
    assert solve_penalty(fig4) == {"q1": Fraction(0), "q2": Fraction(0)}


def test_single_successor_games_penalty_zero_or_inf():
    for g in penalty_games(20, start_seed=1000, k=1):
        vals = solve_penalty(g)
        for v in vals.values():
            assert v == POS_INF or v == Fraction(0)


def test_unreachable_states_do_not_change_values():
    for g in penalty_games(15, start_seed=1100):
        states = [(s.name, s.owner, s.priority) for s in g.states]
        states.append(("zzz_extra", Owner.P1, 1))
        edges = list(g.edges()) + [("zzz_extra", "zzz_extra", 1)]
        bigger = make_game(g.kind, states, edges)
        vals = solve_penalty(bigger)
        base = solve_penalty(g)
        assert all(vals[q] == base[q] for q in g.names)


def test_scaling_law_for_penalties():
    for g in penalty_games(15, start_seed=1200):
        base = solve_penalty(g)
        scaled = solve_penalty(reweighted(g, scale=3))
        for q in g.names:
            if base[q] == POS_INF:
                assert scaled[q] == POS_INF
            else:
                assert scaled[q] == 3 * base[q]


def test_values_nonnegative_with_bounded_denominator():
    for g in penalty_games(20, start_seed=1300):
        for v in solve_penalty(g).values():
            if v != POS_INF:
                assert v >= 0
                assert v.denominator <= 2 * g.n


def test_ssolve_worst_case_reconstruction(monkeypatch):
    # force the pinned two-step sweep count and reconstruct from the bound
    import gamesolve.penalty_solver as ps
    import gamesolve.mp_engine as eng
    monkeypatch.setattr(ps, "_penalty_certificate", lambda g, v, s: None)
    monkeypatch.setattr(eng, "_unique_in_interval", lambda *a: None)
    from gamesolve import solve_mp
    for g in penalty_games(6, start_seed=1500, n_max=4, w=2):
        flat = make_game(g.kind, [(s.name, s.owner, 0) for s in g.states],
                         list(g.edges()))
        gp = reduce_exponential(flat)
        expected = {q: -v for q, v in solve_mp(gp).items() if q in set(flat.names)}
        assert ps.ssolve_mp(flat) == expected


def test_ordered_blocking_optimality():
    # restricting Player 2's bar choices to min-of-a-total-order strategies
    # does not change the payoff values on original states
    import itertools
    from gamesolve import eval_p2_memoryless_mpp
    for g in penalty_games(6, start_seed=1400, n_max=3, k=2):
        gp = reduce_exponential(g)
        truth = solve_mpp(gp)
        p2_states = gp.states_of(Owner.P2)
        orders = {q: list(itertools.permutations(g.successors(q))) for q in g.names}
        plain_p2 = [q for q in p2_states if q in set(g.names)]
        best = None
        for combo in itertools.product(*(orders[q] for q in g.names)):
            rank = {q: {d: i for i, d in enumerate(order)}
                    for q, order in zip(g.names, combo)}
            for plain in itertools.product(*(g.successors(q) for q in plain_p2)):
                choice = {q: bar_name(q, (d,)) for q, d in zip(plain_p2, plain)}
                for q in g.names:
                    for members, _b in _bar_subsets(g, q):
                        name = bar_name(q, members)
                        choice[name] = min(members, key=rank[q].get)
                from gamesolve import MemorylessStrategy
                ev = eval_p2_memoryless_mpp(gp, MemorylessStrategy(Owner.P2, choice))
                best = ev if best is None else {q: min(best[q], ev[q]) for q in gp.names}
        for q in g.names:
            assert best[q] == truth[q]
