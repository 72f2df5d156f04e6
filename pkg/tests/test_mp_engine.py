from fractions import Fraction

import pytest

from gamesolve import (GameKind, MemorylessStrategy, Owner,
                       StrategyDomainMismatch, eval_p1_memoryless_mp,
                       eval_p2_memoryless_mp, extract_optimal_memoryless_mp,
                       game_stats, make_game, oracle_mp_value, solve_mp,
                       solve_mp_trace)

from conftest import payoff_games, reweighted


def test_single_self_loop():
    g = make_game(GameKind.MEAN_PAYOFF_PARITY, [("a", Owner.P1, 0)],
                  [("a", "a", 5)])
    assert solve_mp(g) == {"a": Fraction(5)}


def test_two_cycle_with_escape_loop():
    g = make_game(GameKind.MEAN_PAYOFF_PARITY,
                  [("a", Owner.P1, 0), ("b", Owner.P1, 0)],
                  [("a", "a", 0), ("a", "b", 1), ("b", "a", 3)])
    assert solve_mp(g) == {"a": Fraction(2), "b": Fraction(2)}


def test_matches_oracle_on_random_games():
    for g in payoff_games(80):
        assert solve_mp(g) == oracle_mp_value(g)


def test_values_have_small_denominators():
    for g in payoff_games(40, start_seed=900):
        for v in solve_mp(g).values():
            assert v.denominator <= g.n


def test_final_iterate_within_zwick_paterson_bound():
    for g in payoff_games(30, start_seed=1000):
        values, trace = solve_mp_trace(g)
        w = game_stats(g).w_max
        assert trace.k >= 1
        for q in g.names:
            assert abs(trace.v[q]) <= trace.k * w
            lo = trace.k * values[q] - 2 * g.n * w
            hi = trace.k * values[q] + 2 * g.n * w
            assert lo <= trace.v[q] <= hi


def test_translation_and_scaling_laws():
    for g in payoff_games(25, start_seed=1100):
        base = solve_mp(g)
        shifted = solve_mp(reweighted(g, shift=3))
        scaled = solve_mp(reweighted(g, scale=4))
        for q in g.names:
            assert shifted[q] == base[q] + 3
            assert scaled[q] == base[q] * 4


def test_eval_one_player_game_forced_cycle():
    g = make_game(GameKind.MEAN_PAYOFF_PARITY,
                  [("a", Owner.P1, 0), ("b", Owner.P1, 0)],
                  [("a", "b", 1), ("b", "a", 3), ("a", "a", 0)])
    strat = MemorylessStrategy(Owner.P1, {"a": "b", "b": "a"})
    assert eval_p1_memoryless_mp(g, strat) == {"a": Fraction(2), "b": Fraction(2)}


def test_eval_matches_full_enumeration_of_responses():
    from gamesolve import StrategySpace
    for g in payoff_games(25, start_seed=1200, n_max=5):
        for sigma in list(StrategySpace(g, Owner.P1))[:6]:
            got = eval_p1_memoryless_mp(g, sigma)
            best = None
            for tau in StrategySpace(g, Owner.P2):
                fixed = dict(sigma.choice)
                fixed.update(tau.choice)
                resp = {}
                for start in g.names:
                    cur = start
                    seen = {}
                    walk = [cur]
                    while cur not in seen:
                        seen[cur] = len(walk) - 1
                        cur = fixed[cur] if cur in fixed else g.successors(cur)[0]
                        walk.append(cur)
                    cyc = walk[seen[cur]:-1] + [cur]
                    weight = sum(g.weight(cyc[i], cyc[i + 1]) for i in range(len(cyc) - 1))
                    resp[start] = Fraction(weight, len(cyc) - 1)
                best = resp if best is None else {q: min(best[q], resp[q]) for q in g.names}
            assert got == best


def test_strategy_domain_mismatch():
    g = make_game(GameKind.MEAN_PAYOFF_PARITY,
                  [("a", Owner.P1, 0), ("b", Owner.P2, 0)],
                  [("a", "b", 0), ("b", "a", 0)])
    with pytest.raises(StrategyDomainMismatch):
        eval_p1_memoryless_mp(g, MemorylessStrategy(Owner.P1, {}))
    with pytest.raises(StrategyDomainMismatch):
        eval_p1_memoryless_mp(g, MemorylessStrategy(Owner.P1, {"a": "a"}))
    with pytest.raises(StrategyDomainMismatch):
        eval_p1_memoryless_mp(g, MemorylessStrategy(Owner.P2, {"b": "a"}))


def test_extraction_postconditions():
    for g in payoff_games(25, start_seed=1300):
        base = solve_mp(g)
        sigma, tau = extract_optimal_memoryless_mp(g)
        assert eval_p1_memoryless_mp(g, sigma) == base
        assert eval_p2_memoryless_mp(g, tau) == base


def test_extraction_on_fig1_prefers_self_loop(fig1):
    sigma, _tau = extract_optimal_memoryless_mp(fig1)
    assert sigma.choice["q1"] == "q1"
    assert solve_mp(fig1)["q1"] == Fraction(1)


def test_worst_case_reconstruction_without_certificates(monkeypatch):
    # disable the early-exit paths so the solver runs the full pinned
    # iteration count and reconstructs from the interval bound alone
    import gamesolve.mp_engine as eng
    monkeypatch.setattr(eng, "_certified_values", lambda g, v: None)
    monkeypatch.setattr(eng, "_unique_in_interval", lambda *a: None)
    for g in payoff_games(12, start_seed=1400, n_max=5):
        assert eng.solve_mp(g) == oracle_mp_value(g)
