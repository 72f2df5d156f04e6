"""Exact solving of pure mean-payoff games (priorities ignored).

The solver runs the classic one-step value iteration v_k(q) = max/min over
edges of (w + v_{k-1}) and recovers exact rational values from the final
potentials.  Correctness rests on the two-sided bound
``k*val(q) - 2nW <= v_k(q) <= k*val(q) + 2nW``: after the worst-case
iteration count 4*n*W*D^2 (D = denominator bound, n for a plain game, so
4n^3W) the interval of radius 2nW/k around v_k(q)/k contains exactly one
rational with denominator <= D, which is the value.

Long before that bound the iteration usually stabilises; at geometric
checkpoints the solver extracts greedy strategies from the potentials and
evaluates them exactly.  When the lower bound (Player 1's strategy) meets
the upper bound (Player 2's) the values are certified and iteration stops
early.  The fixed-count reconstruction remains as the fallback, so the
result is exact in all cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import graph_algos
from .game_core import Game, GameSolveError, Owner, fix_choices


class StrategyDomainMismatch(GameSolveError):
    """Strategy domain is not exactly the owner's state set, or a choice
    is not a successor of its state."""


@dataclass(frozen=True)
class MemorylessStrategy:
    owner: Owner
    choice: dict  # state name -> chosen successor name, total on owner's states


@dataclass(frozen=True)
class IterationTrace:
    k: int
    v: dict  # state name -> integer potential after k sweeps


def check_strategy(g: Game, strat: MemorylessStrategy) -> None:
    expected = set(g.states_of(strat.owner))
    if set(strat.choice) != expected:
        raise StrategyDomainMismatch(
            f"strategy domain {sorted(strat.choice)} != player {int(strat.owner)} "
            f"states {sorted(expected)}")
    for q, t in strat.choice.items():
        if t not in g.successors(q):
            raise StrategyDomainMismatch(f"{t!r} is not a successor of {q!r}")


def solve_mp(g: Game) -> dict:
    """Exact mean-payoff value of every state (parity ignored)."""
    return solve_mp_trace(g)[0]


def solve_mp_trace(g: Game):
    """Like solve_mp but also returns the final IterationTrace."""
    from ._iteration import mp_sweeps  # deferred: numba import is heavy
    n = g.n
    if n == 0:
        return {}, IterationTrace(0, {})
    start, dst, wt, is_p1 = g.index_arrays()
    w_max = max(1, int(np.max(np.abs(wt))))
    den = max(1, min(n, g.den_bound))
    k_max = 4 * n * w_max * den * den
    radius_num = 2 * n * w_max

    v = np.zeros(n, dtype=np.int64)
    k = 0
    for k_next in _checkpoints(k_max):
        v = mp_sweeps(start, dst, wt, is_p1, v, k_next - k)
        k = k_next
        if k < k_max:
            values = _certified_values(g, v)
            if values is None:
                values = _unique_in_interval(g, v, k, radius_num, den)
        else:
            values = _closest_rationals(g, v, k, den)
        if values is not None:
            trace = IterationTrace(k, {q: int(v[i]) for i, q in enumerate(g.names)})
            return values, trace
    raise AssertionError("unreachable: final checkpoint always reconstructs")


def _checkpoints(k_max: int):
    ks = []
    k = 16
    while k < k_max:
        ks.append(k)
        k *= 4
    ks.append(k_max)
    return ks


def _greedy_choice(g: Game, v, owner: Owner) -> dict:
    pick = {}
    maximize = owner is Owner.P1
    for q in g.states_of(owner):
        best = None
        best_dst = None
        for d, w in g.succ_pairs(q):
            c = w + int(v[g.state(d).index])
            if best is None or (c > best if maximize else c < best):
                best = c
                best_dst = d
        pick[q] = best_dst
    return pick


def _certified_values(g: Game, v):
    """Exact values if the potential-greedy strategies of both players agree."""
    sigma = _greedy_choice(g, v, Owner.P1)
    tau = _greedy_choice(g, v, Owner.P2)
    lower = _reachable_cycle_extreme(fix_choices(g, sigma), "min")
    upper = _reachable_cycle_extreme(fix_choices(g, tau), "max")
    return lower if lower == upper else None


def _unique_in_interval(g: Game, v, k: int, radius_num: int, den: int):
    """Values if each potential interval pins a single candidate rational."""
    radius = Fraction(radius_num, k)
    out = {}
    for i, q in enumerate(g.names):
        center = Fraction(int(v[i]), k)
        lo = center - radius
        hi = center + radius
        found = None
        for s in range(1, den + 1):
            p_lo = math.ceil(lo * s)
            p_hi = math.floor(hi * s)
            if p_hi - p_lo > 1:
                return None
            for p in range(p_lo, p_hi + 1):
                cand = Fraction(p, s)
                if found is None:
                    found = cand
                elif cand != found:
                    return None
        if found is None:
            return None
        out[q] = found
    return out


def _closest_rationals(g: Game, v, k: int, den: int) -> dict:
    out = {}
    for i, q in enumerate(g.names):
        center = Fraction(int(v[i]), k)
        best = None
        best_dist = None
        for s in range(1, den + 1):
            cand = Fraction(round(center * s), s)
            dist = abs(cand - center)
            if best is None or dist < best_dist:
                best, best_dist = cand, dist
        out[q] = best
    return out


def _reachable_cycle_extreme(g: Game, mode: str) -> dict:
    """Per state, the min/max mean cycle reachable from it when every
    remaining choice is resolved toward that extreme."""
    sccs = graph_algos.scc_decompose(g)
    comp_of = {}
    for i, c in enumerate(sccs):
        for q in c.states:
            comp_of[q] = i
    best = [None] * len(sccs)
    take = min if mode == "min" else max
    for i, c in enumerate(sccs):  # reverse topological: successors come first
        cand = []
        if c.has_edge:
            if mode == "min":
                cand.append(graph_algos.min_mean_cycle(g, c))
            else:
                cand.append(graph_algos.max_mean_cycle(g, c))
        for q in c.states:
            for d in g.successors(q):
                j = comp_of[d]
                if j != i:
                    cand.append(best[j])
        best[i] = take(cand)
    return {q: best[comp_of[q]] for q in g.names}


def eval_p1_memoryless_mp(g: Game, strat: MemorylessStrategy) -> dict:
    """Guaranteed mean payoff of a Player-1 memoryless strategy: Player 2
    steers the fixed graph toward its cheapest reachable cycle."""
    if strat.owner is not Owner.P1:
        raise StrategyDomainMismatch("expected a Player 1 strategy")
    check_strategy(g, strat)
    return _reachable_cycle_extreme(fix_choices(g, strat.choice), "min")


def eval_p2_memoryless_mp(g: Game, strat: MemorylessStrategy) -> dict:
    """Value conceded by a Player-2 memoryless strategy: Player 1 pumps the
    best cycle still reachable."""
    if strat.owner is not Owner.P2:
        raise StrategyDomainMismatch("expected a Player 2 strategy")
    check_strategy(g, strat)
    return _reachable_cycle_extreme(fix_choices(g, strat.choice), "max")


def extract_optimal_memoryless_mp(g: Game):
    """Optimal memoryless strategies for both players.

    Successor fixing: walk the owner's states in declaration order and
    commit, at each one, the first successor whose commitment leaves all
    mean-payoff values unchanged.  Memoryless optimal strategies exist, so
    some successor always qualifies.
    """
    base = solve_mp(g)
    return (_extract_by_fixing(g, base, Owner.P1),
            _extract_by_fixing(g, base, Owner.P2))


def _extract_by_fixing(g: Game, base: dict, owner: Owner) -> MemorylessStrategy:
    work = g
    choice = {}
    for q in g.states_of(owner):
        succ = g.successors(q)
        if len(succ) == 1:
            choice[q] = succ[0]
            continue
        for t in succ:
            trial = fix_choices(work, {q: t})
            if solve_mp(trial) == base:
                choice[q] = t
                work = trial
                break
        else:
            raise AssertionError(f"no value-preserving successor at {q!r}")
    return MemorylessStrategy(owner, choice)
