"""Mean-payoff parity solving.

``one_player_value`` handles the degenerate games where only one player
ever has a choice: for the maximising player the value at q is the best
mean cycle over components of the priority-filtered subgraphs that contain
a matching even priority and are reachable from q; for the minimising
player it is -inf wherever a cycle with odd minimal priority is reachable
and otherwise the cheapest reachable cycle mean.

``solve_mpp`` is the recursive algorithm over the minimal priority p: when
p is even the least value x is the minimum of the pure mean-payoff values
and the values of the subgame outside Attr_1(col^-1(p)); every state from
which Player 2 can force a visit to a value-x witness has value x, and the
rest is solved recursively.  The odd case is dual.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import graph_algos, mp_engine
from .game_core import (Game, GameSolveError, NEG_INF, Owner, fix_choices,
                        restrict)
from .mp_engine import MemorylessStrategy, check_strategy


class NotOnePlayer(GameSolveError):
    """The supposedly absent player still has a real choice somewhere."""


class BadComponent(GameSolveError):
    """Rounds-strategy component does not satisfy its preconditions."""


# ---------------------------------------------------------------------------
# one-player games


def one_player_value(g: Game, maximizer: Owner) -> dict:
    """Values of a game in which every choice belongs to ``maximizer``.

    maximizer=P1: the greatest payoff reachable while satisfying parity.
    maximizer=P2: treating Player 2 as the sole mover, the least payoff it
    can force (it prefers -inf, i.e. violating parity, when possible).
    """
    other = maximizer.opponent
    for q in g.states_of(other):
        if len(g.successors(q)) != 1:
            raise NotOnePlayer(f"state {q!r} of player {int(other)} has a choice")
    if g.n == 0:
        return {}
    if maximizer is Owner.P1:
        return _one_player_max(g)
    return _one_player_min(g)


def _parity_components(g: Game, parity: int):
    """Components of the col>=p subgraphs that contain a priority-p state
    and at least one cycle, for each priority p of the given parity."""
    out = []
    for p in g.priorities():
        if p % 2 != parity:
            continue
        region = {q for q in g.names if g.priority(q) >= p}
        for comp in graph_algos.scc_decompose(g, region):
            if comp.has_edge and any(g.priority(u) == p for u in comp.states):
                out.append((p, comp))
    return out


def _states_reaching(g: Game, targets) -> set:
    seen = set(targets)
    stack = list(targets)
    while stack:
        u = stack.pop()
        for p in g.predecessors(u):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _one_player_max(g: Game) -> dict:
    best = {q: NEG_INF for q in g.names}
    for _p, comp in _parity_components(g, parity=0):
        mean = graph_algos.max_mean_cycle(g, comp)
        for q in _states_reaching(g, comp.states):
            if best[q] == NEG_INF or mean > best[q]:
                best[q] = mean
    return best


def _one_player_min(g: Game) -> dict:
    doomed = set()
    for _p, comp in _parity_components(g, parity=1):
        doomed |= _states_reaching(g, comp.states)
    values = {q: NEG_INF for q in doomed}
    safe = [q for q in g.names if q not in doomed]
    if safe:
        # the safe region is closed under successors, hence a subarena
        sub = restrict(g, safe)
        values.update(mp_engine._reachable_cycle_extreme(sub, "min"))
    return {q: values[q] for q in g.names}


# ---------------------------------------------------------------------------
# the recursive solver


def solve_mpp(g: Game) -> dict:
    """Exact state values of a mean-payoff parity game."""
    if g.n == 0:
        return {}
    prios = [s.priority for s in g.states]
    p = min(prios)
    names = set(g.names)
    if p % 2 == 0:
        gvals = mp_engine.solve_mp(g)
        if all(pr == p for pr in prios):
            return dict(gvals)
        col_p = {q for q in g.names if g.priority(q) == p}
        t_set = names - graph_algos.attractor(g, Owner.P1, col_p).set
        f = solve_mpp(restrict(g, t_set))
        x = min(list(f.values()) + list(gvals.values()))
        witnesses = ({q for q in t_set if f[q] == x}
                     | {q for q in g.names if gvals[q] == x})
        absorbed = graph_algos.attractor(g, Owner.P2, witnesses).set
        rest = solve_mpp(restrict(g, names - absorbed))
        return {q: (x if q in absorbed else max(x, rest[q])) for q in g.names}
    col_p = {q for q in g.names if g.priority(q) == p}
    t_set = names - graph_algos.attractor(g, Owner.P2, col_p).set
    if not t_set:
        return {q: NEG_INF for q in g.names}
    f = solve_mpp(restrict(g, t_set))
    x = max(f.values())
    witnesses = {q for q in t_set if f[q] == x}
    absorbed = graph_algos.attractor(g, Owner.P1, witnesses).set
    rest = solve_mpp(restrict(g, names - absorbed))
    return {q: (x if q in absorbed else min(x, rest[q])) for q in g.names}


# ---------------------------------------------------------------------------
# strategy evaluation / extraction


def eval_p2_memoryless_mpp(g: Game, strat: MemorylessStrategy) -> dict:
    """Payoff Player 1 can still achieve once Player 2 fixes ``strat``."""
    if strat.owner is not Owner.P2:
        raise mp_engine.StrategyDomainMismatch("expected a Player 2 strategy")
    check_strategy(g, strat)
    return one_player_value(fix_choices(g, strat.choice), Owner.P1)


def eval_p1_memoryless_mpp(g: Game, strat: MemorylessStrategy) -> dict:
    """Payoff a memoryless Player-1 strategy guarantees against everything."""
    if strat.owner is not Owner.P1:
        raise mp_engine.StrategyDomainMismatch("expected a Player 1 strategy")
    check_strategy(g, strat)
    return one_player_value(fix_choices(g, strat.choice), Owner.P2)


def extract_p2_optimal(g: Game) -> MemorylessStrategy:
    """A memoryless optimal Player-2 strategy, by successor fixing against
    solve_mpp (commit the first choice that leaves every value unchanged)."""
    base = solve_mpp(g)
    work = g
    choice = {}
    for q in g.states_of(Owner.P2):
        succ = g.successors(q)
        if len(succ) == 1:
            choice[q] = succ[0]
            continue
        for t in succ:
            trial = fix_choices(work, {q: t})
            if solve_mpp(trial) == base:
                choice[q] = t
                work = trial
                break
        else:
            raise AssertionError(f"no value-preserving successor at {q!r}")
    return MemorylessStrategy(Owner.P2, choice)


# ---------------------------------------------------------------------------
# play simulation


@dataclass
class PlayTrace:
    states: list
    weight_sums: list       # weight_sums[i] = total weight of the first i edges
    prefix_means: list      # prefix_means[i] = weight_sums[i] / i, None at i=0
    min_priority_seen: list  # running minimum priority up to each position

    def mean_at(self, i: int):
        return self.prefix_means[i]


class RoundsStrategy:
    """Stateful round-based strategy approximating the optimal payoff.

    Alternates two phases: steer to the anchor state of minimal even
    priority (attractor strategy), then pump the best mean cycle for a
    budget that grows with the round index, so the anchor visits become
    arbitrarily sparse and the prefix mean converges to the pump mean.
    """

    def __init__(self, game: Game, component, q_min: str, attract: dict, pump: dict):
        self.game = game
        self.component = frozenset(component)
        self.q_min = q_min
        self.attract = attract
        self.pump = pump
        self.phase = "to_target"
        self.round_index = 1
        self.pump_left = 0

    def next_move(self, state: str) -> str:
        if state not in self.component:
            raise BadComponent(f"play left the component at {state!r}")
        if self.phase == "to_target" and state == self.q_min:
            self.phase = "pump"
            self.pump_left = 2 * self.round_index
        if self.phase == "pump":
            move = self.pump[state]
            self.pump_left -= 1
            if self.pump_left == 0:
                self.round_index += 1
                self.phase = "to_target"
            return move
        return self.attract[state]


def rounds_strategy(g: Game, component, q_min: str) -> RoundsStrategy:
    """Build the rounds strategy on a subarena with even minimal priority.

    The pump strategy is the Player-1 optimal strategy of the component's
    pure mean-payoff game; the steering strategy is the attractor strategy
    toward the anchor.
    """
    component = set(component)
    if q_min not in component:
        raise BadComponent(f"{q_min!r} not in the component")
    if not graph_algos.is_subarena(g, component):
        raise BadComponent("component is not a subarena")
    sub = restrict(g, component)
    p_min = min(sub.priority(q) for q in sub.names)
    if sub.priority(q_min) != p_min or p_min % 2 != 0:
        raise BadComponent(f"{q_min!r} must carry the minimal priority and it must be even")
    attr = graph_algos.attractor(sub, Owner.P1, {q_min})
    if set(attr.set) != component:
        raise BadComponent("anchor not attractable from the whole component")
    sigma, _tau = mp_engine.extract_optimal_memoryless_mp(sub)
    pump = dict(sigma.choice)
    for q in sub.states_of(Owner.P2):
        # pump through singleton Player-2 states as well
        succ = sub.successors(q)
        if len(succ) == 1:
            pump[q] = succ[0]
    attract = dict(attr.strategy)
    for q in component:
        if q not in attract and q != q_min:
            succ = sub.successors(q)
            if len(succ) == 1:
                attract[q] = succ[0]
    attract[q_min] = pump.get(q_min, sub.successors(q_min)[0])
    return RoundsStrategy(g, component, q_min, attract, pump)


def _consult(strategy, g: Game, state: str) -> str:
    if strategy is None:
        raise GameSolveError(f"no strategy supplied for state {state!r}")
    if isinstance(strategy, RoundsStrategy):
        return strategy.next_move(state)
    if isinstance(strategy, MemorylessStrategy):
        return strategy.choice[state]
    if isinstance(strategy, dict):
        return strategy[state]
    if callable(strategy):
        return strategy(state)
    raise GameSolveError(f"unsupported strategy object {strategy!r}")


def simulate(g: Game, s1, s2, horizon: int, start: str) -> PlayTrace:
    """Drive the unique play of (s1, s2) for ``horizon`` steps.

    A strategy may be a MemorylessStrategy, a plain dict, a RoundsStrategy
    or a callable; ``None`` is allowed for a player who never has a real
    choice.  Stateful strategies are consulted at every owned state (even
    forced ones) so they can track the play; forced states of a player
    without a strategy move on their own.
    """
    if horizon < 1:
        raise GameSolveError("horizon must be >= 1")
    states = [start]
    weight_sums = [0]
    prefix_means = [None]
    min_prio = [g.priority(start)]
    cur = start
    for _step in range(horizon):
        succ = g.successors(cur)
        strat = s1 if g.owner(cur) is Owner.P1 else s2
        if strat is not None:
            nxt = _consult(strat, g, cur)
        elif len(succ) == 1:
            nxt = succ[0]
        else:
            nxt = _consult(strat, g, cur)  # raises: a choice with no strategy
        if nxt not in succ:
            raise GameSolveError(f"strategy proposed non-edge {cur}->{nxt}")
        weight_sums.append(weight_sums[-1] + g.weight(cur, nxt))
        states.append(nxt)
        prefix_means.append(Fraction(weight_sums[-1], len(states) - 1))
        min_prio.append(min(min_prio[-1], g.priority(nxt)))
        cur = nxt
    return PlayTrace(states, weight_sums, prefix_means, min_prio)
