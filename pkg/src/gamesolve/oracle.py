"""Independent brute-force ground truth for all solvers, at desk scale.

Player 2 has memoryless optimal strategies in these games, so the exact
value is the pointwise minimum, over all memoryless Player-2 strategies,
of the best Player-1 response.  The response evaluation deliberately does
not share code with the engines under test: on games of at most 8 states
it runs its own simple-cycle enumeration over its own mutual-reachability
components; on larger games (the penalty oracle evaluates the exponential
reduction) it falls back to the graph_algos primitives, which are
themselves cross-checked against the small-path enumeration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import graph_algos
from .game_core import Game, GameKind, GameSolveError, NEG_INF, POS_INF, Owner, restrict
from .mp_engine import MemorylessStrategy

DEFAULT_MAX_ENUM = 10 ** 6
SMALL_LIMIT = 8


class SpaceTooLarge(GameSolveError):
    """The memoryless strategy space exceeds the enumeration bound."""


class SccTooLarge(GameSolveError):
    """Brute-force cycle enumeration is limited to 8 states."""


def max_enum_bound(explicit=None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("GAMESOLVE_MAX_ENUM")
    return int(env) if env else DEFAULT_MAX_ENUM


@dataclass(frozen=True)
class StrategySpace:
    """Deterministic odometer over all memoryless strategies of one player.

    States are digit positions in declaration order, successors cycle in
    declaration order with the last state fastest.
    """

    game: Game
    owner: Owner

    @property
    def states(self):
        return self.game.states_of(self.owner)

    def __len__(self):
        size = 1
        for q in self.states:
            size *= len(self.game.successors(q))
        return size

    def __iter__(self):
        states = self.states
        options = [self.game.successors(q) for q in states]
        for picks in product(*options):
            yield MemorylessStrategy(self.owner, dict(zip(states, picks)))


# ---------------------------------------------------------------------------
# independent evaluation of a fixed Player-2 strategy


def _simple_cycles(names, succ):
    """All simple cycles of a successor map, as lists of node names.

    Cycles are rooted at their smallest member (in the given name order);
    the DFS only descends to nodes at or above the root.
    """
    pos = {q: i for i, q in enumerate(names)}
    cycles = []
    for root in names:
        r = pos[root]
        stack = [(root, [root])]
        on_path = {root}

        def dfs(node, path, on_path):
            for d in succ[node]:
                if pos[d] < r:
                    continue
                if d == root:
                    cycles.append(list(path))
                elif d not in on_path:
                    on_path.add(d)
                    path.append(d)
                    dfs(d, path, on_path)
                    path.pop()
                    on_path.discard(d)

        dfs(root, [root], on_path)
    return cycles


def _closure_masks(names, succ, allowed_mask):
    """Reachability bitmasks (including self) inside ``allowed_mask``."""
    pos = {q: i for i, q in enumerate(names)}
    n = len(names)
    adj = [0] * n
    for q in names:
        i = pos[q]
        if not allowed_mask >> i & 1:
            continue
        for d in succ[q]:
            j = pos[d]
            if allowed_mask >> j & 1:
                adj[i] |= 1 << j
    reach = [1 << i if allowed_mask >> i & 1 else 0 for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if not allowed_mask >> i & 1:
                continue
            acc = reach[i]
            m = adj[i]
            while m:
                j = (m & -m).bit_length() - 1
                acc |= reach[j]
                m &= m - 1
            if acc != reach[i]:
                reach[i] = acc
                changed = True
    return reach


def _eval_fixed_small(g: Game, succ, parity: bool):
    """Best Player-1 response values by explicit cycle enumeration."""
    names = g.names
    pos = {q: i for i, q in enumerate(names)}
    full = (1 << g.n) - 1
    reach = _closure_masks(names, succ, full)
    cycles = []
    for cyc in _simple_cycles(names, succ):
        mask = 0
        weight = 0
        for i, q in enumerate(cyc):
            mask |= 1 << pos[q]
            weight += g.weight(q, cyc[(i + 1) % len(cyc)])
        cycles.append((mask, min(g.priority(q) for q in cyc), Fraction(weight, len(cyc))))

    best = {q: NEG_INF for q in names}
    if not parity:
        for q in names:
            for mask, _minpri, mean in cycles:
                if reach[pos[q]] & mask and (best[q] == NEG_INF or mean > best[q]):
                    best[q] = mean
        return best

    for p in g.priorities():
        if p % 2:
            continue
        region = 0
        for q in names:
            if g.priority(q) >= p:
                region |= 1 << pos[q]
        reach_p = _closure_masks(names, succ, region)
        comps = []
        done = 0
        for i in range(g.n):
            if not region >> i & 1 or done >> i & 1:
                continue
            comp = 0
            for j in range(g.n):
                if region >> j & 1 and reach_p[i] >> j & 1 and reach_p[j] >> i & 1:
                    comp |= 1 << j
            done |= comp
            comps.append(comp)
        for comp in comps:
            if not any(comp >> pos[q] & 1 and g.priority(q) == p for q in names):
                continue
            means = [mean for mask, minpri, mean in cycles if mask & ~comp == 0]
            if not means:
                continue
            top = max(means)
            for q in names:
                if reach[pos[q]] & comp and (best[q] == NEG_INF or top > best[q]):
                    best[q] = top
    return best


def _eval_fixed_large(g: Game, tau: MemorylessStrategy, parity: bool):
    """Best Player-1 response on bigger games, alg-1 style over graph_algos."""
    from .game_core import fix_choices
    fixed = fix_choices(g, tau.choice)
    best = {q: NEG_INF for q in fixed.names}
    if parity:
        priorities = [p for p in fixed.priorities() if p % 2 == 0]
    else:
        priorities = [None]
    for p in priorities:
        if p is None:
            region = set(fixed.names)
        else:
            region = {q for q in fixed.names if fixed.priority(q) >= p}
        for comp in graph_algos.scc_decompose(fixed, region):
            if not comp.has_edge:
                continue
            if p is not None and not any(fixed.priority(q) == p for q in comp.states):
                continue
            mean = graph_algos.max_mean_cycle(fixed, comp)
            stack = list(comp.states)
            seen = set(comp.states)
            while stack:
                u = stack.pop()
                for w in fixed.predecessors(u):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            for q in seen:
                if best[q] == NEG_INF or mean > best[q]:
                    best[q] = mean
    return best


def _minimize_over_p2(g: Game, parity: bool, max_enum):
    space = StrategySpace(g, Owner.P2)
    bound = max_enum_bound(max_enum)
    if len(space) > bound:
        raise SpaceTooLarge(f"{len(space)} Player-2 strategies exceed the bound {bound}")
    small = g.n <= SMALL_LIMIT
    best = None
    for tau in space:
        if small:
            succ = {q: (tau.choice[q],) if q in tau.choice else g.successors(q)
                    for q in g.names}
            vals = _eval_fixed_small(g, succ, parity)
        else:
            vals = _eval_fixed_large(g, tau, parity)
        if best is None:
            best = vals
        else:
            best = {q: min(best[q], vals[q]) for q in g.names}
    return best


def oracle_mpp_value(g: Game, max_enum=None) -> dict:
    """Pointwise minimum over all memoryless Player-2 strategies of the
    best Player-1 response (parity respected)."""
    return _minimize_over_p2(g, parity=True, max_enum=max_enum)


def oracle_mp_value(g: Game, max_enum=None) -> dict:
    """Same with the parity condition ignored."""
    return _minimize_over_p2(g, parity=False, max_enum=max_enum)


def oracle_penalty_value(g: Game, max_enum=None) -> dict:
    """Negated oracle value of the exponential reduction, restricted to the
    original states.

    Only the part of the reduction reachable from original states matters
    for their values, so the enumeration drops the bar states Player 2 can
    never be offered.
    """
    from .penalty_solver import reduce_exponential
    if g.kind is not GameKind.MEAN_PENALTY_PARITY:
        raise GameSolveError("oracle_penalty_value requires a mean-penalty game")
    gp = reduce_exponential(g)
    reachable = set()
    for q in g.names:
        reachable |= graph_algos.reachable_from(gp, q)
    vals = oracle_mpp_value(restrict(gp, reachable), max_enum=max_enum)
    out = {}
    for q in g.names:
        v = vals[q]
        out[q] = POS_INF if v == NEG_INF else -v
    return out


def oracle_strategy_space_size(g: Game) -> int:
    """Size of the Player-2 space oracle_penalty_value would enumerate."""
    from .penalty_solver import reduce_exponential
    gp = reduce_exponential(g)
    reachable = set()
    for q in g.names:
        reachable |= graph_algos.reachable_from(gp, q)
    return len(StrategySpace(restrict(gp, reachable), Owner.P2))


def brute_cycle_max_mean(g: Game, scc: graph_algos.Scc) -> Fraction:
    """Maximum cycle mean by enumerating every simple cycle of the component."""
    if len(scc.states) > SMALL_LIMIT:
        raise SccTooLarge(f"component has {len(scc.states)} states")
    members = set(scc.states)
    succ = {q: tuple(d for d in g.successors(q) if d in members) for q in scc.states}
    best = None
    for cyc in _simple_cycles(scc.states, succ):
        weight = sum(g.weight(q, cyc[(i + 1) % len(cyc)]) for i, q in enumerate(cyc))
        mean = Fraction(weight, len(cyc))
        if best is None or mean > best:
            best = mean
    if best is None:
        raise graph_algos.NoCycle(f"component {scc.states} has no cycle")
    return best
