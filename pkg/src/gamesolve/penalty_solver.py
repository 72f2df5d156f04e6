"""Mean-penalty parity games: penalty semantics, the two reductions to
mean-payoff parity games, the adapted value iteration and the direct
recursive solver.

A multi-strategy keeps a non-empty set of successors open at every
Player-1 state and pays, per visit, the total weight of the successors it
blocks.  The exponential reduction replaces each move by a two-step trip
through a "bar" state (q, F) owned by Player 2: choosing F costs
-2 * (blocked weight) and Player 2 then picks any member of F.  The
polynomial reduction asks Player 1 about each successor in turn (block it
or allow it) while Player 2 flags which allowed successor it wants to
explore; one original step becomes 2*(k+1) steps, and blocking an edge
costs -2*(k+1) times its weight, so the payoff of the reduced game is the
negated mean penalty.

States whose out-degree is below the global maximum k get filler stages
that simply pass through, keeping every gadget traversal exactly 2*(k+1)
steps long; the "cannot block the last remaining successor" guard sits on
the state's last real stage.

``ssolve_mp`` runs the two-step value iteration of the exponential game
without materialising it: Player-1 states sort their successors by current
potential and the best choice blocks a prefix of that order.  Exactness
comes from the same certificate / reconstruction scheme as the plain
mean-payoff engine, with denominator target 2n and iterate error bound
4n * W' (W' = largest bar-move weight).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import graph_algos, mp_engine, mpp_solver
from .game_core import Game, GameKind, GameSolveError, POS_INF, Owner, restrict


class InconsistentPrefix(GameSolveError):
    """A Player-1 step in the prefix leaves the multi-strategy's allowed set."""


class DegreeTooLarge(GameSolveError):
    """Out-degree exceeds the bound for materialising the exponential game."""


class MismatchedGames(GameSolveError):
    """The supplied game is not the exponential reduction of the base game."""


@dataclass(frozen=True)
class MultiStrategy:
    allowed: dict  # Player-1 state name -> non-empty frozenset of successors


def check_multi_strategy(g: Game, ms: MultiStrategy) -> None:
    expected = set(g.states_of(Owner.P1))
    if set(ms.allowed) != expected:
        raise GameSolveError(
            f"multi-strategy domain {sorted(ms.allowed)} != Player 1 states {sorted(expected)}")
    for q, allowed in ms.allowed.items():
        succ = set(g.successors(q))
        if not allowed or not set(allowed) <= succ:
            raise GameSolveError(f"allowed set at {q!r} must be a non-empty subset of its successors")


def _require_penalty(g: Game) -> None:
    if g.kind is not GameKind.MEAN_PENALTY_PARITY:
        raise GameSolveError("operation requires a mean-penalty game")


def blocked_weight(g: Game, ms: MultiStrategy, q: str) -> int:
    allowed = ms.allowed[q]
    return sum(w for d, w in g.succ_pairs(q) if d not in allowed)


def penalty_of_prefix(g: Game, ms: MultiStrategy, prefix) -> Fraction:
    """Total weight blocked along the prefix; each visit of a Player-1 state
    charges its blocked weight, Player-2 states charge nothing."""
    _require_penalty(g)
    check_multi_strategy(g, ms)
    prefix = list(prefix)
    if not prefix:
        return Fraction(0)
    total = 0
    for i, q in enumerate(prefix):
        if i + 1 < len(prefix):
            nxt = prefix[i + 1]
            if nxt not in g.successors(q):
                raise GameSolveError(f"prefix is not a path: no edge {q}->{nxt}")
            if g.owner(q) is Owner.P1 and nxt not in ms.allowed[q]:
                raise InconsistentPrefix(f"step {q}->{nxt} is blocked by the multi-strategy")
        if g.owner(q) is Owner.P1:
            total += blocked_weight(g, ms, q)
    return Fraction(total)


def eval_multi_strategy(g: Game, ms: MultiStrategy) -> dict:
    """Worst-case mean penalty of a memoryless multi-strategy.

    Everything left open (Player-2 states and the allowed sets themselves)
    is resolved adversarially: infinity wherever a cycle with odd minimal
    priority stays reachable, otherwise the costliest reachable cycle mean
    in the graph whose Player-1 edges charge the blocked weight.
    """
    _require_penalty(g)
    check_multi_strategy(g, ms)
    states = [(s.name, s.owner, s.priority) for s in g.states]
    edges = []
    for q in g.names:
        if g.owner(q) is Owner.P1:
            cost = blocked_weight(g, ms, q)
            for d in g.successors(q):
                if d in ms.allowed[q]:
                    edges.append((q, d, cost))
        else:
            for d, _w in g.succ_pairs(q):
                edges.append((q, d, 0))
    restricted = Game(GameKind.MEAN_PAYOFF_PARITY, states, edges, den_bound=g.den_bound)

    doomed = set()
    for _p, comp in mpp_solver._parity_components(restricted, parity=1):
        doomed |= mpp_solver._states_reaching(restricted, comp.states)
    values = {q: POS_INF for q in doomed}
    safe = [q for q in restricted.names if q not in doomed]
    if safe:
        values.update(mp_engine._reachable_cycle_extreme(restrict(restricted, safe), "max"))
    return {q: values[q] for q in g.names}


# ---------------------------------------------------------------------------
# exponential reduction


def bar_name(q: str, members) -> str:
    return f"{q}|{'+'.join(members)}"


def _bar_subsets(g: Game, q: str):
    """Non-empty successor subsets of q, in bitmask order over declaration
    positions; yields (member name tuple, blocked weight)."""
    pairs = g.succ_pairs(q)
    total = sum(w for _d, w in pairs)
    for bits in range(1, 1 << len(pairs)):
        members = tuple(d for i, (d, _w) in enumerate(pairs) if bits >> i & 1)
        kept = sum(w for i, (_d, w) in enumerate(pairs) if bits >> i & 1)
        yield members, total - kept


def reduce_exponential(g: Game, max_degree: int = 12) -> Game:
    """The mean-payoff parity game with one Player-2 bar state per (q, F).

    All (q, F) pairs are materialised for both owners even though only
    singleton sets are reachable from Player-2 states; the unreachable ones
    are harmless and keep the set identities literally testable.
    """
    _require_penalty(g)
    k = max((len(g.successors(q)) for q in g.names), default=0)
    if k > max_degree:
        raise DegreeTooLarge(f"out-degree {k} exceeds the bound {max_degree}")
    m_prio = max((s.priority for s in g.states), default=0)
    states = [(s.name, s.owner, s.priority) for s in g.states]
    edges = []
    for q in g.names:
        for members, blocked in _bar_subsets(g, q):
            states.append((bar_name(q, members), Owner.P2, m_prio))
    for q in g.names:
        if g.owner(q) is Owner.P1:
            for members, blocked in _bar_subsets(g, q):
                edges.append((q, bar_name(q, members), -2 * blocked))
        else:
            for d in g.successors(q):
                edges.append((q, bar_name(q, (d,)), 0))
    for q in g.names:
        for members, _blocked in _bar_subsets(g, q):
            name = bar_name(q, members)
            for d in members:
                edges.append((name, d, 0))
    return Game(GameKind.MEAN_PAYOFF_PARITY, states, edges, den_bound=g.n)


def bar_sets(g: Game, gprime: Game, s, mode: str) -> frozenset:
    """rebar / drebar of a base-game state set, as a state set of G'.

    rebar S adds the bar states whose member set lies inside S; drebar S
    adds those meeting S.
    """
    if mode not in ("rebar", "drebar"):
        raise GameSolveError(f"unknown bar-set mode {mode!r}")
    expected = set(g.names)
    for q in g.names:
        for members, _blocked in _bar_subsets(g, q):
            expected.add(bar_name(q, members))
    if set(gprime.names) != expected:
        raise MismatchedGames("gprime is not reduce_exponential of the base game")
    s = set(s)
    if not s <= set(g.names):
        raise GameSolveError("bar_sets: set contains unknown base states")
    out = set(s)
    for q in g.names:
        for members, _blocked in _bar_subsets(g, q):
            if mode == "rebar":
                if set(members) <= s:
                    out.add(bar_name(q, members))
            else:
                if set(members) & s:
                    out.add(bar_name(q, members))
    return frozenset(out)


# ---------------------------------------------------------------------------
# polynomial reduction


def reduce_polynomial(g: Game) -> Game:
    """Polynomial-size mean-payoff parity game with select/allow/block gadgets.

    Gadget names: ``q.s<i>.<m>`` (select, Player 1), ``q.a<i>.<m>`` (allow,
    Player 2), ``q.b<i>.<m>`` (block, Player 2).  Only reachable gadget
    states are materialised.
    """
    _require_penalty(g)
    k = max((len(g.successors(q)) for q in g.names), default=0)
    m_prio = max((s.priority for s in g.states), default=0)
    scale = 2 * (k + 1)
    states = []
    edges = []
    for q in g.names:
        states.append((q, Owner.P1, g.priority(q)))
    for q in g.names:
        pairs = g.succ_pairs(q)
        r = len(pairs)
        is_p1 = g.owner(q) is Owner.P1

        def sel(i, m):
            return f"{q}.s{i}.{m}"

        def alw(i, m):
            return f"{q}.a{i}.{m}"

        def blk(i, m):
            return f"{q}.b{i}.{m}"

        edges.append((q, sel(1, 0), 0))
        for i in range(1, r + 1):
            ms = range(0, i)
            for m in ms:
                states.append((sel(i, m), Owner.P1, m_prio))
                states.append((alw(i, m), Owner.P2, m_prio))
                edges.append((sel(i, m), alw(i, m), 0))
                if is_p1 and not (i == r and m == 0):
                    states.append((blk(i, m), Owner.P2, m_prio))
                    edges.append((sel(i, m), blk(i, m), 0))
                    edges.append((blk(i, m), sel(i + 1, m), -scale * pairs[i - 1][1]))
                edges.append((alw(i, m), sel(i + 1, i), 0))
                if m >= 1:
                    edges.append((alw(i, m), sel(i + 1, m), 0))
        for i in range(r + 1, k + 1):  # filler stages: pure pass-through
            for m in range(1, r + 1):
                states.append((sel(i, m), Owner.P1, m_prio))
                states.append((alw(i, m), Owner.P2, m_prio))
                edges.append((sel(i, m), alw(i, m), 0))
                edges.append((alw(i, m), sel(i + 1, m), 0))
        for m in range(1, r + 1):
            states.append((sel(k + 1, m), Owner.P1, m_prio))
            edges.append((sel(k + 1, m), pairs[m - 1][0], 0))
    return Game(GameKind.MEAN_PAYOFF_PARITY, states, edges, den_bound=g.n)


# ---------------------------------------------------------------------------
# adapted value iteration (single priority class)


def ssolve_mp(g: Game, surcharge=None) -> dict:
    """Exact mean-penalty values with the parity objective ignored.

    Iterates the two-step recurrence of the exponential game on original
    states only; stops as soon as a multi-strategy (upper bound) and an
    ordered Player-2 strategy (lower bound) certify the same values, or
    reconstructs from the iterate bound at the worst-case sweep count.

    ``surcharge`` maps Player-1 states to a weight they pay at every visit
    on top of what they block; the recursive solver uses it to keep the
    cost of edges removed by a subarena restriction (the exponential game
    restricted to ``rebar`` keeps their full bar weights, so a faithful
    symbolic restriction must keep charging for them).
    """
    from ._iteration import penalty_sweeps  # deferred: numba import is heavy
    _require_penalty(g)
    n = g.n
    if n == 0:
        return {}
    surcharge = dict(surcharge or {})
    start, dst, wt, is_p1 = g.index_arrays()
    sur2 = np.zeros(n, dtype=np.int64)
    for q, b in surcharge.items():
        if g.owner(q) is Owner.P1 and b:
            sur2[g.state(q).index] = 2 * b
    w_bar = 1
    for q in g.names:
        if g.owner(q) is Owner.P1:
            ws = [w for _d, w in g.succ_pairs(q)]
            w_bar = max(w_bar, 2 * surcharge.get(q, 0) + 2 * (sum(ws) - min(ws)))
    den = 2 * n
    radius_num = 4 * n * w_bar          # |v_K(q) - K*val'(q)| <= radius_num
    k2_max = 16 * n ** 3 * w_bar + 1    # two-step sweeps

    v = np.zeros(n, dtype=np.int64)
    k2 = 0
    for k2_next in mp_engine._checkpoints(k2_max):
        v = penalty_sweeps(start, dst, wt, is_p1, sur2, v, k2_next - k2)
        k2 = k2_next
        steps = 2 * k2
        if k2 < k2_max:
            values = _penalty_certificate(g, v, surcharge)
            if values is None:
                payoff = mp_engine._unique_in_interval(g, v, steps, radius_num, den)
                values = None if payoff is None else {q: -x for q, x in payoff.items()}
        else:
            payoff = mp_engine._closest_rationals(g, v, steps, den)
            values = {q: -x for q, x in payoff.items()}
        if values is not None:
            return values
    raise AssertionError("unreachable")


def _sorted_succ(g: Game, q: str, v):
    """Successors of q ordered by current payoff potential (ascending,
    declaration position breaking ties), with blocked-prefix weights."""
    pairs = g.succ_pairs(q)
    order = sorted(range(len(pairs)),
                   key=lambda i: (int(v[g.state(pairs[i][0]).index]), i))
    out = []
    prefix = 0
    for i in order:
        d, w = pairs[i]
        out.append((d, prefix))
        prefix += w
    return out


def _penalty_certificate(g: Game, v, surcharge):
    """Exact penalty values if greedy strategies from both sides agree."""
    states = [(s.name, s.owner, s.priority) for s in g.states]

    # upper bound: multi-strategy keeping the best suffix of the sorted order
    up_edges = []
    for q in g.names:
        if g.owner(q) is Owner.P1:
            base = surcharge.get(q, 0)
            ranked = _sorted_succ(g, q, v)
            best_i = 0
            best = None
            for i, (d, prefix) in enumerate(ranked):
                cand = -2 * prefix + int(v[g.state(d).index])
                if best is None or cand > best:
                    best = cand
                    best_i = i
            cost = base + ranked[best_i][1]
            for d, _p in ranked[best_i:]:
                up_edges.append((q, d, cost))
        else:
            for d, _w in g.succ_pairs(q):
                up_edges.append((q, d, 0))
    upper = mp_engine._reachable_cycle_extreme(
        Game(GameKind.MEAN_PAYOFF_PARITY, states, up_edges, den_bound=g.den_bound), "max")

    # lower bound: Player 2 commits to the sorted order (bar states take the
    # order-minimal member, plain Player-2 states the lowest potential)
    lo_edges = []
    for q in g.names:
        if g.owner(q) is Owner.P1:
            base = surcharge.get(q, 0)
            for d, prefix in _sorted_succ(g, q, v):
                lo_edges.append((q, d, base + prefix))
        else:
            best_d = min(g.succ_pairs(q),
                         key=lambda dw: (int(v[g.state(dw[0]).index]), g.state(dw[0]).index))[0]
            lo_edges.append((q, best_d, 0))
    lower = mp_engine._reachable_cycle_extreme(
        Game(GameKind.MEAN_PAYOFF_PARITY, states, lo_edges, den_bound=g.den_bound), "min")

    return upper if upper == lower else None


# ---------------------------------------------------------------------------
# the recursive solver


def _restrict_surcharged(g: Game, surcharge, keep):
    """Cost-preserving subarena restriction: a surviving Player-1 state adds
    the weight of its removed edges to its per-visit surcharge (it must keep
    blocking them to confine the play)."""
    keep = set(keep)
    sub = restrict(g, keep)
    out = {}
    for q in keep:
        if g.owner(q) is Owner.P1:
            lost = sum(w for d, w in g.succ_pairs(q) if d not in keep)
            b = surcharge.get(q, 0) + lost
            if b:
                out[q] = b
    return sub, out


def solve_penalty(g: Game) -> dict:
    """Least worst-case mean penalty of every state (dual of the payoff
    recursion: min/max and the merge direction swap, infinity replaces
    minus infinity)."""
    _require_penalty(g)
    return _ssolve(g, {})


def _ssolve(g: Game, surcharge) -> dict:
    if g.n == 0:
        return {}
    prios = [s.priority for s in g.states]
    p = min(prios)
    names = set(g.names)
    if p % 2 == 0:
        gvals = ssolve_mp(g, surcharge)
        if all(pr == p for pr in prios):
            return dict(gvals)
        col_p = {q for q in g.names if g.priority(q) == p}
        t_set = names - graph_algos.attractor(g, Owner.P1, col_p).set
        f = _ssolve(*_restrict_surcharged(g, surcharge, t_set))
        x = max(list(f.values()) + list(gvals.values()))
        witnesses = ({q for q in t_set if f[q] == x}
                     | {q for q in g.names if gvals[q] == x})
        absorbed = graph_algos.attractor(g, Owner.P2, witnesses).set
        rest = _ssolve(*_restrict_surcharged(g, surcharge, names - absorbed))
        return {q: (x if q in absorbed else min(x, rest[q])) for q in g.names}
    col_p = {q for q in g.names if g.priority(q) == p}
    t_set = names - graph_algos.attractor(g, Owner.P2, col_p).set
    if not t_set:
        return {q: POS_INF for q in g.names}
    f = _ssolve(*_restrict_surcharged(g, surcharge, t_set))
    x = min(f.values())
    witnesses = {q for q in t_set if f[q] == x}
    absorbed = graph_algos.attractor(g, Owner.P1, witnesses).set
    rest = _ssolve(*_restrict_surcharged(g, surcharge, names - absorbed))
    return {q: (x if q in absorbed else max(x, rest[q])) for q in g.names}
