"""Attractors, traps, subarena checks, SCC decomposition and exact mean cycles.

Everything here is a pure function of an immutable game; all arithmetic on
cycle means is exact (integer tables, Fraction results).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .game_core import Game, GameSolveError, Owner


class NoCycle(GameSolveError):
    """The component contains no edge, hence no cycle."""


@dataclass(frozen=True)
class AttractorResult:
    set: frozenset
    strategy: dict          # attracting-player states in set minus target
    rank: dict              # BFS level at which each state entered


@dataclass(frozen=True)
class Scc:
    states: tuple
    has_edge: bool          # False only for a single state without self-loop


def attractor(g: Game, player: Owner, target: Iterable[str]) -> AttractorResult:
    """States from which ``player`` can force a visit to ``target``.

    Worklist computation of the backward fixed point.  ``rank`` records the
    level of the naive layered iteration (target has rank 0); the returned
    memoryless strategy strictly decreases it, so every play following the
    strategy reaches the target within |V| steps.
    """
    target = set(target)
    unknown = target - set(g.names)
    if unknown:
        raise GameSolveError(f"attractor: unknown states {sorted(unknown)}")
    in_set = {q: False for q in g.names}
    rank = {}
    strategy = {}
    # opponent states fall in once all their successors are in
    remaining = {q: len(g.successors(q)) for q in g.names if g.owner(q) is not player}
    queue = deque()
    for q in g.names:  # declaration order keeps ranks and strategies deterministic
        if q in target:
            in_set[q] = True
            rank[q] = 0
            queue.append(q)
    while queue:
        u = queue.popleft()
        for p in g.predecessors(u):
            if in_set[p]:
                continue
            if g.owner(p) is player:
                in_set[p] = True
                rank[p] = rank[u] + 1
                strategy[p] = u
                queue.append(p)
            else:
                remaining[p] -= 1
                if remaining[p] == 0:
                    in_set[p] = True
                    rank[p] = rank[u] + 1
                    queue.append(p)
    return AttractorResult(frozenset(q for q in g.names if in_set[q]), strategy, rank)


def is_subarena(g: Game, s: Iterable[str]) -> bool:
    s = set(s)
    return all(any(d in s for d in g.successors(q)) for q in s)


def is_trap(g: Game, player: Owner, s: Iterable[str]) -> bool:
    """True iff ``s`` is a subarena the opponent can keep the play inside.

    A trap for ``player``: states of ``player`` inside ``s`` have all their
    successors inside, and the opponent keeps at least one move inside.
    """
    s = set(s)
    for q in s:
        succ = g.successors(q)
        if g.owner(q) is player:
            if not all(d in s for d in succ):
                return False
        else:
            if not any(d in s for d in succ):
                return False
    return True


def scc_decompose(g: Game, s: Iterable[str] | None = None) -> list[Scc]:
    """Maximal SCCs of the subgraph induced by ``s``, in reverse topological
    order (every edge between distinct components points to an earlier one).

    Iterative Tarjan; component member lists follow declaration order.
    """
    if s is None:
        nodes = list(g.names)
    else:
        nodes = [q for q in g.names if q in set(s)]
    in_s = set(nodes)
    succ = {q: [d for d in g.successors(q) if d in in_s] for q in nodes}

    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    counter = 0
    out: list[Scc] = []

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            while ei < len(succ[v]):
                w = succ[v][ei]
                ei += 1
                if w not in index:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort(key=lambda q: g.state(q).index)
                if len(comp) == 1:
                    has_edge = comp[0] in succ[comp[0]]
                else:
                    has_edge = True
                out.append(Scc(tuple(comp), has_edge))
            if work:
                u, _ = work[-1]
                lowlink[u] = min(lowlink[u], lowlink[v])
    return out


def max_mean_cycle(g: Game, scc: Scc) -> Fraction:
    """Exact maximum cycle mean inside one SCC, by Karp's characterisation
    ``max_v min_j (D_n(v) - D_j(v)) / (n - j)`` over longest j-edge walks
    from a fixed source (the member with the lowest declaration index).
    """
    return _karp(g, scc, maximize=True)


def min_mean_cycle(g: Game, scc: Scc) -> Fraction:
    """Minimum cycle mean; Karp on negated weights."""
    return -_karp(g, scc, maximize=True, negate=True)


def _karp(g: Game, scc: Scc, maximize: bool, negate: bool = False) -> Fraction:
    if not scc.has_edge:
        raise NoCycle(f"component {scc.states} has no cycle")
    nodes = list(scc.states)
    pos = {q: i for i, q in enumerate(nodes)}
    n = len(nodes)
    adj = [[] for _ in nodes]
    for q in nodes:
        for d, w in g.succ_pairs(q):
            if d in pos:
                adj[pos[q]].append((pos[d], -w if negate else w))

    NONE = None
    # D[j][v]: best weight of a walk with exactly j edges from the source
    source = min(range(n), key=lambda i: g.state(nodes[i]).index)
    prev = [NONE] * n
    prev[source] = 0
    table = [prev]
    for _j in range(n):
        cur = [NONE] * n
        for u in range(n):
            du = table[-1][u]
            if du is NONE:
                continue
            for v, w in adj[u]:
                c = du + w
                if cur[v] is NONE or c > cur[v]:
                    cur[v] = c
        table.append(cur)

    best = None
    dn = table[n]
    for v in range(n):
        if dn[v] is NONE:
            continue
        worst = None  # min over j of (D_n - D_j)/(n - j)
        for j in range(n):
            dj = table[j][v]
            if dj is NONE:
                continue
            cand = Fraction(dn[v] - dj, n - j)
            if worst is None or cand < worst:
                worst = cand
        if worst is not None and (best is None or worst > best):
            best = worst
    if best is None:
        raise NoCycle(f"component {scc.states} has no cycle")
    return best


def reachable_from(g: Game, start: str, within: Iterable[str] | None = None) -> frozenset:
    """Forward-reachable set (including ``start``) in the induced subgraph."""
    allowed = set(g.names) if within is None else set(within)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for d in g.successors(u):
            if d in allowed and d not in seen:
                seen.add(d)
                queue.append(d)
    return frozenset(seen)
