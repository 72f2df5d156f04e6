"""Game data model, validation, subarena restriction and the .mppg text format.

A game is a finite directed graph whose states are split between Player 1
and Player 2.  Every state carries a non-negative priority, every edge an
integer weight, and every state has at least one outgoing edge.  The same
structure serves as a mean-payoff parity game or (with non-negative
weights) as a mean-penalty parity game, selected by ``kind``.

Games are immutable after construction and safe to share between threads.
State identity is the declared name; declaration order fixes the dense
index used by the numeric kernels and all deterministic tie-breaking.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

# Values of these games are exact rationals or one of the two infinities.
# Fractions compare exactly against float infinities, so plain math.inf /
# -math.inf serve as PosInf / NegInf without any numeric fuzz.
NEG_INF = float("-inf")
POS_INF = float("inf")

Value = object  # Fraction | NEG_INF | POS_INF


class GameSolveError(Exception):
    """Base class for all errors raised by this package."""


class GameFormatError(GameSolveError):
    """Invalid .mppg input; carries the offending line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotASubarena(GameSolveError):
    """Requested restriction would leave a state without a successor."""


class Owner(enum.IntEnum):
    P1 = 1
    P2 = 2

    @property
    def opponent(self) -> "Owner":
        return Owner.P2 if self is Owner.P1 else Owner.P1


class GameKind(enum.Enum):
    MEAN_PAYOFF_PARITY = "mean-payoff-parity"
    MEAN_PENALTY_PARITY = "mean-penalty-parity"


@dataclass(frozen=True)
class State:
    index: int
    name: str
    owner: Owner
    priority: int


@dataclass(frozen=True)
class GameStats:
    w_max: int        # max(1, |w(e)|)
    max_out_degree: int
    priority_count: int
    size: int         # |V| + |E| * ceil(log2 W)


class Game:
    """Immutable weighted two-player game graph.

    ``states`` is a sequence of ``(name, owner, priority)`` triples and
    ``edges`` a sequence of ``(src_name, dst_name, weight)`` triples.
    Successor order is declaration order and is the tie-break order used
    by every algorithm in the package.

    ``den_bound`` is an optional promise that every mean-payoff value of
    this game (and of any subarena of it) is a rational with denominator
    at most that bound.  It defaults to ``|V|``; the penalty reductions
    set it to the original state count, which the cycle structure of the
    reduced games justifies.  Restriction keeps the promise valid.
    """

    def __init__(self, kind: GameKind, states: Sequence, edges: Sequence,
                 den_bound: int | None = None):
        self.kind = kind
        built = []
        index = {}
        for name, owner, priority in states:
            if not isinstance(priority, int) or priority < 0:
                raise GameFormatError(f"priority of {name!r} must be a non-negative integer")
            if name in index:
                raise GameFormatError(f"duplicate state name {name!r}")
            index[name] = len(built)
            built.append(State(len(built), name, Owner(owner), priority))
        self.states: tuple[State, ...] = tuple(built)
        self.names: tuple[str, ...] = tuple(s.name for s in built)
        self._index = index

        succ: list[list[tuple[int, int]]] = [[] for _ in built]
        seen_edges = set()
        for src, dst, weight in edges:
            if src not in index:
                raise GameFormatError(f"edge source {src!r} is not a declared state")
            if dst not in index:
                raise GameFormatError(f"edge target {dst!r} is not a declared state")
            if not isinstance(weight, int):
                raise GameFormatError(f"edge {src}->{dst} weight must be an integer")
            if kind is GameKind.MEAN_PENALTY_PARITY and weight < 0:
                raise GameFormatError(f"negative weight on edge {src}->{dst} in a mean-penalty game")
            key = (index[src], index[dst])
            if key in seen_edges:
                raise GameFormatError(f"duplicate edge {src}->{dst}")
            seen_edges.add(key)
            succ[index[src]].append((index[dst], weight))
        for st in built:
            if not succ[st.index]:
                raise GameFormatError(f"state without successor: {st.name!r}")
        self._succ: tuple[tuple[tuple[int, int], ...], ...] = tuple(tuple(s) for s in succ)

        pred: list[list[int]] = [[] for _ in built]
        for st in built:
            for dst, _w in self._succ[st.index]:
                pred[dst].append(st.index)
        self._pred = tuple(tuple(p) for p in pred)

        n = len(built)
        self.den_bound = n if den_bound is None else min(den_bound, n) if n else 0
        self._arrays_cache = None

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.states)

    def state(self, name: str) -> State:
        return self.states[self._index[name]]

    def owner(self, name: str) -> Owner:
        return self.states[self._index[name]].owner

    def priority(self, name: str) -> int:
        return self.states[self._index[name]].priority

    def successors(self, name: str) -> tuple[str, ...]:
        return tuple(self.names[d] for d, _w in self._succ[self._index[name]])

    def succ_pairs(self, name: str) -> tuple[tuple[str, int], ...]:
        return tuple((self.names[d], w) for d, w in self._succ[self._index[name]])

    def predecessors(self, name: str) -> tuple[str, ...]:
        return tuple(self.names[p] for p in self._pred[self._index[name]])

    def weight(self, src: str, dst: str) -> int:
        j = self._index[dst]
        for d, w in self._succ[self._index[src]]:
            if d == j:
                return w
        raise KeyError(f"no edge {src}->{dst}")

    def has_edge(self, src: str, dst: str) -> bool:
        j = self._index[dst]
        return any(d == j for d, _w in self._succ[self._index[src]])

    def edges(self):
        for st in self.states:
            for d, w in self._succ[st.index]:
                yield st.name, self.names[d], w

    def edge_count(self) -> int:
        return sum(len(s) for s in self._succ)

    def states_of(self, owner: Owner) -> tuple[str, ...]:
        return tuple(s.name for s in self.states if s.owner is owner)

    def priorities(self) -> tuple[int, ...]:
        return tuple(sorted({s.priority for s in self.states}))

    def index_arrays(self):
        """CSR-style int64 adjacency for the iteration kernels (cached)."""
        if self._arrays_cache is None:
            import numpy as np
            start = np.zeros(self.n + 1, dtype=np.int64)
            for st in self.states:
                start[st.index + 1] = start[st.index] + len(self._succ[st.index])
            dst = np.empty(start[-1], dtype=np.int64)
            wt = np.empty(start[-1], dtype=np.int64)
            pos = 0
            for st in self.states:
                for d, w in self._succ[st.index]:
                    dst[pos] = d
                    wt[pos] = w
                    pos += 1
            is_p1 = np.array([s.owner is Owner.P1 for s in self.states], dtype=np.bool_)
            self._arrays_cache = (start, dst, wt, is_p1)
        return self._arrays_cache


def make_game(kind: GameKind, states, edges, den_bound=None) -> Game:
    return Game(kind, states, edges, den_bound=den_bound)


def restrict(g: Game, keep: Iterable[str]) -> Game:
    """Restriction of ``g`` to the subarena ``keep`` (declaration order kept).

    Raises NotASubarena if some kept state loses all its successors.
    """
    keep = set(keep)
    unknown = keep - set(g.names)
    if unknown:
        raise GameSolveError(f"restrict: unknown states {sorted(unknown)}")
    for name in keep:
        if not any(d in keep for d in g.successors(name)):
            raise NotASubarena(f"state {name!r} has no successor inside the set")
    states = [(s.name, s.owner, s.priority) for s in g.states if s.name in keep]
    edges = [(a, b, w) for a, b, w in g.edges() if a in keep and b in keep]
    return Game(g.kind, states, edges, den_bound=g.den_bound)


def fix_choices(g: Game, choice: Mapping[str, str]) -> Game:
    """Replace the outgoing edges of each state in ``choice`` by its chosen one."""
    for q, t in choice.items():
        if t not in g.successors(q):
            raise GameSolveError(f"fix_choices: {t!r} is not a successor of {q!r}")
    edges = []
    for a, b, w in g.edges():
        if a in choice and b != choice[a]:
            continue
        edges.append((a, b, w))
    states = [(s.name, s.owner, s.priority) for s in g.states]
    return Game(g.kind, states, edges, den_bound=g.den_bound)


def game_stats(g: Game) -> GameStats:
    w_max = max([1] + [abs(w) for _a, _b, w in g.edges()])
    k = max((len(g.successors(s.name)) for s in g.states), default=0)
    d = len({s.priority for s in g.states})
    size = g.n + g.edge_count() * (w_max - 1).bit_length()  # exact ceil(log2 W)
    return GameStats(w_max, k, d, size)


# -- value formatting ----------------------------------------------------

def value_to_str(v) -> str:
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "inf"
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def parse_value(text: str):
    text = text.strip()
    if text == "-inf":
        return NEG_INF
    if text in ("inf", "+inf"):
        return POS_INF
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise GameFormatError(f"cannot parse value {text!r}") from exc


def is_finite(v) -> bool:
    return v != NEG_INF and v != POS_INF


# -- text format ----------------------------------------------------------
#
# UTF-8, line oriented, '#' starts a comment:
#   mppg v1
#   kind mean-payoff-parity | mean-penalty-parity
#   state <name> owner=<1|2> priority=<uint>     (all state lines first)
#   edge <src> <dst> weight=<int>

def parse_game(text: str) -> Game:
    states = []
    edges = []
    header_done = 0
    kind = None
    seen_edge = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if header_done == 0:
            if tokens != ["mppg", "v1"]:
                raise GameFormatError("expected header 'mppg v1'", lineno)
            header_done = 1
            continue
        if header_done == 1:
            if len(tokens) != 2 or tokens[0] != "kind":
                raise GameFormatError("expected 'kind <mean-payoff-parity|mean-penalty-parity>'", lineno)
            try:
                kind = GameKind(tokens[1])
            except ValueError:
                raise GameFormatError(f"unknown game kind {tokens[1]!r}", lineno)
            header_done = 2
            continue
        if tokens[0] == "state":
            if seen_edge:
                raise GameFormatError("state declared after an edge", lineno)
            if len(tokens) != 4:
                raise GameFormatError("expected 'state <name> owner=<1|2> priority=<uint>'", lineno)
            name = tokens[1]
            owner = _parse_kv(tokens[2], "owner", lineno)
            if owner not in ("1", "2"):
                raise GameFormatError("owner must be 1 or 2", lineno)
            prio = _parse_kv(tokens[3], "priority", lineno)
            try:
                prio = int(prio)
            except ValueError:
                raise GameFormatError("priority must be an unsigned integer", lineno)
            if prio < 0:
                raise GameFormatError("priority must be non-negative", lineno)
            states.append((name, Owner(int(owner)), prio, lineno))
        elif tokens[0] == "edge":
            seen_edge = True
            if len(tokens) != 4:
                raise GameFormatError("expected 'edge <src> <dst> weight=<int>'", lineno)
            wtext = _parse_kv(tokens[3], "weight", lineno)
            try:
                weight = int(wtext)
            except ValueError:
                raise GameFormatError("weight must be an integer", lineno)
            edges.append((tokens[1], tokens[2], weight, lineno))
        else:
            raise GameFormatError(f"unknown directive {tokens[0]!r}", lineno)
    if header_done < 2:
        raise GameFormatError("missing header or kind line", 1)

    # Re-run the structural validation with line-number context.
    names = set()
    for name, _o, _p, lineno in states:
        if name in names:
            raise GameFormatError(f"duplicate state name {name!r}", lineno)
        names.add(name)
    seen = set()
    for src, dst, w, lineno in edges:
        if src not in names:
            raise GameFormatError(f"edge source {src!r} is not a declared state", lineno)
        if dst not in names:
            raise GameFormatError(f"edge target {dst!r} is not a declared state", lineno)
        if (src, dst) in seen:
            raise GameFormatError(f"duplicate edge {src}->{dst}", lineno)
        if kind is GameKind.MEAN_PENALTY_PARITY and w < 0:
            raise GameFormatError(f"negative weight on edge {src}->{dst} in a mean-penalty game", lineno)
        seen.add((src, dst))
    return Game(kind, [(n, o, p) for n, o, p, _ in states],
                [(a, b, w) for a, b, w, _ in edges])


def _parse_kv(token: str, key: str, lineno: int) -> str:
    if not token.startswith(key + "="):
        raise GameFormatError(f"expected '{key}=...' got {token!r}", lineno)
    return token[len(key) + 1:]


def serialize_game(g: Game) -> str:
    lines = ["mppg v1", f"kind {g.kind.value}"]
    for s in g.states:
        lines.append(f"state {s.name} owner={int(s.owner)} priority={s.priority}")
    for a, b, w in g.edges():
        lines.append(f"edge {a} {b} weight={w}")
    return "\n".join(lines) + "\n"
