"""NP witnesses and coNP certificates for the value problem.

An NP witness for ``val(q0) >= x`` is a top trap containing q0 plus a tree
that mirrors the recursive check: at a subarena whose minimal priority is
even the witness supplies a memoryless Player-1 strategy whose pure
mean-payoff value is at least x everywhere, and recurses outside the
Player-1 attractor of the minimal priority; at an odd level it supplies a
non-empty Player-2 trap avoiding the Player-2 attractor of the minimal
priority, and recurses both inside the trap and outside its Player-1
attractor.  The verifier recomputes every derived set itself; the witness
carries only the guessed objects.

A coNP certificate for ``val(q0) < x`` is just a memoryless Player-2
strategy whose best Player-1 response stays below x.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import graph_algos, mp_engine, mpp_solver
from .game_core import Game, GameSolveError, Owner, parse_value, restrict, value_to_str
from .mp_engine import MemorylessStrategy


class NoWitness(GameSolveError):
    """No state reaches the requested threshold."""


class WitnessFormatError(GameSolveError):
    """Structurally invalid serialized witness."""


@dataclass(frozen=True)
class Leaf:
    pass


@dataclass(frozen=True)
class EvenNode:
    strategy: MemorylessStrategy
    child: object


@dataclass(frozen=True)
class OddNode:
    trap: frozenset
    child_in: object
    child_rest: object


@dataclass(frozen=True)
class NpWitness:
    threshold: Fraction
    top_trap: frozenset
    root: object


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    reason: str | None = None

    def __bool__(self):
        return self.accepted


def _reject(reason: str) -> VerifyResult:
    return VerifyResult(False, reason)


ACCEPT = VerifyResult(True)


def verify_np(g: Game, q0: str, x, w: NpWitness) -> VerifyResult:
    """Deterministic polynomial check of an NP witness for val(q0) >= x."""
    x = Fraction(x)
    if q0 not in g.names:
        return _reject("unknown-state")
    trap = set(w.top_trap)
    if not trap <= set(g.names):
        return _reject("unknown-state-in-trap")
    if q0 not in trap:
        return _reject("q0-not-in-trap")
    if not graph_algos.is_trap(g, Owner.P2, trap):
        return _reject("not-a-trap")
    return _verify_node(restrict(g, trap), x, w.root)


def _verify_node(gs: Game, x: Fraction, node) -> VerifyResult:
    if gs.n == 0:
        return ACCEPT if isinstance(node, Leaf) else _reject("malformed-tree")
    p = min(s.priority for s in gs.states)
    col_p = {q for q in gs.names if gs.priority(q) == p}
    if p % 2 == 0:
        if not isinstance(node, EvenNode):
            return _reject("wrong-parity-node") if isinstance(node, OddNode) else _reject("malformed-tree")
        try:
            values = mp_engine.eval_p1_memoryless_mp(gs, node.strategy)
        except mp_engine.StrategyDomainMismatch:
            return _reject("malformed-strategy")
        if any(values[q] < x for q in gs.names):
            return _reject("strategy-below-threshold")
        keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, col_p).set
        return _verify_node(restrict(gs, keep), x, node.child)
    if not isinstance(node, OddNode):
        return _reject("wrong-parity-node") if isinstance(node, EvenNode) else _reject("malformed-tree")
    allowed = set(gs.names) - graph_algos.attractor(gs, Owner.P2, col_p).set
    trap = set(node.trap)
    if not trap:
        return _reject("empty-trap-guess")
    if not trap <= allowed:
        return _reject("trap-outside-region")
    g_allowed = restrict(gs, allowed)
    if not graph_algos.is_trap(g_allowed, Owner.P2, trap):
        return _reject("not-a-trap")
    inner = _verify_node(restrict(g_allowed, trap), x, node.child_in)
    if not inner:
        return inner
    keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, trap).set
    return _verify_node(restrict(gs, keep), x, node.child_rest)


def make_np_witness(g: Game, x) -> NpWitness:
    """Witness accepted by verify_np for every q0 with val(q0) >= x."""
    x = Fraction(x)
    values = mpp_solver.solve_mpp(g)
    top = frozenset(q for q in g.names if values[q] >= x)
    if not top:
        raise NoWitness(f"no state has value >= {value_to_str(x)}")
    return NpWitness(x, top, _build_node(restrict(g, top), x))


def _build_node(gs: Game, x: Fraction):
    if gs.n == 0:
        return Leaf()
    p = min(s.priority for s in gs.states)
    col_p = {q for q in gs.names if gs.priority(q) == p}
    if p % 2 == 0:
        sigma, _tau = mp_engine.extract_optimal_memoryless_mp(gs)
        keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, col_p).set
        return EvenNode(sigma, _build_node(restrict(gs, keep), x))
    allowed = set(gs.names) - graph_algos.attractor(gs, Owner.P2, col_p).set
    g_allowed = restrict(gs, allowed)
    sub_values = mpp_solver.solve_mpp(g_allowed)
    trap = frozenset(q for q in g_allowed.names if sub_values[q] >= x)
    child_in = _build_node(restrict(g_allowed, trap), x)
    keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, trap).set
    child_rest = _build_node(restrict(gs, keep), x)
    return OddNode(trap, child_in, child_rest)


def verify_conp(g: Game, q0: str, x, strat: MemorylessStrategy) -> VerifyResult:
    """Accepts iff the Player-2 strategy keeps q0 strictly below x, which
    certifies val(q0) < x."""
    x = Fraction(x)
    if q0 not in g.names:
        return _reject("unknown-state")
    values = mpp_solver.eval_p2_memoryless_mpp(g, strat)
    if values[q0] < x:
        return ACCEPT
    return _reject("not-below-threshold")


def witness_node_count(w: NpWitness) -> int:
    def count(node):
        if isinstance(node, Leaf):
            return 1
        if isinstance(node, EvenNode):
            return 1 + count(node.child)
        return 1 + count(node.child_in) + count(node.child_rest)
    return count(w.root)


# ---------------------------------------------------------------------------
# exhaustive witness enumeration (tiny games only; used to certify rejection)


def enumerate_np_witnesses(g: Game, q0: str, x):
    """All syntactically valid witnesses rooted at a trap containing q0."""
    x = Fraction(x)
    names = list(g.names)
    for bits in range(1, 1 << len(names)):
        top = frozenset(names[i] for i in range(len(names)) if bits >> i & 1)
        if q0 not in top or not graph_algos.is_trap(g, Owner.P2, top):
            continue
        for root in _enumerate_nodes(restrict(g, top)):
            yield NpWitness(x, top, root)


def _enumerate_nodes(gs: Game):
    if gs.n == 0:
        return [Leaf()]
    p = min(s.priority for s in gs.states)
    col_p = {q for q in gs.names if gs.priority(q) == p}
    out = []
    if p % 2 == 0:
        keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, col_p).set
        children = _enumerate_nodes(restrict(gs, keep))
        p1_states = gs.states_of(Owner.P1)
        option_lists = [gs.successors(q) for q in p1_states]
        for picks in itertools.product(*option_lists):
            sigma = MemorylessStrategy(Owner.P1, dict(zip(p1_states, picks)))
            for child in children:
                out.append(EvenNode(sigma, child))
        return out
    allowed = sorted(set(gs.names) - graph_algos.attractor(gs, Owner.P2, col_p).set,
                     key=lambda q: gs.state(q).index)
    if not allowed:
        return out
    g_allowed = restrict(gs, allowed)
    for bits in range(1, 1 << len(allowed)):
        trap = frozenset(allowed[i] for i in range(len(allowed)) if bits >> i & 1)
        if not graph_algos.is_trap(g_allowed, Owner.P2, trap):
            continue
        inner_nodes = _enumerate_nodes(restrict(g_allowed, trap))
        keep = set(gs.names) - graph_algos.attractor(gs, Owner.P1, trap).set
        rest_nodes = _enumerate_nodes(restrict(gs, keep))
        for a in inner_nodes:
            for b in rest_nodes:
                out.append(OddNode(trap, a, b))
    return out


# ---------------------------------------------------------------------------
# serialization (schema shared with the CLI)


def witness_to_dict(w: NpWitness, g: Game) -> dict:
    order = {q: i for i, q in enumerate(g.names)}

    def names_sorted(group):
        return sorted(group, key=order.get)

    def node_to_dict(node):
        if isinstance(node, Leaf):
            return None
        if isinstance(node, EvenNode):
            return {"parity": "even",
                    "strategy": {q: node.strategy.choice[q]
                                 for q in names_sorted(node.strategy.choice)},
                    "children": [node_to_dict(node.child)]}
        return {"parity": "odd",
                "trapT": names_sorted(node.trap),
                "children": [node_to_dict(node.child_in), node_to_dict(node.child_rest)]}

    return {"threshold": value_to_str(w.threshold),
            "trap": names_sorted(w.top_trap),
            "node": node_to_dict(w.root)}


def witness_from_dict(doc) -> NpWitness:
    if not isinstance(doc, dict):
        raise WitnessFormatError("witness document must be an object")
    try:
        threshold = parse_value(doc["threshold"])
        trap = frozenset(doc["trap"])
    except (KeyError, TypeError) as exc:
        raise WitnessFormatError(f"missing or invalid witness field: {exc}")
    if not isinstance(threshold, Fraction):
        raise WitnessFormatError("threshold must be finite")

    def node_from(docn):
        if docn is None:
            return Leaf()
        if not isinstance(docn, dict) or "parity" not in docn:
            raise WitnessFormatError("witness node must be null or carry a parity")
        children = docn.get("children", [])
        if docn["parity"] == "even":
            if len(children) != 1 or not isinstance(docn.get("strategy"), dict):
                raise WitnessFormatError("even node needs a strategy and one child")
            strat = MemorylessStrategy(Owner.P1, dict(docn["strategy"]))
            return EvenNode(strat, node_from(children[0]))
        if docn["parity"] == "odd":
            if len(children) != 2 or not isinstance(docn.get("trapT"), list):
                raise WitnessFormatError("odd node needs trapT and two children")
            return OddNode(frozenset(docn["trapT"]),
                           node_from(children[0]), node_from(children[1]))
        raise WitnessFormatError(f"unknown parity {docn['parity']!r}")

    return NpWitness(threshold, trap, node_from(doc.get("node")))
