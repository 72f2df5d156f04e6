"""Command-line surface and the seeded game generator.

Subcommands: solve, verify-np, verify-conp, reduce, simulate, gen,
eval-strategy, eval-multi.  Every subcommand is a pure function of its
input files, flags and seed; results are JSON on stdout (or --out).
Exit codes: 0 success/accept, 1 reject or no witness, 2 usage, parse or
format errors.  GAMESOLVE_MAX_ENUM overrides the oracle enumeration bound.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from . import certificates, mp_engine, mpp_solver, oracle, penalty_solver
from .game_core import (Game, GameFormatError, GameKind, GameSolveError,
                        Owner, parse_game, parse_value, serialize_game,
                        value_to_str)
from .mp_engine import MemorylessStrategy


# ---------------------------------------------------------------------------
# seeded generator


def gen_game(n: int, k: int, w_max: int, d: int, kind: GameKind, seed: int) -> Game:
    """Deterministic pseudorandom game; the seed fully determines the output.

    Drawing scheme (fixed, so frozen seeds stay reproducible): one
    ``random.Random(seed)`` instance draws, in order, per state
    ``s0..s<n-1>``: owner ``1 + randrange(2)`` then priority
    ``randrange(d)``; afterwards, per state: out-degree
    ``min(1 + randrange(k), n)``, a sorted ``rng.sample`` of that many
    distinct successor indices, and per successor (in sorted order) a
    weight ``randrange(-w_max, w_max + 1)``, clamped to
    ``randrange(0, w_max + 1)`` for mean-penalty games.
    """
    if n < 1 or k < 1 or w_max < 0 or d < 1:
        raise GameSolveError("generator needs n >= 1, k >= 1, W >= 0, d >= 1")
    rng = random.Random(seed)
    states = []
    for i in range(n):
        owner = Owner(1 + rng.randrange(2))
        priority = rng.randrange(d)
        states.append((f"s{i}", owner, priority))
    edges = []
    lo = 0 if kind is GameKind.MEAN_PENALTY_PARITY else -w_max
    for i in range(n):
        degree = min(1 + rng.randrange(k), n)
        for j in sorted(rng.sample(range(n), degree)):
            edges.append((f"s{i}", f"s{j}", rng.randrange(lo, w_max + 1)))
    return Game(kind, states, edges)


# ---------------------------------------------------------------------------
# small IO helpers


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _values_json(g: Game, values: dict) -> str:
    ordered = {q: value_to_str(values[q]) for q in g.names}
    return json.dumps({"values": ordered}, indent=2) + "\n"


def parse_strategy_text(text: str) -> dict:
    """Strategy files: one ``q -> q'`` per line, or ``q -> {a,b}`` for
    multi-strategies; blank lines and ``#`` comments are ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise GameFormatError("expected 'state -> successor'", lineno)
        left, right = (part.strip() for part in line.split("->", 1))
        if not left or not right:
            raise GameFormatError("expected 'state -> successor'", lineno)
        if left in out:
            raise GameFormatError(f"duplicate strategy entry for {left!r}", lineno)
        if right.startswith("{") and right.endswith("}"):
            members = [m.strip() for m in right[1:-1].split(",") if m.strip()]
            if not members:
                raise GameFormatError("empty allowed set", lineno)
            out[left] = frozenset(members)
        else:
            out[left] = right
    return out


def _memoryless_from_file(g: Game, path: str, owner: Owner | None = None) -> MemorylessStrategy:
    """Load a deterministic strategy; ``owner`` resolves empty files (legal
    whenever that player owns no states) and cross-checks non-empty ones."""
    mapping = parse_strategy_text(_read(path))
    if any(isinstance(v, frozenset) for v in mapping.values()):
        raise GameFormatError("expected a deterministic strategy, found a multi-strategy")
    unknown = set(mapping) - set(g.names)
    if unknown:
        raise GameFormatError(f"strategy mentions unknown states {sorted(unknown)}")
    owners = {g.owner(q) for q in mapping}
    if len(owners) > 1:
        raise GameFormatError("strategy must cover states of exactly one player")
    if owners:
        found = owners.pop()
        if owner is not None and found is not owner:
            raise GameFormatError(
                f"expected a player {int(owner)} strategy, got player {int(found)}")
        owner = found
    elif owner is None:
        raise GameFormatError("cannot infer the player of an empty strategy")
    return MemorylessStrategy(owner, mapping)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_solve(args) -> int:
    g = parse_game(_read(args.input))
    if args.engine == "recursive":
        if g.kind is GameKind.MEAN_PENALTY_PARITY:
            values = penalty_solver.solve_penalty(g)
        else:
            values = mpp_solver.solve_mpp(g)
    elif args.engine == "oracle":
        if g.kind is GameKind.MEAN_PENALTY_PARITY:
            values = oracle.oracle_penalty_value(g)
        else:
            values = oracle.oracle_mpp_value(g)
    else:  # mp: parity ignored, weights as plain mean-payoff
        values = mp_engine.solve_mp(g)
    _emit(_values_json(g, values), args.out)
    return 0


def _cmd_verify_np(args) -> int:
    g = parse_game(_read(args.input))
    doc = json.loads(_read(args.witness))
    witness = certificates.witness_from_dict(doc)
    threshold = _threshold(args.threshold)
    result = certificates.verify_np(g, args.state, threshold, witness)
    if result.accepted:
        _emit(json.dumps({"result": "accept"}, indent=2) + "\n", args.out)
        return 0
    _emit(json.dumps({"result": "reject", "reason": result.reason}, indent=2) + "\n",
          args.out)
    return 1


def _cmd_verify_conp(args) -> int:
    g = parse_game(_read(args.input))
    strat = _memoryless_from_file(g, args.strategy, owner=Owner.P2)
    threshold = _threshold(args.threshold)
    result = certificates.verify_conp(g, args.state, threshold, strat)
    if result.accepted:
        _emit(json.dumps({"result": "accept"}, indent=2) + "\n", args.out)
        return 0
    _emit(json.dumps({"result": "reject", "reason": result.reason}, indent=2) + "\n",
          args.out)
    return 1


def _threshold(text: str) -> Fraction:
    value = parse_value(text)
    if not isinstance(value, Fraction):
        raise GameFormatError("threshold must be finite")
    return value


def _cmd_reduce(args) -> int:
    g = parse_game(_read(args.input))
    if args.kind == "exp":
        reduced = penalty_solver.reduce_exponential(g)
    else:
        reduced = penalty_solver.reduce_polynomial(g)
    _emit(serialize_game(reduced), args.output)
    return 0


def _cmd_simulate(args) -> int:
    g = parse_game(_read(args.input))
    s1 = _memoryless_from_file(g, args.strategy1, owner=Owner.P1) if args.strategy1 else None
    s2 = _memoryless_from_file(g, args.strategy2, owner=Owner.P2) if args.strategy2 else None
    trace = mpp_solver.simulate(g, s1, s2, args.horizon, args.start)
    payload = {
        "trace": trace.states,
        "prefix_means": [None if m is None else value_to_str(m) for m in trace.prefix_means],
        "min_priority_seen": trace.min_priority_seen,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_gen(args) -> int:
    kind = GameKind(args.kind)
    g = gen_game(args.states, args.degree, args.max_weight, args.priorities,
                 kind, args.seed)
    _emit(serialize_game(g), args.out)
    return 0


def _cmd_eval_strategy(args) -> int:
    g = parse_game(_read(args.input))
    strat = _memoryless_from_file(g, args.strategy)
    if g.kind is GameKind.MEAN_PENALTY_PARITY:
        if strat.owner is not Owner.P1:
            raise GameFormatError("penalty games only evaluate Player 1 strategies")
        multi = penalty_solver.MultiStrategy(
            {q: frozenset({t}) for q, t in strat.choice.items()})
        values = penalty_solver.eval_multi_strategy(g, multi)
    elif strat.owner is Owner.P1:
        values = mpp_solver.eval_p1_memoryless_mpp(g, strat)
    else:
        values = mpp_solver.eval_p2_memoryless_mpp(g, strat)
    _emit(_values_json(g, values), args.out)
    return 0


def _cmd_eval_multi(args) -> int:
    g = parse_game(_read(args.input))
    mapping = parse_strategy_text(_read(args.strategy))
    allowed = {q: (v if isinstance(v, frozenset) else frozenset({v}))
               for q, v in mapping.items()}
    values = penalty_solver.eval_multi_strategy(g, penalty_solver.MultiStrategy(allowed))
    _emit(_values_json(g, values), args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing / dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamesolve",
        description="Exact solver for mean-payoff parity and mean-penalty parity games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute exact state values")
    p.add_argument("--input", required=True)
    p.add_argument("--engine", choices=["recursive", "oracle", "mp"], default="recursive")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify-np", help="check an NP witness for val(q) >= x")
    p.add_argument("--input", required=True)
    p.add_argument("--witness", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--threshold", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_np)

    p = sub.add_parser("verify-conp", help="check a Player-2 strategy for val(q) < x")
    p.add_argument("--input", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--threshold", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_conp)

    p = sub.add_parser("reduce", help="emit a mean-payoff parity game encoding a penalty game")
    p.add_argument("--kind", choices=["exp", "poly"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("simulate", help="drive a play and report prefix means")
    p.add_argument("--input", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--strategy1")
    p.add_argument("--strategy2")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("gen", help="generate a seeded random game")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--priorities", type=int, required=True)
    p.add_argument("--kind", choices=[k.value for k in GameKind],
                   default=GameKind.MEAN_PAYOFF_PARITY.value)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("eval-strategy", help="worst-case value of a memoryless strategy")
    p.add_argument("--input", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval_strategy)

    p = sub.add_parser("eval-multi", help="worst-case mean penalty of a multi-strategy")
    p.add_argument("--input", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval_multi)
    return parser


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except certificates.NoWitness as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GameSolveError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
