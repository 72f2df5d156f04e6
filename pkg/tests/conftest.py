import pytest

from gamesolve import GameKind, gen_game, make_game, parse_game

FIG1_TEXT = """mppg v1
kind mean-payoff-parity
state q1 owner=1 priority=1
state q2 owner=1 priority=0
edge q1 q1 weight=1
edge q1 q2 weight=0
edge q2 q1 weight=0
"""

# Reconstruction of the delayed-self-loop penalty example: Player 1 must
# block the weight-2 self-loop now and then to force visits to the even
# state, and can do so ever more rarely, so the optimal mean penalty is 0.
FIG4_TEXT = """mppg v1
kind mean-penalty-parity
state q1 owner=1 priority=1
state q2 owner=2 priority=0
edge q1 q1 weight=2
edge q1 q2 weight=0
edge q2 q1 weight=0
"""


@pytest.fixture
def fig1():
    return parse_game(FIG1_TEXT)


@pytest.fixture
def fig4():
    return parse_game(FIG4_TEXT)


def payoff_games(count, start_seed=0, n_max=6, k=3, w=4, d=3):
    """Deterministic stream of seeded mean-payoff parity games."""
    out = []
    for seed in range(start_seed, start_seed + count):
        n = 2 + seed % (n_max - 1)
        out.append(gen_game(n, k, w, d, GameKind.MEAN_PAYOFF_PARITY, seed))
    return out


def penalty_games(count, start_seed=0, n_max=5, k=3, w=3, d=3):
    out = []
    for seed in range(start_seed, start_seed + count):
        n = 2 + seed % (n_max - 1)
        out.append(gen_game(n, k, w, d, GameKind.MEAN_PENALTY_PARITY, seed))
    return out


def naive_attractor_set(g, player, target):
    """Literal layered fixed point A^{i+1} = A^i u {controlled predecessors}."""
    reached = set(target)
    while True:
        grown = set()
        for q in g.names:
            if q in reached:
                continue
            succ = g.successors(q)
            if g.owner(q) is player:
                if any(s in reached for s in succ):
                    grown.add(q)
            elif all(s in reached for s in succ):
                grown.add(q)
        if not grown:
            return reached
        reached |= grown


def reweighted(g, shift=0, scale=1):
    """Copy of the game with every weight mapped to scale*w + shift."""
    states = [(s.name, s.owner, s.priority) for s in g.states]
    edges = [(a, b, scale * w + shift) for a, b, w in g.edges()]
    return make_game(g.kind, states, edges)
