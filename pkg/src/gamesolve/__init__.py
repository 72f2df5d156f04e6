"""Exact solvers for two-player mean-payoff parity and mean-penalty parity
games on finite graphs, with certificates, reductions and a brute-force
oracle for differential testing."""

from .game_core import (Game, GameFormatError, GameKind, GameSolveError,
                        GameStats, NEG_INF, NotASubarena, Owner, POS_INF,
                        State, fix_choices, game_stats, is_finite, make_game,
                        parse_game, parse_value, restrict, serialize_game,
                        value_to_str)
from .graph_algos import (AttractorResult, NoCycle, Scc, attractor,
                          is_subarena, is_trap, max_mean_cycle,
                          min_mean_cycle, scc_decompose)
from .mp_engine import (IterationTrace, MemorylessStrategy,
                        StrategyDomainMismatch, eval_p1_memoryless_mp,
                        eval_p2_memoryless_mp, extract_optimal_memoryless_mp,
                        solve_mp, solve_mp_trace)
from .mpp_solver import (BadComponent, NotOnePlayer, PlayTrace,
                         RoundsStrategy, eval_p1_memoryless_mpp,
                         eval_p2_memoryless_mpp, extract_p2_optimal,
                         one_player_value, rounds_strategy, simulate,
                         solve_mpp)
from .certificates import (EvenNode, Leaf, NoWitness, NpWitness, OddNode,
                           VerifyResult, WitnessFormatError,
                           enumerate_np_witnesses, make_np_witness, verify_conp,
                           verify_np, witness_from_dict, witness_node_count,
                           witness_to_dict)
from .penalty_solver import (DegreeTooLarge, InconsistentPrefix,
                             MismatchedGames, MultiStrategy, bar_sets,
                             eval_multi_strategy, penalty_of_prefix,
                             reduce_exponential, reduce_polynomial,
                             solve_penalty, ssolve_mp)
from .oracle import (SccTooLarge, SpaceTooLarge, StrategySpace,
                     brute_cycle_max_mean, oracle_mp_value, oracle_mpp_value,
                     oracle_penalty_value)
from .io_cli import gen_game, run_cli

__version__ = "0.1.0"
