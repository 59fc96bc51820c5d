"""Bandit-driven antenna-state selection for interference alignment in the
3-user 2x2 MIMO interference channel."""

from .channel import ChannelPool, ScenarioConfig, arm_index, decode_arm, generate_pool
from .engine import (
    Policy,
    RunTrace,
    TrueMeans,
    precompute_true_means,
    regret_trace,
    run_combinational,
    run_distributed,
    sweep,
)
from .ia import IASolution, LinkMetrics, chordal_distance, solve_ia, sum_rate, user_rate

__version__ = "0.1.0"

__all__ = [
    "ChannelPool",
    "ScenarioConfig",
    "arm_index",
    "decode_arm",
    "generate_pool",
    "Policy",
    "RunTrace",
    "TrueMeans",
    "precompute_true_means",
    "regret_trace",
    "run_combinational",
    "run_distributed",
    "sweep",
    "IASolution",
    "LinkMetrics",
    "chordal_distance",
    "solve_ia",
    "sum_rate",
    "user_rate",
    "__version__",
]
