"""Deadline-aware scheduling of interdependent media packets over Markov channels."""

from .channel import (
    ChannelFormatError,
    ChannelModel,
    ChannelState,
    ChannelValidationError,
    CostModel,
    averaged_channel,
    cost_convex,
    cost_linear,
    dump_channel,
    load_channel,
    marginal_cost,
    sample_path,
    validate_channel,
)
from .media import (
    MediaTrace,
    Packet,
    TraceFormatError,
    TraceValidationError,
    ancestors,
    descendants,
    dump_trace,
    load_trace,
    synth_trace,
    validate_trace,
)
from .oracle import ExhaustiveSolution, enumerate_single_schedules, solve_exhaustive
from .priority import (
    PriorityGraph,
    StateTree,
    build_priority_graph,
    build_state_tree,
    disconnection_degree,
    higher_priority,
    pg_to_dot,
    priority_pairs,
    reachable_states,
    roots,
    tree_node_sets,
    tree_to_dot,
)
from .scenarios import (
    SCENARIOS,
    save_scenario,
    standard_scenario,
    volatile_scenario,
)
from .single_packet import ThresholdPolicy, act_single, solve_single
from .sim import (
    ConstantChannelPolicy,
    DistortionGreedyPolicy,
    EpisodeResult,
    SimReport,
    SlotLog,
    baseline_constant_channel,
    baseline_distortion_greedy,
    baseline_myopic,
    monte_carlo,
    run_episode,
)
from .solver import (
    JointState,
    SolvedPolicy,
    SolverError,
    UnsupportedTraceError,
    ValueTable,
    act_travelling,
    advance_state,
    complexity_report,
    solve,
    solve_convex,
    solve_linear,
    standard_dp_counts,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelFormatError",
    "ChannelModel",
    "ChannelState",
    "ChannelValidationError",
    "CostModel",
    "ConstantChannelPolicy",
    "DistortionGreedyPolicy",
    "EpisodeResult",
    "ExhaustiveSolution",
    "JointState",
    "MediaTrace",
    "Packet",
    "PriorityGraph",
    "SCENARIOS",
    "SimReport",
    "SlotLog",
    "SolvedPolicy",
    "SolverError",
    "StateTree",
    "ThresholdPolicy",
    "TraceFormatError",
    "TraceValidationError",
    "UnsupportedTraceError",
    "ValueTable",
    "act_single",
    "act_travelling",
    "advance_state",
    "ancestors",
    "averaged_channel",
    "baseline_constant_channel",
    "baseline_distortion_greedy",
    "baseline_myopic",
    "build_priority_graph",
    "build_state_tree",
    "complexity_report",
    "cost_convex",
    "cost_linear",
    "descendants",
    "disconnection_degree",
    "dump_channel",
    "dump_trace",
    "enumerate_single_schedules",
    "higher_priority",
    "load_channel",
    "load_trace",
    "marginal_cost",
    "monte_carlo",
    "reachable_states",
    "pg_to_dot",
    "priority_pairs",
    "roots",
    "save_scenario",
    "run_episode",
    "sample_path",
    "solve",
    "solve_convex",
    "solve_exhaustive",
    "solve_linear",
    "solve_single",
    "standard_dp_counts",
    "synth_trace",
    "standard_scenario",
    "tree_node_sets",
    "tree_to_dot",
    "volatile_scenario",
    "validate_channel",
    "validate_trace",
]
