"""Two-strategy evolutionary games on periodic lattices.

Exact continuous-time simulation (three interchangeable constructions),
the mean-field replicator ODE, the one-dimensional interface process
with drift estimation, payoff-matrix predicates and game taxonomy,
phase-diagram sweeps, and deterministic CSV/PGM output.
"""
from .core import (
    Configuration,
    LatticeSpec,
    Nature,
    PayoffMatrix,
    StrategyNature,
    local_payoff,
    neighbor_offsets,
    neighbor_strategy_counts,
    neighborhood_size,
    neighbors,
    strategy_nature,
)
from .meanfield import (
    InteriorFixedPoint,
    OdeTrajectory,
    ReplicatorRegime,
    integrate_replicator,
    interior_fixed_point,
    replicator_regime,
    replicator_rhs,
)
from .dynamics import (
    SNAPSHOT_POLICIES,
    WORKERS_ENV,
    BernoulliInit,
    EventStream,
    ExplicitInit,
    HalfspaceInit,
    SimParams,
    SingleSiteInit,
    Trajectory,
    UniformInit,
    biased_voter_rate,
    build_initial,
    flip_rate,
    mu_bounds,
    rate_field,
    rng_stream,
    run_biased_voter,
    run_direct,
    run_ensemble,
    run_graphical,
    run_graphical_negative,
    worker_count,
)
from .boundary1d import (
    BoundaryState,
    DriftEstimate,
    DriftResult,
    GAP_EQ1,
    GAP_GE2,
    InterfaceSeries,
    drift_closed_form,
    estimate_leftmost_drift,
    extract_boundaries,
    interface_count_series,
)
from .analysis import (
    ADVISORY_NOTES,
    DEGENERATE_ORDERING,
    EmpiricalOutcome,
    GameClass,
    HeterozygosityEstimate,
    OutcomeThresholds,
    RegionCell,
    RegionReport,
    c_factor,
    classify_game,
    clustering_set_predicate,
    coex_triangle_predicate,
    empirical_outcome,
    heterozygosity,
    interface_drift_win_predicate,
    is_sparse,
    payoff_domination_predicate,
    sweep_phase_diagram,
)
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .outputs import (
    SWEEP_HEADER,
    write_drift_csv,
    write_replicator_csv,
    write_spacetime_pgm,
    write_sweep_csv,
    write_timeseries_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliInit", "BoundaryState", "Configuration", "ConfigError",
    "DriftEstimate", "DriftResult", "EmpiricalOutcome", "EventStream",
    "ExplicitInit", "GAP_EQ1", "GAP_GE2", "GameClass", "HalfspaceInit",
    "HeterozygosityEstimate", "InteriorFixedPoint", "InterfaceSeries",
    "LatticeSpec", "Nature", "OdeTrajectory", "OutcomeThresholds",
    "PayoffMatrix", "RegionCell", "RegionReport", "ReplicatorRegime",
    "RunConfig", "SimParams", "SingleSiteInit", "StrategyNature",
    "ADVISORY_NOTES", "DEGENERATE_ORDERING", "SWEEP_HEADER",
    "SNAPSHOT_POLICIES", "Trajectory", "UniformInit", "WORKERS_ENV",
    "biased_voter_rate", "build_initial",
    "c_factor", "classify_game", "clustering_set_predicate",
    "coex_triangle_predicate", "drift_closed_form", "empirical_outcome",
    "estimate_leftmost_drift", "extract_boundaries", "flip_rate",
    "heterozygosity", "integrate_replicator", "interface_count_series",
    "interface_drift_win_predicate", "interior_fixed_point", "is_sparse",
    "local_payoff", "mu_bounds", "neighbor_offsets",
    "neighbor_strategy_counts", "neighborhood_size", "neighbors",
    "parse_config", "payoff_domination_predicate", "rate_field",
    "replicator_regime", "replicator_rhs", "rng_stream",
    "run_biased_voter", "run_direct", "run_ensemble", "run_graphical",
    "run_graphical_negative", "serialize_config", "strategy_nature",
    "sweep_phase_diagram", "worker_count", "write_drift_csv",
    "write_replicator_csv", "write_spacetime_pgm", "write_sweep_csv",
    "write_timeseries_csv",
]
