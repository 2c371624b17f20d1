"""Replicator dynamics of green/brown technology choice with switching costs.

The package models two firms (or one population) repeatedly choosing
between a green and a brown technology under an exponential replicator
update in which changing technology incurs a one-time adjustment cost. It
locates and classifies equilibria, rasters basins of attraction, and
evaluates tax policies, with a config-driven command line (``replicator-lab``).
"""

from .basins import (
    BasinRaster,
    MapKind,
    Outcome,
    OutcomeCode,
    basin_areas,
    compute_basins,
    resolve_thread_count,
    simulate,
    staircase,
)
from .cli_io import (
    RunConfig,
    dispatch,
    main,
    parse_config,
    render_config,
    write_basin_ppm,
    write_csv,
)
from .equilibria import (
    Cycle2,
    Equilibrium,
    EquilibriumKind,
    edge_equilibria,
    edge_eta_plus,
    edge_eta_star,
    eta_in_limits,
    find_diagonal_equilibria,
    find_inner_equilibria,
    find_period2_diagonal,
    inner_equilibrium_1d,
    vertex_equilibria,
)
from .errors import (
    DomainError,
    InternalError,
    InvalidTaxError,
    KnifeEdgeError,
    NonConvergenceError,
    NotAnEquilibriumError,
    ParseError,
    ReplicatorLabError,
    UndefinedDirectionError,
    ValidationError,
)
from .model_core import (
    AdjustmentCosts,
    ModelParams,
    Params1D,
    PayoffMatrix,
    State,
    derived_coefficients,
    expected_profits,
    step_adjusted_1d,
    step_classic_1d,
    step_full,
)
from .policy import (
    StructureFlags,
    TaxMode,
    TaxThresholds,
    apply_brown_tax,
    feasible_scenarios,
    minimal_s9_tax,
    ordering_scenarios,
    required_transition_risk,
    tax_thresholds_1d,
)
from .stability import (
    BifurcationDirection,
    Classification,
    DiagonalStability,
    ScenarioId,
    StabilityReport,
    classify_scenario,
    diagonal_eigenvalues,
    discriminants,
    edge_eigenvalues,
    jacobian,
    jacobian_fd,
    stability_at,
    vertex_eigenvalues,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentCosts",
    "BasinRaster",
    "BifurcationDirection",
    "Classification",
    "Cycle2",
    "DiagonalStability",
    "DomainError",
    "Equilibrium",
    "EquilibriumKind",
    "InternalError",
    "InvalidTaxError",
    "KnifeEdgeError",
    "MapKind",
    "ModelParams",
    "NonConvergenceError",
    "NotAnEquilibriumError",
    "Outcome",
    "OutcomeCode",
    "Params1D",
    "ParseError",
    "PayoffMatrix",
    "ReplicatorLabError",
    "RunConfig",
    "ScenarioId",
    "StabilityReport",
    "State",
    "StructureFlags",
    "TaxMode",
    "TaxThresholds",
    "UndefinedDirectionError",
    "ValidationError",
    "apply_brown_tax",
    "basin_areas",
    "classify_scenario",
    "compute_basins",
    "derived_coefficients",
    "diagonal_eigenvalues",
    "discriminants",
    "dispatch",
    "edge_eigenvalues",
    "edge_equilibria",
    "edge_eta_plus",
    "edge_eta_star",
    "eta_in_limits",
    "expected_profits",
    "feasible_scenarios",
    "find_diagonal_equilibria",
    "find_inner_equilibria",
    "find_period2_diagonal",
    "inner_equilibrium_1d",
    "jacobian",
    "jacobian_fd",
    "main",
    "minimal_s9_tax",
    "ordering_scenarios",
    "parse_config",
    "render_config",
    "required_transition_risk",
    "resolve_thread_count",
    "simulate",
    "stability_at",
    "staircase",
    "step_adjusted_1d",
    "step_classic_1d",
    "step_full",
    "tax_thresholds_1d",
    "vertex_equilibria",
    "vertex_eigenvalues",
    "write_basin_ppm",
    "write_csv",
]
