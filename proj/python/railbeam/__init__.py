from ._railbeam import (
    BeamParams,
    ConfigError,
    Convention,
    Error,
    FemOperators,
    SolverError,
    admissible_c_max,
    convergence_order,
    energy_norm_sq,
    lyapunov_value,
    modal_solution,
    run_command,
    select_constants,
    simulate_config,
)

__all__ = [
    "BeamParams",
    "ConfigError",
    "Convention",
    "Error",
    "FemOperators",
    "SolverError",
    "admissible_c_max",
    "convergence_order",
    "energy_norm_sq",
    "lyapunov_value",
    "modal_solution",
    "run_command",
    "select_constants",
    "simulate_config",
]
