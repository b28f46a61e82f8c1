"""Finite-element simulator for double-diffusive viscous fingering."""

from ._ddvf import (
    IoError,
    Mesh,
    Simulation,
    SolverError,
    State,
    SubdomainTag,
    ValidationError,
    bounds_report,
    compute_tau,
    crosswind_projector,
    element_peclet,
    flow_patch_test,
    interface_length,
    normalize_config,
    run_cli,
    sold_parallel_velocity,
    tau_crosswind,
    tau_iso,
    upwind_xi,
    verify,
    viscosity,
)

__all__ = [
    "IoError",
    "Mesh",
    "Simulation",
    "SolverError",
    "State",
    "SubdomainTag",
    "ValidationError",
    "bounds_report",
    "compute_tau",
    "crosswind_projector",
    "element_peclet",
    "flow_patch_test",
    "interface_length",
    "normalize_config",
    "run_cli",
    "sold_parallel_velocity",
    "tau_crosswind",
    "tau_iso",
    "upwind_xi",
    "verify",
    "viscosity",
]
