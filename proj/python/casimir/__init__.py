"""Sphere-plate Casimir forces, experiment helpers and the analysis pipeline."""

from ._casimir import (
    ConfigError,
    MaterialModel,
    NumericalFault,
    casimir_force,
    combine_errors,
    commands,
    de_force,
    electrostatic_force,
    fit_harmonics,
    matsubara_frequency,
    median_estimate,
    min_detectable_force,
    patch_force,
    pfa_force,
    run_command,
    synthesize_harmonics,
    theta_from_forces,
)

__all__ = [
    "ConfigError",
    "MaterialModel",
    "NumericalFault",
    "casimir_force",
    "combine_errors",
    "commands",
    "de_force",
    "electrostatic_force",
    "fit_harmonics",
    "matsubara_frequency",
    "median_estimate",
    "min_detectable_force",
    "patch_force",
    "pfa_force",
    "run_command",
    "synthesize_harmonics",
    "theta_from_forces",
]
