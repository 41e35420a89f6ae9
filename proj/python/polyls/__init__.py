"""Level-set shape optimization on agglomerated polytopic meshes."""

from ._polyls import (
    ConfigError,
    ConvergenceStudy,
    ConvergenceTable,
    DegenerateIterate,
    Error,
    Mesh,
    OptimizationResult,
    OptimizerConfig,
    bernoulli_setup,
    convergence_rate,
    load_run_config,
    optimize,
    parse_run_config,
    shape_gradient_convergence,
    smiley_level_set,
    two_hole_level_set,
    unconstrained_setup,
)

HISTORY_FIELDS = (
    "iteration",
    "time",
    "objective",
    "grad_norm_sq",
    "dt",
    "accepted_steps",
    "zls_distance",
    "components_inside",
    "components_outside",
    "grad_phi_median",
    "elements",
)


def history_columns(result):
    """History of an OptimizationResult as a dict of numpy arrays, one per field."""
    import numpy as np

    return {f: np.array([getattr(r, f) for r in result.history]) for f in HISTORY_FIELDS}


__all__ = [name for name in dir() if not name.startswith("_")]
