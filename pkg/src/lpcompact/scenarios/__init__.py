"""Synthetic families, the two-point counterexample and the scenario runner."""
from .families import FAMILY_NAMES, dyadic_space, make_family
from .remark import (
    RemarkCheck, remark_family, remark_function, remark_scalar_image_check, unit_ball_grid,
)
from .runner import (
    EXIT_ERROR, EXIT_INVALID, EXIT_OK, EXIT_REFUSED, SCHEMA_VERSION, ScenarioError, ScenarioRun,
    load_scenario, run_scenario, validate,
)

__all__ = [
    "FAMILY_NAMES", "dyadic_space", "make_family", "RemarkCheck", "remark_family",
    "remark_function", "remark_scalar_image_check", "unit_ball_grid", "EXIT_ERROR",
    "EXIT_INVALID", "EXIT_OK", "EXIT_REFUSED", "SCHEMA_VERSION", "ScenarioError", "ScenarioRun",
    "load_scenario", "run_scenario", "validate",
]
