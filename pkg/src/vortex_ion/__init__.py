"""Structured-light excitation of an electric-quadrupole transition in a trapped ion."""

__version__ = "0.1.0"

from .angular import HalfInt, clebsch_gordan, wigner3j, wigner_d  # noqa: E402
from .coupling import (  # noqa: E402
    CouplingResult,
    ExperimentGeometry,
    ZeemanTransition,
    gaussian_vortex_ratio,
    position_scan,
    rabi_frequency,
    selection_rule_table,
    thermal_average,
)
from .errors import ConfigError, DomainError, InsufficientDataError  # noqa: E402
from .lgbeam import LGMode, PolarizationState, lg_field, lg_gradient_tensor, mode_mixture  # noqa: E402
