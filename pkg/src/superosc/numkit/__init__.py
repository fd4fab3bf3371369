"""Numerical substrate: ODE integration, special functions, finite differences, expressions."""

from .expr import Expr, ParseError, diff_expr, parse_expr
from .fd import FiniteDifferenceError, fd_derivative, fd_gradient
from .ode import IntegrationError, OdeProblem, Trajectory, integrate_ode
from .special import (
    HypergeometricDomainError,
    PowerDomainError,
    binom,
    erf_fn,
    hyp2f1,
    hyp2f1_complement,
    poch,
    real_power,
)

__all__ = [
    "Expr",
    "ParseError",
    "diff_expr",
    "parse_expr",
    "FiniteDifferenceError",
    "fd_derivative",
    "fd_gradient",
    "IntegrationError",
    "OdeProblem",
    "Trajectory",
    "integrate_ode",
    "HypergeometricDomainError",
    "PowerDomainError",
    "binom",
    "erf_fn",
    "hyp2f1",
    "hyp2f1_complement",
    "poch",
    "real_power",
]
