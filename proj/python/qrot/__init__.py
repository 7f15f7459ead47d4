"""Exact periodicity tools for quadratic torus rotations."""

from ._qrot import (
    ArithmeticError,
    BudgetError,
    ParseError,
    __version__,
    brute_period,
    cases,
    certify,
    decide,
    period_table,
    scan,
    scan_svg,
    step,
    thue_morse_check,
    verify,
)

__all__ = [
    "ArithmeticError",
    "BudgetError",
    "ParseError",
    "__version__",
    "brute_period",
    "cases",
    "certify",
    "decide",
    "period_table",
    "scan",
    "scan_svg",
    "step",
    "thue_morse_check",
    "verify",
]
