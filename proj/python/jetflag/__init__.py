"""Jet, flag-jet and Cauchy-data coordinate calculus."""

from ._jetflag import (  # noqa: F401
    Expr,
    JetflagError,
    block_partitions,
    cauchy_from_profiles,
    cauchy_roundtrip_check,
    chart_coordinates,
    columbus_solve,
    diagram_check,
    euler_lagrange,
    flag_dim,
    flag_I_to_II,
    flag_II_to_I,
    inner_derivative_expand,
    involutivity_equations,
    is_involutive,
    normal_recover,
    prolong_section,
    run_cli,
    transversality,
)

__version__ = "0.1.0"


def parse(text):
    return Expr(text)
