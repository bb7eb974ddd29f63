"""Sup and inf envelopes of a function over the level sets of another, on finite lattices."""

from .certify import (CertReport, CheckResult, ReportConfig, check_infdef, check_monotone,
                      check_sandwich, check_supdef, full_report, semicontinuity_probe)
from .config import RunConfig, preset
from .envelope import (EnvelopeTable, dual_check, envelope_table, hahn_lower, hahn_upper,
                       inf_env, s_grid_select, sup_env)
from .extreal import ExtReal
from .funcspec import FuncExpr, builtin, evaluate, parse, resolve, to_text
from .grid import SampleGrid, hausdorff, make_grid, pk_limits, sublevel, superlevel
from .oracle import brute_inf, brute_sup, equivalence_suite

__version__ = "0.1.0"

__all__ = [
    "CertReport", "CheckResult", "EnvelopeTable", "ExtReal", "FuncExpr", "ReportConfig",
    "RunConfig", "SampleGrid", "brute_inf", "brute_sup", "builtin", "check_infdef",
    "check_monotone", "check_sandwich", "check_supdef", "dual_check", "envelope_table",
    "equivalence_suite", "evaluate", "full_report", "hahn_lower", "hahn_upper",
    "hausdorff", "inf_env", "make_grid", "parse", "pk_limits", "preset", "resolve",
    "s_grid_select", "semicontinuity_probe", "sublevel", "sup_env", "superlevel", "to_text",
]
