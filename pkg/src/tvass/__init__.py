"""Two-counter vector addition systems with zero-tests on the first counter."""

from .core import (
    TST,
    Configuration,
    Run,
    Transition,
    Tvass,
    UsageError,
    apply_trace,
    conf,
    is_cycle,
    is_path,
    mirror,
    reverse,
    run_of,
    step,
)
from .decide import (
    Lasso,
    Options,
    Outcome,
    UnboundedWitness,
    Verdict,
    bounded,
    check_certificate,
    extract_lps,
    oracle_reach,
    reach,
    terminates,
)
from .formats import parse_model, print_model, random_instance
from .lps import CountedLps, LinearPathScheme, build_system, lps_reach

__all__ = [
    "TST",
    "Configuration",
    "CountedLps",
    "Lasso",
    "LinearPathScheme",
    "Options",
    "Outcome",
    "Run",
    "Transition",
    "Tvass",
    "UnboundedWitness",
    "UsageError",
    "Verdict",
    "apply_trace",
    "bounded",
    "build_system",
    "check_certificate",
    "conf",
    "extract_lps",
    "is_cycle",
    "is_path",
    "lps_reach",
    "mirror",
    "oracle_reach",
    "parse_model",
    "print_model",
    "random_instance",
    "reach",
    "reverse",
    "run_of",
    "step",
    "terminates",
]
