"""Anderson acceleration AA(m), optimized damping and composed accelerators.

Solvers are named by spec strings such as ``"AA(20)"``, ``"AAoptD(20,AA(1))"``
or ``"ADD(AA(20),AA(1))"``.

>>> import anderkit
>>> out = anderkit.solve("AA(20,AA(1))", anderkit.bratu(N=16))
>>> out["termination"]
'converged'
"""

from ._anderkit import (
    ConfigError,
    IoError,
    Problem,
    SpecParseError,
    affine,
    bratu,
    canonical_spec,
    check,
    convdiff,
    least_squares,
    memory_footprint,
    optimized_beta,
    run_config,
    solve,
    tridiag,
)

__all__ = [
    "ConfigError",
    "IoError",
    "Problem",
    "SpecParseError",
    "affine",
    "bratu",
    "canonical_spec",
    "check",
    "convdiff",
    "least_squares",
    "memory_footprint",
    "optimized_beta",
    "run_config",
    "solve",
    "tridiag",
]
