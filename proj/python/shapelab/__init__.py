"""Penalized spectral shape functionals on planar star domains."""

from ._core import (  # noqa: F401
    EnergyParams,
    Error,
    InvalidDomain,
    OptimizerConfig,
    SolverError,
    StarDomain,
    ValidationError,
    __version__,
    area,
    barycenter,
    eigenvalues,
    evaluate,
    hadamard,
    minimize,
    perimeter,
    run_cli,
    torsion,
)
