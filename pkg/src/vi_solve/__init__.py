"""Adaptive extra-gradient solvers for monotone variational inequalities."""

from .core import (
    EUCLIDEAN,
    NEGATIVE_ENTROPY,
    Ball,
    Box,
    CallbackOperator,
    ConfigurationError,
    FreeSpace,
    LinearSkewOperator,
    MirrorMap,
    NonFiniteError,
    OracleUnsupportedError,
    Simplex,
    StochasticOracle,
    UnboundedSubproblemError,
    VISolveError,
    linear_minimize,
    project,
    project_diag,
    prox_step,
    prox_step_diag,
    sample_minibatch,
)
from .problems import BilinearInstance, default_domains, gen_bilinear
from .solvers import ALGORITHMS, SolverConfig, Trajectory, run

__version__ = "0.1.0"
