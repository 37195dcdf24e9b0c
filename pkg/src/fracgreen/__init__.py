"""Green-kernel solvers and verification harness for fractional Cauchy problems.

The suite covers the evolution D*^beta_t f = -a(-Lap)^{alpha/2} f + H(t,y,grad f)
with beta in (0,1) and alpha in (1,2]: special functions (specfn), stable
densities (stable), the two Green kernels evaluated by independent Fourier and
subordination routes (kernels), a spectral linear solver (linsolve), the
nonlinear Picard solver (hjb), a scaling-law verification harness (verify),
and a command-line front end (cli).
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    PrecisionError,
    StepSizeError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "PrecisionError",
    "StepSizeError",
    "__version__",
]
