"""Periodic quantum walks on Z^d: eigenvalue criteria, eigenprojections, simulation."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .criteria import (
    SpectralReport,
    StructuralResult,
    Verdict,
    candidate_spectrum,
    criterion_general,
    criterion_grover,
    eta_fourier,
    eta_general,
    eta_grover,
    lazy_both_eigen,
    product_dim_criterion,
    reflection_no_minus,
    scan_symbol,
    symmetric_sufficient,
)
from .deformation import MuPath, mu_path, sbj_coin, wkkk_coin
from .eigenspace import plus_eigenvector, project_plus, projector_spectral, wiener_check
from .lattice import LatticeState, distribution, evolve, fourier_oracle, initial_state, step, time_average
from .linalg import eig_normal, min_singular_value, projector_onto_span
from .torus import TorusGrid, in_singular_set
from .walks import (
    Coin,
    ResolutionOfUnity,
    StepSet,
    Walk,
    builtin_walk,
    fourier_coin,
    fourier_walk_2d,
    grover_coin,
    reflection_coin,
    symbol,
    validate_resolution,
)
