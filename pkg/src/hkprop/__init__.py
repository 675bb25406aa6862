"""Semiclassical wavepacket propagation with Herman-Kluk type Fourier integral operators."""

from .complex_matrix import ConeMatrix, branch_sqrt_init, branch_sqrt_step, cone_check, cone_sqrt, sqrt_det, track_sqrt
from .config import RunConfig, load_config
from .errors import (
    BadShape, BoundaryMass, BoxTooSmall, ConfigError, ConvergenceFailure, GridMismatch, HKError,
    InconsistentSeed, MassLeakWarning, NonFiniteState, NotSymmetric, RealPartNotPD, SingularFrame,
    UnknownModel, UnresolvedWinding, ZeroCrossing,
)
from .experiments import ErrorRow, ErrorTable, run_compare, run_converge, run_identity, run_propagate, run_reference
from .fio import FbiField, auto_grid, fbi_analyze, fio_synthesize, identity_apply, propagate_hk, propagate_tga
from .flow import BundleGrid, TrajectoryBundle, TrajectoryRecord, evolve_bundle, integrate_trajectory, symplectic_defect
from .hamiltonian import HamiltonianModel, builtin, eval_h0, subquadratic_probe
from .hk_symbol import WidthPair, fga_symbol, hk_prefactor_closed, hk_prefactor_ode, tga_width, zmatrix, zmatrix_floor
from .reference import SpectralDomain, l2_error, observables, split_step_propagate
from .wavefunction import WaveFunction, coherent_state

__version__ = "0.1.0"
