"""Dirac-Kronig-Penney bands, relativistic Tamm states and their fibre Bragg grating realization."""

from .bands import BandStructure, bloch_momentum, dispersion_rhs, find_bands, nonrel_dispersion_rhs
from .builders import (
    ApodizationSpec,
    KPGratingSpec,
    TammGratingSpec,
    UniformGratingSpec,
    build_kp_grating,
    build_tamm_grating,
    build_uniform_grating,
)
from .core import (
    ComplexAmplitudePair,
    CotangentPole,
    DegenerateBarrier,
    DiracFBGError,
    DiracParams,
    IllConditioned,
    LatticeTooShort,
    ResolutionTooCoarse,
    kappa_of,
)
from .tamm import TammState, find_tamm_states, tamm_residual
from .tmm import (
    GratingProfile,
    PhaseSlip,
    Segment,
    SpectralResponse,
    scattering,
    segment_matrix,
    slip_matrix,
    sweep,
    total_matrix,
)
from .units import PhysicalScales, derive_scales, detuning_to_frequency

__version__ = "0.1.0"
