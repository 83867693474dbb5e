"""Quantum model of distributed-feedback fiber optical parametric oscillators.

Single gain-grating scattering, two-grating cavity composition, oscillation
thresholds, and vacuum-squeezing statistics, cross-checked against a direct
ODE integrator.
"""

from .cavity import (CavityIO, CavityMatrices, CavitySpec, DeterminantNotReal,
                     InternalFields, build_matrices, internal_fields,
                     io_map_4x4, io_matrices, threshold_determinant)
from .grating import (EigenStructure, EndpointScattering, GratingParams,
                      PumpConfig, ScatteringQuad, SpectrumPoint,
                      backward_recovery, eigen_structure, endpoint_scattering,
                      reflection_spectrum, scattering_general, scattering_rho0,
                      solve_grating, xi_from_pumps)
from .linalg import IllConditioned, SingularResolvent
from .oracle import convergence_order, integrate_transfer, transfer_to_scattering
from .qstats import (FieldProfile, NotReal, QuadratureStats, apply_loss,
                     field_profile, output_variances, quad_transform,
                     stats_from_couplings)
from .threshold import (NoFeedback, NoThresholdInRange, ThresholdMap,
                        ThresholdResult, find_threshold, threshold_map)

__version__ = "0.1.0"

__all__ = [
    "CavityIO", "CavityMatrices", "CavitySpec", "DeterminantNotReal",
    "EigenStructure", "EndpointScattering", "FieldProfile", "GratingParams",
    "IllConditioned", "InternalFields", "NoFeedback", "NoThresholdInRange",
    "NotReal", "PumpConfig", "QuadratureStats", "ScatteringQuad",
    "SingularResolvent", "SpectrumPoint", "ThresholdMap", "ThresholdResult",
    "apply_loss", "backward_recovery", "build_matrices", "convergence_order",
    "eigen_structure", "endpoint_scattering", "field_profile",
    "find_threshold", "integrate_transfer", "internal_fields", "io_map_4x4",
    "io_matrices", "output_variances", "quad_transform", "reflection_spectrum",
    "scattering_general", "scattering_rho0", "solve_grating",
    "stats_from_couplings", "threshold_determinant", "threshold_map",
    "transfer_to_scattering", "xi_from_pumps",
]
